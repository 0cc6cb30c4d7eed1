#pragma once

#include <cstddef>
#include <vector>

namespace gridrisk {

using Vec = std::vector<double>;

// Dense row-major matrix. Small sizes only (a few hundred rows), so no
// attempt at blocking or expression templates.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    Vec& data() { return data_; }
    const Vec& data() const { return data_; }

    static Mat identity(std::size_t n);

    bool operator==(const Mat& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, const Vec& x);
Mat transpose(const Mat& a);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Throws NumericError naming the failing pivot if the matrix is not PD.
Mat cholesky(const Mat& a);

// Solves A x = b given the Cholesky factor L of A.
Vec cholesky_solve(const Mat& chol_lower, const Vec& b);

// Inverse of an SPD matrix via its Cholesky factor.
Mat spd_inverse(const Mat& a);

// General dense inverse (Gauss-Jordan with partial pivoting). Used to
// refactorize simplex basis inverses. Throws NumericError on singularity.
Mat gauss_jordan_inverse(const Mat& a);

double max_abs_diff(const Mat& a, const Mat& b);

// Pearson correlation of two equally sized series.
double pearson(const Vec& x, const Vec& y);

}  // namespace gridrisk
