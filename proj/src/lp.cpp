#include "gridrisk/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridrisk/errors.hpp"

namespace gridrisk::lp {

namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kBlandTrigger = 50;  // consecutive degenerate pivots
constexpr int kRefactorEvery = 150;

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

// Bounded-variable primal simplex over the standard form
//   A x = b,  lo <= x <= up,
// with columns laid out as [structural | slacks | artificials].
class Simplex {
public:
    Simplex(const LpProblem& p) : n_struct_(p.num_vars()) {
        const std::size_t me = p.eq_rhs.size();
        const std::size_t mi = p.ineq_rhs.size();
        m_ = me + mi;
        n_ = n_struct_ + mi;  // slacks for inequality rows

        at_ = Mat(n_ + m_, m_);  // column-major access: row j = column j of A
        b_ = Vec(m_);
        lo_ = Vec(n_ + m_);
        up_ = Vec(n_ + m_);
        cost_ = Vec(n_ + m_, 0.0);

        for (std::size_t j = 0; j < n_struct_; ++j) {
            cost_[j] = p.objective[j];
            lo_[j] = p.lower[j];
            up_[j] = p.upper[j];
        }
        for (std::size_t i = 0; i < me; ++i) {
            b_[i] = p.eq_rhs[i];
            for (std::size_t j = 0; j < n_struct_; ++j) at_(j, i) = p.eq_matrix(i, j);
        }
        for (std::size_t i = 0; i < mi; ++i) {
            const std::size_t row = me + i;
            b_[row] = p.ineq_rhs[i];
            for (std::size_t j = 0; j < n_struct_; ++j) at_(j, row) = p.ineq_matrix(i, j);
            const std::size_t slack = n_struct_ + i;
            at_(slack, row) = 1.0;
            lo_[slack] = 0.0;
            up_[slack] = kInf;
        }
        // Artificial columns appended after slacks; entries set at start().
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t art = n_ + i;
            lo_[art] = 0.0;
            up_[art] = kInf;
        }
    }

    LpSolution run() {
        start();

        // Phase 1: minimize total artificial mass.
        Vec phase1_cost(n_ + m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) phase1_cost[n_ + i] = 1.0;
        LpSolution sol;
        if (!iterate(phase1_cost, /*phase1=*/true)) {
            throw NumericError("solve_lp: phase 1 reported unbounded");
        }
        refactorize();
        double infeas = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= static_cast<int>(n_)) infeas += std::max(xb_[i], 0.0);
        if (infeas > 1e-7) {
            sol.status = LpStatus::Infeasible;
            // Farkas-style certificate: phase-1 duals weight a set of rows
            // whose combination cannot be satisfied within the bounds.
            Vec y = dual(phase1_cost);
            sol.farkas = y;
            for (std::size_t i = 0; i < m_; ++i)
                if (std::abs(y[i]) > 1e-9) sol.infeasible_rows.push_back(static_cast<int>(i));
            sol.iterations = iterations_;
            return sol;
        }
        pivot_out_artificials();
        for (std::size_t i = 0; i < m_; ++i) up_[n_ + i] = 0.0;  // pin artificials

        // Phase 2: the real objective.
        if (!iterate(cost_, /*phase1=*/false)) {
            sol.status = LpStatus::Unbounded;
            sol.ray = unbounded_ray_;
            sol.iterations = iterations_;
            return sol;
        }
        refactorize();

        sol.status = LpStatus::Optimal;
        sol.x = Vec(n_struct_);
        Vec full = full_solution();
        for (std::size_t j = 0; j < n_struct_; ++j) sol.x[j] = full[j];
        sol.objective = 0.0;
        for (std::size_t j = 0; j < n_struct_; ++j) sol.objective += cost_[j] * sol.x[j];
        sol.duals = dual(cost_);
        sol.iterations = iterations_;
        check_solution(full);
        return sol;
    }

private:
    void start() {
        state_.assign(n_ + m_, VarState::AtLower);
        for (std::size_t j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j])) {
                state_[j] = VarState::AtLower;
            } else if (std::isfinite(up_[j])) {
                state_[j] = VarState::AtUpper;
            } else {
                state_[j] = VarState::FreeZero;
            }
        }
        // Residual of the nonbasic point decides artificial column signs.
        Vec r = b_;
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = nonbasic_value(j);
            if (v == 0.0) continue;
            for (std::size_t i = 0; i < m_; ++i) r[i] -= at_(j, i) * v;
        }
        basis_.resize(m_);
        xb_.assign(m_, 0.0);
        binv_ = Mat::identity(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const double sign = (r[i] < 0.0) ? -1.0 : 1.0;
            at_(n_ + i, i) = sign;
            basis_[i] = static_cast<int>(n_ + i);
            state_[n_ + i] = VarState::Basic;
            xb_[i] = std::abs(r[i]);
            binv_(i, i) = sign;
        }
        iterations_ = 0;
    }

    double nonbasic_value(std::size_t j) const {
        switch (state_[j]) {
            case VarState::AtLower: return lo_[j];
            case VarState::AtUpper: return up_[j];
            default: return 0.0;
        }
    }

    Vec dual(const Vec& cost) const {
        Vec y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = binv_.row_ptr(i);
            for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[k];
        }
        return y;
    }

    double reduced_cost(const Vec& cost, const Vec& y, std::size_t j) const {
        double d = cost[j];
        const double* col = at_.row_ptr(j);
        for (std::size_t i = 0; i < m_; ++i) d -= y[i] * col[i];
        return d;
    }

    // Returns false on unbounded (phase 2 only).
    bool iterate(const Vec& cost, bool phase1) {
        int degenerate_streak = 0;
        bool bland = false;
        const int max_iter = 20000 + 200 * static_cast<int>(m_);
        for (;;) {
            if (iterations_ > max_iter)
                throw NumericError("solve_lp: iteration limit exceeded (" +
                                   std::to_string(max_iter) + ")");
            const Vec y = dual(cost);

            // Pricing. Dantzig by default, Bland when degeneracy persists.
            int entering = -1;
            double entering_dir = 0.0;
            double best = 0.0;
            for (std::size_t j = 0; j < n_ + m_; ++j) {
                if (state_[j] == VarState::Basic) continue;
                if (lo_[j] == up_[j]) continue;  // fixed (includes pinned artificials)
                if (!phase1 && j >= n_) continue;
                const double d = reduced_cost(cost, y, j);
                double dir = 0.0;
                if (state_[j] == VarState::AtLower && d < -kOptTol) dir = 1.0;
                else if (state_[j] == VarState::AtUpper && d > kOptTol) dir = -1.0;
                else if (state_[j] == VarState::FreeZero && std::abs(d) > kOptTol)
                    dir = d > 0.0 ? -1.0 : 1.0;
                if (dir == 0.0) continue;
                if (bland) {
                    entering = static_cast<int>(j);
                    entering_dir = dir;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    entering = static_cast<int>(j);
                    entering_dir = dir;
                }
            }
            if (entering < 0) return true;  // optimal for this phase

            // Direction through the basis.
            const double* col = at_.row_ptr(static_cast<std::size_t>(entering));
            Vec w(m_, 0.0);
            for (std::size_t i = 0; i < m_; ++i) {
                const double* row = binv_.row_ptr(i);
                double acc = 0.0;
                for (std::size_t k = 0; k < m_; ++k) acc += row[k] * col[k];
                w[i] = acc;
            }

            // Ratio test (basic vars move by -dir*w per unit step).
            double step = kInf;
            int leaving = -1;       // row index
            double leaving_bound = 0.0;
            const double span = up_[entering] - lo_[entering];
            bool bound_flip = std::isfinite(span) && span < step;
            if (bound_flip) step = span;
            for (std::size_t i = 0; i < m_; ++i) {
                const double wi = entering_dir * w[i];
                const int bj = basis_[i];
                double ratio = kInf;
                double bound = 0.0;
                if (wi > kPivotTol && std::isfinite(lo_[bj])) {
                    ratio = (xb_[i] - lo_[bj]) / wi;
                    bound = lo_[bj];
                } else if (wi < -kPivotTol && std::isfinite(up_[bj])) {
                    ratio = (xb_[i] - up_[bj]) / wi;
                    bound = up_[bj];
                } else {
                    continue;
                }
                ratio = std::max(ratio, 0.0);
                const bool better =
                    ratio < step - 1e-12 ||
                    (ratio < step + 1e-12 && leaving >= 0 &&
                     (bland ? bj < basis_[leaving] : std::abs(wi) > std::abs(entering_dir * w[leaving])));
                if (better) {
                    step = ratio;
                    leaving = static_cast<int>(i);
                    leaving_bound = bound;
                    bound_flip = false;
                }
            }
            if (!std::isfinite(step)) {
                if (phase1) throw NumericError("solve_lp: unbounded phase-1 step");
                // Improving ray for the unbounded certificate.
                unbounded_ray_.assign(n_struct_, 0.0);
                if (static_cast<std::size_t>(entering) < n_struct_)
                    unbounded_ray_[entering] = entering_dir;
                for (std::size_t i = 0; i < m_; ++i)
                    if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_struct_)
                        unbounded_ray_[basis_[i]] = -entering_dir * w[i];
                return false;
            }

            ++iterations_;
            degenerate_streak = (step <= 1e-11) ? degenerate_streak + 1 : 0;
            if (degenerate_streak >= kBlandTrigger) bland = true;
            if (step > 1e-11) bland = false;

            if (bound_flip) {
                for (std::size_t i = 0; i < m_; ++i) xb_[i] -= entering_dir * w[i] * step;
                state_[entering] = (state_[entering] == VarState::AtLower) ? VarState::AtUpper
                                                                           : VarState::AtLower;
                continue;
            }

            // Pivot: entering becomes basic in the leaving row.
            const auto r = static_cast<std::size_t>(leaving);
            const int out = basis_[r];
            const double entering_from = nonbasic_value(static_cast<std::size_t>(entering));
            for (std::size_t i = 0; i < m_; ++i)
                if (i != r) xb_[i] -= entering_dir * w[i] * step;
            xb_[r] = entering_from + entering_dir * step;

            const double wr = w[r];
            double* pivot_row = binv_.row_ptr(r);
            for (std::size_t k = 0; k < m_; ++k) pivot_row[k] /= wr;
            for (std::size_t i = 0; i < m_; ++i) {
                if (i == r) continue;
                const double f = w[i];
                if (f == 0.0) continue;
                double* row = binv_.row_ptr(i);
                for (std::size_t k = 0; k < m_; ++k) row[k] -= f * pivot_row[k];
            }

            basis_[r] = entering;
            state_[entering] = VarState::Basic;
            state_[out] = (leaving_bound == lo_[out]) ? VarState::AtLower : VarState::AtUpper;
            if (static_cast<std::size_t>(out) >= n_) up_[out] = 0.0;  // artificials never re-enter

            if (iterations_ % kRefactorEvery == 0) refactorize();
        }
    }

    // Degenerate artificials are swapped for structural columns where
    // possible; redundant rows keep a zero artificial pinned in the basis.
    void pivot_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < static_cast<int>(n_)) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                if (state_[j] == VarState::Basic || lo_[j] == up_[j]) continue;
                const double* col = at_.row_ptr(j);
                const double* row = binv_.row_ptr(i);
                double wr = 0.0;
                for (std::size_t k = 0; k < m_; ++k) wr += row[k] * col[k];
                if (std::abs(wr) <= 1e-7) continue;

                Vec w(m_, 0.0);
                for (std::size_t ii = 0; ii < m_; ++ii) {
                    const double* rr = binv_.row_ptr(ii);
                    double acc = 0.0;
                    for (std::size_t k = 0; k < m_; ++k) acc += rr[k] * col[k];
                    w[ii] = acc;
                }
                const int out = basis_[i];
                double* pivot_row = binv_.row_ptr(i);
                for (std::size_t k = 0; k < m_; ++k) pivot_row[k] /= w[i];
                for (std::size_t ii = 0; ii < m_; ++ii) {
                    if (ii == i) continue;
                    const double f = w[ii];
                    if (f == 0.0) continue;
                    double* rr = binv_.row_ptr(ii);
                    for (std::size_t k = 0; k < m_; ++k) rr[k] -= f * pivot_row[k];
                }
                const double entering_value = nonbasic_value(j);
                basis_[i] = static_cast<int>(j);
                state_[j] = VarState::Basic;
                state_[out] = VarState::AtLower;
                xb_[i] = entering_value;  // degenerate swap, value unchanged (0)
                break;
            }
        }
        refactorize();
    }

    void refactorize() {
        Mat basis_mat(m_, m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const double* col = at_.row_ptr(static_cast<std::size_t>(basis_[i]));
            for (std::size_t r = 0; r < m_; ++r) basis_mat(r, i) = col[r];
        }
        binv_ = gauss_jordan_inverse(basis_mat);
        // Recompute basic values from the nonbasic point.
        Vec rhs = b_;
        for (std::size_t j = 0; j < n_ + m_; ++j) {
            if (state_[j] == VarState::Basic) continue;
            const double v = nonbasic_value(j);
            if (v == 0.0) continue;
            const double* col = at_.row_ptr(j);
            for (std::size_t i = 0; i < m_; ++i) rhs[i] -= col[i] * v;
        }
        for (std::size_t i = 0; i < m_; ++i) {
            const double* row = binv_.row_ptr(i);
            double acc = 0.0;
            for (std::size_t k = 0; k < m_; ++k) acc += row[k] * rhs[k];
            xb_[i] = acc;
        }
    }

    Vec full_solution() const {
        Vec x(n_ + m_);
        for (std::size_t j = 0; j < n_ + m_; ++j) x[j] = nonbasic_value(j);
        for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = xb_[i];
        return x;
    }

    void check_solution(const Vec& full) const {
        for (std::size_t j = 0; j < n_ + m_; ++j) {
            if (full[j] < lo_[j] - kFeasTol || full[j] > up_[j] + kFeasTol)
                throw NumericError("solve_lp: bound violated beyond tolerance at column " +
                                   std::to_string(j));
        }
        for (std::size_t i = 0; i < m_; ++i) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n_ + m_; ++j) lhs += at_(j, i) * full[j];
            if (std::abs(lhs - b_[i]) > 1e-6)
                throw NumericError("solve_lp: row residual beyond tolerance at row " +
                                   std::to_string(i));
        }
    }

    std::size_t n_struct_;
    std::size_t m_ = 0;
    std::size_t n_ = 0;  // structural + slack columns
    Mat at_;             // (n_+m_) x m_, row j = column j of standard-form A
    Vec b_, lo_, up_, cost_;
    std::vector<VarState> state_;
    std::vector<int> basis_;
    Vec xb_;
    Mat binv_;
    Vec unbounded_ray_;
    int iterations_ = 0;
};

}  // namespace

void LpProblem::validate() const {
    const std::size_t n = num_vars();
    if (lower.size() != n || upper.size() != n)
        throw ValidationError("lp: bounds size mismatch");
    for (std::size_t j = 0; j < n; ++j)
        if (lower[j] > upper[j])
            throw ValidationError("lp: lower > upper at variable " + std::to_string(j));
    if (eq_rhs.size() != eq_matrix.rows() || (eq_matrix.rows() > 0 && eq_matrix.cols() != n))
        throw ValidationError("lp: equality block dimension mismatch");
    if (ineq_rhs.size() != ineq_matrix.rows() ||
        (ineq_matrix.rows() > 0 && ineq_matrix.cols() != n))
        throw ValidationError("lp: inequality block dimension mismatch");
}

LpSolution solve_lp(const LpProblem& p) {
    p.validate();
    Simplex s(p);
    return s.run();
}

}  // namespace gridrisk::lp
