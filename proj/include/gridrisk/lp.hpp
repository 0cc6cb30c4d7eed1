#pragma once

#include <limits>
#include <vector>

#include "gridrisk/linalg.hpp"

namespace gridrisk::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

// min c'x  s.t.  A_eq x = b_eq,  A_ineq x <= b_ineq,  lower <= x <= upper.
// Bounds may be +-inf.
struct LpProblem {
    Vec objective;
    Mat eq_matrix;
    Vec eq_rhs;
    Mat ineq_matrix;
    Vec ineq_rhs;
    Vec lower;
    Vec upper;

    std::size_t num_vars() const { return objective.size(); }
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    Vec x;                 // primal point (valid when Optimal)
    double objective = 0;  // c'x at x
    Vec duals;             // row multipliers, eq rows then ineq rows (Optimal)
    Vec farkas;            // row multipliers certifying infeasibility (Infeasible)
    std::vector<int> infeasible_rows;  // rows with nonzero Farkas weight
    Vec ray;               // improving unbounded direction (Unbounded)
    int iterations = 0;
};

// Dense bounded-variable revised simplex, two-phase, deterministic pivoting
// (Dantzig pricing with a Bland fallback for anti-cycling). Primal
// feasibility within 1e-8, optimality certified by reduced costs within 1e-9.
LpSolution solve_lp(const LpProblem& p);

}  // namespace gridrisk::lp
