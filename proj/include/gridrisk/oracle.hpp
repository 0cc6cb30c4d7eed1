#pragma once

#include <optional>
#include <vector>

#include "gridrisk/grid.hpp"
#include "gridrisk/linalg.hpp"
#include "gridrisk/scenario.hpp"

namespace gridrisk::oracle {

struct DispatchSolution {
    Vec dispatch;   // per generator index, MW (thermal and wind)
    Vec shed;       // per bus, MW
    Vec angles;     // per bus, rad, reference bus at 0
    Vec flows;      // per branch, MW
    double objective = 0.0;  // $

    // Checks nodal balance, generator bounds against the commitment, shed
    // bounds and flow limits; throws NumericError on the first violation.
    void check_feasible(const grid::GridTopology& g, const std::vector<double>& bus_loads,
                        const std::vector<double>& wind_available,
                        const std::vector<char>& committed) const;
};

struct CommitmentSchedule {
    // on[g][t] over generator indices; wind rows unused (always dispatchable).
    std::vector<std::vector<char>> on;
    bool adequate = true;  // false when committed capacity misses the target somewhere

    bool satisfies_min_up_down(const grid::GridTopology& g) const;
};

struct QoiVector {
    Vec zone_thermal;  // MW per zone
    Vec zone_shed;     // MW per zone
    double system_thermal = 0.0;
    double system_shed = 0.0;
};

struct HorizonSolution {
    CommitmentSchedule commitment;
    std::vector<DispatchSolution> hours;
    std::vector<QoiVector> qois;
    double objective = 0.0;
};

struct OracleOptions {
    double voll = 1000.0;          // $/MWh shed penalty
    double reserve_margin = 0.1;   // fraction on system net load
    scenario::WindCurve wind_curve{3.0, 12.0, 25.0, 1.0};  // rated_power set per zone
};

// Previous-hour state for ramp coupling: units on in both hours are held to
// |p(t) - p(t-1)| <= ramp_limit; starting units move freely in [p_min, p_max].
struct RampLink {
    Vec dispatch;             // per generator index, MW
    std::vector<char> on;     // per generator index
};

// Reusable single-period DC-OPF solver. Precomputes the PTDF once per grid;
// individual solves are independent and safe to run concurrently.
class OpfSolver {
public:
    OpfSolver(const grid::GridTopology& g, double voll);

    // committed: per generator index (wind entries ignored).
    DispatchSolution solve(const std::vector<double>& bus_loads,
                           const std::vector<double>& wind_available,
                           const std::vector<char>& committed,
                           const std::optional<RampLink>& prev = std::nullopt) const;

    const grid::GridTopology& topology() const { return *grid_; }

private:
    const grid::GridTopology* grid_;
    double voll_;
    grid::DcMatrices dc_;
    Mat ptdf_;          // branches x (n-1) reduced injections -> flows
    Mat chol_b_;        // Cholesky factor of reduced B for angle recovery
};

// Priority-list commitment: merit order by cost until committed capacity
// reaches (1+reserve_margin) * system net load, then a repair pass enforcing
// min_up/min_down by extending runs (never de-committing).
CommitmentSchedule commit_units(const grid::GridTopology& g, const Mat& zonal_net_load,
                                double reserve_margin);

// Zonal wind power for one hour of a scenario sample: speed through the power
// curve with rated_power scaled to the zone's installed wind capacity.
Vec zonal_wind_power(const grid::GridTopology& g, const Vec& zonal_wind_speed,
                     const scenario::WindCurve& curve);

// Full hours-ahead oracle for one scenario sample (T x M zonal values, loads
// then wind speeds). Disaggregates, commits, and solves hour by hour with
// ramp coupling.
HorizonSolution solve_multiperiod(const OpfSolver& solver, const Mat& sample,
                                  const OracleOptions& opt);

QoiVector extract_qoi(const DispatchSolution& sol, const grid::GridTopology& g);

}  // namespace gridrisk::oracle
