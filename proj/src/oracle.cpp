#include "gridrisk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridrisk/errors.hpp"
#include "gridrisk/lp.hpp"

namespace gridrisk::oracle {

using grid::GenKind;
using grid::GridTopology;

void DispatchSolution::check_feasible(const GridTopology& g, const std::vector<double>& bus_loads,
                                      const std::vector<double>& wind_available,
                                      const std::vector<char>& committed) const {
    const double tol = 1e-6;
    for (std::size_t gi = 0; gi < g.generators.size(); ++gi) {
        const auto& gen = g.generators[gi];
        if (gen.kind == GenKind::Thermal) {
            const double u = committed[gi] ? 1.0 : 0.0;
            if (dispatch[gi] < gen.p_min * u - tol || dispatch[gi] > gen.p_max * u + tol)
                throw NumericError("dispatch: generator " + std::to_string(gen.id) +
                                   " outside committed bounds");
        } else {
            if (dispatch[gi] < -tol || dispatch[gi] > wind_available[gi] + tol)
                throw NumericError("dispatch: wind generator " + std::to_string(gen.id) +
                                   " exceeds availability");
        }
    }
    for (std::size_t b = 0; b < g.buses.size(); ++b) {
        if (shed[b] < -tol || shed[b] > std::max(bus_loads[b], 0.0) + tol)
            throw NumericError("dispatch: shed outside [0, load] at bus " + std::to_string(b));
    }
    for (std::size_t k = 0; k < g.branches.size(); ++k) {
        if (std::abs(flows[k]) > g.branches[k].flow_limit + tol)
            throw NumericError("dispatch: flow limit violated on branch " + std::to_string(k));
    }
    // Nodal balance: injection minus incident flows.
    Vec residual(g.buses.size(), 0.0);
    for (std::size_t b = 0; b < g.buses.size(); ++b) residual[b] = shed[b] - bus_loads[b];
    for (std::size_t gi = 0; gi < g.generators.size(); ++gi)
        residual[g.generators[gi].bus_id] += dispatch[gi];
    for (std::size_t k = 0; k < g.branches.size(); ++k) {
        residual[g.branches[k].from_bus] -= flows[k];
        residual[g.branches[k].to_bus] += flows[k];
    }
    for (std::size_t b = 0; b < g.buses.size(); ++b)
        if (std::abs(residual[b]) > tol)
            throw NumericError("dispatch: nodal balance residual " +
                               std::to_string(residual[b]) + " at bus " + std::to_string(b));
}

OpfSolver::OpfSolver(const GridTopology& g, double voll)
    : grid_(&g), voll_(voll), dc_(grid::build_dc_matrices(g)) {
    chol_b_ = cholesky(dc_.b_reduced);
    const Mat binv = spd_inverse(dc_.b_reduced);
    // PTDF = F_reduced * B^-1 over non-reference buses.
    const std::size_t nb = g.branches.size();
    const std::size_t nr = dc_.reduced_bus.size();
    Mat f_red(nb, nr);
    for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t j = 0; j < nr; ++j)
            f_red(k, j) = dc_.flow_from_angle(k, static_cast<std::size_t>(dc_.reduced_bus[j]));
    ptdf_ = matmul(f_red, binv);
}

DispatchSolution OpfSolver::solve(const std::vector<double>& bus_loads,
                                  const std::vector<double>& wind_available,
                                  const std::vector<char>& committed,
                                  const std::optional<RampLink>& prev) const {
    const GridTopology& g = *grid_;
    const std::size_t n_gen = g.generators.size();
    const std::size_t n_bus = g.buses.size();
    const std::size_t n_br = g.branches.size();
    if (bus_loads.size() != n_bus || wind_available.size() != n_gen ||
        committed.size() != n_gen)
        throw ConfigError("solve_dc_opf: input dimensions inconsistent with grid");

    // Columns: generators | shed per bus | one flow variable per branch.
    const std::size_t n_cols = n_gen + n_bus + n_br;
    lp::LpProblem p;
    p.objective.assign(n_cols, 0.0);
    p.lower.assign(n_cols, 0.0);
    p.upper.assign(n_cols, 0.0);

    for (std::size_t gi = 0; gi < n_gen; ++gi) {
        const auto& gen = g.generators[gi];
        if (gen.kind == GenKind::Thermal) {
            p.objective[gi] = gen.cost;
            if (committed[gi]) {
                double lo = gen.p_min;
                double hi = gen.p_max;
                if (prev && prev->on[gi]) {
                    lo = std::max(lo, prev->dispatch[gi] - gen.ramp_limit);
                    hi = std::min(hi, prev->dispatch[gi] + gen.ramp_limit);
                }
                p.lower[gi] = lo;
                p.upper[gi] = hi;
            }
        } else {
            p.upper[gi] = std::max(wind_available[gi], 0.0);
        }
    }
    for (std::size_t b = 0; b < n_bus; ++b) {
        p.objective[n_gen + b] = voll_;
        p.upper[n_gen + b] = std::max(bus_loads[b], 0.0);
    }
    for (std::size_t k = 0; k < n_br; ++k) {
        p.lower[n_gen + n_bus + k] = -g.branches[k].flow_limit;
        p.upper[n_gen + n_bus + k] = g.branches[k].flow_limit;
    }

    // Rows: system balance, then one PTDF row per branch defining its flow.
    double total_load = 0.0;
    for (double l : bus_loads) total_load += l;
    p.eq_matrix = Mat(1 + n_br, n_cols);
    p.eq_rhs.assign(1 + n_br, 0.0);
    for (std::size_t j = 0; j < n_gen + n_bus; ++j) p.eq_matrix(0, j) = 1.0;
    p.eq_rhs[0] = total_load;

    for (std::size_t k = 0; k < n_br; ++k) {
        const std::size_t row = 1 + k;
        double fixed = 0.0;  // flow contribution of the (negative) load injections
        for (std::size_t b = 0; b < n_bus; ++b) {
            const int r = dc_.reduced_index[b];
            if (r < 0) continue;
            fixed -= ptdf_(k, static_cast<std::size_t>(r)) * bus_loads[b];
        }
        for (std::size_t gi = 0; gi < n_gen; ++gi) {
            const int r = dc_.reduced_index[g.generators[gi].bus_id];
            if (r >= 0) p.eq_matrix(row, gi) = ptdf_(k, static_cast<std::size_t>(r));
        }
        for (std::size_t b = 0; b < n_bus; ++b) {
            const int r = dc_.reduced_index[b];
            if (r >= 0) p.eq_matrix(row, n_gen + b) = ptdf_(k, static_cast<std::size_t>(r));
        }
        p.eq_matrix(row, n_gen + n_bus + k) = -1.0;
        p.eq_rhs[row] = -fixed;
    }

    const lp::LpSolution sol = lp::solve_lp(p);
    if (sol.status != lp::LpStatus::Optimal)
        throw NumericError("solve_dc_opf: LP not optimal (structural error); status " +
                           std::to_string(static_cast<int>(sol.status)));

    DispatchSolution out;
    out.dispatch.assign(n_gen, 0.0);
    out.shed.assign(n_bus, 0.0);
    for (std::size_t gi = 0; gi < n_gen; ++gi) out.dispatch[gi] = sol.x[gi];
    for (std::size_t b = 0; b < n_bus; ++b) out.shed[b] = sol.x[n_gen + b];
    out.objective = sol.objective;

    // Recover angles from the reduced injections, then flows from angles.
    Vec inj_red(dc_.reduced_bus.size(), 0.0);
    for (std::size_t b = 0; b < n_bus; ++b) {
        const int r = dc_.reduced_index[b];
        if (r < 0) continue;
        inj_red[static_cast<std::size_t>(r)] = out.shed[b] - bus_loads[b];
    }
    for (std::size_t gi = 0; gi < n_gen; ++gi) {
        const int r = dc_.reduced_index[g.generators[gi].bus_id];
        if (r >= 0) inj_red[static_cast<std::size_t>(r)] += out.dispatch[gi];
    }
    const Vec theta_red = cholesky_solve(chol_b_, inj_red);
    out.angles.assign(n_bus, 0.0);
    for (std::size_t j = 0; j < dc_.reduced_bus.size(); ++j)
        out.angles[static_cast<std::size_t>(dc_.reduced_bus[j])] = theta_red[j];
    out.flows = matvec(dc_.flow_from_angle, out.angles);

    out.check_feasible(g, bus_loads, wind_available, committed);
    return out;
}

namespace {

// Fills gaps shorter than min_down, then extends runs shorter than min_up
// forward. Only ever adds commitment.
void repair_min_up_down(std::vector<char>& on, int min_up, int min_down) {
    const std::size_t t_count = on.size();
    // Off-gaps strictly between on-runs.
    std::size_t t = 0;
    while (t < t_count) {
        if (!on[t]) {
            ++t;
            continue;
        }
        std::size_t run_end = t;
        while (run_end + 1 < t_count && on[run_end + 1]) ++run_end;
        std::size_t gap_end = run_end + 1;
        while (gap_end < t_count && !on[gap_end]) ++gap_end;
        if (gap_end < t_count) {  // another on-run follows the gap
            const std::size_t gap_len = gap_end - run_end - 1;
            if (gap_len > 0 && gap_len < static_cast<std::size_t>(min_down)) {
                for (std::size_t k = run_end + 1; k < gap_end; ++k) on[k] = 1;
            }
        }
        t = (gap_end < t_count) ? gap_end : t_count;
    }
    // Short on-runs extend forward (truncated at the horizon).
    t = 0;
    while (t < t_count) {
        if (!on[t]) {
            ++t;
            continue;
        }
        std::size_t run_end = t;
        while (run_end + 1 < t_count && on[run_end + 1]) ++run_end;
        std::size_t run_len = run_end - t + 1;
        while (run_len < static_cast<std::size_t>(min_up) && run_end + 1 < t_count) {
            on[++run_end] = 1;
            ++run_len;
            while (run_end + 1 < t_count && on[run_end + 1]) {  // merged with next run
                ++run_end;
                ++run_len;
            }
        }
        t = run_end + 1;
    }
}

}  // namespace

bool CommitmentSchedule::satisfies_min_up_down(const GridTopology& g) const {
    for (int gi : g.thermal_gens) {
        const auto& gen = g.generators[gi];
        const auto& row = on[static_cast<std::size_t>(gi)];
        const std::size_t t_count = row.size();
        std::size_t t = 0;
        while (t < t_count) {
            std::size_t run_end = t;
            const bool state = row[t];
            while (run_end + 1 < t_count && row[run_end + 1] == state) ++run_end;
            const std::size_t len = run_end - t + 1;
            if (state && len < static_cast<std::size_t>(gen.min_up) && run_end + 1 < t_count)
                return false;
            // Interior off-runs must respect min_down; leading/trailing ones
            // borrow from outside the horizon.
            if (!state && t > 0 && run_end + 1 < t_count &&
                len < static_cast<std::size_t>(gen.min_down))
                return false;
            t = run_end + 1;
        }
    }
    return true;
}

CommitmentSchedule commit_units(const GridTopology& g, const Mat& zonal_net_load,
                                double reserve_margin) {
    const std::size_t t_count = zonal_net_load.rows();
    if (t_count < 1) throw ConfigError("commit_units: T must be >= 1");
    if (reserve_margin < 0.0) throw ConfigError("commit_units: reserve_margin must be >= 0");
    if (zonal_net_load.cols() != g.zone_count())
        throw ConfigError("commit_units: forecast zone count mismatch");

    // Merit order: cost ascending, id as the deterministic tie-break.
    std::vector<int> order = g.thermal_gens;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (g.generators[a].cost != g.generators[b].cost)
            return g.generators[a].cost < g.generators[b].cost;
        return g.generators[a].id < g.generators[b].id;
    });

    CommitmentSchedule sched;
    sched.on.assign(g.generators.size(), std::vector<char>(t_count, 0));
    for (std::size_t t = 0; t < t_count; ++t) {
        double net = 0.0;
        for (std::size_t z = 0; z < g.zone_count(); ++z) net += zonal_net_load(t, z);
        const double target = (1.0 + reserve_margin) * std::max(net, 0.0);
        double committed_cap = 0.0;
        for (int gi : order) {
            if (committed_cap >= target) break;
            sched.on[static_cast<std::size_t>(gi)][t] = 1;
            committed_cap += g.generators[gi].p_max;
        }
        if (committed_cap < target) sched.adequate = false;
    }

    for (int gi : g.thermal_gens)
        repair_min_up_down(sched.on[static_cast<std::size_t>(gi)], g.generators[gi].min_up,
                           g.generators[gi].min_down);
    return sched;
}

Vec zonal_wind_power(const GridTopology& g, const Vec& zonal_wind_speed,
                     const scenario::WindCurve& curve) {
    if (zonal_wind_speed.size() != g.zone_count())
        throw ConfigError("zonal_wind_power: expected one speed per zone");
    Vec power(g.zone_count(), 0.0);
    for (std::size_t z = 0; z < g.zone_count(); ++z) {
        double cap = 0.0;
        for (int gi : g.zone_wind_gens[z]) cap += g.generators[gi].p_max;
        if (cap <= 0.0) continue;
        scenario::WindCurve zc = curve;
        zc.rated_power = cap;
        power[z] = scenario::wind_speed_to_power(zonal_wind_speed[z], zc);
    }
    return power;
}

HorizonSolution solve_multiperiod(const OpfSolver& solver, const Mat& sample,
                                  const OracleOptions& opt) {
    const GridTopology& g = solver.topology();
    const std::size_t t_count = sample.rows();
    const std::size_t nz = g.zone_count();
    if (sample.cols() != 2 * nz)
        throw ConfigError("solve_multiperiod: expected zone loads then zone winds (" +
                          std::to_string(2 * nz) + " columns)");

    Mat zonal_load(t_count, nz);
    Mat zonal_wind(t_count, nz);
    Mat net(t_count, nz);
    for (std::size_t t = 0; t < t_count; ++t) {
        Vec speeds(nz);
        for (std::size_t z = 0; z < nz; ++z) {
            zonal_load(t, z) = sample(t, z);
            speeds[z] = sample(t, nz + z);
        }
        const Vec wind = zonal_wind_power(g, speeds, opt.wind_curve);
        for (std::size_t z = 0; z < nz; ++z) {
            zonal_wind(t, z) = wind[z];
            net(t, z) = zonal_load(t, z) - wind[z];
        }
    }

    HorizonSolution out;
    out.commitment = commit_units(g, net, opt.reserve_margin);

    std::optional<RampLink> prev;
    for (std::size_t t = 0; t < t_count; ++t) {
        Vec zl(nz), zw(nz);
        for (std::size_t z = 0; z < nz; ++z) {
            zl[z] = zonal_load(t, z);
            zw[z] = zonal_wind(t, z);
        }
        const std::vector<double> bus_loads = scenario::disaggregate_load(zl, g);
        const std::vector<double> wind_avail = scenario::disaggregate_wind(zw, g);
        std::vector<char> committed(g.generators.size(), 0);
        for (std::size_t gi = 0; gi < g.generators.size(); ++gi)
            committed[gi] = out.commitment.on[gi][t];
        try {
            DispatchSolution sol = solver.solve(bus_loads, wind_avail, committed, prev);
            prev = RampLink{sol.dispatch, committed};
            out.objective += sol.objective;
            out.qois.push_back(extract_qoi(sol, g));
            out.hours.push_back(std::move(sol));
        } catch (const Error& e) {
            throw NumericError("solve_multiperiod: hour " + std::to_string(t) + ": " + e.what());
        }
    }
    return out;
}

QoiVector extract_qoi(const DispatchSolution& sol, const GridTopology& g) {
    QoiVector q;
    q.zone_thermal.assign(g.zone_count(), 0.0);
    q.zone_shed.assign(g.zone_count(), 0.0);
    std::vector<std::size_t> zone_row(g.buses.size(), 0);
    for (std::size_t z = 0; z < g.zone_count(); ++z)
        for (int bus : g.zone_buses[z]) zone_row[static_cast<std::size_t>(bus)] = z;
    for (int gi : g.thermal_gens)
        q.zone_thermal[zone_row[static_cast<std::size_t>(g.generators[gi].bus_id)]] +=
            sol.dispatch[static_cast<std::size_t>(gi)];
    for (std::size_t b = 0; b < g.buses.size(); ++b) q.zone_shed[zone_row[b]] += sol.shed[b];
    for (std::size_t z = 0; z < g.zone_count(); ++z) {
        q.system_thermal += q.zone_thermal[z];
        q.system_shed += q.zone_shed[z];
    }
    return q;
}

}  // namespace gridrisk::oracle
