#include "gridrisk/grid.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gridrisk/errors.hpp"

namespace gridrisk::grid {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ParseError("grid schema: unknown key '" + it.key() + "' in " + where);
    }
}

double get_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ParseError("grid schema: missing or non-numeric '" + std::string(key) + "' in " +
                         where);
    return j.at(key).get<double>();
}

int get_int(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw ParseError("grid schema: missing or non-integer '" + std::string(key) + "' in " +
                         where);
    return j.at(key).get<int>();
}

}  // namespace

void validate(GridTopology& grid) {
    const std::size_t n = grid.buses.size();
    if (n == 0) throw ValidationError("grid: no buses");

    // Bus ids unique and contiguous from 0.
    std::vector<bool> seen(n, false);
    for (const Bus& b : grid.buses) {
        if (b.id < 0 || static_cast<std::size_t>(b.id) >= n)
            throw ValidationError("grid: bus id " + std::to_string(b.id) +
                                  " not contiguous from 0");
        if (seen[b.id]) throw ValidationError("grid: duplicate bus id " + std::to_string(b.id));
        seen[b.id] = true;
        if (b.base_load < 0.0)
            throw ValidationError("grid: bus " + std::to_string(b.id) + " has base_load < 0");
    }
    std::sort(grid.buses.begin(), grid.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });

    if (grid.zones.empty()) throw ValidationError("grid: no zones");
    std::set<int> zone_set(grid.zones.begin(), grid.zones.end());
    if (zone_set.size() != grid.zones.size()) throw ValidationError("grid: duplicate zone id");
    for (const Bus& b : grid.buses) {
        if (!zone_set.count(b.zone_id))
            throw ValidationError("grid: bus " + std::to_string(b.id) +
                                  " references unknown zone " + std::to_string(b.zone_id));
    }

    for (const Branch& br : grid.branches) {
        if (br.from_bus == br.to_bus)
            throw ValidationError("grid: branch with from_bus == to_bus at bus " +
                                  std::to_string(br.from_bus));
        if (br.from_bus < 0 || static_cast<std::size_t>(br.from_bus) >= n || br.to_bus < 0 ||
            static_cast<std::size_t>(br.to_bus) >= n)
            throw ValidationError("grid: branch references unknown bus");
        if (!(br.susceptance > 0.0)) throw ValidationError("grid: branch susceptance must be > 0");
        if (!(br.flow_limit > 0.0)) throw ValidationError("grid: branch flow_limit must be > 0");
    }

    std::vector<bool> gen_seen(grid.generators.size(), false);
    for (const Generator& g : grid.generators) {
        if (g.id < 0 || static_cast<std::size_t>(g.id) >= grid.generators.size())
            throw ValidationError("grid: generator id " + std::to_string(g.id) +
                                  " not contiguous from 0");
        if (gen_seen[g.id])
            throw ValidationError("grid: duplicate generator id " + std::to_string(g.id));
        gen_seen[g.id] = true;
        if (g.bus_id < 0 || static_cast<std::size_t>(g.bus_id) >= n)
            throw ValidationError("grid: generator " + std::to_string(g.id) +
                                  " references unknown bus");
        if (!(0.0 <= g.p_min && g.p_min <= g.p_max))
            throw ValidationError("grid: generator " + std::to_string(g.id) +
                                  " violates 0 <= p_min <= p_max");
        if (g.cost < 0.0)
            throw ValidationError("grid: generator " + std::to_string(g.id) + " has cost < 0");
        if (!(g.ramp_limit > 0.0))
            throw ValidationError("grid: generator " + std::to_string(g.id) +
                                  " must have ramp_limit > 0");
        if (g.kind == GenKind::Thermal && (g.min_up < 1 || g.min_down < 1))
            throw ValidationError("grid: thermal generator " + std::to_string(g.id) +
                                  " needs min_up, min_down >= 1");
    }
    std::sort(grid.generators.begin(), grid.generators.end(),
              [](const Generator& a, const Generator& b) { return a.id < b.id; });

    if (grid.reference_bus < 0 || static_cast<std::size_t>(grid.reference_bus) >= n)
        throw ValidationError("grid: reference_bus does not exist");

    // Connectivity (BFS over branches).
    std::vector<std::vector<int>> adj(n);
    for (const Branch& br : grid.branches) {
        adj[br.from_bus].push_back(br.to_bus);
        adj[br.to_bus].push_back(br.from_bus);
    }
    std::vector<bool> visited(n, false);
    std::queue<int> q;
    q.push(0);
    visited[0] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (!visited[v]) {
                visited[v] = true;
                ++reached;
                q.push(v);
            }
        }
    }
    if (reached != n) throw ValidationError("grid: graph is not connected");

    // Zone-local views, and the one-thermal-per-zone invariant.
    std::sort(grid.zones.begin(), grid.zones.end());
    const std::size_t nz = grid.zones.size();
    auto zone_index = [&](int zone_id) {
        const auto it = std::lower_bound(grid.zones.begin(), grid.zones.end(), zone_id);
        return static_cast<std::size_t>(it - grid.zones.begin());
    };
    grid.zone_buses.assign(nz, {});
    grid.zone_wind_gens.assign(nz, {});
    grid.zone_thermal_gens.assign(nz, {});
    grid.thermal_gens.clear();
    grid.wind_gens.clear();
    for (const Bus& b : grid.buses) grid.zone_buses[zone_index(b.zone_id)].push_back(b.id);
    for (std::size_t gi = 0; gi < grid.generators.size(); ++gi) {
        const Generator& g = grid.generators[gi];
        const std::size_t z = zone_index(grid.buses[g.bus_id].zone_id);
        if (g.kind == GenKind::Wind) {
            grid.zone_wind_gens[z].push_back(static_cast<int>(gi));
            grid.wind_gens.push_back(static_cast<int>(gi));
        } else {
            grid.zone_thermal_gens[z].push_back(static_cast<int>(gi));
            grid.thermal_gens.push_back(static_cast<int>(gi));
        }
    }
    for (std::size_t z = 0; z < nz; ++z) {
        if (grid.zone_thermal_gens[z].empty())
            throw ValidationError("grid: zone " + std::to_string(grid.zones[z]) +
                                  " has no thermal generator");
    }
}

GridTopology parse_grid_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("grid schema: malformed file: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("grid schema: top level must be an object");
    reject_unknown_keys(j, {"buses", "branches", "generators", "zones", "reference_bus"},
                        "top level");
    for (const char* key : {"buses", "branches", "generators", "zones"}) {
        if (!j.contains(key) || !j.at(key).is_array())
            throw ParseError("grid schema: missing array '" + std::string(key) + "'");
    }

    GridTopology g;
    for (const json& jb : j.at("buses")) {
        reject_unknown_keys(jb, {"id", "zone", "base_load"}, "bus");
        Bus b;
        b.id = get_int(jb, "id", "bus");
        b.zone_id = get_int(jb, "zone", "bus");
        b.base_load = get_number(jb, "base_load", "bus");
        g.buses.push_back(b);
    }
    for (const json& jb : j.at("branches")) {
        reject_unknown_keys(jb, {"from", "to", "susceptance", "flow_limit"}, "branch");
        Branch br;
        br.from_bus = get_int(jb, "from", "branch");
        br.to_bus = get_int(jb, "to", "branch");
        br.susceptance = get_number(jb, "susceptance", "branch");
        br.flow_limit = get_number(jb, "flow_limit", "branch");
        g.branches.push_back(br);
    }
    for (const json& jg : j.at("generators")) {
        reject_unknown_keys(
            jg, {"id", "bus", "kind", "p_min", "p_max", "cost", "ramp", "min_up", "min_down"},
            "generator");
        Generator gen;
        gen.id = get_int(jg, "id", "generator");
        gen.bus_id = get_int(jg, "bus", "generator");
        if (!jg.contains("kind") || !jg.at("kind").is_string())
            throw ParseError("grid schema: generator 'kind' must be a string");
        const std::string kind = jg.at("kind").get<std::string>();
        if (kind == "thermal") {
            gen.kind = GenKind::Thermal;
        } else if (kind == "wind") {
            gen.kind = GenKind::Wind;
        } else {
            throw ParseError("grid schema: generator kind must be 'thermal' or 'wind', got '" +
                             kind + "'");
        }
        gen.p_min = get_number(jg, "p_min", "generator");
        gen.p_max = get_number(jg, "p_max", "generator");
        gen.cost = jg.contains("cost") ? get_number(jg, "cost", "generator") : 0.0;
        gen.ramp_limit = get_number(jg, "ramp", "generator");
        gen.min_up = jg.contains("min_up") ? get_int(jg, "min_up", "generator") : 1;
        gen.min_down = jg.contains("min_down") ? get_int(jg, "min_down", "generator") : 1;
        g.generators.push_back(gen);
    }
    for (const json& jz : j.at("zones")) {
        if (!jz.is_number_integer()) throw ParseError("grid schema: zones must be integers");
        g.zones.push_back(jz.get<int>());
    }
    // Reference bus defaults to the lowest-numbered bus.
    g.reference_bus =
        j.contains("reference_bus") ? get_int(j, "reference_bus", "top level") : 0;

    validate(g);
    return g;
}

GridTopology load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("grid: cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid_json(ss.str());
}

std::string grid_to_json(const GridTopology& grid) {
    json j;
    j["buses"] = json::array();
    for (const Bus& b : grid.buses)
        j["buses"].push_back({{"id", b.id}, {"zone", b.zone_id}, {"base_load", b.base_load}});
    j["branches"] = json::array();
    for (const Branch& br : grid.branches)
        j["branches"].push_back({{"from", br.from_bus},
                                 {"to", br.to_bus},
                                 {"susceptance", br.susceptance},
                                 {"flow_limit", br.flow_limit}});
    j["generators"] = json::array();
    for (const Generator& g : grid.generators)
        j["generators"].push_back({{"id", g.id},
                                   {"bus", g.bus_id},
                                   {"kind", g.kind == GenKind::Wind ? "wind" : "thermal"},
                                   {"p_min", g.p_min},
                                   {"p_max", g.p_max},
                                   {"cost", g.cost},
                                   {"ramp", g.ramp_limit},
                                   {"min_up", g.min_up},
                                   {"min_down", g.min_down}});
    j["zones"] = grid.zones;
    j["reference_bus"] = grid.reference_bus;
    return j.dump(2);
}

void save_grid(const GridTopology& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("grid: cannot write file '" + path + "'");
    out << grid_to_json(grid) << "\n";
}

std::uint64_t grid_hash(const GridTopology& grid) {
    const std::string s = grid_to_json(grid);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

DcMatrices build_dc_matrices(const GridTopology& grid) {
    const std::size_t n = grid.buses.size();
    const std::size_t m = grid.branches.size();
    Mat laplacian(n, n);
    Mat f(m, n);
    for (std::size_t k = 0; k < m; ++k) {
        const Branch& br = grid.branches[k];
        const auto i = static_cast<std::size_t>(br.from_bus);
        const auto jj = static_cast<std::size_t>(br.to_bus);
        const double b = br.susceptance;
        laplacian(i, i) += b;
        laplacian(jj, jj) += b;
        laplacian(i, jj) -= b;
        laplacian(jj, i) -= b;
        f(k, i) = b;
        f(k, jj) = -b;
    }

    DcMatrices dc;
    dc.reduced_index.assign(n, -1);
    const auto ref = static_cast<std::size_t>(grid.reference_bus);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == ref) continue;
        dc.reduced_index[i] = static_cast<int>(dc.reduced_bus.size());
        dc.reduced_bus.push_back(static_cast<int>(i));
    }
    dc.b_reduced = Mat(n - 1, n - 1);
    for (std::size_t i = 0; i < n - 1; ++i) {
        const auto bi = static_cast<std::size_t>(dc.reduced_bus[i]);
        for (std::size_t jj = 0; jj < n - 1; ++jj)
            dc.b_reduced(i, jj) = laplacian(bi, static_cast<std::size_t>(dc.reduced_bus[jj]));
    }
    dc.flow_from_angle = std::move(f);

    // Connected grid <=> reduced Laplacian SPD; surface disconnection as a
    // structural error rather than a Cholesky failure.
    try {
        cholesky(dc.b_reduced);
    } catch (const NumericError&) {
        throw NumericError("build_dc_matrices: singular susceptance matrix (disconnected grid)");
    }
    return dc;
}

Mat zone_membership_matrix(const GridTopology& grid) {
    Mat z(grid.zone_count(), grid.buses.size());
    for (std::size_t zi = 0; zi < grid.zone_buses.size(); ++zi)
        for (int bus : grid.zone_buses[zi]) z(zi, static_cast<std::size_t>(bus)) = 1.0;
    return z;
}

}  // namespace gridrisk::grid
