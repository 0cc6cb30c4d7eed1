#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridrisk/linalg.hpp"

namespace gridrisk::grid {

struct Bus {
    int id = 0;
    int zone_id = 0;
    double base_load = 0.0;  // MW, nominal demand; used as disaggregation weight
};

enum class GenKind { Thermal, Wind };

struct Generator {
    int id = 0;
    int bus_id = 0;
    GenKind kind = GenKind::Thermal;
    double p_min = 0.0;      // MW
    double p_max = 0.0;      // MW
    double cost = 0.0;       // $/MWh, thermal only
    double ramp_limit = 0.0; // MW/h
    int min_up = 1;          // hours, thermal only
    int min_down = 1;        // hours, thermal only
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double susceptance = 0.0;  // per-unit; flow = susceptance * angle difference
    double flow_limit = 0.0;   // MW
};

struct GridTopology {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<int> zones;
    int reference_bus = 0;

    std::size_t zone_count() const { return zones.size(); }

    // Zone-local helper views, filled in by validate().
    std::vector<std::vector<int>> zone_buses;          // zone -> bus ids
    std::vector<std::vector<int>> zone_wind_gens;      // zone -> generator indices
    std::vector<std::vector<int>> zone_thermal_gens;   // zone -> generator indices
    std::vector<int> thermal_gens;                     // generator indices, id order
    std::vector<int> wind_gens;                        // generator indices, id order

    int zone_of_bus(int bus_id) const { return buses[bus_id].zone_id; }
};

// Checks every structural invariant (contiguous ids, connectivity, zone
// references, at least one thermal generator per zone, ...). Throws
// ValidationError naming the first violated invariant; fills the helper views.
void validate(GridTopology& grid);

GridTopology load_grid(const std::string& path);
void save_grid(const GridTopology& grid, const std::string& path);

GridTopology parse_grid_json(const std::string& text);
std::string grid_to_json(const GridTopology& grid);

// FNV-1a hash of the canonical serialization; checkpoints store it so a
// model is never applied to a different grid.
std::uint64_t grid_hash(const GridTopology& grid);

struct DcMatrices {
    Mat b_reduced;      // (n-1)x(n-1) nodal susceptance, reference bus removed
    Mat flow_from_angle;// branches x buses, flow = F * theta
    std::vector<int> reduced_index;  // bus id -> row in reduced system, -1 for reference
    std::vector<int> reduced_bus;    // row -> bus id
};

// Reduced nodal susceptance matrix plus the angle-to-flow map. Throws
// NumericError if the grid graph is disconnected (singular B).
DcMatrices build_dc_matrices(const GridTopology& grid);

// zones x buses 0/1 membership matrix; each column has exactly one 1.
Mat zone_membership_matrix(const GridTopology& grid);

}  // namespace gridrisk::grid
