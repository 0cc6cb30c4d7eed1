#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gridrisk/distributions.hpp"
#include "gridrisk/grid.hpp"
#include "gridrisk/linalg.hpp"

namespace gridrisk::scenario {

using MarginalSpec = std::variant<dist::TruncNormal, dist::Weibull>;

void validate(const MarginalSpec& spec);
double marginal_ppf(double u, const MarginalSpec& spec);
double marginal_cdf(double x, const MarginalSpec& spec);

struct CovarianceSpec {
    Mat c;  // M x M correlation coefficients

    // Symmetric, unit diagonal, positive definite (PD checked by cholesky()).
    void validate_shape() const;
};

// Lower-triangular factor with L*L^T = C. Throws NumericError naming the
// failing pivot when C is not positive definite.
Mat cholesky(const CovarianceSpec& c);

struct ScenarioSet {
    std::size_t n = 0;  // samples
    std::size_t t = 0;  // time steps (hours)
    std::size_t m = 0;  // variables
    std::uint64_t seed = 0;
    std::vector<MarginalSpec> marginals;
    CovarianceSpec covariance;
    std::vector<double> values;  // n*t*m, sample-major then time then variable

    double& at(std::size_t sample, std::size_t step, std::size_t var) {
        return values[(sample * t + step) * m + var];
    }
    double at(std::size_t sample, std::size_t step, std::size_t var) const {
        return values[(sample * t + step) * m + var];
    }
};

// Random-walk temporal correlation, Cholesky spatial correlation, Gaussian
// copula inverse-transform to the marginals. Deterministic in (seed); sample
// streams are independent of thread count.
ScenarioSet sample_scenarios(std::size_t n, std::size_t t,
                             const std::vector<MarginalSpec>& marginals,
                             const CovarianceSpec& c, std::uint64_t seed);

struct WindCurve {
    double cut_in = 3.0;       // m/s
    double rated_speed = 12.0; // m/s
    double cut_out = 25.0;     // m/s
    double rated_power = 0.0;  // MW

    void validate() const;
};

// Piecewise cubic power curve: zero outside [cut_in, cut_out), cubic ramp up
// to rated_speed, flat at rated_power until cut_out.
double wind_speed_to_power(double v, const WindCurve& curve);

// Per-bus loads proportional to base_load within each zone, summing exactly
// to the zonal value. Throws ConfigError if a zone has zero total base_load.
std::vector<double> disaggregate_load(const std::vector<double>& zonal_load,
                                      const grid::GridTopology& g);

// Zonal wind power split equally among the zone's wind generators. Returned
// per generator index (non-wind entries zero). Zones without wind generators
// must have zero zonal wind.
std::vector<double> disaggregate_wind(const std::vector<double>& zonal_wind,
                                      const grid::GridTopology& g);

// Columnar scenario file: magic + json header + row-major doubles.
void save_scenarios(const ScenarioSet& s, const std::string& path);
ScenarioSet load_scenarios(const std::string& path);

// One row per (sample, t) with M value columns.
void export_scenarios_csv(const ScenarioSet& s, const std::string& path);

}  // namespace gridrisk::scenario
