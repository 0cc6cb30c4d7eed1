#include "gridrisk/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gridrisk/errors.hpp"
#include "gridrisk/rng.hpp"

namespace gridrisk::scenario {

using nlohmann::json;

void validate(const MarginalSpec& spec) {
    std::visit([](const auto& s) { dist::validate(s); }, spec);
}

double marginal_ppf(double u, const MarginalSpec& spec) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, dist::TruncNormal>)
                return dist::truncnorm_ppf(u, s);
            else
                return dist::weibull_ppf(u, s);
        },
        spec);
}

double marginal_cdf(double x, const MarginalSpec& spec) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, dist::TruncNormal>)
                return dist::truncnorm_cdf(x, s);
            else
                return dist::weibull_cdf(x, s);
        },
        spec);
}

void CovarianceSpec::validate_shape() const {
    if (c.rows() != c.cols() || c.rows() == 0)
        throw ValidationError("covariance: matrix must be square and nonempty");
    for (std::size_t i = 0; i < c.rows(); ++i) {
        if (std::abs(c(i, i) - 1.0) > 1e-12)
            throw ValidationError("covariance: diagonal entry " + std::to_string(i) +
                                  " is not 1");
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(c(i, j) - c(j, i)) > 1e-12)
                throw ValidationError("covariance: matrix not symmetric at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
}

Mat cholesky(const CovarianceSpec& c) {
    c.validate_shape();
    return gridrisk::cholesky(c.c);
}

ScenarioSet sample_scenarios(std::size_t n, std::size_t t,
                             const std::vector<MarginalSpec>& marginals,
                             const CovarianceSpec& c, std::uint64_t seed) {
    const std::size_t m = marginals.size();
    if (n < 1 || t < 1) throw ConfigError("sample_scenarios: N and T must be >= 1");
    if (m == 0 || c.c.rows() != m)
        throw ConfigError("sample_scenarios: |marginals| must equal dim(C)");
    for (const MarginalSpec& spec : marginals) validate(spec);
    const Mat l = cholesky(c);

    ScenarioSet out;
    out.n = n;
    out.t = t;
    out.m = m;
    out.seed = seed;
    out.marginals = marginals;
    out.covariance = c;
    out.values.resize(n * t * m);

    for (std::size_t sample = 0; sample < n; ++sample) {
        Rng rng = Rng::stream(seed, sample);
        Vec walk(m, 0.0);       // x_t
        Vec correlated(m);      // x^c_t = L * (x_t / sqrt(t))
        for (std::size_t step = 0; step < t; ++step) {
            for (std::size_t v = 0; v < m; ++v) walk[v] += rng.next_std_normal();
            const double norm = 1.0 / std::sqrt(static_cast<double>(step + 1));
            for (std::size_t i = 0; i < m; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j <= i; ++j) acc += l(i, j) * walk[j] * norm;
                correlated[i] = acc;
            }
            for (std::size_t v = 0; v < m; ++v) {
                const double u = dist::std_normal_cdf(correlated[v]);
                out.at(sample, step, v) = marginal_ppf(u, marginals[v]);
            }
        }
    }
    return out;
}

void WindCurve::validate() const {
    if (!(0.0 < cut_in && cut_in < rated_speed && rated_speed < cut_out))
        throw ValidationError("wind curve: need 0 < cut_in < rated_speed < cut_out");
    if (!(rated_power > 0.0)) throw ValidationError("wind curve: rated_power must be > 0");
}

double wind_speed_to_power(double v, const WindCurve& curve) {
    if (v < curve.cut_in || v >= curve.cut_out) return 0.0;
    if (v >= curve.rated_speed) return curve.rated_power;
    const double c3 = curve.cut_in * curve.cut_in * curve.cut_in;
    const double r3 = curve.rated_speed * curve.rated_speed * curve.rated_speed;
    return curve.rated_power * (v * v * v - c3) / (r3 - c3);
}

std::vector<double> disaggregate_load(const std::vector<double>& zonal_load,
                                      const grid::GridTopology& g) {
    if (zonal_load.size() != g.zone_count())
        throw ConfigError("disaggregate: expected one load value per zone");
    std::vector<double> bus_load(g.buses.size(), 0.0);
    for (std::size_t z = 0; z < g.zone_count(); ++z) {
        double total = 0.0;
        for (int bus : g.zone_buses[z]) total += g.buses[bus].base_load;
        if (total <= 0.0)
            throw ConfigError("disaggregate: zone " + std::to_string(g.zones[z]) +
                              " has zero total base_load");
        // Proportional participation factors; assign the residual to the last
        // bus so the zonal sum is met exactly.
        double assigned = 0.0;
        for (std::size_t k = 0; k < g.zone_buses[z].size(); ++k) {
            const int bus = g.zone_buses[z][k];
            double share;
            if (k + 1 == g.zone_buses[z].size()) {
                share = zonal_load[z] - assigned;
            } else {
                share = zonal_load[z] * (g.buses[bus].base_load / total);
                assigned += share;
            }
            bus_load[bus] = share;
        }
    }
    return bus_load;
}

std::vector<double> disaggregate_wind(const std::vector<double>& zonal_wind,
                                      const grid::GridTopology& g) {
    if (zonal_wind.size() != g.zone_count())
        throw ConfigError("disaggregate: expected one wind value per zone");
    std::vector<double> per_gen(g.generators.size(), 0.0);
    for (std::size_t z = 0; z < g.zone_count(); ++z) {
        const auto& gens = g.zone_wind_gens[z];
        if (gens.empty()) {
            if (zonal_wind[z] != 0.0)
                throw ConfigError("disaggregate: zone " + std::to_string(g.zones[z]) +
                                  " has wind power but no wind generators");
            continue;
        }
        const double each = zonal_wind[z] / static_cast<double>(gens.size());
        for (int gi : gens) per_gen[gi] = each;
    }
    return per_gen;
}

namespace {

constexpr char kMagic[8] = {'G', 'R', 'S', 'C', '0', '0', '0', '1'};

json marginal_to_json(const MarginalSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, dist::TruncNormal>) {
                return {{"type", "truncnormal"},
                        {"location", s.location},
                        {"scale", s.scale},
                        {"left", s.left},
                        {"right", s.right}};
            } else {
                return {{"type", "weibull"},
                        {"location", s.location},
                        {"shape", s.shape},
                        {"scale", s.scale}};
            }
        },
        spec);
}

MarginalSpec marginal_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "truncnormal") {
        dist::TruncNormal s;
        s.location = j.at("location").get<double>();
        s.scale = j.at("scale").get<double>();
        s.left = j.at("left").get<double>();
        s.right = j.at("right").get<double>();
        return s;
    }
    if (type == "weibull") {
        dist::Weibull s;
        s.location = j.at("location").get<double>();
        s.shape = j.at("shape").get<double>();
        s.scale = j.at("scale").get<double>();
        return s;
    }
    throw ParseError("scenario file: unknown marginal type '" + type + "'");
}

}  // namespace

void save_scenarios(const ScenarioSet& s, const std::string& path) {
    json header;
    header["n"] = s.n;
    header["t"] = s.t;
    header["m"] = s.m;
    header["seed"] = s.seed;
    header["marginals"] = json::array();
    for (const auto& spec : s.marginals) header["marginals"].push_back(marginal_to_json(spec));
    header["covariance"] = json::array();
    for (std::size_t i = 0; i < s.covariance.c.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < s.covariance.c.cols(); ++j)
            row.push_back(s.covariance.c(i, j));
        header["covariance"].push_back(row);
    }
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("scenario file: cannot write '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t hlen = header_text.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(header_text.data(), static_cast<std::streamsize>(hlen));
    out.write(reinterpret_cast<const char*>(s.values.data()),
              static_cast<std::streamsize>(s.values.size() * sizeof(double)));
}

ScenarioSet load_scenarios(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("scenario file: cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("scenario file: bad magic in '" + path + "'");
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (!in || hlen > (1u << 20)) throw ParseError("scenario file: bad header length");
    std::string header_text(hlen, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw ParseError("scenario file: truncated header");

    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario file: malformed header: ") + e.what());
    }
    ScenarioSet s;
    s.n = header.at("n").get<std::size_t>();
    s.t = header.at("t").get<std::size_t>();
    s.m = header.at("m").get<std::size_t>();
    s.seed = header.at("seed").get<std::uint64_t>();
    for (const json& jm : header.at("marginals")) s.marginals.push_back(marginal_from_json(jm));
    const auto& jc = header.at("covariance");
    s.covariance.c = Mat(jc.size(), jc.size());
    for (std::size_t i = 0; i < jc.size(); ++i)
        for (std::size_t j = 0; j < jc.size(); ++j)
            s.covariance.c(i, j) = jc.at(i).at(j).get<double>();

    s.values.resize(s.n * s.t * s.m);
    in.read(reinterpret_cast<char*>(s.values.data()),
            static_cast<std::streamsize>(s.values.size() * sizeof(double)));
    if (!in) throw ParseError("scenario file: truncated value block");
    return s;
}

void export_scenarios_csv(const ScenarioSet& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("scenario csv: cannot write '" + path + "'");
    out << "sample,t";
    for (std::size_t v = 0; v < s.m; ++v) out << ",var" << v;
    out << "\n";
    char buf[32];
    for (std::size_t sample = 0; sample < s.n; ++sample) {
        for (std::size_t step = 0; step < s.t; ++step) {
            out << sample << "," << step;
            for (std::size_t v = 0; v < s.m; ++v) {
                std::snprintf(buf, sizeof(buf), "%.17g", s.at(sample, step, v));
                out << "," << buf;
            }
            out << "\n";
        }
    }
}

}  // namespace gridrisk::scenario
