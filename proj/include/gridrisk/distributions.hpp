#pragma once

#include <vector>

namespace gridrisk::dist {

// Standard normal CDF, accurate to ~1e-15 via erfc.
double std_normal_cdf(double x);

double std_normal_pdf(double x);

// Inverse standard normal CDF. Rational approximation (Acklam) refined by
// one Newton step against std_normal_cdf; round-trip error stays below
// 1e-10 on u in [1e-8, 1-1e-8]. Throws for u outside (0,1).
double std_normal_ppf(double u);

struct TruncNormal {
    double location = 0.0;  // MW
    double scale = 1.0;     // MW
    double left = 0.0;      // MW, lower truncation
    double right = 0.0;     // MW, upper truncation
};

struct Weibull {
    double location = 0.0;  // m/s
    double shape = 1.0;     // dimensionless
    double scale = 1.0;     // m/s
};

void validate(const TruncNormal& spec);
void validate(const Weibull& spec);

double truncnorm_cdf(double x, const TruncNormal& spec);
double truncnorm_ppf(double u, const TruncNormal& spec);

double weibull_cdf(double x, const Weibull& spec);
double weibull_ppf(double u, const Weibull& spec);

// One-sample Kolmogorov-Smirnov statistic against an analytic CDF supplied
// as already-evaluated values of the CDF at each sample point.
// Samples need not be sorted.
double ks_statistic(std::vector<double> cdf_at_samples);

// Asymptotic critical value for the KS statistic at significance alpha.
// Only the levels used by the diagnostics are tabulated.
double ks_critical(double alpha, std::size_t n);

}  // namespace gridrisk::dist
