#pragma once

#include <cstddef>
#include <vector>

// Small statistics utilities shared by the engine and the test suites.

namespace critfaces {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Survival function of a chi-square variable with df degrees of freedom.
double chi2_sf(double x, int df);

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0; // unbiased; 0 for fewer than 2 samples
    double std_error = 0.0;
    std::size_t count = 0;
};

MeanVar mean_var(const std::vector<double>& xs);

// Chi-square statistic of observed counts against a uniform expectation.
double chi2_uniform_stat(const std::vector<std::size_t>& counts, double total);

} // namespace critfaces
