#include "critfaces/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace critfaces {

namespace {

// Series expansion, valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi2_sf(double x, int df) {
    if (df < 1) throw std::domain_error("chi2_sf: df must be >= 1");
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(0.5 * df, 0.5 * x);
}

MeanVar mean_var(const std::vector<double>& xs) {
    MeanVar mv;
    mv.count = xs.size();
    if (xs.empty()) return mv;
    double s = 0.0;
    for (double x : xs) s += x;
    mv.mean = s / xs.size();
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mv.mean) * (x - mv.mean);
        mv.variance = ss / (xs.size() - 1);
    }
    mv.std_error = std::sqrt(mv.variance / xs.size());
    return mv;
}

double chi2_uniform_stat(const std::vector<std::size_t>& counts, double total) {
    if (counts.empty() || total <= 0.0) return 0.0;
    double expected = total / counts.size();
    double stat = 0.0;
    for (std::size_t c : counts) {
        double d = c - expected;
        stat += d * d / expected;
    }
    return stat;
}

} // namespace critfaces
