#include "critfaces/constants.hpp"

#include <cmath>
#include <stdexcept>

#include "critfaces/detail/linalg.hpp"

namespace critfaces {

double unit_ball_volume(int d) {
    if (d < 1) throw std::domain_error("unit_ball_volume: d must be >= 1");
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double a_n_value(const ScheduleRule& rule, double n, int k) {
    if (!(n >= 16.0)) throw std::domain_error("a_n_value: n must be >= 16");
    double ln = std::log(n);
    double lln = std::log(ln);
    double llln = std::log(lln);
    switch (rule.kind) {
    case ScheduleKind::threshold_plus_logloglog:
        return ln + (k - 1) * lln + llln;
    case ScheduleKind::two_log_n:
        return 2.0 * ln;
    case ScheduleKind::custom:
        return rule.c_log * ln + rule.c_loglog * lln + rule.c_const + rule.c_logloglog * llln;
    }
    throw std::logic_error("a_n_value: unknown schedule kind");
}

double r_n_of_u(double u, double n, double a_n, int d) {
    double t = a_n + u;
    if (!(t > 0.0)) throw std::domain_error("r_n_of_u: a_n + u must be positive");
    return std::pow(t / (n * unit_ball_volume(d)), 1.0 / d);
}

double b_kn(double n, double a_n, int k) {
    if (!(a_n > 0.0)) throw std::domain_error("b_kn: a_n must be positive");
    return n * std::pow(a_n, k - 1) * std::exp(-a_n);
}

double simplex_volume(const std::vector<std::vector<double>>& vertices) {
    const int k = static_cast<int>(vertices.size()) - 1;
    if (k < 1) return 0.0;
    const int m = static_cast<int>(vertices[0].size());
    double vecs[detail::kMaxDim * detail::kMaxDim];
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < m; ++a) vecs[i * m + a] = vertices[i + 1][a] - vertices[0][a];
    double g[detail::kMaxDim * detail::kMaxDim];
    detail::gram_matrix(vecs, k, m, g);
    double det = detail::gram_det(g, k);
    if (det <= 0.0) return 0.0;
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return std::sqrt(det) / fact;
}

bool origin_in_open_hull(const std::vector<std::vector<double>>& theta) {
    const int k = static_cast<int>(theta.size()) - 1;
    if (k < 1) return false;
    const int m = static_cast<int>(theta[0].size());
    // Barycentric coordinates of the origin: solve G mu = -V y0 in the
    // difference basis, then lambda = (1 - sum mu, mu...).
    double vecs[detail::kMaxDim * detail::kMaxDim];
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < m; ++a) vecs[i * m + a] = theta[i + 1][a] - theta[0][a];
    double g[detail::kMaxDim * detail::kMaxDim];
    detail::gram_matrix(vecs, k, m, g);
    double rhs[detail::kMaxDim];
    for (int i = 0; i < k; ++i) {
        double s = 0.0;
        for (int a = 0; a < m; ++a) s += vecs[i * m + a] * (0.0 - theta[0][a]);
        rhs[i] = s;
    }
    double mu[detail::kMaxDim];
    if (!detail::solve_full_pivot(g, rhs, k, mu)) return false;
    double lambda0 = 1.0;
    for (int i = 0; i < k; ++i) lambda0 -= mu[i];
    if (lambda0 <= 1e-12) return false;
    for (int i = 0; i < k; ++i)
        if (mu[i] <= 1e-12) return false;
    return true;
}

double Dk_prefactor(int d, int k) {
    if (k < 1 || k > d) throw std::domain_error("Dk_prefactor: need 1 <= k <= d");
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    double k1fact = kfact * (k + 1);
    double binom = 1.0;
    for (int i = 0; i < k; ++i) binom = binom * (d - i) / (i + 1);
    // Omega_d / (Omega_k Omega_{d-k}) with Omega_j the product of the first
    // j unit-ball volumes; the shared factors cancel index-wise.
    double omega_ratio = 1.0;
    for (int j = k + 1; j <= d; ++j) omega_ratio *= unit_ball_volume(j);
    for (int j = 1; j <= d - k; ++j) omega_ratio /= unit_ball_volume(j);
    double wd = unit_ball_volume(d);
    return std::pow(kfact, d - k + 1) / (k1fact * d * std::pow(wd, k)) * binom * omega_ratio;
}

namespace {

// Surface area of S^{k-1} in R^k; the counting measure of total mass 2 at
// k = 1 by convention.
double sphere_surface(int k) {
    if (k == 1) return 2.0;
    return 2.0 * std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k);
}

} // namespace

ConstantEstimate estimate_Dk(int d, int k, std::uint64_t samples, RandomStream stream) {
    if (k < 1 || k > d - 1) throw std::domain_error("estimate_Dk: need 1 <= k <= d-1");
    if (samples < 1) throw std::domain_error("estimate_Dk: samples must be >= 1");
    ConstantEstimate est;
    if (k == 1) {
        // Enumeration over (S^0)^2 = {-1,+1}^2 with unit mass per point:
        // only (+1,-1) and (-1,+1) are non-degenerate and contain the
        // origin, each contributing V^d = 2^d; with the prefactor the
        // algebra collapses to 2^{d-1} (checked against Dk_prefactor in
        // the test suite).
        est.value = std::ldexp(1.0, d - 1);
        est.std_error = 0.0;
        est.samples = 4;
        est.exact = true;
        return est;
    }
    const double total_measure = std::pow(sphere_surface(k), k + 1);
    const double prefactor = Dk_prefactor(d, k);
    const int power = d - k + 1;
    std::vector<std::vector<double>> theta(k + 1, std::vector<double>(k));
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (int i = 0; i <= k; ++i) {
            double norm2 = 0.0;
            do {
                norm2 = 0.0;
                for (int a = 0; a < k; ++a) {
                    theta[i][a] = stream.next_gaussian();
                    norm2 += theta[i][a] * theta[i][a];
                }
            } while (norm2 == 0.0);
            double inv = 1.0 / std::sqrt(norm2);
            for (int a = 0; a < k; ++a) theta[i][a] *= inv;
        }
        double x = 0.0;
        if (origin_in_open_hull(theta)) {
            double v = simplex_volume(theta);
            x = std::pow(v, power);
        }
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / samples;
    double var = samples > 1 ? (sumsq - sum * sum / samples) / (samples - 1) : 0.0;
    if (var < 0.0) var = 0.0;
    est.value = prefactor * total_measure * mean;
    est.std_error = prefactor * total_measure * std::sqrt(var / samples);
    est.samples = samples;
    est.exact = false;
    return est;
}

double lambda_target(double u0, const ConstantEstimate& Dk) {
    return Dk.value * std::exp(-u0);
}

} // namespace critfaces
