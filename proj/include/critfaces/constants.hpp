#pragma once

#include <cstdint>
#include <vector>

#include "critfaces/sampling.hpp"

// Closed-form and Monte Carlo constants: unit-ball volumes, centering
// schedules a_n, the radius map r_n(u), the normalizing sequence b_{k,n},
// and the limit constant D_k from the spherical simplex integral.

namespace critfaces {

// Volume of the d-dimensional unit ball, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);

enum class ScheduleKind { threshold_plus_logloglog, two_log_n, custom };

struct ScheduleRule {
    ScheduleKind kind = ScheduleKind::threshold_plus_logloglog;
    // Custom schedule: c_log*log n + c_loglog*log log n + c_const
    //                  + c_logloglog*log log log n.
    double c_log = 0.0;
    double c_loglog = 0.0;
    double c_const = 0.0;
    double c_logloglog = 0.0;

    static ScheduleRule threshold_logloglog() { return {}; }
    static ScheduleRule two_log() { return {ScheduleKind::two_log_n, 0, 0, 0, 0}; }
    static ScheduleRule custom(double clog, double cloglog, double cconst = 0.0,
                               double clogloglog = 0.0) {
        return {ScheduleKind::custom, clog, cloglog, cconst, clogloglog};
    }
};

// Centering term a_n for the given schedule; n >= 16 so that the iterated
// logarithms are defined and positive.
double a_n_value(const ScheduleRule& rule, double n, int k);

// r_n(u) = ((a_n + u) / (n omega_d))^{1/d}; requires a_n + u > 0.
double r_n_of_u(double u, double n, double a_n, int d);

// b_{k,n} = n a_n^{k-1} e^{-a_n}.
double b_kn(double n, double a_n, int k);

// k-volume of the simplex spanned by k+1 points in R^m (m >= k):
// sqrt(det Gram) / k! of the difference vectors. 0 when degenerate.
double simplex_volume(const std::vector<std::vector<double>>& vertices);

// For k+1 unit vectors in R^k in general position the circumcenter is the
// origin; true iff every barycentric coordinate of the origin exceeds 1e-12.
bool origin_in_open_hull(const std::vector<std::vector<double>>& theta);

struct ConstantEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    bool exact = false;
};

// D_k of the limit measure: prefactor times the integral of
// h_k(theta) V_simp(theta)^{d-k+1} over (S^{k-1})^{k+1} with unnormalized
// surface measure. k = 1 is exact by enumeration over (S^0)^2 and collapses
// to 2^{d-1}; k >= 2 is Monte Carlo with uniform sphere points.
ConstantEstimate estimate_Dk(int d, int k, std::uint64_t samples, RandomStream stream);

// The combinatorial/spherical prefactor of D_k (exposed for the oracle
// tests that integrate the spherical factor independently).
double Dk_prefactor(int d, int k);

// Asymptotic target D_k e^{-u0} for the scaled probabilities.
double lambda_target(double u0, const ConstantEstimate& Dk);

} // namespace critfaces
