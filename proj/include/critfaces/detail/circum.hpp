#pragma once

#include <cmath>

#include "critfaces/detail/linalg.hpp"

// Circumsphere solve shared by the detector, the filtration builder and the
// MST oracle: one arithmetic path, so equal inputs give bitwise equal values.

namespace critfaces::detail {

constexpr double kInteriorTol = 1e-12;  // strict barycentric positivity
constexpr double kEmptinessTol = 1e-12; // dist <= rho*(1+tol) counts as occupied
constexpr double kGeneralPosTol = 1e-9; // singular value ratio

struct CircumResult {
    double center[kMaxDim];
    double mu[kMaxDim]; // center = y0 + sum mu_i (y_{i+1} - y0)
    double rho2 = 0.0;
    bool ok = false;
};

// Circumcenter of k+1 points (flat, row-major, d coords each) in their
// affine hull: solve 2 (y_{i+1}-y0).w = |y_{i+1}-y0|^2 for w in the span of
// the difference vectors. ok=false when the Gram pivot ratio exceeds 1e12.
inline CircumResult circumsphere_raw(const double* pts, int k, int d) {
    CircumResult res;
    double vecs[kMaxDim * kMaxDim];
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < d; ++a) vecs[i * d + a] = pts[(i + 1) * d + a] - pts[a];
    double g[kMaxDim * kMaxDim];
    gram_matrix(vecs, k, d, g);
    double rhs[kMaxDim];
    for (int i = 0; i < k; ++i) rhs[i] = 0.5 * g[i * k + i];
    if (!solve_full_pivot(g, rhs, k, res.mu)) return res;
    double w[kMaxDim] = {0};
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < d; ++a) w[a] += res.mu[i] * vecs[i * d + a];
    res.rho2 = 0.0;
    for (int a = 0; a < d; ++a) {
        res.center[a] = pts[a] + w[a];
        res.rho2 += w[a] * w[a];
    }
    res.ok = true;
    return res;
}

inline bool general_position_raw(const double* pts, int k, int d) {
    double vecs[kMaxDim * kMaxDim];
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < d; ++a) vecs[i * d + a] = pts[(i + 1) * d + a] - pts[a];
    double g[kMaxDim * kMaxDim];
    gram_matrix(vecs, k, d, g);
    double eig[kMaxDim];
    sym_eigenvalues(g, k, eig);
    double lo = eig[0] > 0.0 ? eig[0] : 0.0;
    double hi = eig[k - 1] > 0.0 ? eig[k - 1] : 0.0;
    if (hi == 0.0) return false;
    // Gram eigenvalues are squared singular values of the difference vectors.
    return lo > hi * kGeneralPosTol * kGeneralPosTol;
}

// Strict interior: every barycentric coordinate above kInteriorTol.
inline bool interior_from_mu(const double* mu, int k) {
    double lambda0 = 1.0;
    for (int i = 0; i < k; ++i) {
        if (mu[i] <= kInteriorTol) return false;
        lambda0 -= mu[i];
    }
    return lambda0 > kInteriorTol;
}

// Closed hull, used only to dispatch the smallest-ball case split.
inline bool interior_closed_from_mu(const double* mu, int k) {
    double lambda0 = 1.0;
    for (int i = 0; i < k; ++i) {
        if (mu[i] < 0.0) return false;
        lambda0 -= mu[i];
    }
    return lambda0 >= 0.0;
}

} // namespace critfaces::detail
