#pragma once

#include <cmath>
#include <cstring>

// Small dense helpers for simplex geometry: k and d never exceed a handful,
// so everything runs on stack buffers with no pivoting-order ambiguity.

namespace critfaces::detail {

constexpr int kMaxDim = 8;

// Gram matrix G[i][j] = v_i . v_j of k difference vectors of length d.
inline void gram_matrix(const double* vecs, int k, int d, double* g) {
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) s += vecs[i * d + a] * vecs[j * d + a];
            g[i * k + j] = s;
            g[j * k + i] = s;
        }
}

// Eigenvalues of a symmetric k x k matrix by cyclic Jacobi. Ascending order.
inline void sym_eigenvalues(const double* m, int k, double* eig) {
    double a[kMaxDim * kMaxDim];
    std::memcpy(a, m, sizeof(double) * k * k);
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < k; ++p)
            for (int q = p + 1; q < k; ++q) off += a[p * k + q] * a[p * k + q];
        if (off < 1e-300) break;
        for (int p = 0; p < k; ++p)
            for (int q = p + 1; q < k; ++q) {
                double apq = a[p * k + q];
                if (apq == 0.0) continue;
                double theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int i = 0; i < k; ++i) {
                    double aip = a[i * k + p], aiq = a[i * k + q];
                    a[i * k + p] = c * aip - s * aiq;
                    a[i * k + q] = s * aip + c * aiq;
                }
                for (int i = 0; i < k; ++i) {
                    double api = a[p * k + i], aqi = a[q * k + i];
                    a[p * k + i] = c * api - s * aqi;
                    a[q * k + i] = s * api + c * aqi;
                }
            }
    }
    for (int i = 0; i < k; ++i) eig[i] = a[i * k + i];
    for (int i = 1; i < k; ++i) {
        double x = eig[i];
        int j = i - 1;
        while (j >= 0 && eig[j] > x) {
            eig[j + 1] = eig[j];
            --j;
        }
        eig[j + 1] = x;
    }
}

// Solve a k x k system by Gaussian elimination with full pivoting.
// Returns false when the pivot ratio signals a condition number > 1/eps.
inline bool solve_full_pivot(const double* m, const double* rhs, int k, double* x,
                             double eps = 1e-12) {
    if (k == 1) {
        if (m[0] == 0.0) return false;
        x[0] = rhs[0] / m[0];
        return true;
    }
    if (k == 2) {
        // full pivoting on a 2x2: eliminate against the largest entry
        double a00 = m[0], a01 = m[1], a10 = m[2], a11 = m[3];
        double b0 = rhs[0], b1 = rhs[1];
        double p00 = std::fabs(a00), p01 = std::fabs(a01), p10 = std::fabs(a10),
               p11 = std::fabs(a11);
        double best = p00;
        int pr = 0, pc = 0;
        if (p01 > best) { best = p01; pr = 0; pc = 1; }
        if (p10 > best) { best = p10; pr = 1; pc = 0; }
        if (p11 > best) { best = p11; pr = 1; pc = 1; }
        if (best == 0.0) return false;
        if (pr == 1) {
            std::swap(a00, a10);
            std::swap(a01, a11);
            std::swap(b0, b1);
        }
        if (pc == 1) {
            std::swap(a00, a01);
            std::swap(a10, a11);
        }
        double f = a10 / a00;
        double s11 = a11 - f * a01;
        double s1 = b1 - f * b0;
        if (std::fabs(s11) == 0.0 || std::fabs(s11) < best * eps) return false;
        double y1 = s1 / s11;
        double y0 = (b0 - a01 * y1) / a00;
        if (pc == 1) std::swap(y0, y1);
        x[0] = y0;
        x[1] = y1;
        return true;
    }
    double a[kMaxDim * (kMaxDim + 1)];
    int col_of[kMaxDim];
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) a[i * (k + 1) + j] = m[i * k + j];
        a[i * (k + 1) + k] = rhs[i];
        col_of[i] = i;
    }
    double first_pivot = 0.0;
    for (int step = 0; step < k; ++step) {
        int pr = step, pc = step;
        double best = 0.0;
        for (int i = step; i < k; ++i)
            for (int j = step; j < k; ++j) {
                double v = std::fabs(a[i * (k + 1) + j]);
                if (v > best) {
                    best = v;
                    pr = i;
                    pc = j;
                }
            }
        if (step == 0) first_pivot = best;
        if (best == 0.0 || best < first_pivot * eps) return false;
        if (pr != step)
            for (int j = 0; j <= k; ++j) std::swap(a[step * (k + 1) + j], a[pr * (k + 1) + j]);
        if (pc != step) {
            for (int i = 0; i < k; ++i) std::swap(a[i * (k + 1) + step], a[i * (k + 1) + pc]);
            std::swap(col_of[step], col_of[pc]);
        }
        double piv = a[step * (k + 1) + step];
        for (int i = step + 1; i < k; ++i) {
            double f = a[i * (k + 1) + step] / piv;
            if (f == 0.0) continue;
            for (int j = step; j <= k; ++j) a[i * (k + 1) + j] -= f * a[step * (k + 1) + j];
        }
    }
    double y[kMaxDim];
    for (int i = k - 1; i >= 0; --i) {
        double s = a[i * (k + 1) + k];
        for (int j = i + 1; j < k; ++j) s -= a[i * (k + 1) + j] * y[j];
        y[i] = s / a[i * (k + 1) + i];
    }
    for (int i = 0; i < k; ++i) x[col_of[i]] = y[i];
    return true;
}

// det of the Gram matrix via the elimination product (k x k, SPD up to noise).
inline double gram_det(const double* g, int k) {
    double a[kMaxDim * kMaxDim];
    std::memcpy(a, g, sizeof(double) * k * k);
    double det = 1.0;
    for (int step = 0; step < k; ++step) {
        int pr = step;
        double best = std::fabs(a[step * k + step]);
        for (int i = step + 1; i < k; ++i) {
            double v = std::fabs(a[i * k + step]);
            if (v > best) {
                best = v;
                pr = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (pr != step) {
            for (int j = 0; j < k; ++j) std::swap(a[step * k + j], a[pr * k + j]);
            det = -det;
        }
        double piv = a[step * k + step];
        det *= piv;
        for (int i = step + 1; i < k; ++i) {
            double f = a[i * k + step] / piv;
            for (int j = step; j < k; ++j) a[i * k + j] -= f * a[step * k + j];
        }
    }
    return det;
}

} // namespace critfaces::detail
