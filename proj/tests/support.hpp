#pragma once

#include <cmath>
#include <vector>

#include "critfaces/constants.hpp"

// Shared oracle helpers for the test suites. Everything here is independent
// of the library's implementation paths it is used to check.

namespace testsupport {

struct GaussLegendre {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights;
};

// Nodes and weights by Newton iteration on the Legendre polynomial.
inline GaussLegendre gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        gl.nodes[i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

// Triangle area for unit-circle vertices at angles (0, beta, gamma).
inline double inscribed_area(double beta, double gamma) {
    return 0.5 * std::fabs(std::sin(beta) + std::sin(gamma - beta) - std::sin(gamma));
}

// Deterministic product-quadrature evaluation of the spherical integral for
// d = 3, k = 2: the origin-in-hull region for angles (0, beta, gamma) is
// {0 < beta < pi, pi < gamma < beta + pi} plus its mirror image, and the
// rotational symmetry contributes a factor 2 pi.
inline double quadrature_D2_d3(int points = 256) {
    GaussLegendre gl = gauss_legendre(points);
    double inner_total = 0.0;
    for (int i = 0; i < points; ++i) {
        double beta = 0.5 * M_PI * (gl.nodes[i] + 1.0);
        double wb = 0.5 * M_PI * gl.weights[i];
        double lo = M_PI, hi = beta + M_PI;
        double acc = 0.0;
        for (int j = 0; j < points; ++j) {
            double gamma = 0.5 * (hi - lo) * (gl.nodes[j] + 1.0) + lo;
            double wg = 0.5 * (hi - lo) * gl.weights[j];
            double v = inscribed_area(beta, gamma);
            acc += wg * v * v;
        }
        inner_total += wb * acc;
    }
    double integral = 2.0 * M_PI * 2.0 * inner_total; // rotation x mirror region
    return critfaces::Dk_prefactor(3, 2) * integral;
}

// Closed form of the same constant, derived by integrating the arc-length
// density of uniform inscribed triangles: D_2(d=3) = 3 + 3 pi^2 / 16.
inline double closed_form_D2_d3() { return 3.0 + 3.0 * M_PI * M_PI / 16.0; }

} // namespace testsupport
