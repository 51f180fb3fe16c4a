#pragma once

#include <vector>

#include "critfaces/torus.hpp"

// Detection of Morse critical k-faces of the distance function: (k+1)-point
// subsets in general position whose circumcenter lies in the open simplex
// and whose circumscribed ball contains no other point of the cloud.

namespace critfaces {

enum class FaceSign { unclassified, positive, negative };

struct CriticalFace {
    std::vector<int> vertex_ids; // strictly increasing, length index+1
    int index = 0;               // k
    TorusPoint center;           // c(Y), canonical coordinates
    double value = 0.0;          // rho(Y)
    double u_coord = 0.0;        // n omega_d rho^d - a_n, filled by the engine
    FaceSign sign = FaceSign::unclassified;
};

// Circumcenter and circumradius of k+1 lifted points: the unique point of
// the affine hull equidistant from all of them, via the difference-vector
// normal equations with full pivoting. Throws on a Gram condition number
// beyond 1e12.
void circumsphere(const std::vector<std::vector<double>>& lifted, std::vector<double>& center,
                  double& rho);

// True iff every barycentric coordinate of c with respect to the lifted
// simplex exceeds 1e-12.
bool barycentric_interior(const std::vector<std::vector<double>>& lifted,
                          const std::vector<double>& c);

// Smallest singular value of the difference vectors > 1e-9 times the largest.
bool general_position_check(const std::vector<std::vector<double>>& lifted);

// True iff no point of P outside `exclude` has torus distance to c at most
// rho*(1+1e-12). `exclude` must be sorted.
bool is_ball_empty(const PointCloud& P, const SpatialGrid& grid, const TorusPoint& c, double rho,
                   const std::vector<int>& exclude);

// Allocation-free variant used by the hot loops.
bool is_ball_empty_raw(const PointCloud& P, const SpatialGrid& grid, const double* c, double rho,
                       const int* exclude, int n_excl);

// All critical k-faces with rho in [r_min, r_max], enumerated from the
// lowest-id vertex with grid-pruned neighbor sets. Output sorted by
// vertex_ids, deterministic.
std::vector<CriticalFace> detect_critical_faces(const PointCloud& P, int k, double r_min,
                                                double r_max);

// Reference enumerator over every (k+1)-subset with no spatial pruning;
// emptiness is checked against the whole cloud. Used by the selftest and
// the oracle suites.
std::vector<CriticalFace> detect_critical_faces_brute(const PointCloud& P, int k, double r_min,
                                                      double r_max);

} // namespace critfaces
