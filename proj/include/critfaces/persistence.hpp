#pragma once

#include <cstdint>
#include <vector>

#include "critfaces/detector.hpp"
#include "critfaces/torus.hpp"

// Cech filtration up to a cutoff radius, boundary reduction over GF(2), and
// the positive/negative classification of critical faces. Negative critical
// 1-faces coincide with the minimum spanning tree; Betti profiles derived
// from the pairing serve as conservation oracles.

namespace critfaces {

struct Simplex {
    std::vector<int> vertex_ids; // sorted; dimension = size() - 1
    double filtration_value = 0.0;
};

// Dimension-segregated simplex storage. Within each dimension simplices are
// sorted by (value, lexicographic vertex tuple); the global reduction order
// additionally places lower dimensions first at equal values, so every facet
// precedes its cofaces.
struct Filtration {
    int dim_points = 0; // ambient d
    int max_dimension = 0;
    double radius_cutoff = 0.0;
    std::vector<std::vector<std::uint32_t>> verts; // [dim], flat (dim+1 ids each)
    std::vector<std::vector<double>> values;       // [dim], ascending

    std::size_t count(int dim) const {
        return dim <= max_dimension ? values[dim].size() : 0;
    }
    std::size_t total() const {
        std::size_t t = 0;
        for (int p = 0; p <= max_dimension; ++p) t += count(p);
        return t;
    }
    const std::uint32_t* simplex_verts(int dim, std::size_t local) const {
        return verts[dim].data() + local * (dim + 1);
    }
    Simplex simplex(int dim, std::size_t local) const;

    // Reduction order as (dim, local) pairs sorted by (value, dim, lex).
    std::vector<std::pair<int, std::uint32_t>> reduction_order() const;

    // Local index of the simplex with the given sorted ids whose value lies
    // within `tol` of `value`; -1 when absent.
    std::int64_t find_simplex(int dim, const std::vector<int>& ids, double value,
                              double tol) const;
};

struct PersistencePairing {
    const Filtration* filtration = nullptr;
    std::vector<std::vector<char>> destroyer;         // [dim][local]
    std::vector<std::vector<std::int64_t>> partner;   // creator: killer in dim+1;
                                                      // destroyer: victim in dim-1; -1 if none
    std::vector<std::vector<double>> creator_values;  // [dim], ascending
    std::vector<std::vector<double>> destroyer_values;// [dim], ascending

    struct Interval {
        double birth = 0.0;
        double death = 0.0;
        bool finite = false;
    };
    // Birth-death intervals of homology degree `degree` (paired creators plus
    // unbounded intervals for the survivors at the cutoff).
    std::vector<Interval> intervals(int degree) const;
};

// Smallest enclosing ball by recursive move-to-front search with exact
// support sets of size up to d+1.
void min_enclosing_ball(const std::vector<std::vector<double>>& points,
                        std::vector<double>& center, double& radius);

// Every simplex of dimension <= max_dim whose minimum enclosing ball radius
// is at most R; candidate tuples come from cliques of the geometric graph at
// distance 2R anchored at their minimum-id vertex.
Filtration build_cech_filtration(const PointCloud& P, double R, int max_dim);

// Single-pass variant for max_dim = 2: builds the filtration and detects the
// critical 2-faces with value in [face_r_min, face_r_max] from the same
// candidate enumeration and circumsphere solve. Output identical to
// build_cech_filtration + detect_critical_faces.
struct CechBuildResult {
    Filtration filtration;
    std::vector<CriticalFace> top_faces;
};
CechBuildResult build_cech_with_top_faces(const PointCloud& P, double R, double face_r_min,
                                          double face_r_max);

// Engine fast path for d = 2: the Delaunay-restricted Cech filtration
// (simplices with an empty circumscribed ball), whose persistence pairing
// coincides with the full complex, plus the critical 1- and 2-faces from the
// same sweep. One to two orders of magnitude fewer simplices enter the
// reduction. Throws consistency_error if an empty ball reaches the torus
// decidability cap (radius 0.24) -- impossible at the densities this path
// is used for.
struct TrialGeometry {
    Filtration filtration;              // Delaunay-restricted, values as in Cech
    std::vector<CriticalFace> faces1;   // critical 1-faces, values in [0, R]
    std::vector<CriticalFace> faces2;   // critical 2-faces, values in [lo2, R]
};
TrialGeometry build_trial_geometry(const PointCloud& P, double R, double lo2);

// Left-to-right column reduction over GF(2) in the filtration order.
// Internally the matrix is processed per dimension (union-find for the
// vertex-edge pairs, coboundary reduction above); the resulting pairing is
// the unique one of the specified column order.
PersistencePairing reduce_boundary_matrix(const Filtration& f);

// Plain quadratic reference reduction, identical output; used by the oracle
// suites on small complexes.
PersistencePairing reduce_boundary_matrix_naive(const Filtration& f);

// Sets sign = positive for creators, negative for destroyers. Throws
// consistency_error when a face has no matching simplex at its value.
std::vector<CriticalFace> classify_faces(std::vector<CriticalFace> faces,
                                         const PersistencePairing& pairing);

// Minimum-spanning-forest edges of the 2R-geometric graph under the torus
// metric, reported as negative critical 1-faces (value, center from the same
// circumsphere arithmetic as the detector).
std::vector<CriticalFace> mst_negative_one_faces(const PointCloud& P, double R);

// beta_j(r) = #creators of dim j with value <= r minus #destroyers of
// dim j+1 with value <= r, for j = 0..max_dimension.
std::vector<std::int64_t> betti_profile(const PersistencePairing& pairing, double r);

// Connected components of the geometric graph with edge threshold 2r,
// by union-find; the beta_0 oracle.
int component_count(const PointCloud& P, double r);

} // namespace critfaces
