#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

// Geometry on the flat torus T^d = R^d / Z^d with unit side length.
// Coordinates are kept canonical in [0,1); distances wrap per axis.

namespace critfaces {

struct lifting_window_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Canonical representative of a coordinate: fractional part in [0,1).
inline double canonical_coord(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0; // floor rounding at exact integers
    return f;
}

struct TorusPoint {
    std::vector<double> coords; // each in [0,1)

    TorusPoint() = default;
    explicit TorusPoint(std::vector<double> c) : coords(std::move(c)) {
        for (double& x : coords) x = canonical_coord(x);
    }
    int dim() const { return static_cast<int>(coords.size()); }
    double operator[](int i) const { return coords[i]; }
};

// Per-axis wrapped difference in (-1/2, 1/2].
inline double wrap_delta(double a, double b) {
    double delta = a - b;
    delta -= std::round(delta);
    return delta;
}

// Squared toroidal distance on raw coordinate arrays.
inline double torus_dist2(const double* x, const double* y, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        double delta = wrap_delta(x[i], y[i]);
        s += delta * delta;
    }
    return s;
}

inline double torus_dist(const double* x, const double* y, int d) {
    return std::sqrt(torus_dist2(x, y, d));
}

double torus_dist(const TorusPoint& x, const TorusPoint& y);

// Unique representatives in R^d inside the open cube of half-width 1/4
// around the anchor's canonical representative. Pairwise Euclidean
// distances of lifted points equal the corresponding torus distances.
// Throws lifting_window_error if a point is >= 1/4 away from the anchor.
void lift_point(const double* p, const double* anchor, int d, double* out);

std::vector<TorusPoint> lift(const std::vector<TorusPoint>& points, const TorusPoint& anchor);

struct PointCloud {
    int dim = 0;
    std::vector<double> xs; // flat, point i at xs[i*dim .. i*dim+dim)
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;

    int size() const { return dim == 0 ? 0 : static_cast<int>(xs.size()) / dim; }
    const double* point(int i) const { return xs.data() + static_cast<std::size_t>(i) * dim; }
    TorusPoint point_at(int i) const {
        return TorusPoint(std::vector<double>(point(i), point(i) + dim));
    }
};

// Uniform bucket grid with periodic wrap. Buckets have width
// 1/cells_per_axis >= cell_size, so a ceil(radius/width)-ring around the
// query covers every point within `radius` on each axis.
struct SpatialGrid {
    int dim = 0;
    double cell_size = 0.0;
    int cells_per_axis = 0;
    std::vector<std::vector<int>> buckets;

    int bucket_index(const double* p) const {
        int idx = 0;
        for (int a = 0; a < dim; ++a) {
            int c = static_cast<int>(canonical_coord(p[a]) * cells_per_axis);
            if (c >= cells_per_axis) c = cells_per_axis - 1;
            idx = idx * cells_per_axis + c;
        }
        return idx;
    }
};

SpatialGrid build_grid(const PointCloud& points, double cell_size);

// Exactly the ids with torus_dist <= radius from x (gathered from a ring of
// cells, then filtered by exact distance). Output sorted by id.
void neighbors_within(const SpatialGrid& grid, const PointCloud& points, const double* x,
                      double radius, std::vector<int>& out);

std::vector<int> neighbors_within(const SpatialGrid& grid, const PointCloud& points,
                                  const TorusPoint& x, double radius);

} // namespace critfaces
