#include "critfaces/torus.hpp"

#include <algorithm>

namespace critfaces {

double torus_dist(const TorusPoint& x, const TorusPoint& y) {
    if (x.dim() != y.dim())
        throw std::invalid_argument("torus_dist: dimension mismatch");
    return torus_dist(x.coords.data(), y.coords.data(), x.dim());
}

void lift_point(const double* p, const double* anchor, int d, double* out) {
    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) {
        double a = canonical_coord(anchor[i]);
        double delta = wrap_delta(canonical_coord(p[i]), a);
        dist2 += delta * delta;
        out[i] = a + delta;
    }
    if (dist2 >= 0.0625) // (1/4)^2
        throw lifting_window_error("lift: point at torus distance >= 1/4 from anchor");
}

std::vector<TorusPoint> lift(const std::vector<TorusPoint>& points, const TorusPoint& anchor) {
    std::vector<TorusPoint> out;
    out.reserve(points.size());
    const int d = anchor.dim();
    std::vector<double> buf(d);
    for (const auto& p : points) {
        if (p.dim() != d) throw std::invalid_argument("lift: dimension mismatch");
        lift_point(p.coords.data(), anchor.coords.data(), d, buf.data());
        TorusPoint q;
        q.coords = buf; // lifted representative, deliberately not re-canonicalized
        out.push_back(std::move(q));
    }
    return out;
}

SpatialGrid build_grid(const PointCloud& points, double cell_size) {
    if (!(cell_size > 0.0) || cell_size > 1.0)
        throw std::invalid_argument("build_grid: cell_size must be in (0, 1]");
    SpatialGrid g;
    g.dim = points.dim;
    g.cell_size = cell_size;
    g.cells_per_axis = std::max(1, static_cast<int>(std::floor(1.0 / cell_size)));
    std::size_t ncells = 1;
    for (int a = 0; a < points.dim; ++a) ncells *= g.cells_per_axis;
    g.buckets.assign(ncells, {});
    for (int i = 0; i < points.size(); ++i)
        g.buckets[g.bucket_index(points.point(i))].push_back(i);
    return g;
}

void neighbors_within(const SpatialGrid& grid, const PointCloud& points, const double* x,
                      double radius, std::vector<int>& out) {
    out.clear();
    const int d = grid.dim;
    const int m = grid.cells_per_axis;
    const double width = 1.0 / m;
    int ring = static_cast<int>(std::ceil(radius / width));
    int span = std::min(2 * ring + 1, m); // span == m scans every cell once
    const double r2 = radius * radius;

    std::vector<int> base(d), off(d, 0);
    for (int a = 0; a < d; ++a) {
        int c = static_cast<int>(canonical_coord(x[a]) * m);
        if (c >= m) c = m - 1;
        base[a] = ((c - ring) % m + m) % m;
    }
    for (;;) {
        int idx = 0;
        for (int a = 0; a < d; ++a) idx = idx * m + (base[a] + off[a]) % m;
        for (int id : grid.buckets[idx]) {
            if (torus_dist2(points.point(id), x, d) <= r2) out.push_back(id);
        }
        int a = d - 1;
        while (a >= 0 && ++off[a] == span) off[a--] = 0;
        if (a < 0) break;
    }
    std::sort(out.begin(), out.end());
}

std::vector<int> neighbors_within(const SpatialGrid& grid, const PointCloud& points,
                                  const TorusPoint& x, double radius) {
    std::vector<int> out;
    neighbors_within(grid, points, x.coords.data(), radius, out);
    return out;
}

} // namespace critfaces
