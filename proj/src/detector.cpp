#include "critfaces/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "critfaces/detail/circum.hpp"

namespace critfaces {

using detail::circumsphere_raw;
using detail::CircumResult;
using detail::general_position_raw;
using detail::interior_from_mu;
using detail::kEmptinessTol;

// Emptiness scan over grid cells with early exit: the center cell is probed
// first (an occupied ball is usually detected there), and cells whose box
// lies strictly outside the ball are skipped.
bool is_ball_empty_raw(const PointCloud& P, const SpatialGrid& grid, const double* c, double rho,
                       const int* exclude, int n_excl) {
    const int d = P.dim;
    const int m = grid.cells_per_axis;
    const double width = 1.0 / m;
    const double r = rho * (1.0 + kEmptinessTol);
    const double r2 = r * r;

    auto scan_cell = [&](int idx) -> bool { // true when an occupying point exists
        for (int id : grid.buckets[idx]) {
            if (torus_dist2(P.point(id), c, d) > r2) continue;
            bool excluded = false;
            for (int e = 0; e < n_excl; ++e)
                if (exclude[e] == id) {
                    excluded = true;
                    break;
                }
            if (!excluded) return true;
        }
        return false;
    };

    int cc[detail::kMaxDim];
    double cf[detail::kMaxDim];
    for (int a = 0; a < d; ++a) {
        cf[a] = canonical_coord(c[a]);
        cc[a] = static_cast<int>(cf[a] * m);
        if (cc[a] >= m) cc[a] = m - 1;
    }
    int center_idx = 0;
    for (int a = 0; a < d; ++a) center_idx = center_idx * m + cc[a];
    if (scan_cell(center_idx)) return false;

    int ring = static_cast<int>(std::ceil(r / width));
    int span = std::min(2 * ring + 1, m);
    int base[detail::kMaxDim], off[detail::kMaxDim] = {0};
    for (int a = 0; a < d; ++a) base[a] = ((cc[a] - ring) % m + m) % m;
    for (;;) {
        int idx = 0;
        bool is_center = true;
        double box_dist2 = 0.0;
        for (int a = 0; a < d; ++a) {
            int cell = (base[a] + off[a]) % m;
            idx = idx * m + cell;
            if (cell != cc[a]) is_center = false;
            // periodic distance from the query coordinate to the cell box
            double lo = cell * width, hi = (cell + 1) * width;
            double delta;
            if (cf[a] >= lo && cf[a] <= hi) {
                delta = 0.0;
            } else {
                double dlo = std::fabs(wrap_delta(cf[a], lo));
                double dhi = std::fabs(wrap_delta(cf[a], hi));
                delta = std::min(dlo, dhi);
            }
            box_dist2 += delta * delta;
        }
        if (!is_center && box_dist2 <= r2 && scan_cell(idx)) return false;
        int a = d - 1;
        while (a >= 0 && ++off[a] == span) off[a--] = 0;
        if (a < 0) break;
    }
    return true;
}

namespace {

void wrap_canonical(const double* lifted, int d, std::vector<double>& out) {
    out.resize(d);
    for (int a = 0; a < d; ++a) out[a] = canonical_coord(lifted[a]);
}

// Shared acceptance test for one candidate subset; `pts` holds the k+1
// lifted points, ids sorted ascending.
bool test_candidate(const PointCloud& P, const SpatialGrid& grid, const double* pts,
                    const int* ids, int k, double r_min, double r_max, CriticalFace& out) {
    const int d = P.dim;
    // cheap rejections first: the radius window kills most candidates before
    // the singular-value check runs
    CircumResult cr = circumsphere_raw(pts, k, d);
    if (!cr.ok) return false;
    double rho = std::sqrt(cr.rho2);
    if (rho < r_min || rho > r_max) return false;
    if (!interior_from_mu(cr.mu, k)) return false;
    if (!general_position_raw(pts, k, d)) return false;
    std::vector<double> center;
    wrap_canonical(cr.center, d, center);
    if (!is_ball_empty_raw(P, grid, center.data(), rho, ids, k + 1)) return false;
    out.vertex_ids.assign(ids, ids + k + 1);
    out.index = k;
    out.center = TorusPoint(center);
    out.value = rho;
    out.u_coord = 0.0;
    out.sign = FaceSign::unclassified;
    return true;
}

} // namespace

void circumsphere(const std::vector<std::vector<double>>& lifted, std::vector<double>& center,
                  double& rho) {
    const int k = static_cast<int>(lifted.size()) - 1;
    if (k < 1) throw std::invalid_argument("circumsphere: need at least 2 points");
    const int d = static_cast<int>(lifted[0].size());
    double pts[detail::kMaxDim * (detail::kMaxDim + 1)];
    for (int i = 0; i <= k; ++i)
        for (int a = 0; a < d; ++a) pts[i * d + a] = lifted[i][a];
    CircumResult cr = circumsphere_raw(pts, k, d);
    if (!cr.ok)
        throw std::invalid_argument("circumsphere: degenerate configuration (Gram condition)");
    center.assign(cr.center, cr.center + d);
    rho = std::sqrt(cr.rho2);
}

bool barycentric_interior(const std::vector<std::vector<double>>& lifted,
                          const std::vector<double>& c) {
    const int k = static_cast<int>(lifted.size()) - 1;
    const int d = static_cast<int>(lifted[0].size());
    double vecs[detail::kMaxDim * detail::kMaxDim];
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < d; ++a) vecs[i * d + a] = lifted[i + 1][a] - lifted[0][a];
    double g[detail::kMaxDim * detail::kMaxDim];
    detail::gram_matrix(vecs, k, d, g);
    double rhs[detail::kMaxDim];
    for (int i = 0; i < k; ++i) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += vecs[i * d + a] * (c[a] - lifted[0][a]);
        rhs[i] = s;
    }
    double mu[detail::kMaxDim];
    if (!detail::solve_full_pivot(g, rhs, k, mu)) return false;
    return interior_from_mu(mu, k);
}

bool general_position_check(const std::vector<std::vector<double>>& lifted) {
    const int k = static_cast<int>(lifted.size()) - 1;
    if (k < 1) return false;
    const int d = static_cast<int>(lifted[0].size());
    double pts[detail::kMaxDim * (detail::kMaxDim + 1)];
    for (int i = 0; i <= k; ++i)
        for (int a = 0; a < d; ++a) pts[i * d + a] = lifted[i][a];
    return general_position_raw(pts, k, d);
}

bool is_ball_empty(const PointCloud& P, const SpatialGrid& grid, const TorusPoint& c, double rho,
                   const std::vector<int>& exclude) {
    return is_ball_empty_raw(P, grid, c.coords.data(), rho, exclude.data(),
                          static_cast<int>(exclude.size()));
}

std::vector<CriticalFace> detect_critical_faces(const PointCloud& P, int k, double r_min,
                                                double r_max) {
    if (!(r_min >= 0.0) || r_min > r_max || !(r_max < 0.125))
        throw std::invalid_argument("detect_critical_faces: need 0 <= r_min <= r_max < 1/8");
    if (k < 1 || k > P.dim)
        throw std::invalid_argument("detect_critical_faces: need 1 <= k <= d");
    std::vector<CriticalFace> faces;
    if (P.size() < k + 1 || r_max <= 0.0) return faces;

    const int d = P.dim;
    const double reach = 2.0 * r_max;
    SpatialGrid grid = build_grid(P, reach);

    std::vector<int> nb;
    std::vector<double> lifted; // lifted coordinates of the neighbor pool
    std::vector<int> choice(k);
    double pts[detail::kMaxDim * (detail::kMaxDim + 1)];
    int ids[detail::kMaxDim + 1];
    CriticalFace face;

    for (int anchor = 0; anchor < P.size(); ++anchor) {
        neighbors_within(grid, P, P.point(anchor), reach, nb);
        // keep ids above the anchor: each subset is generated exactly once,
        // from its minimum-id member
        nb.erase(std::remove_if(nb.begin(), nb.end(), [&](int id) { return id <= anchor; }),
                 nb.end());
        if (static_cast<int>(nb.size()) < k) continue;
        const int pool = static_cast<int>(nb.size());
        lifted.resize(static_cast<std::size_t>(pool) * d);
        for (int j = 0; j < pool; ++j)
            lift_point(P.point(nb[j]), P.point(anchor), d, lifted.data() + j * d);
        for (int a = 0; a < d; ++a) pts[a] = canonical_coord(P.point(anchor)[a]);
        ids[0] = anchor;

        // lexicographic (k)-subsets of the neighbor pool
        for (int i = 0; i < k; ++i) choice[i] = i;
        for (;;) {
            bool diameter_ok = true;
            for (int i = 0; i < k && diameter_ok; ++i)
                for (int j = i + 1; j < k; ++j)
                    if (torus_dist2(P.point(nb[choice[i]]), P.point(nb[choice[j]]), d) >
                        reach * reach) {
                        diameter_ok = false;
                        break;
                    }
            if (diameter_ok) {
                for (int i = 0; i < k; ++i) {
                    ids[i + 1] = nb[choice[i]];
                    for (int a = 0; a < d; ++a)
                        pts[(i + 1) * d + a] = lifted[choice[i] * d + a];
                }
                if (test_candidate(P, grid, pts, ids, k, r_min, r_max, face))
                    faces.push_back(face);
            }
            int i = k - 1;
            while (i >= 0 && choice[i] == pool - k + i) --i;
            if (i < 0) break;
            ++choice[i];
            for (int j = i + 1; j < k; ++j) choice[j] = choice[j - 1] + 1;
        }
    }
    return faces;
}

std::vector<CriticalFace> detect_critical_faces_brute(const PointCloud& P, int k, double r_min,
                                                      double r_max) {
    if (!(r_min >= 0.0) || r_min > r_max || !(r_max < 0.125))
        throw std::invalid_argument("detect_critical_faces_brute: bad window");
    std::vector<CriticalFace> faces;
    const int n = P.size();
    if (n < k + 1 || r_max <= 0.0) return faces;
    const int d = P.dim;
    // whole cloud in one bucket: emptiness scans every point
    SpatialGrid whole;
    whole.dim = d;
    whole.cell_size = 1.0;
    whole.cells_per_axis = 1;
    whole.buckets.assign(1, {});
    for (int i = 0; i < n; ++i) whole.buckets[0].push_back(i);

    std::vector<int> choice(k + 1);
    for (int i = 0; i <= k; ++i) choice[i] = i;
    double pts[detail::kMaxDim * (detail::kMaxDim + 1)];
    int ids[detail::kMaxDim + 1];
    CriticalFace face;
    const double reach2 = 4.0 * r_max * r_max;
    for (;;) {
        // a face of value rho <= r_max has pairwise distances <= 2 rho, so
        // subsets with a larger diameter cannot qualify (and may not lift)
        bool ok = true;
        for (int i = 0; i <= k && ok; ++i)
            for (int j = i + 1; j <= k; ++j)
                if (torus_dist2(P.point(choice[i]), P.point(choice[j]), d) > reach2) {
                    ok = false;
                    break;
                }
        if (ok) {
            for (int i = 0; i <= k; ++i) ids[i] = choice[i];
            for (int a = 0; a < d; ++a) pts[a] = canonical_coord(P.point(choice[0])[a]);
            for (int i = 1; i <= k; ++i)
                lift_point(P.point(choice[i]), P.point(choice[0]), d, pts + i * d);
            if (test_candidate(P, whole, pts, ids, k, r_min, r_max, face)) faces.push_back(face);
        }
        int i = k;
        while (i >= 0 && choice[i] == n - k - 1 + i) --i;
        if (i < 0) break;
        ++choice[i];
        for (int j = i + 1; j <= k; ++j) choice[j] = choice[j - 1] + 1;
    }
    return faces;
}

} // namespace critfaces
