#include "critfaces/persistence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <stdexcept>

#include "critfaces/detail/circum.hpp"

namespace critfaces {

using detail::circumsphere_raw;
using detail::CircumResult;
using detail::interior_closed_from_mu;
using detail::kMaxDim;

namespace {

// ---------------------------------------------------------------------------
// smallest enclosing ball
// ---------------------------------------------------------------------------

struct Ball {
    double c[kMaxDim] = {0};
    double r2 = -1.0;
};

bool in_ball(const Ball& b, const double* p, int d) {
    if (b.r2 < 0.0) return false;
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += (p[a] - b.c[a]) * (p[a] - b.c[a]);
    return s <= b.r2 * (1.0 + 1e-12) + 1e-300;
}

Ball ball_of_support(const double* const* sup, int m, int d) {
    Ball b;
    if (m == 0) return b;
    if (m == 1) {
        std::memcpy(b.c, sup[0], sizeof(double) * d);
        b.r2 = 0.0;
        return b;
    }
    double pts[(kMaxDim + 1) * kMaxDim];
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < d; ++a) pts[i * d + a] = sup[i][a];
    CircumResult cr = circumsphere_raw(pts, m - 1, d);
    if (cr.ok) {
        std::memcpy(b.c, cr.center, sizeof(double) * d);
        b.r2 = cr.rho2;
        return b;
    }
    // degenerate support (duplicates): diametral ball of the farthest pair
    int bi = 0, bj = 1;
    double best = -1.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) s += (sup[i][a] - sup[j][a]) * (sup[i][a] - sup[j][a]);
            if (s > best) {
                best = s;
                bi = i;
                bj = j;
            }
        }
    for (int a = 0; a < d; ++a) b.c[a] = 0.5 * (sup[bi][a] + sup[bj][a]);
    b.r2 = 0.25 * best;
    return b;
}

Ball welzl_mtf(const double** pts, int n, const double** sup, int m, int d, int cap) {
    if (n == 0 || m == cap) return ball_of_support(sup, m, d);
    const double* p = pts[n - 1];
    Ball b = welzl_mtf(pts, n - 1, sup, m, d, cap);
    if (in_ball(b, p, d)) return b;
    sup[m] = p;
    b = welzl_mtf(pts, n - 1, sup, m + 1, d, cap);
    // move-to-front keeps recent support candidates early
    std::memmove(pts + 1, pts, sizeof(const double*) * (n - 1));
    pts[0] = p;
    return b;
}

Ball meb_raw(const double* flat, int m, int d) {
    const double* ptrs[kMaxDim + 2];
    const double* sup[kMaxDim + 2];
    for (int i = 0; i < m; ++i) ptrs[i] = flat + i * d;
    return welzl_mtf(ptrs, m, sup, 0, d, d + 1);
}

// ---------------------------------------------------------------------------
// Cech entry values (clamped so every facet value is dominated exactly)
// ---------------------------------------------------------------------------

double edge_value(const PointCloud& P, int a, int b) {
    return 0.5 * std::sqrt(torus_dist2(P.point(a), P.point(b), P.dim));
}

// p0..p2 lifted; e* the torus-metric edge values. Circumball when the
// circumcenter lies in the closed hull, longest edge otherwise.
double triangle_value(const double* p0, const double* p1, const double* p2, int d, double e01,
                      double e02, double e12) {
    double pts[3 * kMaxDim];
    std::memcpy(pts, p0, sizeof(double) * d);
    std::memcpy(pts + d, p1, sizeof(double) * d);
    std::memcpy(pts + 2 * d, p2, sizeof(double) * d);
    double v = std::max(e01, std::max(e02, e12));
    CircumResult cr = circumsphere_raw(pts, 2, d);
    if (cr.ok && interior_closed_from_mu(cr.mu, 2)) {
        double rho = std::sqrt(cr.rho2);
        if (rho > v) v = rho;
    }
    return v;
}

double tet_value(const PointCloud& P, const double* lifted[4], const int ids[4], int d) {
    double flat[4 * kMaxDim];
    for (int i = 0; i < 4; ++i) std::memcpy(flat + i * d, lifted[i], sizeof(double) * d);
    Ball b = meb_raw(flat, 4, d);
    double v = std::sqrt(std::max(b.r2, 0.0));
    for (int drop = 0; drop < 4; ++drop) {
        int f[3], w = 0;
        for (int i = 0; i < 4; ++i)
            if (i != drop) f[w++] = i;
        double tv = triangle_value(lifted[f[0]], lifted[f[1]], lifted[f[2]], d,
                                   edge_value(P, ids[f[0]], ids[f[1]]),
                                   edge_value(P, ids[f[0]], ids[f[2]]),
                                   edge_value(P, ids[f[1]], ids[f[2]]));
        if (tv > v) v = tv;
    }
    return v;
}

// ---------------------------------------------------------------------------
// open-addressing map from packed vertex pairs/triples to local indices
// ---------------------------------------------------------------------------

struct PackedMap {
    std::vector<std::uint64_t> keys;
    std::vector<std::uint32_t> vals;
    std::uint64_t mask = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    void init(std::size_t n) {
        std::size_t cap = 16;
        while (cap < 2 * n + 1) cap <<= 1;
        keys.assign(cap, ~0ull);
        vals.assign(cap, 0);
        mask = cap - 1;
    }
    void insert(std::uint64_t key, std::uint32_t val) {
        std::uint64_t h = mix(key) & mask;
        while (keys[h] != ~0ull) h = (h + 1) & mask;
        keys[h] = key;
        vals[h] = val;
    }
    std::uint32_t at(std::uint64_t key) const {
        std::uint64_t h = mix(key) & mask;
        while (keys[h] != key) {
            if (keys[h] == ~0ull) throw consistency_error("facet lookup failed");
            h = (h + 1) & mask;
        }
        return vals[h];
    }
};

std::uint64_t pack2(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::uint64_t pack3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    // three ids below 2^21 (plenty for any cloud this artifact handles)
    return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) | c;
}

void symdiff(std::vector<std::uint32_t>& cur, const std::vector<std::uint32_t>& other,
             std::vector<std::uint32_t>& buf) {
    buf.clear();
    std::size_t i = 0, j = 0;
    while (i < cur.size() && j < other.size()) {
        if (cur[i] == other[j]) {
            ++i;
            ++j;
        } else if (cur[i] < other[j]) {
            buf.push_back(cur[i++]);
        } else {
            buf.push_back(other[j++]);
        }
    }
    while (i < cur.size()) buf.push_back(cur[i++]);
    while (j < other.size()) buf.push_back(other[j++]);
    cur.swap(buf);
}

// coboundary reduction of the (p-1 -> p) block: processes (p-1)-columns in
// reverse filtration order with pivots at their earliest cofaces, which
// yields exactly the pairs of the left-to-right boundary reduction.
void coboundary_pass(const Filtration& f, int p, PersistencePairing& pp) {
    const std::size_t E = f.count(p - 1), T = f.count(p);
    if (E == 0 || T == 0) return;

    PackedMap facet_map;
    facet_map.init(E);
    for (std::size_t e = 0; e < E; ++e) {
        const std::uint32_t* v = f.simplex_verts(p - 1, e);
        if (p - 1 == 1)
            facet_map.insert(pack2(v[0], v[1]), static_cast<std::uint32_t>(e));
        else if (p - 1 == 2)
            facet_map.insert(pack3(v[0], v[1], v[2]), static_cast<std::uint32_t>(e));
        else
            throw std::invalid_argument("reduce_boundary_matrix: dimension above 3 unsupported");
    }
    auto facet_local = [&](const std::uint32_t* ids, int skip, int nv) -> std::uint32_t {
        std::uint32_t t[3];
        int w = 0;
        for (int i = 0; i < nv; ++i)
            if (i != skip) t[w++] = ids[i];
        return p - 1 == 1 ? facet_map.at(pack2(t[0], t[1])) : facet_map.at(pack3(t[0], t[1], t[2]));
    };

    // cofaces of each (p-1)-simplex, ascending in filtration order
    const int nv = p + 1;
    std::vector<std::uint32_t> facet_ids(T * nv);
    for (std::size_t t = 0; t < T; ++t) {
        const std::uint32_t* ids = f.simplex_verts(p, t);
        for (int s = 0; s < nv; ++s) facet_ids[t * nv + s] = facet_local(ids, s, nv);
    }
    std::vector<std::uint32_t> offsets(E + 1, 0);
    for (std::uint32_t e : facet_ids) ++offsets[e + 1];
    for (std::size_t e = 0; e < E; ++e) offsets[e + 1] += offsets[e];
    std::vector<std::uint32_t> cofaces(offsets[E]);
    {
        std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
        for (std::size_t t = 0; t < T; ++t)
            for (int s = 0; s < nv; ++s)
                cofaces[cursor[facet_ids[t * nv + s]]++] = static_cast<std::uint32_t>(t);
        facet_ids.clear();
        facet_ids.shrink_to_fit();
    }

    std::vector<std::int64_t> claimed(T, -1);
    std::vector<std::vector<std::uint32_t>> reduced(E);
    std::vector<std::uint32_t> cur, buf;
    for (std::int64_t e = static_cast<std::int64_t>(E) - 1; e >= 0; --e) {
        if (pp.destroyer[p - 1][e]) continue; // cleared: provably reduces to zero
        cur.assign(cofaces.begin() + offsets[e], cofaces.begin() + offsets[e + 1]);
        while (!cur.empty()) {
            std::uint32_t t = cur.front();
            std::int64_t owner = claimed[t];
            if (owner < 0) {
                claimed[t] = e;
                pp.partner[p - 1][e] = t;
                pp.destroyer[p][t] = 1;
                pp.partner[p][t] = e;
                reduced[e] = std::move(cur);
                cur.clear();
                break;
            }
            symdiff(cur, reduced[owner], buf);
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Filtration
// ---------------------------------------------------------------------------

Simplex Filtration::simplex(int dim, std::size_t local) const {
    Simplex s;
    const std::uint32_t* v = simplex_verts(dim, local);
    s.vertex_ids.assign(v, v + dim + 1);
    s.filtration_value = values[dim][local];
    return s;
}

std::vector<std::pair<int, std::uint32_t>> Filtration::reduction_order() const {
    std::vector<std::pair<int, std::uint32_t>> order;
    order.reserve(total());
    for (int p = 0; p <= max_dimension; ++p)
        for (std::size_t i = 0; i < count(p); ++i)
            order.emplace_back(p, static_cast<std::uint32_t>(i));
    std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
        double vx = values[x.first][x.second], vy = values[y.first][y.second];
        if (vx != vy) return vx < vy;
        if (x.first != y.first) return x.first < y.first;
        const std::uint32_t* ax = simplex_verts(x.first, x.second);
        const std::uint32_t* ay = simplex_verts(y.first, y.second);
        return std::lexicographical_compare(ax, ax + x.first + 1, ay, ay + y.first + 1);
    });
    return order;
}

std::int64_t Filtration::find_simplex(int dim, const std::vector<int>& ids, double value,
                                      double tol) const {
    if (dim > max_dimension || static_cast<int>(ids.size()) != dim + 1) return -1;
    const auto& vals = values[dim];
    auto lo = std::lower_bound(vals.begin(), vals.end(), value - tol);
    auto hi = std::upper_bound(vals.begin(), vals.end(), value + tol);
    for (auto it = lo; it != hi; ++it) {
        std::size_t local = static_cast<std::size_t>(it - vals.begin());
        const std::uint32_t* v = simplex_verts(dim, local);
        bool match = true;
        for (int i = 0; i <= dim; ++i)
            if (v[i] != static_cast<std::uint32_t>(ids[i])) {
                match = false;
                break;
            }
        if (match) return static_cast<std::int64_t>(local);
    }
    return -1;
}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

void min_enclosing_ball(const std::vector<std::vector<double>>& points,
                        std::vector<double>& center, double& radius) {
    if (points.empty()) throw std::invalid_argument("min_enclosing_ball: no points");
    const int d = static_cast<int>(points[0].size());
    const int m = static_cast<int>(points.size());
    if (m > d + 1) throw std::invalid_argument("min_enclosing_ball: need at most d+1 points");
    double flat[(kMaxDim + 2) * kMaxDim];
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < d; ++a) flat[i * d + a] = points[i][a];
    Ball b = meb_raw(flat, m, d);
    center.assign(b.c, b.c + d);
    radius = std::sqrt(std::max(b.r2, 0.0));
}

namespace {

// Shared construction for build_cech_filtration and the fused single-pass
// variant. When `faces` is non-null (max_dim == 2), every candidate
// triangle's circumsphere feeds both its entry value and the criticality
// test, with predicates ordered exactly as in the detector.
Filtration build_cech_impl(const PointCloud& P, double R, int max_dim,
                           std::vector<CriticalFace>* faces, double face_lo, double face_hi) {
    if (!(R >= 0.0) || R >= 0.125)
        throw std::invalid_argument("build_cech_filtration: need 0 <= R < 1/8");
    if (max_dim < 0 || max_dim > P.dim)
        throw std::invalid_argument("build_cech_filtration: need 0 <= max_dim <= d");
    if (max_dim > 3)
        throw std::invalid_argument("build_cech_filtration: dimensions above 3 unsupported");

    Filtration f;
    f.dim_points = P.dim;
    f.max_dimension = max_dim;
    f.radius_cutoff = R;
    f.verts.assign(max_dim + 1, {});
    f.values.assign(max_dim + 1, {});
    const int n = P.size(), d = P.dim;
    f.verts[0].resize(n);
    for (int i = 0; i < n; ++i) f.verts[0][i] = i;
    f.values[0].assign(n, 0.0);
    if (max_dim == 0 || n == 0 || R <= 0.0) return f;

    struct ERec {
        double v;
        std::uint32_t a, b;
    };
    struct TRec {
        double v;
        std::uint32_t a, b, c;
    };
    struct QRec {
        double v;
        std::uint32_t a, b, c, e;
    };
    std::vector<ERec> edges;
    std::vector<TRec> tris;
    std::vector<QRec> quads;

    const double reach = 2.0 * R;
    const double reach2 = reach * reach;
    SpatialGrid grid = build_grid(P, reach);
    std::vector<int> nb;
    std::vector<double> lifted, evals, orig;
    std::vector<double> face_center(d);
    for (int anchor = 0; anchor < n; ++anchor) {
        neighbors_within(grid, P, P.point(anchor), reach, nb);
        nb.erase(std::remove_if(nb.begin(), nb.end(), [&](int id) { return id <= anchor; }),
                 nb.end());
        const int pool = static_cast<int>(nb.size());
        if (pool == 0) continue;
        lifted.resize(static_cast<std::size_t>(pool) * d);
        orig.resize(static_cast<std::size_t>(pool) * d);
        evals.resize(pool);
        for (int x = 0; x < pool; ++x) {
            lift_point(P.point(nb[x]), P.point(anchor), d, lifted.data() + x * d);
            for (int a = 0; a < d; ++a) orig[x * d + a] = P.point(nb[x])[a];
            evals[x] = edge_value(P, anchor, nb[x]);
            edges.push_back({evals[x], static_cast<std::uint32_t>(anchor),
                             static_cast<std::uint32_t>(nb[x])});
        }
        if (max_dim < 2) continue;
        double pts3[3 * kMaxDim];
        for (int a = 0; a < d; ++a) pts3[a] = canonical_coord(P.point(anchor)[a]);
        for (int x = 0; x < pool; ++x) {
            for (int a = 0; a < d; ++a) pts3[d + a] = lifted[x * d + a];
            for (int y = x + 1; y < pool; ++y) {
                double dxy2 = torus_dist2(orig.data() + x * d, orig.data() + y * d, d);
                if (dxy2 > reach2) continue;
                double exy = 0.5 * std::sqrt(dxy2);
                for (int a = 0; a < d; ++a) pts3[2 * d + a] = lifted[y * d + a];

                CircumResult cr = circumsphere_raw(pts3, 2, d);
                double rho = cr.ok ? std::sqrt(cr.rho2) : -1.0;
                double tv = std::max(evals[x], std::max(evals[y], exy));
                if (cr.ok && interior_closed_from_mu(cr.mu, 2) && rho > tv) tv = rho;
                if (tv <= R)
                    tris.push_back({tv, static_cast<std::uint32_t>(anchor),
                                    static_cast<std::uint32_t>(nb[x]),
                                    static_cast<std::uint32_t>(nb[y])});
                if (faces && cr.ok && rho >= face_lo && rho <= face_hi &&
                    detail::interior_from_mu(cr.mu, 2) &&
                    detail::general_position_raw(pts3, 2, d)) {
                    const int ids[3] = {anchor, nb[x], nb[y]};
                    for (int a = 0; a < d; ++a) face_center[a] = canonical_coord(cr.center[a]);
                    if (is_ball_empty_raw(P, grid, face_center.data(), rho, ids, 3)) {
                        CriticalFace face;
                        face.vertex_ids = {anchor, nb[x], nb[y]};
                        face.index = 2;
                        face.center = TorusPoint(face_center);
                        face.value = rho;
                        face.sign = FaceSign::unclassified;
                        faces->push_back(std::move(face));
                    }
                }
                if (max_dim < 3) continue;
                for (int z = y + 1; z < pool; ++z) {
                    if (torus_dist2(orig.data() + x * d, orig.data() + z * d, d) > reach2)
                        continue;
                    if (torus_dist2(orig.data() + y * d, orig.data() + z * d, d) > reach2)
                        continue;
                    const double* lf[4] = {pts3, lifted.data() + x * d, lifted.data() + y * d,
                                           lifted.data() + z * d};
                    const int ids[4] = {anchor, nb[x], nb[y], nb[z]};
                    double qv = tet_value(P, lf, ids, d);
                    if (qv <= R)
                        quads.push_back({qv, static_cast<std::uint32_t>(anchor),
                                         static_cast<std::uint32_t>(nb[x]),
                                         static_cast<std::uint32_t>(nb[y]),
                                         static_cast<std::uint32_t>(nb[z])});
                }
            }
        }
    }

    std::sort(edges.begin(), edges.end(), [](const ERec& x, const ERec& y) {
        if (x.v != y.v) return x.v < y.v;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    f.verts[1].resize(edges.size() * 2);
    f.values[1].resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        f.verts[1][2 * i] = edges[i].a;
        f.verts[1][2 * i + 1] = edges[i].b;
        f.values[1][i] = edges[i].v;
    }
    if (max_dim >= 2) {
        std::sort(tris.begin(), tris.end(), [](const TRec& x, const TRec& y) {
            if (x.v != y.v) return x.v < y.v;
            if (x.a != y.a) return x.a < y.a;
            if (x.b != y.b) return x.b < y.b;
            return x.c < y.c;
        });
        f.verts[2].resize(tris.size() * 3);
        f.values[2].resize(tris.size());
        for (std::size_t i = 0; i < tris.size(); ++i) {
            f.verts[2][3 * i] = tris[i].a;
            f.verts[2][3 * i + 1] = tris[i].b;
            f.verts[2][3 * i + 2] = tris[i].c;
            f.values[2][i] = tris[i].v;
        }
    }
    if (max_dim >= 3) {
        std::sort(quads.begin(), quads.end(), [](const QRec& x, const QRec& y) {
            if (x.v != y.v) return x.v < y.v;
            if (x.a != y.a) return x.a < y.a;
            if (x.b != y.b) return x.b < y.b;
            if (x.c != y.c) return x.c < y.c;
            return x.e < y.e;
        });
        f.verts[3].resize(quads.size() * 4);
        f.values[3].resize(quads.size());
        for (std::size_t i = 0; i < quads.size(); ++i) {
            f.verts[3][4 * i] = quads[i].a;
            f.verts[3][4 * i + 1] = quads[i].b;
            f.verts[3][4 * i + 2] = quads[i].c;
            f.verts[3][4 * i + 3] = quads[i].e;
            f.values[3][i] = quads[i].v;
        }
    }
    return f;
}

} // namespace

Filtration build_cech_filtration(const PointCloud& P, double R, int max_dim) {
    return build_cech_impl(P, R, max_dim, nullptr, 0.0, 0.0);
}

CechBuildResult build_cech_with_top_faces(const PointCloud& P, double R, double face_r_min,
                                          double face_r_max) {
    CechBuildResult result;
    result.filtration = build_cech_impl(P, R, 2, &result.top_faces, face_r_min, face_r_max);
    std::sort(result.top_faces.begin(), result.top_faces.end(),
              [](const CriticalFace& x, const CriticalFace& y) {
                  return x.vertex_ids < y.vertex_ids;
              });
    return result;
}

TrialGeometry build_trial_geometry(const PointCloud& P, double R, double lo2) {
    if (!(R >= 0.0) || R >= 0.125)
        throw std::invalid_argument("build_trial_geometry: need 0 <= R < 1/8");
    if (P.dim != 2) throw std::invalid_argument("build_trial_geometry: d = 2 only");
    // Largest ball radius for which torus emptiness is decidable here; an
    // empty ball this large would make the Delaunay restriction ambiguous.
    constexpr double kBallCap = 0.24;

    TrialGeometry out;
    Filtration& f = out.filtration;
    const int n = P.size(), d = P.dim;
    f.dim_points = d;
    f.max_dimension = 2;
    f.radius_cutoff = R;
    f.verts.assign(3, {});
    f.values.assign(3, {});
    f.verts[0].resize(n);
    for (int i = 0; i < n; ++i) f.verts[0][i] = i;
    f.values[0].assign(n, 0.0);
    if (n == 0 || R <= 0.0) return out;

    struct ERec {
        double v;
        std::uint32_t a, b;
        bool keep;
    };
    struct TRec {
        double v;
        std::uint32_t a, b, c;
    };
    std::vector<ERec> edges;
    std::vector<TRec> tris;
    std::vector<std::uint64_t> witnessed; // packed edge keys of Delaunay triangles

    const double reach = 2.0 * R;
    const double reach2 = reach * reach;
    SpatialGrid grid = build_grid(P, reach);
    std::vector<int> nb;
    std::vector<double> lifted, evals, orig;
    std::vector<double> center(d);
    for (int anchor = 0; anchor < n; ++anchor) {
        neighbors_within(grid, P, P.point(anchor), reach, nb);
        nb.erase(std::remove_if(nb.begin(), nb.end(), [&](int id) { return id <= anchor; }),
                 nb.end());
        const int pool = static_cast<int>(nb.size());
        if (pool == 0) continue;
        lifted.resize(static_cast<std::size_t>(pool) * d);
        orig.resize(static_cast<std::size_t>(pool) * d);
        evals.resize(pool);
        double pts[3 * kMaxDim];
        for (int a = 0; a < d; ++a) pts[a] = canonical_coord(P.point(anchor)[a]);
        for (int x = 0; x < pool; ++x) {
            lift_point(P.point(nb[x]), P.point(anchor), d, lifted.data() + x * d);
            for (int a = 0; a < d; ++a) orig[x * d + a] = P.point(nb[x])[a];
            evals[x] = edge_value(P, anchor, nb[x]);
            // Gabriel test doubles as the critical 1-face test (the center of
            // the diametral ball is always interior)
            for (int a = 0; a < d; ++a) pts[d + a] = lifted[x * d + a];
            CircumResult cr = circumsphere_raw(pts, 1, d);
            double rho = std::sqrt(cr.rho2);
            const int ids2[2] = {anchor, nb[x]};
            bool gabriel = false;
            if (cr.ok) {
                for (int a = 0; a < d; ++a) center[a] = canonical_coord(cr.center[a]);
                gabriel = is_ball_empty_raw(P, grid, center.data(), rho, ids2, 2);
            }
            edges.push_back({evals[x], static_cast<std::uint32_t>(anchor),
                             static_cast<std::uint32_t>(nb[x]), gabriel});
            if (gabriel && rho <= R) {
                CriticalFace face;
                face.vertex_ids = {anchor, nb[x]};
                face.index = 1;
                face.center = TorusPoint(center);
                face.value = rho;
                out.faces1.push_back(std::move(face));
            }
        }
        for (int x = 0; x < pool; ++x) {
            for (int a = 0; a < d; ++a) pts[d + a] = lifted[x * d + a];
            for (int y = x + 1; y < pool; ++y) {
                double dxy2 = torus_dist2(orig.data() + x * d, orig.data() + y * d, d);
                if (dxy2 > reach2) continue;
                for (int a = 0; a < d; ++a) pts[2 * d + a] = lifted[y * d + a];
                CircumResult cr = circumsphere_raw(pts, 2, d);
                if (!cr.ok) continue; // degenerate: never an empty circumball
                double rho = std::sqrt(cr.rho2);
                const int ids3[3] = {anchor, nb[x], nb[y]};
                for (int a = 0; a < d; ++a) center[a] = canonical_coord(cr.center[a]);
                bool delaunay;
                if (rho <= kBallCap) {
                    delaunay = is_ball_empty_raw(P, grid, center.data(), rho, ids3, 3);
                } else {
                    if (is_ball_empty_raw(P, grid, center.data(), kBallCap, ids3, 3))
                        throw consistency_error(
                            "build_trial_geometry: empty ball at the decidability cap");
                    delaunay = false;
                }
                if (!delaunay) continue;
                witnessed.push_back(pack2(anchor, nb[x]));
                witnessed.push_back(pack2(anchor, nb[y]));
                witnessed.push_back(pack2(nb[x], nb[y]));
                double exy = 0.5 * std::sqrt(dxy2);
                double tv = std::max(evals[x], std::max(evals[y], exy));
                if (interior_closed_from_mu(cr.mu, 2) && rho > tv) tv = rho;
                if (tv <= R)
                    tris.push_back({tv, static_cast<std::uint32_t>(anchor),
                                    static_cast<std::uint32_t>(nb[x]),
                                    static_cast<std::uint32_t>(nb[y])});
                // critical 2-face: window, interior, general position (the
                // circumscribed ball is already known to be empty)
                if (rho >= lo2 && rho <= R && detail::interior_from_mu(cr.mu, 2) &&
                    detail::general_position_raw(pts, 2, d)) {
                    CriticalFace face;
                    face.vertex_ids = {anchor, nb[x], nb[y]};
                    face.index = 2;
                    face.center = TorusPoint(center);
                    face.value = rho;
                    out.faces2.push_back(std::move(face));
                }
            }
        }
    }

    std::sort(witnessed.begin(), witnessed.end());
    witnessed.erase(std::unique(witnessed.begin(), witnessed.end()), witnessed.end());
    auto is_witnessed = [&](std::uint32_t a, std::uint32_t b) {
        return std::binary_search(witnessed.begin(), witnessed.end(), pack2(a, b));
    };

    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [&](const ERec& e) {
                                   return !e.keep && !is_witnessed(e.a, e.b);
                               }),
                edges.end());
    std::sort(edges.begin(), edges.end(), [](const ERec& x, const ERec& y) {
        if (x.v != y.v) return x.v < y.v;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    f.verts[1].resize(edges.size() * 2);
    f.values[1].resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        f.verts[1][2 * i] = edges[i].a;
        f.verts[1][2 * i + 1] = edges[i].b;
        f.values[1][i] = edges[i].v;
    }
    std::sort(tris.begin(), tris.end(), [](const TRec& x, const TRec& y) {
        if (x.v != y.v) return x.v < y.v;
        if (x.a != y.a) return x.a < y.a;
        if (x.b != y.b) return x.b < y.b;
        return x.c < y.c;
    });
    f.verts[2].resize(tris.size() * 3);
    f.values[2].resize(tris.size());
    for (std::size_t i = 0; i < tris.size(); ++i) {
        f.verts[2][3 * i] = tris[i].a;
        f.verts[2][3 * i + 1] = tris[i].b;
        f.verts[2][3 * i + 2] = tris[i].c;
        f.values[2][i] = tris[i].v;
    }
    return out;
}

// ---------------------------------------------------------------------------
// reduction
// ---------------------------------------------------------------------------

namespace {

struct UnionFind {
    std::vector<std::int32_t> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    // roots stay the minimum id of their component
    std::int32_t find(std::int32_t x) {
        std::int32_t r = x;
        while (parent[r] != r) r = parent[r];
        while (parent[x] != r) {
            std::int32_t next = parent[x];
            parent[x] = r;
            x = next;
        }
        return r;
    }
};

void finalize_pairing(const Filtration& f, PersistencePairing& pp) {
    pp.creator_values.assign(f.max_dimension + 1, {});
    pp.destroyer_values.assign(f.max_dimension + 1, {});
    for (int p = 0; p <= f.max_dimension; ++p)
        for (std::size_t i = 0; i < f.count(p); ++i)
            (pp.destroyer[p][i] ? pp.destroyer_values : pp.creator_values)[p].push_back(
                f.values[p][i]);
}

} // namespace

PersistencePairing reduce_boundary_matrix(const Filtration& f) {
    PersistencePairing pp;
    pp.filtration = &f;
    pp.destroyer.assign(f.max_dimension + 1, {});
    pp.partner.assign(f.max_dimension + 1, {});
    for (int p = 0; p <= f.max_dimension; ++p) {
        pp.destroyer[p].assign(f.count(p), 0);
        pp.partner[p].assign(f.count(p), -1);
    }
    // vertex-edge pairs: Kruskal with the elder rule (the max-id root dies),
    // which reproduces the column reduction restricted to edge columns
    if (f.max_dimension >= 1 && f.count(1) > 0) {
        UnionFind uf(static_cast<int>(f.count(0)));
        for (std::size_t e = 0; e < f.count(1); ++e) {
            const std::uint32_t* v = f.simplex_verts(1, e);
            std::int32_t ra = uf.find(v[0]), rb = uf.find(v[1]);
            if (ra == rb) continue;
            std::int32_t victim = std::max(ra, rb), keep = std::min(ra, rb);
            uf.parent[victim] = keep;
            pp.destroyer[1][e] = 1;
            pp.partner[1][e] = victim;
            pp.partner[0][victim] = static_cast<std::int64_t>(e);
        }
    }
    for (int p = 2; p <= f.max_dimension; ++p) coboundary_pass(f, p, pp);
    finalize_pairing(f, pp);
    return pp;
}

PersistencePairing reduce_boundary_matrix_naive(const Filtration& f) {
    PersistencePairing pp;
    pp.filtration = &f;
    pp.destroyer.assign(f.max_dimension + 1, {});
    pp.partner.assign(f.max_dimension + 1, {});
    for (int p = 0; p <= f.max_dimension; ++p) {
        pp.destroyer[p].assign(f.count(p), 0);
        pp.partner[p].assign(f.count(p), -1);
    }
    auto order = f.reduction_order();
    const std::size_t N = order.size();
    std::vector<std::vector<std::size_t>> rank(f.max_dimension + 1);
    for (int p = 0; p <= f.max_dimension; ++p) rank[p].assign(f.count(p), 0);
    for (std::size_t g = 0; g < N; ++g) rank[order[g].first][order[g].second] = g;

    std::vector<std::map<std::vector<std::uint32_t>, std::uint32_t>> lookup(f.max_dimension + 1);
    for (int p = 0; p <= f.max_dimension; ++p)
        for (std::size_t i = 0; i < f.count(p); ++i) {
            const std::uint32_t* v = f.simplex_verts(p, i);
            lookup[p][std::vector<std::uint32_t>(v, v + p + 1)] = static_cast<std::uint32_t>(i);
        }

    std::vector<std::vector<std::size_t>> reduced(N);
    std::vector<std::int64_t> pivot_of_row(N, -1);
    std::vector<std::size_t> cur, buf;
    for (std::size_t g = 0; g < N; ++g) {
        int p = order[g].first;
        std::uint32_t local = order[g].second;
        cur.clear();
        if (p > 0) {
            const std::uint32_t* v = f.simplex_verts(p, local);
            std::vector<std::uint32_t> facet(p);
            for (int s = 0; s <= p; ++s) {
                int w = 0;
                for (int i = 0; i <= p; ++i)
                    if (i != s) facet[w++] = v[i];
                cur.push_back(rank[p - 1][lookup[p - 1].at(facet)]);
            }
            std::sort(cur.begin(), cur.end());
        }
        while (!cur.empty()) {
            std::size_t low = cur.back();
            std::int64_t own = pivot_of_row[low];
            if (own < 0) {
                pivot_of_row[low] = static_cast<std::int64_t>(g);
                reduced[g] = cur;
                auto [cp, cl] = order[low];
                pp.destroyer[p][local] = 1;
                pp.partner[p][local] = cl;
                pp.partner[cp][cl] = local;
                break;
            }
            // symmetric difference with the owning column
            buf.clear();
            const auto& other = reduced[own];
            std::size_t i = 0, j = 0;
            while (i < cur.size() && j < other.size()) {
                if (cur[i] == other[j]) {
                    ++i;
                    ++j;
                } else if (cur[i] < other[j]) {
                    buf.push_back(cur[i++]);
                } else {
                    buf.push_back(other[j++]);
                }
            }
            while (i < cur.size()) buf.push_back(cur[i++]);
            while (j < other.size()) buf.push_back(other[j++]);
            cur.swap(buf);
        }
    }
    finalize_pairing(f, pp);
    return pp;
}

// ---------------------------------------------------------------------------
// classification and oracles
// ---------------------------------------------------------------------------

std::vector<CriticalFace> classify_faces(std::vector<CriticalFace> faces,
                                         const PersistencePairing& pairing) {
    const Filtration& f = *pairing.filtration;
    for (auto& face : faces) {
        double tol = 1e-9 * std::max(1.0, std::fabs(face.value));
        std::int64_t local = f.find_simplex(face.index, face.vertex_ids, face.value, tol);
        if (local < 0)
            throw consistency_error("classify_faces: critical face missing from filtration");
        face.sign = pairing.destroyer[face.index][local] ? FaceSign::negative : FaceSign::positive;
    }
    return faces;
}

std::vector<CriticalFace> mst_negative_one_faces(const PointCloud& P, double R) {
    if (!(R >= 0.0) || R >= 0.125)
        throw std::invalid_argument("mst_negative_one_faces: need 0 <= R < 1/8");
    std::vector<CriticalFace> out;
    const int n = P.size(), d = P.dim;
    if (n < 2 || R <= 0.0) return out;
    struct ERec {
        double v;
        std::uint32_t a, b;
    };
    std::vector<ERec> edges;
    const double reach = 2.0 * R;
    SpatialGrid grid = build_grid(P, reach);
    std::vector<int> nb;
    for (int i = 0; i < n; ++i) {
        neighbors_within(grid, P, P.point(i), reach, nb);
        for (int j : nb)
            if (j > i)
                edges.push_back({edge_value(P, i, j), static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(j)});
    }
    std::sort(edges.begin(), edges.end(), [](const ERec& x, const ERec& y) {
        if (x.v != y.v) return x.v < y.v;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    UnionFind uf(n);
    std::vector<double> lifted(d);
    for (const auto& e : edges) {
        std::int32_t ra = uf.find(e.a), rb = uf.find(e.b);
        if (ra == rb) continue;
        uf.parent[std::max(ra, rb)] = std::min(ra, rb);
        // value and center through the detector's circumsphere arithmetic
        double pts[2 * kMaxDim];
        for (int a = 0; a < d; ++a) pts[a] = canonical_coord(P.point(e.a)[a]);
        lift_point(P.point(e.b), P.point(e.a), d, lifted.data());
        for (int a = 0; a < d; ++a) pts[d + a] = lifted[a];
        CircumResult cr = circumsphere_raw(pts, 1, d);
        CriticalFace face;
        face.vertex_ids = {static_cast<int>(e.a), static_cast<int>(e.b)};
        face.index = 1;
        std::vector<double> c(d);
        for (int a = 0; a < d; ++a) c[a] = canonical_coord(cr.center[a]);
        face.center = TorusPoint(c);
        face.value = std::sqrt(cr.rho2);
        face.sign = FaceSign::negative;
        out.push_back(std::move(face));
    }
    std::sort(out.begin(), out.end(), [](const CriticalFace& x, const CriticalFace& y) {
        return x.vertex_ids < y.vertex_ids;
    });
    return out;
}

std::vector<std::int64_t> betti_profile(const PersistencePairing& pairing, double r) {
    const Filtration& f = *pairing.filtration;
    std::vector<std::int64_t> beta(f.max_dimension + 1, 0);
    for (int j = 0; j <= f.max_dimension; ++j) {
        const auto& cv = pairing.creator_values[j];
        beta[j] = std::upper_bound(cv.begin(), cv.end(), r) - cv.begin();
        if (j + 1 <= f.max_dimension) {
            const auto& dv = pairing.destroyer_values[j + 1];
            beta[j] -= std::upper_bound(dv.begin(), dv.end(), r) - dv.begin();
        }
    }
    return beta;
}

int component_count(const PointCloud& P, double r) {
    const int n = P.size();
    if (n == 0) return 0;
    UnionFind uf(n);
    const double reach = std::min(2.0 * r, 1.0);
    if (r > 0.0) {
        SpatialGrid grid = build_grid(P, std::max(reach, 1e-9));
        std::vector<int> nb;
        for (int i = 0; i < n; ++i) {
            neighbors_within(grid, P, P.point(i), reach, nb);
            for (int j : nb) {
                if (j <= i || edge_value(P, i, j) > r) continue;
                std::int32_t ra = uf.find(i), rb = uf.find(j);
                if (ra != rb) uf.parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }
    int comps = 0;
    for (int i = 0; i < n; ++i)
        if (uf.find(i) == i) ++comps;
    return comps;
}

std::vector<PersistencePairing::Interval> PersistencePairing::intervals(int degree) const {
    const Filtration& f = *filtration;
    std::vector<Interval> out;
    if (degree > f.max_dimension) return out;
    for (std::size_t i = 0; i < f.count(degree); ++i) {
        if (destroyer[degree][i]) continue;
        Interval iv;
        iv.birth = f.values[degree][i];
        std::int64_t killer = partner[degree][i];
        if (killer >= 0 && degree + 1 <= f.max_dimension) {
            iv.death = f.values[degree + 1][killer];
            iv.finite = true;
        } else {
            iv.death = std::numeric_limits<double>::infinity();
            iv.finite = false;
        }
        out.push_back(iv);
    }
    std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) {
        if (x.birth != y.birth) return x.birth < y.birth;
        return x.death < y.death;
    });
    return out;
}

} // namespace critfaces
