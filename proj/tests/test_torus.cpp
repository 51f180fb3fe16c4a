#include <doctest.h>

#include <algorithm>

#include "critfaces/sampling.hpp"
#include "critfaces/torus.hpp"

using namespace critfaces;

TEST_CASE("torus distance basics") {
    TorusPoint a({0.1, 0.1}), b({0.9, 0.1});
    CHECK(torus_dist(a, b) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(torus_dist(a, a) == 0.0);
    TorusPoint o({0.0, 0.0}), m({0.5, 0.5});
    CHECK(torus_dist(o, m) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    TorusPoint c({0.5});
    CHECK_THROWS_AS((void)torus_dist(a, c), std::invalid_argument);
}

TEST_CASE("torus metric axioms on random triples") {
    RandomStream rng = substream(11, 0);
    for (int it = 0; it < 3000; ++it) {
        int d = 1 + static_cast<int>(rng.next_u64() % 4);
        std::vector<double> x(d), y(d), z(d);
        for (int a = 0; a < d; ++a) {
            x[a] = rng.next_double();
            y[a] = rng.next_double();
            z[a] = rng.next_double();
        }
        double dxy = torus_dist(x.data(), y.data(), d);
        CHECK(dxy == torus_dist(y.data(), x.data(), d)); // symmetric exactly
        CHECK(dxy <= torus_dist(x.data(), z.data(), d) +
                         torus_dist(z.data(), y.data(), d) + 1e-12);
        CHECK(dxy <= std::sqrt(d) / 2.0 + 1e-15);
    }
}

TEST_CASE("lift wraps to the nearest representative") {
    TorusPoint anchor({0.02, 0.5});
    auto lifted = lift({TorusPoint({0.98, 0.5})}, anchor);
    CHECK(lifted[0].coords[0] == doctest::Approx(-0.02).epsilon(1e-12));
    CHECK(lifted[0].coords[1] == doctest::Approx(0.5).epsilon(1e-12));

    auto self = lift({anchor}, anchor);
    CHECK(self[0].coords[0] == anchor[0]);
    CHECK(self[0].coords[1] == anchor[1]);

    TorusPoint p({0.1, 0.0}), q({0.15, 0.0});
    auto pair = lift({p, q}, p);
    double dx = pair[1].coords[0] - pair[0].coords[0];
    double dy = pair[1].coords[1] - pair[0].coords[1];
    CHECK(std::sqrt(dx * dx + dy * dy) == doctest::Approx(0.05).epsilon(1e-13));

    CHECK_THROWS_AS((void)lift({TorusPoint({0.5, 0.5})}, anchor), lifting_window_error);
}

TEST_CASE("lift is an isometry on random windows") {
    RandomStream rng = substream(12, 0);
    for (int it = 0; it < 300; ++it) {
        int d = 2 + static_cast<int>(rng.next_u64() % 2);
        std::vector<double> ac(d);
        for (int a = 0; a < d; ++a) ac[a] = rng.next_double();
        TorusPoint anchor(ac);
        std::vector<TorusPoint> pts;
        for (int i = 0; i < 5; ++i) {
            std::vector<double> c(d);
            for (int a = 0; a < d; ++a)
                c[a] = canonical_coord(anchor[a] + 0.24 * (rng.next_double() - 0.5));
            pts.emplace_back(c);
        }
        auto lifted = lift(pts, anchor);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                double e2 = 0.0;
                for (int a = 0; a < d; ++a) {
                    double delta = lifted[i].coords[a] - lifted[j].coords[a];
                    e2 += delta * delta;
                }
                CHECK(std::fabs(std::sqrt(e2) - torus_dist(pts[i], pts[j])) <= 1e-12);
            }
    }
}

TEST_CASE("grid construction") {
    PointCloud empty;
    empty.dim = 2;
    SpatialGrid g0 = build_grid(empty, 0.25);
    for (const auto& b : g0.buckets) CHECK(b.empty());

    PointCloud one;
    one.dim = 2;
    one.xs = {0.5, 0.5};
    SpatialGrid g1 = build_grid(one, 0.25);
    CHECK(g1.cells_per_axis == 4);
    CHECK(g1.buckets[2 * 4 + 2].size() == 1); // cell (2,2)

    RandomStream rng = substream(13, 0);
    PointCloud cloud = sample_poisson(200, 2, rng);
    SpatialGrid g = build_grid(cloud, 0.2);
    std::size_t total = 0;
    for (const auto& b : g.buckets) total += b.size();
    CHECK(total == static_cast<std::size_t>(cloud.size()));

    CHECK_THROWS_AS((void)build_grid(cloud, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)build_grid(cloud, 1.5), std::invalid_argument);
}

TEST_CASE("neighbors_within matches brute force") {
    RandomStream rng = substream(14, 0);
    for (int rep = 0; rep < 8; ++rep) {
        int d = 2 + rep % 2;
        PointCloud cloud = sample_poisson(150 + 50 * rep, d, rng);
        if (cloud.size() > 500 || cloud.size() == 0) continue;
        double cell = 0.05 + 0.1 * rng.next_double();
        SpatialGrid g = build_grid(cloud, cell);
        for (int q = 0; q < 20; ++q) {
            std::vector<double> x(d);
            for (int a = 0; a < d; ++a) x[a] = rng.next_double();
            double radius = 0.3 * rng.next_double();
            std::vector<int> fast;
            neighbors_within(g, cloud, x.data(), radius, fast);
            std::vector<int> slow;
            for (int i = 0; i < cloud.size(); ++i)
                if (torus_dist(cloud.point(i), x.data(), d) <= radius) slow.push_back(i);
            CHECK(fast == slow);
        }
    }
}

TEST_CASE("neighbors_within edge cases") {
    PointCloud cloud;
    cloud.dim = 2;
    cloud.xs = {0.0, 0.0, 0.1, 0.0, 0.25, 0.0};
    SpatialGrid g = build_grid(cloud, 0.24);

    TorusPoint q({0.0, 0.0});
    auto none = neighbors_within(g, cloud, TorusPoint({0.6, 0.6}), 0.05);
    CHECK(none.empty());

    auto all = neighbors_within(g, cloud, q, std::sqrt(2.0) / 2.0);
    CHECK(all == std::vector<int>({0, 1, 2}));

    auto two = neighbors_within(g, cloud, q, 0.12);
    CHECK(two == std::vector<int>({0, 1}));
}
