#include <doctest.h>

#include <cmath>

#include "critfaces/detector.hpp"
#include "critfaces/sampling.hpp"

using namespace critfaces;

namespace {

PointCloud make_cloud(std::vector<std::vector<double>> pts) {
    PointCloud cloud;
    cloud.dim = static_cast<int>(pts[0].size());
    for (const auto& p : pts)
        for (double x : p) cloud.xs.push_back(canonical_coord(x));
    return cloud;
}

bool faces_equal(const std::vector<CriticalFace>& a, const std::vector<CriticalFace>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].vertex_ids != b[i].vertex_ids) return false;
        if (a[i].value != b[i].value) return false;
        if (a[i].center.coords != b[i].center.coords) return false;
    }
    return true;
}

} // namespace

TEST_CASE("circumsphere basics") {
    std::vector<double> c;
    double rho = 0.0;

    circumsphere({{0, 0}, {0.2, 0}}, c, rho);
    CHECK(c[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(c[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rho == doctest::Approx(0.1).epsilon(1e-14));

    double s = 0.07;
    double h = s * std::sqrt(3.0) / 2.0;
    circumsphere({{0, 0}, {s, 0}, {s / 2, h}}, c, rho);
    CHECK(rho == doctest::Approx(s / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(c[0] == doctest::Approx(s / 2).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(h / 3.0).epsilon(1e-10));

    circumsphere({{0, 0}, {0.1, 0}, {0, 0.1}}, c, rho);
    CHECK(c[0] == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(c[1] == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(rho == doctest::Approx(0.05 * std::sqrt(2.0)).epsilon(1e-13));

    CHECK_THROWS_AS(circumsphere({{0, 0}, {0, 0}}, c, rho), std::invalid_argument);
}

TEST_CASE("barycentric interiority") {
    // right triangle: circumcenter sits on the hypotenuse midpoint
    CHECK_FALSE(barycentric_interior({{0, 0}, {0.1, 0}, {0, 0.1}}, {0.05, 0.05}));
    double s = 0.07, h = s * std::sqrt(3.0) / 2.0;
    CHECK(barycentric_interior({{0, 0}, {s, 0}, {s / 2, h}}, {s / 2, h / 3.0}));
    CHECK(barycentric_interior({{0, 0}, {0.2, 0}}, {0.1, 0}));
}

TEST_CASE("general position check") {
    CHECK(general_position_check({{0, 0}, {0.1, 0}, {0.05, 0.05}}));
    CHECK_FALSE(general_position_check({{0, 0}, {0.1, 0}, {0.2, 0}}));
    CHECK_FALSE(general_position_check({{0.3, 0.3}, {0.3, 0.3}}));
}

TEST_CASE("ball emptiness") {
    PointCloud cloud = make_cloud({{0.0, 0.0}, {0.1, 0.0}});
    SpatialGrid grid = build_grid(cloud, 0.2);
    CHECK(is_ball_empty(cloud, grid, TorusPoint({0.05, 0.0}), 0.05, {0, 1}));

    PointCloud with_center = make_cloud({{0.0, 0.0}, {0.1, 0.0}, {0.05, 0.0}});
    SpatialGrid grid2 = build_grid(with_center, 0.2);
    CHECK_FALSE(is_ball_empty(with_center, grid2, TorusPoint({0.05, 0.0}), 0.05, {0, 1}));

    // collinear triple: the long pair's ball contains the middle point
    PointCloud tri = make_cloud({{0.0, 0.0}, {0.1, 0.0}, {0.25, 0.0}});
    SpatialGrid grid3 = build_grid(tri, 0.3);
    CHECK_FALSE(is_ball_empty(tri, grid3, TorusPoint({0.125, 0.0}), 0.125, {0, 2}));
}

TEST_CASE("detect critical 1-faces on tiny configurations") {
    PointCloud pair = make_cloud({{0.4, 0.4}, {0.5, 0.4}});
    auto faces = detect_critical_faces(pair, 1, 0.0, 0.12);
    REQUIRE(faces.size() == 1);
    CHECK(faces[0].vertex_ids == std::vector<int>({0, 1}));
    CHECK(faces[0].value == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(faces[0].center.coords[0] == doctest::Approx(0.45).epsilon(1e-13));

    // collinear triple: both short pairs critical, the long pair occupied
    PointCloud tri = make_cloud({{0.0, 0.0}, {0.1, 0.0}, {0.25, 0.0}});
    auto tfaces = detect_critical_faces(tri, 1, 0.0, 0.12);
    REQUIRE(tfaces.size() == 2);
    CHECK(tfaces[0].vertex_ids == std::vector<int>({0, 1}));
    CHECK(tfaces[0].value == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(tfaces[1].vertex_ids == std::vector<int>({1, 2}));
    CHECK(tfaces[1].value == doctest::Approx(0.075).epsilon(1e-13));
    // the brute enumerator agrees
    CHECK(faces_equal(tfaces, detect_critical_faces_brute(tri, 1, 0.0, 0.12)));

    CHECK(detect_critical_faces(tri, 1, 0.0, 0.0).empty()); // [0, 0] window
}

TEST_CASE("detected faces satisfy their own invariants") {
    RandomStream rng = substream(31, 0);
    for (int rep = 0; rep < 10; ++rep) {
        PointCloud cloud = sample_poisson(50, 2, 32, rep);
        SpatialGrid grid = build_grid(cloud, 0.24);
        for (int k = 1; k <= 2; ++k) {
            auto faces = detect_critical_faces(cloud, k, 0.0, 0.12);
            for (const auto& f : faces) {
                CHECK(static_cast<int>(f.vertex_ids.size()) == k + 1);
                CHECK(std::is_sorted(f.vertex_ids.begin(), f.vertex_ids.end()));
                CHECK(f.value > 0.0);
                CHECK(f.value <= 0.12);
                for (int id : f.vertex_ids) {
                    double dist = torus_dist(f.center.coords.data(), cloud.point(id), 2);
                    CHECK(std::fabs(dist - f.value) <= 1e-9 * std::max(1.0, f.value));
                }
                CHECK(is_ball_empty(cloud, grid, f.center, f.value, f.vertex_ids));
            }
        }
    }
    (void)rng;
}

TEST_CASE("grid detector equals brute force on random clouds") {
    int checked = 0;
    for (int d = 2; d <= 3; ++d)
        for (int k = 1; k <= 2; ++k)
            for (int rep = 0; rep < 6; ++rep) {
                PointCloud cloud = sample_poisson(40, d, 33, d * 100 + k * 10 + rep);
                if (cloud.size() > 60) continue;
                auto fast = detect_critical_faces(cloud, k, 0.0, 0.12);
                auto brute = detect_critical_faces_brute(cloud, k, 0.0, 0.12);
                CHECK(faces_equal(fast, brute));
                ++checked;
            }
    CHECK(checked > 15);
}

TEST_CASE("window containment invariant") {
    for (int rep = 0; rep < 6; ++rep) {
        PointCloud cloud = sample_poisson(45, 2, 34, rep);
        double r_min = 0.02 + 0.01 * rep;
        auto full = detect_critical_faces(cloud, 1, 0.0, 0.12);
        auto windowed = detect_critical_faces(cloud, 1, r_min, 0.12);
        std::vector<CriticalFace> filtered;
        for (const auto& f : full)
            if (f.value >= r_min) filtered.push_back(f);
        CHECK(faces_equal(windowed, filtered));
    }
}

TEST_CASE("monotonicity under point insertion") {
    for (int rep = 0; rep < 6; ++rep) {
        PointCloud cloud = sample_poisson(35, 2, 35, rep);
        if (cloud.size() < 3) continue;
        auto before = detect_critical_faces(cloud, 1, 0.0, 0.12);

        PointCloud bigger = cloud;
        RandomStream rng = substream(36, rep);
        bigger.xs.push_back(rng.next_double());
        bigger.xs.push_back(rng.next_double());
        int new_id = bigger.size() - 1;
        auto after = detect_critical_faces(bigger, 1, 0.0, 0.12);

        // faces can only disappear (emptiness broke) or involve the new point
        for (const auto& f : after) {
            bool has_new = std::find(f.vertex_ids.begin(), f.vertex_ids.end(), new_id) !=
                           f.vertex_ids.end();
            if (has_new) continue;
            bool existed = false;
            for (const auto& g : before)
                if (g.vertex_ids == f.vertex_ids) existed = true;
            CHECK(existed);
        }
    }
}

TEST_CASE("detector rejects bad windows") {
    PointCloud cloud = make_cloud({{0.1, 0.1}, {0.2, 0.2}});
    CHECK_THROWS_AS((void)detect_critical_faces(cloud, 1, 0.1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS((void)detect_critical_faces(cloud, 1, 0.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS((void)detect_critical_faces(cloud, 0, 0.0, 0.1), std::invalid_argument);
}
