#include <doctest.h>

#include <algorithm>
#include <random>

#include "handloc/geometry.hpp"
#include "oracles.hpp"

using namespace handloc;

TEST_CASE("area basics") {
    CHECK(area({1, 1, 2, 2}) == 1.0);
    CHECK(area({0, 0, 0, 0}) == 0.0);
    CHECK(area({0, 0, 2, 3}) == 6.0);
    CHECK(area({0, 0, 2, 3}) == oracle::union_area({{0, 0, 2, 3}}, 8));
}

TEST_CASE("intersect") {
    const BBox unit{0, 0, 1, 1};
    REQUIRE(intersect(unit, unit).has_value());
    CHECK(*intersect(unit, unit) == unit);

    CHECK_FALSE(intersect({0, 0, 1, 1}, {5, 5, 6, 6}).has_value());
    // Mere edge contact has zero overlap area.
    CHECK_FALSE(intersect({0, 0, 1, 1}, {1, 0, 2, 1}).has_value());

    const auto r = intersect({0, 0, 2, 2}, {1, 1, 3, 3});
    REQUIRE(r.has_value());
    CHECK(*r == BBox{1, 1, 2, 2});
}

TEST_CASE("iou") {
    CHECK(iou({0, 0, 3, 3}, {0, 0, 3, 3}) == 1.0);
    CHECK(iou({0, 0, 1, 1}, {5, 5, 6, 6}) == 0.0);
    CHECK(iou({0, 0, 2, 2}, {1, 1, 3, 3}) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    // Two degenerate boxes: no 0/0.
    CHECK(iou({1, 1, 1, 1}, {1, 1, 1, 1}) == 0.0);
}

TEST_CASE("union_area fixtures") {
    CHECK(union_area(BoxSet{}) == 0.0);
    CHECK(union_area(BoxSet{{0, 0, 2, 2}}) == 4.0);
    CHECK(union_area(BoxSet{{0, 0, 4, 4}, {1, 1, 2, 2}}) == 16.0);
    CHECK(union_area(BoxSet{{0, 0, 2, 2}, {1, 1, 3, 3}}) == 7.0);
}

TEST_CASE("region_iou fixtures") {
    CHECK(region_iou(BoxSet{{0, 0, 10, 10}}, BoxSet{{0, 0, 10, 10}}) == 1.0);
    CHECK(region_iou(BoxSet{{0, 0, 1, 1}}, BoxSet{{5, 5, 6, 6}}) == 0.0);
    CHECK(region_iou(BoxSet{{0, 0, 10, 10}}, BoxSet{{0, 0, 10, 5}}) == 0.5);
    CHECK(region_iou(BoxSet{}, BoxSet{{0, 0, 1, 1}}) == 0.0);
    CHECK(region_iou(BoxSet{}, BoxSet{}) == 0.0);
}

TEST_CASE("rasterization oracle agreement on random integer scenes") {
    constexpr int kGrid = 128;
    std::mt19937_64 rng(42);
    for (int iter = 0; iter < 300; ++iter) {
        const BoxSet p = oracle::random_boxes(rng, kGrid, 5);
        const BoxSet g = oracle::random_boxes(rng, kGrid, 5);

        CHECK(union_area(p) == doctest::Approx(oracle::union_area(p, kGrid)).epsilon(1e-12));
        CHECK(region_iou(p, g) ==
              doctest::Approx(oracle::region_iou(p, g, kGrid)).epsilon(1e-12));
        if (!p.empty() && !g.empty())
            CHECK(iou(p[0], g[0]) ==
                  doctest::Approx(oracle::iou(p[0], g[0], kGrid)).epsilon(1e-12));
    }
}

TEST_CASE("iou symmetry and range") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        const BBox a = oracle::random_box(rng, 64);
        const BBox b = oracle::random_box(rng, 64);
        const double ab = iou(a, b);
        CHECK(ab == iou(b, a));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("union_area is monotone and order independent") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        BoxSet s = oracle::random_boxes(rng, 64, 5);
        const double before = union_area(s);
        s.push_back(oracle::random_box(rng, 64));
        CHECK(union_area(s) >= before);

        BoxSet shuffled = s;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng() % i]);
        CHECK(union_area(shuffled) == union_area(s));
    }
}

TEST_CASE("region_iou of singleton sets equals pairwise iou") {
    std::mt19937_64 rng(13);
    for (int iter = 0; iter < 200; ++iter) {
        const BBox a = oracle::random_box(rng, 64);
        const BBox b = oracle::random_box(rng, 64);
        CHECK(region_iou(BoxSet{a}, BoxSet{b}) == doctest::Approx(iou(a, b)).epsilon(1e-12));
    }
}
