#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "topgn/ton.hpp"

using namespace topgn;

namespace {

struct RoiFixture {
    MultiLayerIntensityMap map;
    int m;
    int offset;

    explicit RoiFixture(int n = 100, int m_ = 40, double s = 0.05) : m(m_), offset((n - m_) / 2)
    {
        const GridSpec spec{n, s};
        map.low = IntensityGrid(spec);
        map.mid = IntensityGrid(spec);
        map.high = IntensityGrid(spec);
        map.spec = spec;
    }

    void set(int r, int c, double low, double mid, double high)
    {
        map.low.at(r + offset, c + offset) = low;
        map.mid.at(r + offset, c + offset) = mid;
        map.high.at(r + offset, c + offset) = high;
    }

    RoiView roi() const { return RoiView(map, m); }
};

} // namespace

TEST_CASE("apply_condition implements the three-clause intensity test")
{
    RoiFixture fx;
    const TonCondition cond{};

    fx.set(10, 10, 30.0, 115.0, 0.0);  // transparent signature
    fx.set(11, 10, 50.0, 115.0, 0.0);  // low layer too bright
    fx.set(12, 10, 30.0, 115.0, 44.0); // high layer too bright
    fx.set(13, 10, 0.0, 99.9, 0.0);    // mid below the band
    fx.set(14, 10, 0.0, 130.0, 0.0);   // inclusive upper bound
    fx.set(15, 10, 0.0, 100.0, 0.0);   // inclusive lower bound

    const TonMask mask = apply_condition(fx.roi(), cond);
    CHECK(mask.at(10, 10) == 1);
    CHECK(mask.at(11, 10) == 0);
    CHECK(mask.at(12, 10) == 0);
    CHECK(mask.at(13, 10) == 0);
    CHECK(mask.at(14, 10) == 1);
    CHECK(mask.at(15, 10) == 1);
    CHECK(mask.at(0, 0) == 0);
}

TEST_CASE("apply_condition on an empty scene is all zero")
{
    RoiFixture fx;
    const TonMask mask = apply_condition(fx.roi(), TonCondition{});
    for (auto v : mask.values()) CHECK(v == 0);
}

TEST_CASE("raising a suppression layer never turns a cell on")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> value(0.0, 150.0);
    const TonCondition cond{};
    for (int i = 0; i < 300; ++i) {
        RoiFixture fx;
        const double low = value(rng);
        const double mid = value(rng);
        const double high = value(rng);
        fx.set(5, 5, low, mid, high);
        const bool before = apply_condition(fx.roi(), cond).at(5, 5) != 0;

        fx.set(5, 5, low + value(rng), mid, high + value(rng));
        const bool after = apply_condition(fx.roi(), cond).at(5, 5) != 0;
        if (!before) CHECK_FALSE(after);
    }
}

TEST_CASE("diffuse-obstacle signatures are always rejected")
{
    const TonCondition cond{};
    const double floor = cond.suppression_threshold();
    for (double low = floor; low <= 260.0; low += 27.0)
        for (double mid = floor; mid <= 260.0; mid += 27.0)
            for (double high = floor; high <= 260.0; high += 27.0) {
                RoiFixture fx;
                fx.set(7, 7, low, mid, high);
                CHECK(apply_condition(fx.roi(), cond).at(7, 7) == 0);
            }
}

TEST_CASE("denoise removes small components and is idempotent")
{
    const GridSpec spec{40, 0.05};
    TonCondition cond{};
    cond.min_contour_area = 3;

    TonMask mask(spec);
    mask.at(5, 5) = 1; // isolated single cell
    mask.at(20, 20) = mask.at(20, 21) = mask.at(21, 20) = mask.at(21, 21) = 1; // 2x2 block

    const TonMask cleaned = denoise(mask, cond);
    CHECK(cleaned.at(5, 5) == 0);
    CHECK(cleaned.at(20, 20) == 1);
    CHECK(cleaned.at(21, 21) == 1);

    CHECK(denoise(cleaned, cond) == cleaned);

    const TonMask empty(spec);
    CHECK(denoise(empty, cond) == empty);
}

TEST_CASE("extract_tons computes centroids, radii, and ordering")
{
    const GridSpec spec{80, 0.05};

    SECTION("square block")
    {
        TonMask mask(spec);
        mask.at(50, 60) = mask.at(50, 61) = mask.at(51, 60) = mask.at(51, 61) = 1;
        const auto tons = extract_tons(mask);
        REQUIRE(tons.size() == 1);
        CHECK(tons[0].centroid_r == Catch::Approx(50.5));
        CHECK(tons[0].centroid_c == Catch::Approx(60.5));
        CHECK(tons[0].bound_radius == Catch::Approx(std::sqrt(0.5)));
        CHECK(tons[0].cells.size() == 4);
    }

    SECTION("single cell is its own degenerate circle")
    {
        TonMask mask(spec);
        mask.at(10, 10) = 1;
        const auto tons = extract_tons(mask);
        REQUIRE(tons.size() == 1);
        CHECK(tons[0].centroid_r == 10.0);
        CHECK(tons[0].centroid_c == 10.0);
        CHECK(tons[0].bound_radius == 0.0);
    }

    SECTION("larger component comes first")
    {
        TonMask mask(spec);
        for (int c = 0; c < 5; ++c) mask.at(70, 10 + c) = 1;
        for (int c = 0; c < 3; ++c) mask.at(5, 30 + c) = 1;
        const auto tons = extract_tons(mask);
        REQUIRE(tons.size() == 2);
        CHECK(tons[0].cells.size() == 5);
        CHECK(tons[1].cells.size() == 3);
    }
}

TEST_CASE("components partition the set of 1-cells")
{
    const GridSpec spec{60, 0.05};
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> coord(0, 59);
    for (int round = 0; round < 50; ++round) {
        TonMask mask(spec);
        for (int i = 0; i < 120; ++i) mask.at(coord(rng), coord(rng)) = 1;

        std::size_t ones = 0;
        for (auto v : mask.values()) ones += v != 0;

        const auto tons = extract_tons(mask);
        std::size_t covered = 0;
        TonMask seen(spec);
        for (const Ton& ton : tons)
            for (const GridCell& cell : ton.cells) {
                CHECK(seen.at(cell) == 0);
                seen.at(cell) = 1;
                CHECK(mask.at(cell) == 1);
                ++covered;
            }
        CHECK(covered == ones);
    }
}
