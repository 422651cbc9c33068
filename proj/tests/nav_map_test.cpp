#include <catch2/catch_amalgamated.hpp>

#include "topgn/nav_map.hpp"

using namespace topgn;

namespace {

MultiLayerIntensityMap zero_map(int n = 200, double s = 0.05)
{
    const GridSpec spec{n, s};
    MultiLayerIntensityMap map;
    map.low = IntensityGrid(spec);
    map.mid = IntensityGrid(spec);
    map.high = IntensityGrid(spec);
    map.spec = spec;
    return map;
}

ExtrapolationSet empty_extrap(int m = 80, double s = 0.05)
{
    ExtrapolationSet set;
    set.mask = TonMask(GridSpec{m, s});
    return set;
}

} // namespace

TEST_CASE("compose_nav_map writes extrapolations into the centered window")
{
    auto map = zero_map();
    auto extrap = empty_extrap();
    extrap.mask.at(58, 40) = 1;

    const NavMap nav = compose_nav_map(map, extrap, 50.0, 255.0);
    CHECK(nav.grid.at(118, 100) == 255.0);
    int nonzero = 0;
    for (double v : nav.grid.values()) nonzero += v != 0.0;
    CHECK(nonzero == 1);
    CHECK(nav.obstacle_cells == std::vector<GridCell>{{118, 100}});
}

TEST_CASE("extrapolation weight adds on top of layer intensity")
{
    auto map = zero_map();
    map.mid.at(118, 100) = 115.0;
    auto extrap = empty_extrap();
    extrap.mask.at(58, 40) = 1;

    const NavMap nav = compose_nav_map(map, extrap, 50.0, 255.0);
    CHECK(nav.grid.at(118, 100) == 370.0);
    CHECK(nav.obstacle_mask.at(118, 100) == 1);
}

TEST_CASE("without extrapolation the nav grid is the exact layer sum")
{
    auto map = zero_map();
    map.low.at(10, 20) = 3.0;
    map.mid.at(10, 20) = 4.0;
    map.high.at(150, 30) = 7.5;

    const NavMap nav = compose_nav_map(map, empty_extrap(), 50.0, 255.0);
    CHECK(nav.grid.at(10, 20) == 7.0);
    CHECK(nav.grid.at(150, 30) == 7.5);
    CHECK(nav.obstacle_cells.empty());
    CHECK(nav.clearance_cells({100, 100}) == std::numeric_limits<double>::infinity());
}

TEST_CASE("segment cells are obstacles even with a low weight profile")
{
    auto map = zero_map();
    ExtrapolationSet extrap = empty_extrap();
    ExtrapolatedSegment seg;
    seg.p_int = {58.0, 40.0};
    seg.endpoints[0] = {58.0, 34.0};
    seg.endpoints[1] = {58.0, 46.0};
    for (int c = 34; c <= 46; ++c) {
        seg.raster.push_back({58, c});
        extrap.mask.at(58, c) = 1;
    }
    extrap.segments.push_back(seg);

    const NavMap nav = compose_nav_map(map, extrap, 50.0, 10.0); // weight below threshold
    CHECK(nav.obstacle_mask.at(118, 94) == 1);
    CHECK(nav.segments.size() == 1);
    CHECK(nav.segments[0].endpoints[0].y == Catch::Approx(94.0));
    CHECK(nav.segments[0].endpoints[1].y == Catch::Approx(106.0));
}

TEST_CASE("ton history is bounded and time ordered")
{
    TonHistory history(3);
    const GridSpec roi{40, 0.05};
    for (int i = 0; i < 5; ++i) history.push(TonMask(roi), RigidTransform2D{}, i * 0.1);
    CHECK(history.size() == 3);
    CHECK(history.entries().front().timestamp == Catch::Approx(0.2));
    CHECK_THROWS_AS(history.push(TonMask(roi), RigidTransform2D{}, 0.1), std::invalid_argument);
}

TEST_CASE("accumulate_mapping reduces to the layer sum with no history")
{
    auto map = zero_map();
    map.low.at(10, 20) = 3.0;
    map.mid.at(118, 100) = 115.0;

    const auto mapping = accumulate_mapping(map, TonHistory(5), RigidTransform2D{}, 255.0);
    CHECK(mapping.at(10, 20) == 3.0);
    CHECK(mapping.at(118, 100) == 115.0);
}

TEST_CASE("a past TON shifts against the robot's forward motion")
{
    auto map = zero_map();
    const GridSpec roi{80, 0.05};

    TonMask past(roi);
    past.at(50, 40) = 1;
    TonHistory history(5);
    history.push(past, RigidTransform2D::identity(), 0.0);

    const RigidTransform2D current_pose{0.0, 0.5, 0.0}; // advanced half a meter in x
    const auto mapping = accumulate_mapping(map, history, current_pose, 255.0);

    CHECK(mapping.at(40 + 60, 40 + 60) == 255.0); // ROI (40, 40) after the window offset
    int nonzero = 0;
    for (double v : mapping.values()) nonzero += v != 0.0;
    CHECK(nonzero == 1);

    const TonMask accumulated = accumulate_ton_mask(history, TonMask(roi), current_pose);
    CHECK(accumulated.at(40, 40) == 1);
}

TEST_CASE("a stationary robot stacks repeated detections")
{
    auto map = zero_map();
    map.mid.at(110, 100) = 115.0;
    const GridSpec roi{80, 0.05};

    TonMask mask(roi);
    mask.at(50, 40) = 1;
    TonHistory history(10);
    for (int k = 0; k < 10; ++k) history.push(mask, RigidTransform2D::identity(), k * 0.1);

    const auto mapping = accumulate_mapping(map, history, RigidTransform2D::identity(), 255.0);
    CHECK(mapping.at(110, 100) == Catch::Approx(115.0 + 10 * 255.0));
}

TEST_CASE("adding history never removes accumulated cells")
{
    auto map = zero_map();
    const GridSpec roi{80, 0.05};
    TonMask m1(roi);
    m1.at(50, 40) = 1;
    TonMask m2(roi);
    m2.at(30, 44) = 1;

    TonHistory shorter(10);
    shorter.push(m1, RigidTransform2D::identity(), 0.0);
    TonHistory longer(10);
    longer.push(m1, RigidTransform2D::identity(), 0.0);
    longer.push(m2, RigidTransform2D{0.0, 0.1, 0.0}, 0.1);

    const auto a = accumulate_mapping(map, shorter, RigidTransform2D::identity(), 255.0);
    const auto b = accumulate_mapping(map, longer, RigidTransform2D::identity(), 255.0);
    for (std::size_t i = 0; i < a.values().size(); ++i)
        if (a.values()[i] > 0.0) CHECK(b.values()[i] >= a.values()[i]);
}
