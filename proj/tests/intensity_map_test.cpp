#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "topgn/intensity_map.hpp"

using namespace topgn;

namespace {

PointCloudFrame random_frame(std::mt19937_64& rng, int n_points)
{
    std::uniform_real_distribution<double> coord(-6.0, 6.0);
    std::uniform_real_distribution<double> height(-0.2, 1.2);
    std::uniform_int_distribution<int> intensity(0, 255);
    PointCloudFrame frame;
    frame.points.reserve(n_points);
    for (int i = 0; i < n_points; ++i)
        frame.points.push_back(
            {coord(rng), coord(rng), height(rng), static_cast<double>(intensity(rng))});
    return frame;
}

} // namespace

TEST_CASE("height intervals select exactly one layer")
{
    const LayerConfig cfg{};
    CHECK(cfg.layer_of(0.0) == -1);
    CHECK(cfg.layer_of(-0.1) == -1);
    CHECK(cfg.layer_of(0.15) == 0);
    CHECK(cfg.layer_of(0.3) == 1); // boundary belongs to the layer it opens
    CHECK(cfg.layer_of(0.5) == 1);
    CHECK(cfg.layer_of(0.7) == 2);
    CHECK(cfg.layer_of(0.85) == 2);
    CHECK(cfg.layer_of(0.9) == -1);
    CHECK(cfg.layer_of(1.5) == -1);
}

TEST_CASE("build_layers bins points by height and cell")
{
    const GridSpec spec{200, 0.05};
    const LayerConfig cfg{};

    SECTION("empty frame gives all-zero layers")
    {
        const auto map = build_layers(PointCloudFrame{}, spec, cfg);
        for (int layer = 0; layer < 3; ++layer)
            for (double v : map.layer(layer).values()) CHECK(v == 0.0);
    }

    SECTION("single mid point lands at its cell with its own intensity")
    {
        PointCloudFrame frame;
        frame.points.push_back({1.02, -0.30, 0.5, 120.0});
        const auto map = build_layers(frame, spec, cfg);
        CHECK(map.mid.at(120, 94) == 120.0);
        for (double v : map.low.values()) CHECK(v == 0.0);
        for (double v : map.high.values()) CHECK(v == 0.0);
    }

    SECTION("normalization modes")
    {
        PointCloudFrame frame;
        frame.points.push_back({1.02, -0.30, 0.5, 110.0});
        frame.points.push_back({1.02, -0.30, 0.45, 120.0});

        CHECK(build_layers(frame, spec, cfg).mid.at(120, 94) == 115.0);

        LayerConfig sum = cfg;
        sum.normalization = Normalization::sum;
        CHECK(build_layers(frame, spec, sum).mid.at(120, 94) == 230.0);

        LayerConfig literal = cfg;
        literal.normalization = Normalization::sum_over_s2;
        CHECK(build_layers(frame, spec, literal).mid.at(120, 94) == Catch::Approx(92000.0));
    }

    SECTION("non-finite points are skipped and counted")
    {
        PointCloudFrame frame;
        frame.points.push_back({1.0, 0.0, 0.5, 120.0});
        frame.points.push_back({std::numeric_limits<double>::quiet_NaN(), 0.0, 0.5, 120.0});
        frame.points.push_back({0.0, std::numeric_limits<double>::infinity(), 0.5, 120.0});
        const auto map = build_layers(frame, spec, cfg);
        CHECK(map.skipped_nonfinite == 2);
        CHECK(map.mid.at(120, 100) == 120.0);
    }
}

TEST_CASE("sum normalization conserves total in-range intensity")
{
    const GridSpec spec{200, 0.05};
    LayerConfig cfg{};
    cfg.normalization = Normalization::sum;

    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
        const PointCloudFrame frame = random_frame(rng, 2000);
        const auto map = build_layers(frame, spec, cfg);

        double expected = 0.0;
        for (const LidarPoint& p : frame.points) {
            if (cfg.layer_of(p.z) < 0) continue;
            if (!spec.world_to_grid({p.x, p.y})) continue;
            expected += p.intensity;
        }
        double got = 0.0;
        for (int layer = 0; layer < 3; ++layer)
            for (double v : map.layer(layer).values()) got += v;
        CHECK(got == expected);
    }
}

TEST_CASE("build_layers is deterministic and permutation invariant")
{
    const GridSpec spec{200, 0.05};
    const LayerConfig cfg{};
    std::mt19937_64 rng(5);
    PointCloudFrame frame = random_frame(rng, 3000);

    const auto a = build_layers(frame, spec, cfg);
    const auto b = build_layers(frame, spec, cfg);
    CHECK(a.low == b.low);
    CHECK(a.mid == b.mid);
    CHECK(a.high == b.high);

    std::shuffle(frame.points.begin(), frame.points.end(), rng);
    const auto c = build_layers(frame, spec, cfg);
    CHECK(a.low == c.low);
    CHECK(a.mid == c.mid);
    CHECK(a.high == c.high);
}

TEST_CASE("perturbing z inside an interval never changes the layer")
{
    const LayerConfig cfg{};
    std::mt19937_64 rng(3);
    const double edges[4] = {0.0, cfg.h_lid - cfg.delta, cfg.h_lid + cfg.delta,
                             cfg.h_lid + 2 * cfg.delta};
    std::uniform_real_distribution<double> unit(1e-9, 1.0 - 1e-9);
    for (int interval = 0; interval < 3; ++interval) {
        const double lo = edges[interval];
        const double hi = edges[interval + 1];
        for (int i = 0; i < 200; ++i) {
            const double z = lo + (hi - lo) * unit(rng);
            CHECK(cfg.layer_of(z) == interval);
        }
    }
}

TEST_CASE("extract_roi views the centered window")
{
    const GridSpec spec{200, 0.05};
    PointCloudFrame frame;
    frame.points.push_back({1.02, -0.30, 0.5, 115.0});
    const auto map = build_layers(frame, spec, LayerConfig{});

    const RoiView roi = extract_roi(map, 80);
    CHECK(roi.offset() == 60);
    CHECK(roi.mid(60, 34) == 115.0);

    CHECK(extract_roi(map, 198).offset() == 1);
    CHECK_THROWS_AS(extract_roi(map, 200), std::invalid_argument);
    CHECK_THROWS_AS(extract_roi(map, 240), std::invalid_argument);
}
