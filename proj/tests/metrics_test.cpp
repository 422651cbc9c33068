#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "topgn/metrics.hpp"

using namespace topgn;

namespace {

BinaryGrid random_mask(std::mt19937_64& rng, double density)
{
    BinaryGrid grid(GridSpec{20, 0.05});
    std::bernoulli_distribution bit(density);
    for (auto& v : grid.values()) v = bit(rng) ? 1 : 0;
    return grid;
}

} // namespace

TEST_CASE("confusion counts per-cell agreement")
{
    const GridSpec spec{10, 0.05};

    SECTION("identical masks have no errors")
    {
        BinaryGrid g(spec);
        g.at(3, 3) = g.at(4, 4) = 1;
        const auto c = confusion(g, g);
        CHECK(c.fp == 0);
        CHECK(c.fn == 0);
        CHECK(c.tp == 2);
        CHECK(c.tn == 98);
    }

    SECTION("all-ones vs all-zeros is pure false positives")
    {
        BinaryGrid pred(spec);
        pred.fill(1);
        const BinaryGrid gt(spec);
        const auto c = confusion(pred, gt);
        CHECK(c.fp == 100);
        CHECK(c.tp + c.fn + c.tn == 0);
    }

    SECTION("strip with misses and an extra")
    {
        BinaryGrid gt(spec);
        for (int c = 0; c < 10; ++c) gt.at(5, c) = 1;
        BinaryGrid pred = gt;
        pred.at(5, 0) = 0;
        pred.at(5, 9) = 0;
        pred.at(2, 2) = 1;
        const auto c = confusion(pred, gt);
        CHECK(c.tp == 8);
        CHECK(c.fn == 2);
        CHECK(c.fp == 1);
    }

    SECTION("dimension mismatch is an error")
    {
        CHECK_THROWS_AS(confusion(BinaryGrid(GridSpec{10, 0.05}), BinaryGrid(GridSpec{12, 0.05})),
                        std::invalid_argument);
    }
}

TEST_CASE("scores from counts")
{
    SECTION("perfect prediction")
    {
        const Scores s = scores({10, 0, 0, 90});
        CHECK(s.miou == 1.0);
        CHECK(s.pa == 1.0);
        CHECK(s.f1 == 1.0);
        CHECK(s.mae == 0.0);
    }

    SECTION("precision 0.8 and recall 0.6 give the expected harmonic mean")
    {
        // tp=12, fp=3 -> P=0.8; fn=8 -> R=0.6
        const Scores s = scores({12, 3, 8, 77});
        CHECK(s.f1 == Catch::Approx(0.685714).margin(1e-5));
    }

    SECTION("two wrong cells of ten give mae 0.2")
    {
        const Scores s = scores({4, 1, 1, 4});
        CHECK(s.mae == Catch::Approx(0.2));
    }

    SECTION("empty prediction of an empty scene is perfect")
    {
        const Scores s = scores({0, 0, 0, 50});
        CHECK(s.miou == 1.0);
        CHECK(s.pa == 1.0);
        CHECK(s.f1 == 1.0);
        CHECK(s.mae == 0.0);
    }

    SECTION("nothing right at all gives zero f1")
    {
        const Scores s = scores({0, 5, 5, 90});
        CHECK(s.f1 == 0.0);
    }
}

TEST_CASE("swapping prediction and ground truth")
{
    std::mt19937_64 rng(71);
    for (int i = 0; i < 100; ++i) {
        const BinaryGrid a = random_mask(rng, 0.2);
        const BinaryGrid b = random_mask(rng, 0.3);
        const Scores ab = scores(confusion(a, b));
        const Scores ba = scores(confusion(b, a));
        CHECK(ab.pa == ba.pa);
        CHECK(ab.mae == ba.mae);
        CHECK(ab.miou == ba.miou);
        CHECK(ab.f1 == Catch::Approx(ba.f1).margin(1e-12));

        CHECK(ab.miou >= 0.0);
        CHECK(ab.miou <= 1.0);
        CHECK(ab.f1 >= 0.0);
        CHECK(ab.f1 <= 1.0);
    }
}

TEST_CASE("self-comparison is always perfect")
{
    std::mt19937_64 rng(73);
    for (int i = 0; i < 50; ++i) {
        const BinaryGrid g = random_mask(rng, 0.15 * (i % 7)); // includes the empty mask
        const Scores s = scores(confusion(g, g));
        CHECK(s.miou == 1.0);
        CHECK(s.pa == 1.0);
        CHECK(s.f1 == 1.0);
        CHECK(s.mae == 0.0);
    }
}

TEST_CASE("success rate aggregation")
{
    std::vector<RunRecord> records(10);
    for (int i = 0; i < 7; ++i) records[i].outcome = RunOutcome::success;
    records[7].outcome = RunOutcome::collision;
    records[8].outcome = RunOutcome::frozen;
    records[9].outcome = RunOutcome::timeout;
    CHECK(aggregate_runs(records) == Catch::Approx(70.0));

    for (auto& r : records) r.outcome = RunOutcome::success;
    CHECK(aggregate_runs(records) == 100.0);
    for (auto& r : records) r.outcome = RunOutcome::collision;
    CHECK(aggregate_runs(records) == 0.0);
    CHECK_THROWS_AS(aggregate_runs({}), std::invalid_argument);
}
