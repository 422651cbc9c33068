#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "topgn/distance_transform.hpp"

using namespace topgn;

namespace {

Grid2D<double> brute_force_sq(const BinaryGrid& occupied)
{
    const int n = occupied.side();
    Grid2D<double> out(occupied.spec(), std::numeric_limits<double>::infinity());
    const auto cells = occupied.nonzero_cells();
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            for (const GridCell& o : cells) {
                const double d = (r - o.r) * static_cast<double>(r - o.r) +
                                 (c - o.c) * static_cast<double>(c - o.c);
                out.at(r, c) = std::min(out.at(r, c), d);
            }
    return out;
}

} // namespace

TEST_CASE("squared distance transform matches brute force")
{
    std::mt19937_64 rng(49);
    std::uniform_int_distribution<int> coord(0, 23);
    std::uniform_int_distribution<int> count(0, 40);

    for (int round = 0; round < 60; ++round) {
        BinaryGrid grid(GridSpec{24, 0.05});
        const int k = count(rng);
        for (int i = 0; i < k; ++i) grid.at(coord(rng), coord(rng)) = 1;

        const auto fast = squared_distance_transform(grid);
        const auto slow = brute_force_sq(grid);
        for (int r = 0; r < 24; ++r)
            for (int c = 0; c < 24; ++c) REQUIRE(fast.at(r, c) == slow.at(r, c));
    }
}

TEST_CASE("empty grid is infinitely far from obstacles")
{
    const auto dist = squared_distance_transform(BinaryGrid(GridSpec{16, 0.1}));
    for (double v : dist.values()) CHECK(v == std::numeric_limits<double>::infinity());
}

TEST_CASE("occupied cells have zero distance")
{
    BinaryGrid grid(GridSpec{16, 0.1});
    grid.at(3, 12) = 1;
    grid.at(8, 8) = 1;
    const auto dist = squared_distance_transform(grid);
    CHECK(dist.at(3, 12) == 0.0);
    CHECK(dist.at(8, 8) == 0.0);
    CHECK(dist.at(8, 9) == 1.0);
    CHECK(dist.at(9, 9) == 2.0);
}
