#include "colabm/grid.hpp"
#include "colabm/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

using namespace colabm;

namespace {

Population grid_pop(std::size_t d, std::size_t n) {
    Population p(GridEnv::position_schema(d));
    p.add_agents(n);
    return p;
}

std::int64_t ipow(std::int64_t b, std::size_t e) {
    std::int64_t r = 1;
    while (e--) {
        r *= b;
    }
    return r;
}

} // namespace

TEST(Grid, InteriorMooreAndVonNeumann2d) {
    const GridEnv moore({10, 10}, false, Neighborhood::Moore);
    const GridEnv vn({10, 10}, false, Neighborhood::VonNeumann);
    EXPECT_EQ(moore.neighbor_cells({5, 5}, 1).size(), 8u);
    EXPECT_EQ(vn.neighbor_cells({5, 5}, 1).size(), 4u);
}

TEST(Grid, NeighborCountsByDimension) {
    for (std::size_t d = 1; d <= 4; ++d) {
        const std::vector<std::int64_t> dims(d, 7);
        const Cell center(d, 3);
        const GridEnv moore(dims, false, Neighborhood::Moore);
        const GridEnv vn(dims, false, Neighborhood::VonNeumann);
        EXPECT_EQ(static_cast<std::int64_t>(moore.neighbor_cells(center, 1).size()),
                  ipow(3, d) - 1);
        EXPECT_EQ(vn.neighbor_cells(center, 1).size(), 2 * d);
    }
}

TEST(Grid, TorusWrapsCorner) {
    const GridEnv g({5, 5}, true, Neighborhood::Moore);
    const auto cells = g.neighbor_cells({0, 0}, 1);
    EXPECT_EQ(cells.size(), 8u);
    EXPECT_NE(std::find(cells.begin(), cells.end(), Cell{4, 4}), cells.end());
    EXPECT_TRUE(std::is_sorted(cells.begin(), cells.end()));
}

TEST(Grid, EdgeClipsWithoutTorus) {
    const GridEnv g({5, 5}, false, Neighborhood::Moore);
    EXPECT_EQ(g.neighbor_cells({0, 0}, 1), (std::vector<Cell>{{0, 1}, {1, 0}, {1, 1}}));
}

TEST(Grid, SmallTorusDeduplicates) {
    // On a 3-wide ring radius 2 reaches every other cell twice.
    const GridEnv g({3}, true, Neighborhood::Moore);
    EXPECT_EQ(g.neighbor_cells({0}, 2), (std::vector<Cell>{{1}, {2}}));
}

TEST(Grid, VonNeumannRadiusTwo) {
    const GridEnv g({9, 9}, false, Neighborhood::VonNeumann);
    const auto cells = g.neighbor_cells({4, 4}, 2);
    EXPECT_EQ(cells.size(), 12u);
    for (const auto& c : cells) {
        EXPECT_LE(std::abs(c[0] - 4) + std::abs(c[1] - 4), 2);
    }
}

TEST(Grid, OutOfBoundsCell) {
    const GridEnv g({5, 5}, false);
    EXPECT_THROW(g.neighbor_cells({5, 0}, 1), DomainError);
    EXPECT_THROW(g.neighbor_cells({1, 1}, 0), DomainError);
}

TEST(Grid, PlaceRoundtrip) {
    GridEnv g({5, 5}, false);
    auto p = grid_pop(2, 2);
    g.place(p, 0, {2, 3});
    EXPECT_EQ(g.agents_at({2, 3}), (std::vector<AgentId>{0}));
    EXPECT_EQ(p.get<std::int64_t>(0, "pos_0"), 2);
    EXPECT_EQ(p.get<std::int64_t>(0, "pos_1"), 3);
}

TEST(Grid, TorusMoveWraps) {
    GridEnv g({5, 5}, true);
    auto p = grid_pop(2, 1);
    g.place(p, 0, {0, 0});
    g.move(p, 0, {6, -1});
    EXPECT_EQ(*g.position_of(0), (Cell{1, 4}));
    EXPECT_EQ(p.get<std::int64_t>(0, "pos_0"), 1);
    EXPECT_EQ(p.get<std::int64_t>(0, "pos_1"), 4);
    EXPECT_TRUE(g.agents_at({0, 0}).empty());
}

TEST(Grid, MultiOccupancy) {
    GridEnv g({5, 5}, false);
    auto p = grid_pop(2, 2);
    g.place(p, 1, {1, 1});
    g.place(p, 0, {1, 1});
    EXPECT_EQ(g.agents_at({1, 1}), (std::vector<AgentId>{0, 1}));
}

TEST(Grid, PlaceErrors) {
    GridEnv g({5, 5}, false);
    auto p = grid_pop(2, 2);
    EXPECT_THROW(g.place(p, 0, {5, 5}), DomainError);
    p.remove_agents({1});
    EXPECT_THROW(g.place(p, 1, {0, 0}), LivenessError);
    EXPECT_THROW(g.move(p, 0, {0, 0}), DomainError);
}

TEST(Grid, NeighborAgents) {
    GridEnv g({5, 5}, false);
    auto p = grid_pop(2, 3);
    g.place(p, 0, {2, 2});
    g.place(p, 1, {3, 3});
    g.place(p, 2, {4, 4});
    EXPECT_EQ(g.neighbor_agents({2, 2}, 1), (std::vector<AgentId>{1}));
}

TEST(Grid, OccupancyConsistencyUnderRandomMoves) {
    Rng rng(4);
    for (bool torus : {false, true}) {
        GridEnv g({6, 4, 3}, torus);
        auto p = grid_pop(3, 25);
        for (AgentId id = 0; id < 25; ++id) {
            g.place(p, id, {static_cast<std::int64_t>(rng.below(6)),
                            static_cast<std::int64_t>(rng.below(4)),
                            static_cast<std::int64_t>(rng.below(3))});
        }
        for (int k = 0; k < 400; ++k) {
            const AgentId id = rng.below(25);
            Cell c = *g.position_of(id);
            for (auto& x : c) {
                x += static_cast<std::int64_t>(rng.below(3)) - 1;
            }
            if (!torus && !g.in_bounds(c)) {
                EXPECT_THROW(g.move(p, id, c), DomainError);
                continue;
            }
            g.move(p, id, c);
        }
        EXPECT_EQ(g.occupancy_from_columns(p), g.occupancy());
        std::size_t total = 0;
        for (const auto& [cell, ids] : g.occupancy()) {
            EXPECT_TRUE(g.in_bounds(cell));
            total += ids.size();
        }
        EXPECT_EQ(total, 25u);
    }
}
