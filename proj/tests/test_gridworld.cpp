#include <advmap/gridworld.hpp>

#include <gtest/gtest.h>

using namespace advmap;

namespace {

Scenario empty3(Cell start, Cell goal) { return {GridMap(3, 3), start, goal}; }

Path path(std::initializer_list<Cell> cells) { return Path{std::vector<Cell>(cells)}; }

} // namespace

TEST(GridMap, DefaultsTo28x28)
{
    GridMap m;
    EXPECT_EQ(m.width(), 28);
    EXPECT_EQ(m.height(), 28);
    EXPECT_EQ(m.obstacle_count(), 0u);
}

TEST(GridMap, RejectsNonPositiveDimensions)
{
    EXPECT_THROW(GridMap(0, 3), Error);
    EXPECT_THROW(GridMap(3, -1), Error);
}

TEST(GridMap, ObstacleOutsideGridThrows)
{
    try {
        GridMap(3, 3, {{3, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::out_of_bounds);
    }
}

TEST(GridMap, OutOfBoundsCountsAsBlocked)
{
    GridMap m(2, 2);
    EXPECT_TRUE(m.is_obstacle({-1, 0}));
    EXPECT_FALSE(m.is_free({2, 0}));
    EXPECT_TRUE(m.is_free({1, 1}));
}

TEST(GridMap, BitsAreRowMajor)
{
    GridMap m(3, 2, {{2, 0}, {0, 1}});
    EXPECT_EQ(m.to_bits(), "001100");
    EXPECT_EQ(GridMap::from_bits(3, 2, "001100"), m);
    EXPECT_EQ(m.obstacles(), (std::vector<Cell>{{2, 0}, {0, 1}}));
}

TEST(GridMap, FromBitsRejectsBadInput)
{
    try {
        GridMap::from_bits(3, 2, "0011");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::dimension_mismatch);
    }
    try {
        GridMap::from_bits(2, 1, "0x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::parse_error);
    }
}

TEST(GridMap, WithObstacleLeavesOriginalUntouched)
{
    const GridMap m(3, 3);
    const GridMap a = m.with_obstacle({1, 1});
    EXPECT_FALSE(m.is_obstacle({1, 1}));
    EXPECT_TRUE(a.is_obstacle({1, 1}));
}

TEST(Cell, OrdersByRowThenColumn)
{
    EXPECT_LT((Cell{5, 0}), (Cell{0, 1}));
    EXPECT_LT((Cell{0, 1}), (Cell{1, 1}));
    EXPECT_EQ(to_string(Cell{3, 7}), "3:7");
}

TEST(Cell, ChebyshevAdjacency)
{
    EXPECT_TRUE(adjacent8({0, 0}, {1, 1}));
    EXPECT_TRUE(adjacent8({2, 2}, {2, 1}));
    EXPECT_FALSE(adjacent8({0, 0}, {0, 0}));
    EXPECT_FALSE(adjacent8({0, 0}, {2, 2}));
    EXPECT_EQ(chebyshev({0, 0}, {3, -5}), 5);
}

TEST(ValidateScenario, AcceptsEmpty3x3Corners)
{
    EXPECT_TRUE(validate_scenario(empty3({0, 0}, {2, 2})));
}

TEST(ValidateScenario, ReportsEachViolation)
{
    EXPECT_EQ(validate_scenario({GridMap(3, 3, {{0, 0}}), {0, 0}, {2, 2}}).code, Errc::start_on_obstacle);
    EXPECT_EQ(validate_scenario({GridMap(3, 3, {{2, 2}}), {0, 0}, {2, 2}}).code, Errc::goal_on_obstacle);
    EXPECT_EQ(validate_scenario(empty3({1, 1}, {1, 1})).code, Errc::start_equals_goal);
    EXPECT_EQ(validate_scenario(empty3({0, 3}, {1, 1})).code, Errc::out_of_bounds);
    EXPECT_EQ(validate_scenario(empty3({0, 0}, {-1, 1})).code, Errc::out_of_bounds);
}

TEST(ValidatePath, DiagonalStepsAreAdjacent)
{
    EXPECT_TRUE(validate_path(path({{0, 0}, {1, 1}, {2, 2}}), empty3({0, 0}, {2, 2})));
}

TEST(ValidatePath, ReportsEachViolation)
{
    const Scenario s = empty3({0, 0}, {2, 2});
    EXPECT_EQ(validate_path(path({{0, 0}, {2, 2}}), s).code, Errc::non_adjacent_step);
    EXPECT_EQ(validate_path(path({{0, 0}, {1, 0}, {0, 0}}), s).code, Errc::repeated_cell);
    EXPECT_EQ(validate_path(Path{}, s).code, Errc::empty_path);
    EXPECT_EQ(validate_path(path({{1, 0}, {2, 1}}), s).code, Errc::path_not_from_start);
    const Scenario blocked{GridMap(3, 3, {{1, 1}}), {0, 0}, {2, 2}};
    EXPECT_EQ(validate_path(path({{0, 0}, {1, 1}, {2, 2}}), blocked).code, Errc::step_on_obstacle);
}

TEST(ValidatePathSteps, AllowsRevisits)
{
    EXPECT_TRUE(validate_path_steps(path({{0, 0}, {1, 0}, {0, 0}}), 3, 3));
    EXPECT_EQ(validate_path_steps(path({{0, 0}, {1, 0}, {3, 0}}), 3, 3).code, Errc::out_of_bounds);
}

TEST(MapPair, ExactlyOneAddedObstacle)
{
    const Scenario o{GridMap(4, 4, {{3, 0}}), {0, 0}, {3, 3}};
    const Scenario a{o.map.with_obstacle({1, 1}), o.start, o.goal};
    const MapPair mp{1, o, a};
    EXPECT_TRUE(validate_map_pair(mp));
    EXPECT_EQ(added_obstacles(mp), (std::vector<Cell>{{1, 1}}));
}

TEST(MapPair, RejectsInvalidPairs)
{
    const Scenario o{GridMap(4, 4), {0, 0}, {3, 3}};
    EXPECT_EQ(validate_map_pair({1, o, o}).code, Errc::invalid_map_pair);

    const Scenario two{o.map.with_obstacle({1, 1}).with_obstacle({2, 1}), o.start, o.goal};
    EXPECT_EQ(validate_map_pair({1, o, two}).code, Errc::invalid_map_pair);

    const Scenario moved{o.map.with_obstacle({1, 1}), {0, 1}, o.goal};
    EXPECT_EQ(validate_map_pair({1, o, moved}).code, Errc::invalid_map_pair);

    const Scenario with_extra{GridMap(4, 4, {{2, 0}}), o.start, o.goal};
    const Scenario removed{GridMap(4, 4, {{1, 1}}), o.start, o.goal};
    EXPECT_EQ(validate_map_pair({1, with_extra, removed}).code, Errc::invalid_map_pair);

    const Scenario on_goal{o.map.with_obstacle({3, 3}), o.start, o.goal};
    EXPECT_EQ(validate_map_pair({1, o, on_goal}).code, Errc::goal_on_obstacle);
}

TEST(Error, MessageCarriesCodeName)
{
    const Error e(Errc::repeated_cell, "x");
    EXPECT_STREQ(e.what(), "RepeatedCell: x");
    const ParseError p(7, "bad");
    EXPECT_EQ(p.line(), 7u);
    EXPECT_EQ(p.code(), Errc::parse_error);
}
