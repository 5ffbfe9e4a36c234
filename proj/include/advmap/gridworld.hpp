#pragma once

// Core grid-world value types: cells, occupancy maps, scenarios, map pairs and paths.
//
// Coordinates: x is the column, y is the row, origin at the top-left corner.
// Movement is 8-connected with unit cost per step.

#include <advmap/error.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace advmap {

inline constexpr int kDefaultGridSize = 28;

struct Cell {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(const Cell&, const Cell&) = default;
    // Row-major order: (y, x). This is also the planner's tie-break order.
    friend constexpr std::strong_ordering operator<=>(const Cell& a, const Cell& b)
    {
        if (auto c = a.y <=> b.y; c != 0)
            return c;
        return a.x <=> b.x;
    }
};

inline std::string to_string(Cell c) { return std::to_string(c.x) + ":" + std::to_string(c.y); }

constexpr int chebyshev(Cell a, Cell b) noexcept
{
    const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx > dy ? dx : dy;
}

constexpr bool adjacent8(Cell a, Cell b) noexcept { return chebyshev(a, b) == 1; }

struct CellHash {
    std::size_t operator()(Cell c) const noexcept
    {
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32)
                                          | static_cast<std::uint32_t>(c.y));
    }
};

using CellSet = std::unordered_set<Cell, CellHash>;

/// The eight neighbour offsets in row-major order of the resulting cell.
inline constexpr Cell kNeighbourOffsets[8] = {
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
};

/// Rectangular occupancy grid. Value type; obstacle edits return a new map.
class GridMap {
public:
    GridMap() : GridMap(kDefaultGridSize, kDefaultGridSize) {}

    GridMap(int width, int height) : width_(width), height_(height)
    {
        if (width <= 0 || height <= 0)
            throw Error(Errc::invalid_config, "grid dimensions must be positive");
        occupied_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    }

    GridMap(int width, int height, const std::vector<Cell>& obstacles) : GridMap(width, height)
    {
        for (Cell c : obstacles) {
            if (!in_bounds(c))
                throw Error(Errc::out_of_bounds, "obstacle " + to_string(c) + " outside grid");
            occupied_[index(c)] = 1;
        }
    }

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::size_t cell_count() const noexcept { return occupied_.size(); }

    [[nodiscard]] bool in_bounds(Cell c) const noexcept
    {
        return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
    }

    [[nodiscard]] std::size_t index(Cell c) const noexcept
    {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
    }

    [[nodiscard]] Cell cell_at(std::size_t idx) const noexcept
    {
        return {static_cast<int>(idx % static_cast<std::size_t>(width_)),
                static_cast<int>(idx / static_cast<std::size_t>(width_))};
    }

    /// Out-of-bounds cells count as blocked.
    [[nodiscard]] bool is_obstacle(Cell c) const noexcept { return !in_bounds(c) || occupied_[index(c)] != 0; }

    [[nodiscard]] bool is_free(Cell c) const noexcept { return in_bounds(c) && occupied_[index(c)] == 0; }

    [[nodiscard]] std::size_t obstacle_count() const noexcept
    {
        return static_cast<std::size_t>(std::count(occupied_.begin(), occupied_.end(), std::uint8_t{1}));
    }

    /// Obstacle cells in row-major order.
    [[nodiscard]] std::vector<Cell> obstacles() const
    {
        std::vector<Cell> out;
        for (std::size_t i = 0; i < occupied_.size(); ++i)
            if (occupied_[i])
                out.push_back(cell_at(i));
        return out;
    }

    [[nodiscard]] GridMap with_obstacle(Cell c) const
    {
        if (!in_bounds(c))
            throw Error(Errc::out_of_bounds, "obstacle " + to_string(c) + " outside grid");
        GridMap copy = *this;
        copy.occupied_[index(c)] = 1;
        return copy;
    }

    /// Row-major '0'/'1' occupancy string of length width*height.
    [[nodiscard]] std::string to_bits() const
    {
        std::string s(occupied_.size(), '0');
        for (std::size_t i = 0; i < occupied_.size(); ++i)
            if (occupied_[i])
                s[i] = '1';
        return s;
    }

    static GridMap from_bits(int width, int height, std::string_view bits)
    {
        GridMap m(width, height);
        if (bits.size() != m.cell_count())
            throw Error(Errc::dimension_mismatch, "map string has " + std::to_string(bits.size())
                                                      + " cells, expected " + std::to_string(m.cell_count()));
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1')
                m.occupied_[i] = 1;
            else if (bits[i] != '0')
                throw Error(Errc::parse_error, "map string contains a character other than 0/1");
        }
        return m;
    }

    friend bool operator==(const GridMap&, const GridMap&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> occupied_;
};

struct Scenario {
    GridMap map;
    Cell start;
    Cell goal;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct MapPair {
    std::int64_t id = 0;
    Scenario original;
    Scenario adversarial;

    friend bool operator==(const MapPair&, const MapPair&) = default;
};

struct Path {
    std::vector<Cell> steps;

    [[nodiscard]] bool empty() const noexcept { return steps.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return steps.size(); }
    [[nodiscard]] Cell front() const { return steps.front(); }
    [[nodiscard]] Cell back() const { return steps.back(); }

    friend bool operator==(const Path&, const Path&) = default;
};

struct PathPair {
    Path original;
    Path adversarial;

    friend bool operator==(const PathPair&, const PathPair&) = default;
};

inline Status validate_scenario(const Scenario& s)
{
    const GridMap& m = s.map;
    if (!m.in_bounds(s.start))
        return Status::failure(Errc::out_of_bounds, "start " + to_string(s.start) + " outside grid");
    if (!m.in_bounds(s.goal))
        return Status::failure(Errc::out_of_bounds, "goal " + to_string(s.goal) + " outside grid");
    if (m.is_obstacle(s.start))
        return Status::failure(Errc::start_on_obstacle, "start " + to_string(s.start) + " is an obstacle");
    if (m.is_obstacle(s.goal))
        return Status::failure(Errc::goal_on_obstacle, "goal " + to_string(s.goal) + " is an obstacle");
    if (s.start == s.goal)
        return Status::failure(Errc::start_equals_goal, "start and goal coincide at " + to_string(s.start));
    return Status::success();
}

/// Adjacency-only check used for externally produced paths: revisits are allowed.
inline Status validate_path_steps(const Path& p, int width, int height)
{
    if (p.empty())
        return Status::failure(Errc::empty_path, "path has no steps");
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        const Cell c = p.steps[i];
        if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height)
            return Status::failure(Errc::out_of_bounds, "step " + std::to_string(i) + " " + to_string(c) + " outside grid");
        if (i > 0 && !adjacent8(p.steps[i - 1], c))
            return Status::failure(Errc::non_adjacent_step, "steps " + std::to_string(i - 1) + " and " + std::to_string(i)
                                                               + " (" + to_string(p.steps[i - 1]) + " -> " + to_string(c)
                                                               + ") are not 8-adjacent");
    }
    return Status::success();
}

inline Status validate_path(const Path& p, const Scenario& s)
{
    if (Status st = validate_path_steps(p, s.map.width(), s.map.height()); !st)
        return st;
    if (p.front() != s.start)
        return Status::failure(Errc::path_not_from_start, "path begins at " + to_string(p.front()) + ", start is "
                                                              + to_string(s.start));
    CellSet seen;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        const Cell c = p.steps[i];
        if (s.map.is_obstacle(c))
            return Status::failure(Errc::step_on_obstacle, "step " + std::to_string(i) + " " + to_string(c) + " is an obstacle");
        if (!seen.insert(c).second)
            return Status::failure(Errc::repeated_cell, "cell " + to_string(c) + " revisited at step " + std::to_string(i));
    }
    return Status::success();
}

/// Cells present in the adversarial map but not in the original map.
inline std::vector<Cell> added_obstacles(const MapPair& mp)
{
    std::vector<Cell> out;
    const GridMap& o = mp.original.map;
    const GridMap& a = mp.adversarial.map;
    for (std::size_t i = 0; i < a.cell_count(); ++i) {
        const Cell c = a.cell_at(i);
        if (a.is_obstacle(c) && !o.is_obstacle(c))
            out.push_back(c);
    }
    return out;
}

inline Status validate_map_pair(const MapPair& mp)
{
    if (Status st = validate_scenario(mp.original); !st)
        return st;
    if (Status st = validate_scenario(mp.adversarial); !st)
        return st;
    const GridMap& o = mp.original.map;
    const GridMap& a = mp.adversarial.map;
    if (o.width() != a.width() || o.height() != a.height())
        return Status::failure(Errc::invalid_map_pair, "original and adversarial maps differ in size");
    if (mp.original.start != mp.adversarial.start || mp.original.goal != mp.adversarial.goal)
        return Status::failure(Errc::invalid_map_pair, "original and adversarial scenarios differ in start or goal");
    for (std::size_t i = 0; i < o.cell_count(); ++i) {
        const Cell c = o.cell_at(i);
        if (o.is_obstacle(c) && !a.is_obstacle(c))
            return Status::failure(Errc::invalid_map_pair, "adversarial map removes obstacle " + to_string(c));
    }
    if (auto added = added_obstacles(mp); added.size() != 1)
        return Status::failure(Errc::invalid_map_pair, "adversarial map adds " + std::to_string(added.size())
                                                           + " obstacles, expected exactly one");
    return Status::success();
}

} // namespace advmap
