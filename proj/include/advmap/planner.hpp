#pragma once

// Value-iteration grid planner. Stands in for a learned planner: `exact` runs
// Bellman sweeps to the fixed point, `limited` stops after a fixed number of
// sweeps so cells beyond the horizon stay unreachable and the greedy rollout
// dead-ends there.

#include <advmap/gridworld.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace advmap {

enum class PlannerMode { exact, limited };

constexpr std::string_view to_string(PlannerMode m) noexcept { return m == PlannerMode::exact ? "exact" : "limited"; }

inline PlannerMode parse_planner_mode(std::string_view s)
{
    if (s == "exact")
        return PlannerMode::exact;
    if (s == "limited")
        return PlannerMode::limited;
    throw Error(Errc::invalid_config, "unknown planner mode '" + std::string(s) + "'");
}

struct PlannerConfig {
    PlannerMode mode = PlannerMode::exact;
    int max_iterations = 24;                                        // sweeps, limited mode only
    int max_rollout_steps = 4 * kDefaultGridSize * kDefaultGridSize;
    double step_reward = -1.0;
    double goal_reward = 10.0;

    /// Defaults with the rollout cap scaled to the grid (4 * width * height).
    static PlannerConfig for_grid(int width, int height)
    {
        PlannerConfig cfg;
        cfg.max_rollout_steps = 4 * width * height;
        return cfg;
    }

    friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

inline Status validate_planner_config(const PlannerConfig& cfg)
{
    if (cfg.max_rollout_steps < 1)
        return Status::failure(Errc::invalid_config, "max_rollout_steps must be >= 1");
    if (!(cfg.step_reward < 0.0) || !(cfg.goal_reward > 0.0))
        return Status::failure(Errc::invalid_config, "rewards must satisfy step_reward < 0 < goal_reward");
    if (cfg.mode == PlannerMode::limited && cfg.max_iterations < 0)
        return Status::failure(Errc::invalid_config, "max_iterations must be >= 0");
    return Status::success();
}

struct ValueField {
    static constexpr double kUnreachable = -std::numeric_limits<double>::infinity();

    int width = 0;
    int height = 0;
    std::vector<double> values;
    int iterations_run = 0;

    [[nodiscard]] double at(Cell c) const
    {
        return values[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x)];
    }
};

inline constexpr double kValueTolerance = 1e-9;

/// Synchronous (Jacobi) Bellman sweeps: after k sweeps exactly the cells within
/// k steps of the goal hold finite values.
inline ValueField value_iterate(const Scenario& s, const PlannerConfig& cfg)
{
    require(validate_planner_config(cfg));
    const GridMap& map = s.map;
    ValueField field;
    field.width = map.width();
    field.height = map.height();
    field.values.assign(map.cell_count(), ValueField::kUnreachable);

    const bool goal_free = map.is_free(s.goal);
    const std::size_t goal_idx = goal_free ? map.index(s.goal) : map.cell_count();
    if (goal_free)
        field.values[goal_idx] = cfg.goal_reward;

    std::vector<double> next = field.values;
    const bool limited = cfg.mode == PlannerMode::limited;
    // Exact mode needs at most one sweep per free cell plus one confirming sweep.
    const long sweep_cap = limited ? cfg.max_iterations : static_cast<long>(map.cell_count()) + 1;

    for (long sweep = 0; sweep < sweep_cap; ++sweep) {
        bool changed = false;
        for (std::size_t i = 0; i < map.cell_count(); ++i) {
            const Cell c = map.cell_at(i);
            if (i == goal_idx || map.is_obstacle(c)) {
                next[i] = field.values[i];
                continue;
            }
            double best = ValueField::kUnreachable;
            for (Cell d : kNeighbourOffsets) {
                const Cell n{c.x + d.x, c.y + d.y};
                if (!map.is_free(n))
                    continue;
                best = std::max(best, field.values[map.index(n)]);
            }
            const double v = best == ValueField::kUnreachable ? ValueField::kUnreachable : cfg.step_reward + best;
            const double old = field.values[i];
            if (std::isinf(v) != std::isinf(old) || (!std::isinf(v) && std::abs(v - old) > kValueTolerance))
                changed = true;
            next[i] = v;
        }
        field.values.swap(next);
        ++field.iterations_run;
        if (!limited && !changed)
            break;
    }
    return field;
}

/// Greedy ascent over a value field. Moves only to a strictly better free
/// neighbour; ties go to the smallest (y, x).
inline Path rollout(const Scenario& s, const ValueField& field, int max_steps)
{
    const GridMap& map = s.map;
    Path path;
    path.steps.push_back(s.start);
    Cell cur = s.start;
    for (int step = 0; step < max_steps && cur != s.goal; ++step) {
        double cur_value = map.in_bounds(cur) ? field.at(cur) : ValueField::kUnreachable;
        bool moved = false;
        Cell best_cell{};
        double best_value = cur_value;
        for (Cell d : kNeighbourOffsets) {
            const Cell n{cur.x + d.x, cur.y + d.y};
            if (!map.is_free(n))
                continue;
            const double v = field.at(n);
            // Offsets are visited in (y, x) order, so strict '>' keeps the first maximum.
            if (v > best_value) {
                best_value = v;
                best_cell = n;
                moved = true;
            }
        }
        if (!moved)
            break;
        cur = best_cell;
        path.steps.push_back(cur);
    }
    return path;
}

inline Path plan(const Scenario& s, const PlannerConfig& cfg)
{
    if (s.start == s.goal)
        return Path{{s.start}};
    return rollout(s, value_iterate(s, cfg), cfg.max_rollout_steps);
}

inline PathPair plan_pair(const MapPair& mp, const PlannerConfig& cfg)
{
    return {plan(mp.original, cfg), plan(mp.adversarial, cfg)};
}

} // namespace advmap
