#pragma once

// Random scenario generation and single-obstacle adversarial perturbation.

#include <advmap/gridworld.hpp>
#include <advmap/random.hpp>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace advmap {

enum class Placement { random, on_path, near_path };

constexpr std::string_view to_string(Placement p) noexcept
{
    switch (p) {
    case Placement::random: return "random";
    case Placement::on_path: return "on_path";
    case Placement::near_path: return "near_path";
    }
    return "unknown";
}

inline Placement parse_placement(std::string_view s)
{
    if (s == "random")
        return Placement::random;
    if (s == "on_path")
        return Placement::on_path;
    if (s == "near_path")
        return Placement::near_path;
    throw Error(Errc::invalid_config, "unknown placement '" + std::string(s) + "'");
}

struct GenConfig {
    int width = kDefaultGridSize;
    int height = kDefaultGridSize;
    double obstacle_density = 0.2;
    Placement placement = Placement::on_path;
    int radius = 1;                // near_path only, Chebyshev cells
    std::uint64_t seed = 0;
    bool require_reachable = true; // reject scenarios whose goal cannot be reached

    friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

inline constexpr int kMaxGenerationAttempts = 1000;

inline Status validate_gen_config(const GenConfig& cfg)
{
    if (cfg.width <= 0 || cfg.height <= 0)
        return Status::failure(Errc::invalid_config, "grid dimensions must be positive");
    if (!(cfg.obstacle_density >= 0.0 && cfg.obstacle_density < 1.0))
        return Status::failure(Errc::invalid_config, "obstacle_density must lie in [0, 1)");
    if (cfg.radius < 0)
        return Status::failure(Errc::invalid_config, "radius must be >= 0");
    return Status::success();
}

/// Breadth-first reachability over free cells, 8-connected.
inline bool reachable(const GridMap& map, Cell from, Cell to)
{
    if (!map.is_free(from) || !map.is_free(to))
        return false;
    std::vector<std::uint8_t> seen(map.cell_count(), 0);
    std::deque<Cell> queue{from};
    seen[map.index(from)] = 1;
    while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        if (c == to)
            return true;
        for (Cell d : kNeighbourOffsets) {
            const Cell n{c.x + d.x, c.y + d.y};
            if (map.is_free(n) && !seen[map.index(n)]) {
                seen[map.index(n)] = 1;
                queue.push_back(n);
            }
        }
    }
    return false;
}

inline Scenario generate_scenario(const GenConfig& cfg, Rng& rng)
{
    require(validate_gen_config(cfg));
    const auto cells = static_cast<std::uint64_t>(cfg.width) * static_cast<std::uint64_t>(cfg.height);
    for (int attempt = 0; attempt < kMaxGenerationAttempts && cells >= 2; ++attempt) {
        GridMap blank(cfg.width, cfg.height);
        const std::uint64_t si = uniform_index(rng, cells);
        std::uint64_t gi = uniform_index(rng, cells - 1);
        if (gi >= si)
            ++gi;
        const Cell start = blank.cell_at(si);
        const Cell goal = blank.cell_at(gi);

        std::vector<Cell> obstacles;
        if (cfg.obstacle_density > 0.0) {
            for (std::uint64_t i = 0; i < cells; ++i) {
                if (i == si || i == gi)
                    continue;
                if (bernoulli(rng, cfg.obstacle_density))
                    obstacles.push_back(blank.cell_at(i));
            }
        }
        Scenario s{GridMap(cfg.width, cfg.height, obstacles), start, goal};
        if (cfg.require_reachable && !reachable(s.map, start, goal))
            continue;
        return s;
    }
    throw Error(Errc::generation_exhausted, "no valid scenario after " + std::to_string(kMaxGenerationAttempts)
                                                + " attempts (density " + std::to_string(cfg.obstacle_density) + ")");
}

/// Cells eligible to receive the adversarial obstacle, in row-major order.
inline std::vector<Cell> placement_candidates(const Scenario& s, const Path& original_path, const GenConfig& cfg)
{
    const GridMap& map = s.map;
    auto eligible = [&](Cell c) { return map.is_free(c) && c != s.start && c != s.goal; };
    std::vector<Cell> out;
    switch (cfg.placement) {
    case Placement::random:
        for (std::size_t i = 0; i < map.cell_count(); ++i)
            if (eligible(map.cell_at(i)))
                out.push_back(map.cell_at(i));
        break;
    case Placement::on_path: {
        CellSet seen;
        for (std::size_t i = 1; i + 1 < original_path.steps.size(); ++i) {
            const Cell c = original_path.steps[i];
            if (eligible(c) && seen.insert(c).second)
                out.push_back(c);
        }
        std::sort(out.begin(), out.end());
        break;
    }
    case Placement::near_path:
        for (std::size_t i = 0; i < map.cell_count(); ++i) {
            const Cell c = map.cell_at(i);
            if (!eligible(c))
                continue;
            for (Cell p : original_path.steps) {
                if (chebyshev(c, p) <= cfg.radius) {
                    out.push_back(c);
                    break;
                }
            }
        }
        break;
    }
    return out;
}

inline MapPair perturb(const Scenario& s, const Path& original_path, const GenConfig& cfg, Rng& rng, std::int64_t id = 0)
{
    const std::vector<Cell> candidates = placement_candidates(s, original_path, cfg);
    if (candidates.empty())
        throw Error(Errc::no_candidate_cell, std::string("no eligible cell for ") + std::string(to_string(cfg.placement))
                                                 + " placement");
    const Cell chosen = candidates[static_cast<std::size_t>(uniform_index(rng, candidates.size()))];
    Scenario adversarial{s.map.with_obstacle(chosen), s.start, s.goal};
    return MapPair{id, s, std::move(adversarial)};
}

} // namespace advmap
