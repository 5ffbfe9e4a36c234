#pragma once

// Four-way outcome taxonomy for (original, adversarial) path pairs.
//
//   UrP  adversarial path does not end at the goal        -> attack succeeded
//   UcP  both paths are the same step sequence            -> attack failed
//   FP   the non-coincident parts are far apart (a fork)  -> attack succeeded
//   DP   the non-coincident parts stay close (a detour)   -> attack failed
//
// The rules are checked in that order. FP/DP compare cells that appear in only
// one of the two paths: for each such cell, the horizontal gap is measured to
// the nearest cell of the other path's exclusive part in the same row, and the
// vertical gap to the nearest one in the same column. A pair is a fork when
// either maximum gap exceeds the threshold, or when some exclusive cell shares
// neither a row nor a column with the other exclusive part.

#include <advmap/gridworld.hpp>

#include <algorithm>
#include <cstdlib>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace advmap {

enum class Label { UrP, FP, DP, UcP };

inline constexpr Label kAllLabels[4] = {Label::UrP, Label::FP, Label::DP, Label::UcP};

constexpr std::string_view to_string(Label l) noexcept
{
    switch (l) {
    case Label::UrP: return "UrP";
    case Label::FP: return "FP";
    case Label::DP: return "DP";
    case Label::UcP: return "UcP";
    }
    return "?";
}

inline std::optional<Label> parse_label(std::string_view s) noexcept
{
    for (Label l : kAllLabels)
        if (to_string(l) == s)
            return l;
    return std::nullopt;
}

/// True for the labels that count as a successful attack.
constexpr bool attack_verdict(Label l) noexcept { return l == Label::UrP || l == Label::FP; }

inline constexpr int kDefaultThreshold = 4;

struct TaxonomyConfig {
    int threshold = kDefaultThreshold;
    Cell goal;
};

inline Status validate_taxonomy_config(const TaxonomyConfig& cfg)
{
    if (cfg.threshold < 1)
        return Status::failure(Errc::invalid_config, "threshold must be >= 1");
    return Status::success();
}

struct NoncoincidentParts {
    std::vector<Cell> original_only;    // sorted (y, x)
    std::vector<Cell> adversarial_only; // sorted (y, x)
};

inline NoncoincidentParts noncoincident_parts(const PathPair& pp)
{
    auto sorted_unique = [](std::vector<Cell> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    const std::vector<Cell> o = sorted_unique(pp.original.steps);
    const std::vector<Cell> a = sorted_unique(pp.adversarial.steps);
    NoncoincidentParts out;
    std::set_difference(o.begin(), o.end(), a.begin(), a.end(), std::back_inserter(out.original_only));
    std::set_difference(a.begin(), a.end(), o.begin(), o.end(), std::back_inserter(out.adversarial_only));
    return out;
}

struct DivergenceReport {
    int dx_max = 0;         // largest same-row gap, over cells with a row partner
    int dy_max = 0;         // largest same-column gap, over cells with a column partner
    int disjoint_rows = 0;  // exclusive cells with no partner in their row
    int disjoint_cols = 0;  // exclusive cells with no partner in their column
    int unmatched = 0;      // exclusive cells with neither partner

    friend bool operator==(const DivergenceReport&, const DivergenceReport&) = default;
};

namespace detail {

/// Nearest-partner scan of `from` against `to`, bucketed by row and column.
inline void accumulate_divergence(const std::vector<Cell>& from, const std::map<int, std::vector<int>>& to_by_row,
                                  const std::map<int, std::vector<int>>& to_by_col, DivergenceReport& r)
{
    // Buckets are sorted, so the nearest partner is adjacent to the lower bound.
    auto nearest = [](const std::vector<int>& sorted, int v) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
        int best = std::numeric_limits<int>::max();
        if (it != sorted.end())
            best = std::min(best, std::abs(*it - v));
        if (it != sorted.begin())
            best = std::min(best, std::abs(*std::prev(it) - v));
        return best;
    };
    for (Cell c : from) {
        bool row_match = false;
        bool col_match = false;
        if (auto it = to_by_row.find(c.y); it != to_by_row.end()) {
            r.dx_max = std::max(r.dx_max, nearest(it->second, c.x));
            row_match = true;
        } else {
            ++r.disjoint_rows;
        }
        if (auto it = to_by_col.find(c.x); it != to_by_col.end()) {
            r.dy_max = std::max(r.dy_max, nearest(it->second, c.y));
            col_match = true;
        } else {
            ++r.disjoint_cols;
        }
        if (!row_match && !col_match)
            ++r.unmatched;
    }
}

} // namespace detail

inline DivergenceReport divergence(const NoncoincidentParts& parts)
{
    std::map<int, std::vector<int>> o_rows, o_cols, a_rows, a_cols;
    for (Cell c : parts.original_only) {
        o_rows[c.y].push_back(c.x);
        o_cols[c.x].push_back(c.y);
    }
    for (Cell c : parts.adversarial_only) {
        a_rows[c.y].push_back(c.x);
        a_cols[c.x].push_back(c.y);
    }
    for (auto* bucket : {&o_rows, &o_cols, &a_rows, &a_cols})
        for (auto& [key, vals] : *bucket)
            std::sort(vals.begin(), vals.end());

    DivergenceReport r;
    detail::accumulate_divergence(parts.adversarial_only, o_rows, o_cols, r);
    detail::accumulate_divergence(parts.original_only, a_rows, a_cols, r);
    return r;
}

inline DivergenceReport divergence(const PathPair& pp) { return divergence(noncoincident_parts(pp)); }

/// FP/DP decision alone, for pairs already known to reach the goal and differ.
inline Label fork_or_detour(const DivergenceReport& d, int threshold)
{
    const bool fork = d.dx_max > threshold || d.dy_max > threshold || d.unmatched > 0;
    return fork ? Label::FP : Label::DP;
}

inline bool reaches_goal(const Path& p, Cell goal) { return !p.empty() && p.back() == goal; }

inline Label classify_rule(const PathPair& pp, const TaxonomyConfig& cfg)
{
    if (!reaches_goal(pp.adversarial, cfg.goal))
        return Label::UrP;
    if (pp.original.steps == pp.adversarial.steps)
        return Label::UcP;
    return fork_or_detour(divergence(pp), cfg.threshold);
}

/// Outcome of the fast feature comparison: a label only for UrP and UcP.
inline std::optional<Label> classify_by_features(const PathPair& pp, Cell goal)
{
    if (!reaches_goal(pp.adversarial, goal))
        return Label::UrP;
    if (pp.original.steps == pp.adversarial.steps)
        return Label::UcP;
    return std::nullopt;
}

} // namespace advmap
