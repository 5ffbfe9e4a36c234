#pragma once

// Shared test fixtures: hand-built path pairs, random records, small SVM sets.

#include <advmap/advmap.hpp>

#include "oracles.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixture {

using advmap::Cell;
using advmap::Path;
using advmap::PathPair;

/// Both paths leave `top` downward, bulge left/right and rejoin six rows
/// below. `gap` (4 or 5) is the widest same-row separation.
inline PathPair horizontal_bulge(Cell top, int gap)
{
    const int x = top.x, y = top.y;
    Path o{{{x, y}, {x - 1, y + 1}, {x - 2, y + 2}, {x - 2, y + 3}, {x - 2, y + 4}, {x - 1, y + 5}, {x, y + 6}}};
    Path a{{{x, y}, {x + 1, y + 1}, {x + 2, y + 2}, {x - 2 + gap, y + 3}, {x + 2, y + 4}, {x + 1, y + 5}, {x, y + 6}}};
    return {o, a};
}

/// The transpose: paths move rightward and separate vertically.
inline PathPair vertical_bulge(Cell left, int gap)
{
    PathPair h = horizontal_bulge({left.y, left.x}, gap);
    for (auto* p : {&h.original, &h.adversarial})
        for (Cell& c : p->steps)
            c = {c.y, c.x};
    return h;
}

inline void append(Path& p, const Path& tail)
{
    for (std::size_t i = (p.empty() ? 0 : 1); i < tail.steps.size(); ++i)
        p.steps.push_back(tail.steps[i]);
}

/// A horizontal bulge at (10, 0), a shared diagonal, then a vertical bulge at
/// (14, 10). The two bulges share no rows or columns.
inline PathPair two_bulges(int h_gap, int v_gap)
{
    PathPair h = horizontal_bulge({10, 0}, h_gap);
    const Path link{{{10, 6}, {11, 7}, {12, 8}, {13, 9}, {14, 10}}};
    PathPair v = vertical_bulge({14, 10}, v_gap);
    PathPair out = h;
    append(out.original, link);
    append(out.adversarial, link);
    append(out.original, v.original);
    append(out.adversarial, v.adversarial);
    return out;
}

} // namespace fixture

// ---------------------------------------------------------------------------
// Random dataset records

namespace fixture {

/// Record with every optional column varied: maps, paths and label may each be absent.
inline advmap::Record random_record(std::mt19937_64& rng, std::int64_t no, int w = 28, int h = 28)
{
    using namespace advmap;
    GenConfig g;
    g.width = w;
    g.height = h;
    g.placement = Placement::random;
    g.require_reachable = false;
    g.obstacle_density = std::uniform_real_distribution<double>(0.0, 0.4)(rng);
    Rng r(rng());
    const Scenario s = generate_scenario(g, r);
    Record rec;
    rec.no = no;
    rec.start = s.start;
    rec.goal = s.goal;
    const int shape = static_cast<int>(rng() % 4);
    if (shape != 0) {
        const MapPair mp = perturb(s, Path{{s.start}}, g, r, no);
        rec.map_o = mp.original.map;
        rec.map_a = mp.adversarial.map;
    }
    if (shape != 1) {
        rec.path_o = oracle::random_walk(rng, s.start, 1 + static_cast<int>(rng() % 40), w, h);
        rec.path_a = oracle::random_walk(rng, s.start, 1 + static_cast<int>(rng() % 40), w, h);
        if (rng() % 3 != 0)
            rec.set_label(kAllLabels[rng() % 4]);
    }
    return rec;
}

inline std::vector<advmap::Record> random_records(std::uint64_t seed, std::size_t n, int w = 28, int h = 28)
{
    std::mt19937_64 rng(seed);
    std::vector<advmap::Record> out;
    std::int64_t no = 0;
    for (std::size_t i = 0; i < n; ++i) {
        no += 1 + static_cast<std::int64_t>(rng() % 3);
        out.push_back(random_record(rng, no, w, h));
    }
    return out;
}

/// Fresh, empty directory under the system temp dir; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("advmap-" + tag + "-" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Classifier fixtures

using advmap::Label;
using advmap::LabeledImageSet;

inline LabeledImageSet make_set(const std::vector<std::vector<double>>& xs, const std::vector<Label>& ys)
{
    LabeledImageSet s;
    for (std::size_t i = 0; i < xs.size(); ++i)
        s.items.push_back({xs[i], ys[i], static_cast<std::int64_t>(i)});
    return s;
}

/// 20 points in 3-D, two clusters on either side of a tilted plane with margin.
inline LabeledImageSet separable20(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.6);
    const std::vector<double> normal{0.8, -0.5, 0.3};
    std::vector<std::vector<double>> xs;
    std::vector<Label> ys;
    while (xs.size() < 20) {
        const Label l = xs.size() % 2 == 0 ? Label::FP : Label::DP;
        const double side = l == Label::FP ? 1.0 : -1.0;
        std::vector<double> x{side * 1.5 + n(rng), side * -1.0 + n(rng), n(rng)};
        double d = 0.0;
        for (int k = 0; k < 3; ++k)
            d += normal[k] * x[k];
        if (side * d < 0.3) // keep a clean margin
            continue;
        xs.push_back(x);
        ys.push_back(l);
    }
    return make_set(xs, ys);
}

inline std::vector<double> signs(const LabeledImageSet& s)
{
    std::vector<double> y;
    for (const auto& it : s.items)
        y.push_back(advmap::class_sign(it.label));
    return y;
}

inline std::vector<std::vector<double>> features(const LabeledImageSet& s)
{
    std::vector<std::vector<double>> x;
    for (const auto& it : s.items)
        x.push_back(it.features);
    return x;
}

} // namespace fixture
