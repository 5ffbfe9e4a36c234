// Randomised invariants checked over many generated inputs.

#include <advmap/advmap.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace advmap;

namespace {

Scenario random_scenario(std::uint64_t seed, int w, int h, double density)
{
    GenConfig g;
    g.width = w;
    g.height = h;
    g.obstacle_density = density;
    g.require_reachable = false;
    Rng rng(seed);
    return generate_scenario(g, rng);
}

PathImage random_image(std::mt19937_64& rng, int w, int h)
{
    PathImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.set({x, y}, static_cast<Pixel>(rng() % 3));
    return img;
}

} // namespace

TEST(Property, EveryPairGetsExactlyOneLabel)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 2000; ++i) {
        const PathPair pp = oracle::random_pair(rng, 40);
        const Cell goal = i % 4 == 0 ? Cell{27, 27} : pp.original.back();
        const Label l = classify_rule(pp, TaxonomyConfig{kDefaultThreshold, goal});
        int matches = 0;
        matches += !reaches_goal(pp.adversarial, goal);
        matches += reaches_goal(pp.adversarial, goal) && pp.original.steps == pp.adversarial.steps;
        matches += reaches_goal(pp.adversarial, goal) && pp.original.steps != pp.adversarial.steps;
        ASSERT_EQ(matches, 1);
        if (!reaches_goal(pp.adversarial, goal))
            EXPECT_EQ(l, Label::UrP);
        else if (pp.original.steps == pp.adversarial.steps)
            EXPECT_EQ(l, Label::UcP);
        else
            EXPECT_TRUE(l == Label::FP || l == Label::DP);
    }
}

TEST(Property, DivergenceMatchesBruteForce)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 3000; ++i) {
        const PathPair pp = oracle::random_pair(rng, 50);
        const DivergenceReport got = divergence(pp);
        const DivergenceReport want = oracle::divergence(pp);
        ASSERT_EQ(got.dx_max, want.dx_max) << i;
        ASSERT_EQ(got.dy_max, want.dy_max) << i;
        ASSERT_EQ(got.disjoint_rows, want.disjoint_rows) << i;
        ASSERT_EQ(got.disjoint_cols, want.disjoint_cols) << i;
        ASSERT_EQ(got.unmatched, want.unmatched) << i;
    }
}

TEST(Property, RaisingThresholdNeverCreatesForks)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const PathPair pp = oracle::random_pair(rng, 40);
        const DivergenceReport d = divergence(pp);
        for (int t = 0; t < 12; ++t)
            if (fork_or_detour(d, t + 1) == Label::FP) {
                ASSERT_EQ(fork_or_detour(d, t), Label::FP);
            }
    }
}

TEST(Property, CoverRule)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 1000; ++i) {
        const PathPair pp = oracle::random_pair(rng, 40);
        const PathImage img = rasterize(pp);
        const std::set<Cell> o(pp.original.steps.begin(), pp.original.steps.end());
        const std::set<Cell> a(pp.adversarial.steps.begin(), pp.adversarial.steps.end());
        for (int y = 0; y < 28; ++y)
            for (int x = 0; x < 28; ++x) {
                const Cell c{x, y};
                const Pixel want = o.count(c) ? Pixel::Original : a.count(c) ? Pixel::AdversarialOnly : Pixel::Background;
                ASSERT_EQ(img.at(c), want);
            }
        const auto hist = img.histogram();
        std::size_t a_only = 0;
        for (Cell c : a)
            a_only += o.count(c) ? 0u : 1u;
        EXPECT_EQ(hist[1], o.size());
        EXPECT_EQ(hist[2], a_only);
    }
}

TEST(Property, AugmentationGroupLaws)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const PathImage img = random_image(rng, 9, 9);
        const PathImage wide = random_image(rng, 7, 4);
        for (AugmentOp op : kNonIdentityOps) {
            EXPECT_EQ(apply_augment(img, op).histogram(), img.histogram());
        }
        for (AugmentOp op : {AugmentOp::FlipH, AugmentOp::FlipV})
            EXPECT_EQ(apply_augment(wide, op).histogram(), wide.histogram());
        EXPECT_THROW(apply_augment(wide, AugmentOp::Rot180), Error);
        EXPECT_EQ(apply_augment(img, AugmentOp::Identity), img);
        EXPECT_EQ(apply_augment(apply_augment(img, AugmentOp::FlipH), AugmentOp::FlipH), img);
        EXPECT_EQ(apply_augment(apply_augment(img, AugmentOp::FlipV), AugmentOp::FlipV), img);
        EXPECT_EQ(apply_augment(apply_augment(img, AugmentOp::Rot180), AugmentOp::Rot180), img);
        EXPECT_EQ(apply_augment(apply_augment(img, AugmentOp::Rot90), AugmentOp::Rot270), img);
        PathImage r = img;
        for (int k = 0; k < 4; ++k)
            r = apply_augment(r, AugmentOp::Rot90);
        EXPECT_EQ(r, img);
        EXPECT_EQ(apply_augment(apply_augment(img, AugmentOp::Rot90), AugmentOp::Rot90),
                  apply_augment(img, AugmentOp::Rot180));
        EXPECT_EQ(apply_augment(apply_augment(img, AugmentOp::FlipH), AugmentOp::FlipV),
                  apply_augment(img, AugmentOp::Rot180));
    }
}

TEST(Property, BalanceKeepsOriginalsAndUsesNonIdentityOps)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        std::vector<PathImage> minority;
        const std::size_t n = 1 + rng() % 10;
        for (std::size_t k = 0; k < n; ++k)
            minority.push_back(random_image(rng, 5, 5));
        const std::size_t target = n + rng() % 30;
        const auto out = balance_classes(minority, target, rng());
        ASSERT_EQ(out.size(), std::max(n, target));
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_EQ(out[k], minority[k]);
        for (std::size_t k = n; k < out.size(); ++k) {
            bool from_some_source = false;
            for (const auto& src : minority)
                for (AugmentOp op : kNonIdentityOps)
                    from_some_source = from_some_source || apply_augment(src, op) == out[k];
            EXPECT_TRUE(from_some_source);
        }
    }
}

TEST(Property, LimitedWithEnoughSweepsEqualsExact)
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Scenario s = random_scenario(seed, 9, 7, 0.25);
        PlannerConfig exact = PlannerConfig::for_grid(9, 7);
        PlannerConfig limited = exact;
        limited.mode = PlannerMode::limited;
        limited.max_iterations = 9 * 7;
        const ValueField a = value_iterate(s, exact);
        const ValueField b = value_iterate(s, limited);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            if (std::isinf(a.values[i]))
                ASSERT_EQ(a.values[i], b.values[i]);
            else
                ASSERT_NEAR(a.values[i], b.values[i], 1e-9);
        }
        EXPECT_EQ(plan(s, exact), plan(s, limited));
    }
}

TEST(Property, ExactPlanIsShortestWhenReachable)
{
    for (std::uint64_t seed = 100; seed < 300; ++seed) {
        const Scenario s = random_scenario(seed, 10, 10, 0.3);
        const auto want = oracle::shortest_steps(s.map, s.start, s.goal);
        const Path p = plan(s, PlannerConfig::for_grid(10, 10));
        ASSERT_TRUE(validate_path(p, s)) << seed;
        if (want) {
            ASSERT_EQ(p.back(), s.goal);
            EXPECT_EQ(static_cast<int>(p.size()) - 1, *want) << seed;
        } else {
            EXPECT_NE(p.back(), s.goal);
        }
    }
}

TEST(Property, PlanningIsDeterministic)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Scenario s = random_scenario(seed, 12, 12, 0.2);
        PlannerConfig cfg = PlannerConfig::for_grid(12, 12);
        cfg.mode = PlannerMode::limited;
        EXPECT_EQ(plan(s, cfg), plan(s, cfg));
    }
}

TEST(Property, MapPairsDifferInOneCell)
{
    for (auto placement : {Placement::random, Placement::on_path, Placement::near_path}) {
        GenConfig g;
        g.width = g.height = 14;
        g.placement = placement;
        for (std::int64_t id = 1; id <= 40; ++id) {
            const MapPair mp = generate_map_pair(g, PlannerConfig::for_grid(14, 14), 9, id);
            EXPECT_TRUE(validate_map_pair(mp));
            const auto added = added_obstacles(mp);
            ASSERT_EQ(added.size(), 1u);
            EXPECT_NE(added[0], mp.original.start);
            EXPECT_NE(added[0], mp.original.goal);
            EXPECT_EQ(mp.original.start, mp.adversarial.start);
            EXPECT_EQ(mp.original.goal, mp.adversarial.goal);
        }
    }
}

TEST(Property, RecordsRoundTrip)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto records = fixture::random_records(seed, 25);
        const std::string text = serialize_records(records);
        const auto lines = detail::split_lines(text);
        ASSERT_EQ(lines.lines.size(), records.size() + 1);
        for (std::size_t i = 0; i < records.size(); ++i)
            EXPECT_EQ(parse_record(lines.lines[i + 1], 28, 28, i + 2), records[i]);
    }
}

TEST(Property, AnySingleByteChangeIsDetected)
{
    fixture::TempDir dir("corrupt");
    const auto records = fixture::random_records(99, 3, 6, 6);
    Manifest m;
    m.width = m.height = 6;
    write_records(dir / "d.rec", records, m);
    const std::string clean = read_file(dir / "d.rec");
    for (std::size_t pos = 0; pos < clean.size(); ++pos) {
        std::string bad = clean;
        bad[pos] = static_cast<char>(bad[pos] ^ 0x20);
        write_file_atomic(dir / "d.rec", bad);
        EXPECT_THROW(read_records(dir / "d.rec"), Error) << pos;
    }
}
