#pragma once

// End-to-end identification of adversarial map pairs.
//
//   1. plan both maps of every pair
//   2. feature stage: adversarial path misses the goal -> UrP,
//      identical step sequences -> UcP
//   3. image stage: rasterise the remaining pairs and let the trained
//      classifier decide FP or DP
//   4. join labels back to the pairs by record number and keep the
//      successful attacks (UrP, FP)

#include <advmap/classifier.hpp>
#include <advmap/imaging.hpp>
#include <advmap/metrics.hpp>
#include <advmap/perturb.hpp>
#include <advmap/planner.hpp>
#include <advmap/storage.hpp>
#include <advmap/taxonomy.hpp>

#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace advmap {

enum class Stage {
    rule,   // feature comparison (UrP, UcP)
    image,  // path-image classifier (FP, DP)
    oracle, // rule-only mode: FP/DP decided by the divergence rule
};

constexpr std::string_view to_string(Stage s) noexcept
{
    switch (s) {
    case Stage::rule: return "rule";
    case Stage::image: return "image";
    case Stage::oracle: return "oracle";
    }
    return "?";
}

struct PairEntry {
    std::int64_t no = 0;
    Cell goal;
    PathPair paths;
    std::optional<MapPair> maps;
};

struct IdentificationResult {
    std::int64_t no = 0;
    Label label = Label::UcP;
    bool attack = false;
    Stage stage = Stage::rule;

    friend bool operator==(const IdentificationResult&, const IdentificationResult&) = default;
};

struct IdentifyOptions {
    int width = kDefaultGridSize;
    int height = kDefaultGridSize;
    int threshold = kDefaultThreshold; // used by rule_only
    bool rule_only = false;
};

struct Identification {
    std::vector<IdentificationResult> results;     // every pair, by record number
    std::vector<IdentificationResult> adversarial; // the successful attacks only
    std::size_t image_stage_pairs = 0;
};

inline std::vector<PairEntry> entries_from_records(const std::vector<Record>& records)
{
    std::vector<PairEntry> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (!r.has_paths())
            throw Error(Errc::invariant_violation, "record " + std::to_string(r.no) + " has no planned paths");
        PairEntry e{r.no, r.goal, r.path_pair(), std::nullopt};
        if (r.has_maps())
            e.maps = r.map_pair();
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<PairEntry> entries_from_import(const std::vector<ImportedPair>& imported)
{
    std::vector<PairEntry> out;
    out.reserve(imported.size());
    for (const auto& ip : imported)
        out.push_back({ip.no, ip.goal, ip.paths, ip.maps});
    return out;
}

/// `model` may be null when every pair is settled by the feature stage or in rule-only mode.
template <FeatureScorer Scorer>
Identification identify(std::vector<PairEntry> entries, const Scorer* model, const IdentifyOptions& opt)
{
    std::sort(entries.begin(), entries.end(), [](const PairEntry& a, const PairEntry& b) { return a.no < b.no; });
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].no == entries[i - 1].no)
            throw Error(Errc::duplicate_record, "record " + std::to_string(entries[i].no) + " appears twice");

    Identification out;
    out.results.resize(entries.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        out.results[i].no = entries[i].no;
        if (auto l = classify_by_features(entries[i].paths, entries[i].goal)) {
            out.results[i].label = *l;
            out.results[i].stage = Stage::rule;
        } else {
            pending.push_back(i);
        }
    }
    out.image_stage_pairs = pending.size();

    if (!pending.empty()) {
        if (opt.rule_only) {
            for (std::size_t i : pending) {
                out.results[i].label = fork_or_detour(divergence(entries[i].paths), opt.threshold);
                out.results[i].stage = Stage::oracle;
            }
        } else {
            if (model == nullptr)
                throw Error(Errc::model_missing, std::to_string(pending.size())
                                                     + " pairs need the image classifier but no model was given");
            for (std::size_t i : pending) {
                const auto features = flatten(rasterize(entries[i].paths, opt.width, opt.height));
                out.results[i].label = predict(*model, features).label;
                out.results[i].stage = Stage::image;
            }
        }
    }

    for (auto& r : out.results) {
        r.attack = attack_verdict(r.label);
        if (r.attack)
            out.adversarial.push_back(r);
    }
    return out;
}

inline Identification identify(std::vector<PairEntry> entries, std::nullptr_t, const IdentifyOptions& opt)
{
    return identify<ClassifierModel>(std::move(entries), nullptr, opt);
}

// ---------------------------------------------------------------------------
// Timing

struct BenchResult {
    std::size_t pairs = 0;
    std::size_t image_stage_pairs = 0;
    double total_seconds = 0.0;
    std::vector<double> per_pair_seconds;
};

/// Times the feature stage, rasterisation and prediction per pair. Planning
/// and file I/O are outside the measured region.
template <FeatureScorer Scorer>
BenchResult timing_bench(const Scorer& model, const std::vector<PairEntry>& entries, int width = kDefaultGridSize,
                         int height = kDefaultGridSize)
{
    using clock = std::chrono::steady_clock;
    BenchResult r;
    r.pairs = entries.size();
    r.per_pair_seconds.reserve(entries.size());
    volatile double sink = 0.0;
    const auto begin = clock::now();
    for (const auto& e : entries) {
        const auto t0 = clock::now();
        if (auto l = classify_by_features(e.paths, e.goal)) {
            sink = sink + static_cast<double>(*l);
        } else {
            ++r.image_stage_pairs;
            sink = sink + predict(model, flatten(rasterize(e.paths, width, height))).score;
        }
        r.per_pair_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }
    r.total_seconds = std::chrono::duration<double>(clock::now() - begin).count();
    return r;
}

// ---------------------------------------------------------------------------
// Dataset generation and the full experiment

struct ExperimentConfig {
    GenConfig gen;
    PlannerConfig planner = [] {
        PlannerConfig p;
        p.mode = PlannerMode::limited;
        return p;
    }();
    int threshold = kDefaultThreshold;
    std::size_t pairs = 200;
    std::uint64_t seed = 0;
    double train_fraction = 0.7;
    bool balance = true;
    SvmHyperParams svm;
    std::filesystem::path out_dir; // nothing is written when empty
    std::string created;           // manifest timestamp
};

/// Map pair `index` draws from its own stream seeded with base_seed + index.
/// Scenarios whose original path offers no placement cell are redrawn.
inline MapPair generate_map_pair(const GenConfig& gen, const PlannerConfig& planner, std::uint64_t base_seed,
                                 std::int64_t id)
{
    Rng rng(base_seed + static_cast<std::uint64_t>(id));
    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        const Scenario s = generate_scenario(gen, rng);
        const Path original = gen.placement == Placement::random ? Path{{s.start}} : plan(s, planner);
        try {
            return perturb(s, original, gen, rng, id);
        } catch (const Error& e) {
            if (e.code() != Errc::no_candidate_cell)
                throw;
        }
    }
    throw Error(Errc::generation_exhausted, "map pair " + std::to_string(id) + ": no perturbable scenario after "
                                                + std::to_string(kMaxGenerationAttempts) + " attempts");
}

/// Record numbers run from 1 to `count`.
inline std::vector<Record> generate_records(const GenConfig& gen, const PlannerConfig& planner, std::size_t count,
                                            std::uint64_t base_seed)
{
    std::vector<Record> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(make_record(generate_map_pair(gen, planner, base_seed, static_cast<std::int64_t>(i + 1))));
    return out;
}

inline void plan_records(std::vector<Record>& records, const PlannerConfig& planner)
{
    for (auto& r : records) {
        if (!r.has_maps())
            throw Error(Errc::invariant_violation, "record " + std::to_string(r.no) + " has no maps to plan on");
        const PathPair pp = plan_pair(r.map_pair(), planner);
        r.path_o = pp.original;
        r.path_a = pp.adversarial;
        r.label.reset();
        r.attack.reset();
    }
}

inline void label_records(std::vector<Record>& records, int threshold)
{
    for (auto& r : records) {
        if (!r.has_paths())
            throw Error(Errc::invariant_violation, "record " + std::to_string(r.no) + " has no paths to label");
        r.set_label(classify_rule(r.path_pair(), TaxonomyConfig{threshold, r.goal}));
    }
}

/// Path images of the labelled FP/DP records, in record order.
inline std::vector<ImageEntry> fork_detour_images(const std::vector<Record>& records, int width, int height)
{
    std::vector<ImageEntry> out;
    for (const auto& r : records) {
        if (!r.label || (*r.label != Label::FP && *r.label != Label::DP))
            continue;
        out.push_back({r.no, r.label, AugmentOp::Identity, rasterize(r.path_pair(), width, height)});
    }
    return out;
}

/// Equalises FP and DP counts by augmenting the smaller class.
inline std::vector<ImageEntry> balance_image_set(std::vector<ImageEntry> images, std::uint64_t seed)
{
    std::vector<std::size_t> fp, dp;
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].label == Label::FP)
            fp.push_back(i);
        else if (images[i].label == Label::DP)
            dp.push_back(i);
    }
    if (fp.empty() || dp.empty() || fp.size() == dp.size())
        return images;
    const auto& minority = fp.size() < dp.size() ? fp : dp;
    const std::size_t target = std::max(fp.size(), dp.size());
    const std::vector<ImageEntry> sources = [&] {
        std::vector<ImageEntry> v;
        for (std::size_t i : minority)
            v.push_back(images[i]);
        return v;
    }();
    for (const AugmentStep& step : augment_plan(sources.size(), target, seed)) {
        ImageEntry e = sources[step.source];
        e.op = step.op;
        e.image = apply_augment(e.image, step.op);
        images.push_back(std::move(e));
    }
    return images;
}

inline LabeledImageSet to_labeled_set(const std::vector<ImageEntry>& images, std::string provenance = {})
{
    LabeledImageSet set;
    set.provenance = std::move(provenance);
    for (const auto& e : images) {
        if (!e.label)
            throw Error(Errc::invariant_violation, "image " + std::to_string(e.no) + " has no label");
        set.items.push_back({flatten(e.image), *e.label, e.no});
    }
    return set;
}

struct ExperimentResult {
    std::vector<Record> records;
    Manifest manifest;
    std::array<std::size_t, 4> label_counts{}; // indexed by Label
    std::vector<ImageEntry> train_images;      // after balancing
    std::vector<ImageEntry> test_images;
    std::size_t augmented = 0;
    SvmSolution solution;
    EvalReport report;
};

inline std::string label_summary(const std::array<std::size_t, 4>& counts)
{
    std::ostringstream os;
    for (Label l : kAllLabels)
        os << to_string(l) << ' ' << counts[static_cast<std::size_t>(l)] << '\n';
    return os.str();
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    ExperimentResult res;
    GenConfig gen = cfg.gen;
    gen.seed = cfg.seed;
    const int w = gen.width;
    const int h = gen.height;

    res.records = generate_records(gen, cfg.planner, cfg.pairs, cfg.seed);
    plan_records(res.records, cfg.planner);
    label_records(res.records, cfg.threshold);
    for (const auto& r : res.records)
        ++res.label_counts[static_cast<std::size_t>(*r.label)];

    res.manifest.dataset_id = "experiment-seed-" + std::to_string(cfg.seed);
    res.manifest.width = w;
    res.manifest.height = h;
    res.manifest.gen = gen;
    res.manifest.planner = cfg.planner;
    res.manifest.threshold = cfg.threshold;
    res.manifest.created = cfg.created;

    // Split first so that augmented copies never leak into the test set.
    auto [train_images, test_images] = split(fork_detour_images(res.records, w, h), cfg.train_fraction, cfg.seed);
    const std::size_t before = train_images.size();
    res.train_images = cfg.balance ? balance_image_set(std::move(train_images), cfg.seed) : std::move(train_images);
    res.augmented = res.train_images.size() - before;
    res.test_images = std::move(test_images);

    const LabeledImageSet train_set = to_labeled_set(res.train_images, res.manifest.dataset_id);
    const LabeledImageSet test_set = to_labeled_set(res.test_images, res.manifest.dataset_id);
    SvmHyperParams hp = cfg.svm;
    hp.seed = cfg.seed;
    res.solution = train_detailed(train_set, hp);
    res.report = evaluate(res.solution.model, test_set);

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        res.manifest = write_records(cfg.out_dir / "dataset.rec", res.records, res.manifest);
        write_file_atomic(cfg.out_dir / "train_images.txt", serialize_images(res.train_images, w, h));
        write_file_atomic(cfg.out_dir / "test_images.txt", serialize_images(res.test_images, w, h));
        std::ostringstream model, report, roc, pr, roc_svg, pr_svg;
        write_model(model, res.solution.model);
        write_report(report, res.report);
        report << "# label distribution\n" << label_summary(res.label_counts);
        report << "train_images " << res.train_images.size() << " (augmented " << res.augmented << ")\n";
        report << "test_images " << res.test_images.size() << '\n';
        write_curve_csv(roc, res.report.roc_points, "fpr", "tpr");
        write_curve_csv(pr, res.report.pr_points, "recall", "precision");
        write_curve_svg(roc_svg, res.report.roc_points, "ROC (FP positive)", "false-positive rate", "true-positive rate");
        write_curve_svg(pr_svg, res.report.pr_points, "Precision-recall (FP positive)", "recall", "precision");
        write_file_atomic(cfg.out_dir / "model.svm", model.str());
        write_file_atomic(cfg.out_dir / "report.txt", report.str());
        write_file_atomic(cfg.out_dir / "roc.csv", roc.str());
        write_file_atomic(cfg.out_dir / "pr.csv", pr.str());
        write_file_atomic(cfg.out_dir / "roc.svg", roc_svg.str());
        write_file_atomic(cfg.out_dir / "pr.svg", pr_svg.str());
    }
    return res;
}

} // namespace advmap
