// advmap command-line front end.
//
// Every subcommand writes fixed file names into --out <dir>:
//   dataset.rec (+ .manifest.json), images.txt, model.svm, report.txt,
//   roc.csv, pr.csv, roc.svg, pr.svg, identification.txt, adversarial.txt

#include <advmap/advmap.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace advmap;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Common {
    std::optional<std::uint64_t> seed;
    std::string grid;
    std::optional<int> threshold;
    std::string config;
    std::string out = ".";
};

struct Settings {
    int width = kDefaultGridSize;
    int height = kDefaultGridSize;
    std::uint64_t seed = 0;
    int threshold = kDefaultThreshold;
    GenConfig gen;
    PlannerConfig planner;
    bool planner_from_config = false;
};

void parse_grid(const std::string& s, int& w, int& h)
{
    const auto x = s.find('x');
    if (x == std::string::npos || !parse_int(std::string_view(s).substr(0, x), w)
        || !parse_int(std::string_view(s).substr(x + 1), h) || w <= 0 || h <= 0)
        throw CLI::ValidationError("--grid", "expected WxH, got '" + s + "'");
}

// Manifest values first, then explicit flags on top.
Settings resolve(const Common& c)
{
    Settings s;
    if (!c.config.empty()) {
        const Manifest m = parse_manifest(read_file(c.config));
        s.width = m.width;
        s.height = m.height;
        s.threshold = m.threshold;
        if (m.gen) {
            s.gen = *m.gen;
            s.seed = m.gen->seed;
        }
        if (m.planner) {
            s.planner = *m.planner;
            s.planner_from_config = true;
        }
    }
    if (!c.grid.empty())
        parse_grid(c.grid, s.width, s.height);
    if (c.seed)
        s.seed = *c.seed;
    if (c.threshold)
        s.threshold = *c.threshold;
    s.gen.width = s.width;
    s.gen.height = s.height;
    s.gen.seed = s.seed;
    if (!s.planner_from_config)
        s.planner.max_rollout_steps = 4 * s.width * s.height;
    return s;
}

std::string timestamp()
{
    std::time_t t = std::time(nullptr);
    if (const char* e = std::getenv("SOURCE_DATE_EPOCH"))
        t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

fs::path out_dir(const Common& c)
{
    fs::create_directories(c.out);
    return c.out;
}

void write_text(const fs::path& p, const std::string& s) { write_file_atomic(p, s); }

ClassifierModel load_model(const std::string& path)
{
    std::istringstream is(read_file(path));
    return read_model(is);
}

std::vector<ImageEntry> load_images(const std::string& path, int& w, int& h)
{
    return parse_images(read_file(path), w, h);
}

void write_eval_outputs(const fs::path& dir, const EvalReport& r, const std::string& extra = {})
{
    std::ostringstream report, roc, pr, roc_svg, pr_svg;
    write_report(report, r);
    report << extra;
    write_text(dir / "report.txt", report.str());
    if (!r.curves_defined)
        return;
    write_curve_csv(roc, r.roc_points, "fpr", "tpr");
    write_curve_csv(pr, r.pr_points, "recall", "precision");
    write_curve_svg(roc_svg, r.roc_points, "ROC (FP positive)", "false-positive rate", "true-positive rate");
    write_curve_svg(pr_svg, r.pr_points, "Precision-recall (FP positive)", "recall", "precision");
    write_text(dir / "roc.csv", roc.str());
    write_text(dir / "pr.csv", pr.str());
    write_text(dir / "roc.svg", roc_svg.str());
    write_text(dir / "pr.svg", pr_svg.str());
}

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--seed", c.seed, "Base random seed");
    sub->add_option("--grid", c.grid, "Grid size as WxH (default 28x28)");
    sub->add_option("--threshold", c.threshold, "Fork/detour divergence threshold in cells");
    sub->add_option("--config", c.config, "Take grid, generator, planner and threshold settings from a manifest")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "Output directory");
}

void add_planner_flags(CLI::App* sub, std::optional<std::string>& mode, std::optional<int>& iters)
{
    sub->add_option("--mode", mode, "Planner mode: exact or limited")->check(CLI::IsMember({"exact", "limited"}));
    sub->add_option("--iterations", iters, "Sweeps in limited mode");
}

void apply_planner_flags(Settings& s, const std::optional<std::string>& mode, const std::optional<int>& iters)
{
    if (mode)
        s.planner.mode = parse_planner_mode(*mode);
    if (iters)
        s.planner.max_iterations = *iters;
    require(validate_planner_config(s.planner));
}

Manifest base_manifest(const Settings& s, std::string id)
{
    Manifest m;
    m.dataset_id = std::move(id);
    m.width = s.width;
    m.height = s.height;
    m.threshold = s.threshold;
    m.created = timestamp();
    return m;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Identify adversarial map pairs for grid-world path planning"};
    app.require_subcommand(1);
    Common c;

    // generate
    auto* gen = app.add_subcommand("generate", "Generate map pairs into dataset.rec");
    add_common(gen, c);
    std::size_t gen_pairs = 200;
    std::optional<double> density;
    std::optional<std::string> placement;
    std::optional<int> radius;
    std::optional<std::string> mode;
    std::optional<int> iters;
    gen->add_option("--pairs", gen_pairs, "Number of map pairs");
    gen->add_option("--density", density, "Obstacle density in [0, 1)");
    gen->add_option("--placement", placement, "random, on_path or near_path")
        ->check(CLI::IsMember({"random", "on_path", "near_path"}));
    gen->add_option("--radius", radius, "Chebyshev radius for near_path");
    add_planner_flags(gen, mode, iters);

    // plan / label
    std::string dataset;
    auto* plan_cmd = app.add_subcommand("plan", "Plan both paths of every record");
    add_common(plan_cmd, c);
    plan_cmd->add_option("--dataset", dataset, "Input dataset.rec")->required()->check(CLI::ExistingFile);
    add_planner_flags(plan_cmd, mode, iters);

    auto* label_cmd = app.add_subcommand("label", "Label every planned record with the rule oracle");
    add_common(label_cmd, c);
    label_cmd->add_option("--dataset", dataset, "Input dataset.rec")->required()->check(CLI::ExistingFile);

    // rasterize
    std::string ppm_dir;
    bool all_pairs = false;
    auto* raster = app.add_subcommand("rasterize", "Write path images (images.txt) and optional PPM files");
    add_common(raster, c);
    raster->add_option("--dataset", dataset, "Input dataset.rec")->required()->check(CLI::ExistingFile);
    raster->add_option("--ppm", ppm_dir, "Also write one PPM per image into this directory");
    raster->add_flag("--all", all_pairs, "Include unlabelled and UrP/UcP records");

    // augment
    std::string images;
    std::optional<std::size_t> target;
    auto* augment = app.add_subcommand("augment", "Balance FP/DP by augmenting the minority class");
    add_common(augment, c);
    augment->add_option("--images", images, "Input image set")->required()->check(CLI::ExistingFile);
    augment->add_option("--target", target, "Minority class target count (default: majority count)");

    // train
    SvmHyperParams hp;
    double fraction = 0.7;
    bool no_split = false;
    bool balance = false;
    auto* train_cmd = app.add_subcommand("train", "Train the linear SVM on an image set");
    add_common(train_cmd, c);
    train_cmd->add_option("--images", images, "Input image set")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--C", hp.C, "Soft-margin penalty");
    train_cmd->add_option("--tol", hp.tol, "KKT tolerance");
    train_cmd->add_option("--max-passes", hp.max_passes, "Iteration cap as a multiple of the training size");
    train_cmd->add_option("--train-fraction", fraction, "Training share of the split");
    train_cmd->add_flag("--no-split", no_split, "Train on every image");
    train_cmd->add_flag("--balance", balance, "Augment the training minority class after splitting");

    // evaluate
    std::string model_path;
    auto* eval = app.add_subcommand("evaluate", "Score a labelled image set: report, curves and plots");
    add_common(eval, c);
    eval->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
    eval->add_option("--images", images, "Labelled image set")->required()->check(CLI::ExistingFile);

    // identify
    bool rule_only = false;
    auto* ident = app.add_subcommand("identify", "Label every pair and list the successful attacks");
    add_common(ident, c);
    ident->add_option("--dataset", dataset, "Planned dataset.rec")->required()->check(CLI::ExistingFile);
    ident->add_option("--model", model_path, "Model file for the image stage")->check(CLI::ExistingFile);
    ident->add_flag("--rule-only", rule_only, "Decide FP/DP with the divergence rule instead of the model");

    // bench
    std::size_t bench_count = 100;
    auto* bench = app.add_subcommand("bench", "Time rule stage, rasterisation and prediction");
    add_common(bench, c);
    bench->add_option("--dataset", dataset, "Planned dataset.rec")->required()->check(CLI::ExistingFile);
    bench->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
    bench->add_option("--count", bench_count, "Number of pairs to time (0 = all)");

    // import
    std::string external;
    auto* import = app.add_subcommand("import", "Import externally planned path pairs");
    add_common(import, c);
    import->add_option("--in", external, "External record file")->required()->check(CLI::ExistingFile);

    // experiment
    std::size_t exp_pairs = 1000;
    auto* exp = app.add_subcommand("experiment", "Generate, label, balance, train and evaluate in one run");
    add_common(exp, c);
    exp->add_option("--pairs", exp_pairs, "Number of map pairs");
    exp->add_option("--density", density, "Obstacle density in [0, 1)");
    exp->add_option("--placement", placement, "random, on_path or near_path")
        ->check(CLI::IsMember({"random", "on_path", "near_path"}));
    exp->add_option("--C", hp.C, "Soft-margin penalty");
    add_planner_flags(exp, mode, iters);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        Settings s = resolve(c);
        const fs::path out = out_dir(c);

        if (*gen) {
            if (density)
                s.gen.obstacle_density = *density;
            if (placement)
                s.gen.placement = parse_placement(*placement);
            if (radius)
                s.gen.radius = *radius;
            apply_planner_flags(s, mode, iters);
            require(validate_gen_config(s.gen));
            Manifest m = base_manifest(s, "generated-seed-" + std::to_string(s.seed));
            m.gen = s.gen;
            m.planner = s.planner;
            m = write_records(out / "dataset.rec", generate_records(s.gen, s.planner, gen_pairs, s.seed), m);
            std::cout << "wrote " << m.record_count << " map pairs to " << (out / "dataset.rec").string() << '\n';
        } else if (*plan_cmd || *label_cmd) {
            Dataset ds = read_records(dataset);
            Manifest m = ds.manifest;
            if (*plan_cmd) {
                if (c.config.empty() && m.planner)
                    s.planner = *m.planner;
                apply_planner_flags(s, mode, iters);
                plan_records(ds.records, s.planner);
                m.planner = s.planner;
            } else {
                if (c.threshold)
                    m.threshold = *c.threshold;
                label_records(ds.records, m.threshold);
                std::array<std::size_t, 4> counts{};
                for (const auto& r : ds.records)
                    ++counts[static_cast<std::size_t>(*r.label)];
                std::cout << label_summary(counts);
            }
            m = write_records(out / "dataset.rec", ds.records, m);
            std::cout << "wrote " << m.record_count << " records to " << (out / "dataset.rec").string() << '\n';
        } else if (*raster) {
            const Dataset ds = read_records(dataset);
            const int w = ds.manifest.width;
            const int h = ds.manifest.height;
            std::vector<ImageEntry> imgs;
            if (all_pairs) {
                for (const auto& r : ds.records)
                    if (r.has_paths())
                        imgs.push_back({r.no, r.label, AugmentOp::Identity, rasterize(r.path_pair(), w, h)});
            } else {
                imgs = fork_detour_images(ds.records, w, h);
            }
            write_text(out / "images.txt", serialize_images(imgs, w, h));
            if (!ppm_dir.empty()) {
                fs::create_directories(ppm_dir);
                for (const auto& e : imgs) {
                    std::ostringstream os;
                    write_ppm(os, e.image);
                    write_text(fs::path(ppm_dir) / ("pair_" + std::to_string(e.no) + ".ppm"), os.str());
                }
            }
            std::cout << "wrote " << imgs.size() << " images\n";
        } else if (*augment) {
            int w = 0, h = 0;
            auto imgs = load_images(images, w, h);
            std::vector<ImageEntry> fp, dp;
            for (const auto& e : imgs)
                (e.label == Label::FP ? fp : dp).push_back(e);
            auto& minority = fp.size() < dp.size() ? fp : dp;
            const std::size_t goal = target.value_or(std::max(fp.size(), dp.size()));
            std::vector<ImageEntry> added;
            for (const AugmentStep& st : augment_plan(minority.size(), goal, s.seed)) {
                ImageEntry e = minority[st.source];
                e.op = st.op;
                e.image = apply_augment(e.image, st.op);
                added.push_back(std::move(e));
            }
            imgs.insert(imgs.end(), added.begin(), added.end());
            write_text(out / "images.txt", serialize_images(imgs, w, h));
            std::cout << "added " << added.size() << " augmented images, " << imgs.size() << " total\n";
        } else if (*train_cmd) {
            int w = 0, h = 0;
            auto imgs = load_images(images, w, h);
            hp.seed = s.seed;
            std::vector<ImageEntry> train_imgs = imgs, test_imgs;
            if (!no_split) {
                std::tie(train_imgs, test_imgs) = split(std::move(imgs), fraction, s.seed);
                write_text(out / "test_images.txt", serialize_images(test_imgs, w, h));
            }
            if (balance)
                train_imgs = balance_image_set(std::move(train_imgs), s.seed);
            write_text(out / "train_images.txt", serialize_images(train_imgs, w, h));
            const SvmSolution sol = train_detailed(to_labeled_set(train_imgs, images), hp);
            std::ostringstream os;
            write_model(os, sol.model);
            write_text(out / "model.svm", os.str());
            std::cout << "trained on " << train_imgs.size() << " images, " << sol.iterations << " iterations, kkt gap "
                      << format_double(sol.kkt_gap) << (sol.converged ? "" : " (iteration cap reached)") << '\n';
        } else if (*eval) {
            int w = 0, h = 0;
            const auto imgs = load_images(images, w, h);
            const EvalReport r = evaluate(load_model(model_path), to_labeled_set(imgs, images));
            write_eval_outputs(out, r);
            std::cout << "accuracy " << format_double(r.accuracy) << " auc "
                      << (r.curves_defined ? format_double(r.auc) : "undefined") << '\n';
        } else if (*ident) {
            const Dataset ds = read_records(dataset);
            IdentifyOptions opt;
            opt.width = ds.manifest.width;
            opt.height = ds.manifest.height;
            opt.threshold = c.threshold.value_or(ds.manifest.threshold);
            opt.rule_only = rule_only;
            std::optional<ClassifierModel> model;
            if (!model_path.empty())
                model = load_model(model_path);
            const Identification id =
                identify(entries_from_records(ds.records), model ? &*model : nullptr, opt);
            const auto dump = [](const std::vector<IdentificationResult>& rs) {
                std::string t = "#no|label|attack|stage\n";
                for (const auto& r : rs)
                    t += std::to_string(r.no) + "|" + std::string(to_string(r.label)) + "|" + (r.attack ? "1" : "0")
                         + "|" + std::string(to_string(r.stage)) + "\n";
                return t;
            };
            write_text(out / "identification.txt", dump(id.results));
            write_text(out / "adversarial.txt", dump(id.adversarial));
            std::cout << id.results.size() << " pairs, " << id.adversarial.size() << " successful attacks, "
                      << id.image_stage_pairs << " decided at the image stage\n";
        } else if (*bench) {
            const Dataset ds = read_records(dataset);
            auto entries = entries_from_records(ds.records);
            if (bench_count > 0 && entries.size() > bench_count)
                entries.resize(bench_count);
            const BenchResult b = timing_bench(load_model(model_path), entries, ds.manifest.width, ds.manifest.height);
            std::ostringstream os;
            os << "pairs " << b.pairs << "\nimage_stage_pairs " << b.image_stage_pairs << "\ntotal_seconds "
               << format_double(b.total_seconds) << '\n';
            for (std::size_t i = 0; i < b.per_pair_seconds.size(); ++i)
                os << "pair " << entries[i].no << ' ' << format_double(b.per_pair_seconds[i]) << '\n';
            write_text(out / "bench.txt", os.str());
            std::cout << b.pairs << " pairs in " << format_double(b.total_seconds) << " s\n";
        } else if (*import) {
            const auto imported = import_external_pathpairs(external, s.width, s.height);
            std::vector<std::size_t> order(imported.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return imported[a].no < imported[b].no; });
            std::vector<Record> records;
            for (std::size_t i : order) {
                const ImportedPair& ip = imported[i];
                Record r;
                r.no = ip.no;
                r.start = ip.start;
                r.goal = ip.goal;
                if (ip.maps) {
                    r.map_o = ip.maps->original.map;
                    r.map_a = ip.maps->adversarial.map;
                }
                r.path_o = ip.paths.original;
                r.path_a = ip.paths.adversarial;
                records.push_back(std::move(r));
            }
            Manifest m = write_records(out / "dataset.rec", records, base_manifest(s, "imported"));
            std::cout << "imported " << m.record_count << " path pairs\n";
        } else if (*exp) {
            ExperimentConfig cfg;
            cfg.gen = s.gen;
            if (density)
                cfg.gen.obstacle_density = *density;
            if (placement)
                cfg.gen.placement = parse_placement(*placement);
            if (s.planner_from_config)
                cfg.planner = s.planner;
            else
                cfg.planner.max_rollout_steps = s.planner.max_rollout_steps;
            if (mode)
                cfg.planner.mode = parse_planner_mode(*mode);
            if (iters)
                cfg.planner.max_iterations = *iters;
            require(validate_planner_config(cfg.planner));
            require(validate_gen_config(cfg.gen));
            cfg.threshold = s.threshold;
            cfg.pairs = exp_pairs;
            cfg.seed = s.seed;
            cfg.svm = hp;
            cfg.out_dir = out;
            cfg.created = timestamp();
            const ExperimentResult r = run_experiment(cfg);
            std::cout << label_summary(r.label_counts) << "accuracy " << format_double(r.report.accuracy) << " auc "
                      << (r.report.curves_defined ? format_double(r.report.auc) : "undefined") << '\n';
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == Errc::internal ? kInternal : kData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kOk;
}
