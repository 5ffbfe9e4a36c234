#pragma once

// Classifier evaluation: accuracy, confusion matrix, ROC/AUC and PR/AP.
// FP is the positive class throughout.

#include <advmap/classifier.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace advmap {

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct Confusion {
    std::size_t tp = 0; // FP predicted FP
    std::size_t fp = 0; // DP predicted FP
    std::size_t fn = 0; // FP predicted DP
    std::size_t tn = 0; // DP predicted DP

    [[nodiscard]] std::size_t total() const noexcept { return tp + fp + fn + tn; }
};

struct EvalReport {
    std::size_t samples = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    double accuracy = 0.0;
    Confusion confusion;
    bool curves_defined = false;       // false for a single-class test set
    std::vector<CurvePoint> roc_points; // (false-positive rate, true-positive rate)
    double auc = std::numeric_limits<double>::quiet_NaN();
    std::vector<CurvePoint> pr_points;  // (recall, precision)
    double ap = std::numeric_limits<double>::quiet_NaN();
};

struct RocPr {
    std::vector<CurvePoint> roc;
    double auc = 0.0;
    std::vector<CurvePoint> pr;
    double ap = 0.0;
};

/// Threshold sweep over the distinct scores, highest first. Tied scores move
/// together, which makes the trapezoidal AUC count ties as one half.
inline RocPr roc_pr(std::span<const double> scores, std::span<const Label> labels)
{
    if (scores.size() != labels.size())
        throw Error(Errc::dimension_mismatch, "scores and labels differ in length");
    const auto positive = [&](std::size_t i) { return labels[i] == Label::FP; };
    const auto P = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::FP));
    const std::size_t N = labels.size() - P;
    if (P == 0 || N == 0)
        throw Error(Errc::single_class_test_set, "ROC and PR curves need both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocPr out;
    out.roc.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < order.size();) {
        const double s = scores[order[k]];
        for (; k < order.size() && scores[order[k]] == s; ++k)
            positive(order[k]) ? ++tp : ++fp;
        const double tpr = static_cast<double>(tp) / static_cast<double>(P);
        const double fpr = static_cast<double>(fp) / static_cast<double>(N);
        const CurvePoint last = out.roc.back();
        out.auc += (fpr - last.x) * (tpr + last.y) / 2.0;
        out.roc.push_back({fpr, tpr});

        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        out.ap += (tpr - prev_recall) * precision;
        prev_recall = tpr;
        out.pr.push_back({tpr, precision});
    }
    return out;
}

inline EvalReport evaluate_scores(std::span<const double> scores, std::span<const Label> labels)
{
    if (scores.size() != labels.size())
        throw Error(Errc::dimension_mismatch, "scores and labels differ in length");
    if (scores.empty())
        throw Error(Errc::invalid_config, "cannot evaluate an empty test set");
    EvalReport r;
    r.samples = scores.size();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted_positive = scores[i] > 0.0;
        if (labels[i] == Label::FP) {
            ++r.positives;
            predicted_positive ? ++r.confusion.tp : ++r.confusion.fn;
        } else {
            ++r.negatives;
            predicted_positive ? ++r.confusion.fp : ++r.confusion.tn;
        }
    }
    r.accuracy = static_cast<double>(r.confusion.tp + r.confusion.tn) / static_cast<double>(r.samples);
    if (r.positives > 0 && r.negatives > 0) {
        RocPr curves = roc_pr(scores, labels);
        r.curves_defined = true;
        r.roc_points = std::move(curves.roc);
        r.auc = curves.auc;
        r.pr_points = std::move(curves.pr);
        r.ap = curves.ap;
    }
    return r;
}

template <FeatureScorer Scorer>
EvalReport evaluate(const Scorer& model, const LabeledImageSet& test)
{
    std::vector<double> scores;
    std::vector<Label> labels;
    scores.reserve(test.size());
    labels.reserve(test.size());
    for (const auto& item : test.items) {
        scores.push_back(model.score(item.features));
        labels.push_back(item.label);
    }
    return evaluate_scores(scores, labels);
}

inline void write_report(std::ostream& os, const EvalReport& r)
{
    const auto num = [](double v) { return std::isnan(v) ? std::string("undefined") : format_double(v); };
    os << "# advmap evaluation report\n"
       << "positive_class FP\n"
       << "ap_definition step-wise sum of precision * recall increment, no interpolation\n"
       << "roc_ties tied scores share one threshold step\n"
       << "samples " << r.samples << '\n'
       << "positives " << r.positives << '\n'
       << "negatives " << r.negatives << '\n'
       << "accuracy " << format_double(r.accuracy) << '\n'
       << "confusion tp " << r.confusion.tp << " fp " << r.confusion.fp << " fn " << r.confusion.fn << " tn "
       << r.confusion.tn << '\n'
       << "curves " << (r.curves_defined ? "defined" : "undefined (SingleClassTestSet)") << '\n'
       << "auc " << num(r.auc) << '\n'
       << "ap " << num(r.ap) << '\n'
       << "roc_points " << r.roc_points.size() << '\n'
       << "pr_points " << r.pr_points.size() << '\n';
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& pts, std::string_view x_name,
                            std::string_view y_name)
{
    os << x_name << ',' << y_name << '\n';
    for (const auto& p : pts)
        os << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

/// Minimal standalone SVG line plot on the unit square.
inline void write_curve_svg(std::ostream& os, const std::vector<CurvePoint>& pts, std::string_view title,
                            std::string_view x_name, std::string_view y_name)
{
    constexpr int kSize = 400;
    constexpr int kPad = 50;
    const auto px = [](double v) { return kPad + v * kSize; };
    const auto py = [](double v) { return kPad + (1.0 - v) * kSize; };
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize + 2 * kPad << "\" height=\"" << kSize + 2 * kPad
       << "\">\n";
    os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kSize << "\" height=\"" << kSize
       << "\" fill=\"white\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kPad << "\" y=\"" << kPad - 15 << "\" font-size=\"16\">" << title << "</text>\n";
    os << "<text x=\"" << kPad + kSize / 2 << "\" y=\"" << kPad + kSize + 35 << "\" font-size=\"13\" text-anchor=\"middle\">"
       << x_name << "</text>\n";
    os << "<text x=\"15\" y=\"" << kPad + kSize / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
       << kPad + kSize / 2 << ")\">" << y_name << "</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = t / 4.0;
        os << "<text x=\"" << px(v) << "\" y=\"" << kPad + kSize + 15 << "\" font-size=\"10\" text-anchor=\"middle\">" << v
           << "</text>\n";
        os << "<text x=\"" << kPad - 5 << "\" y=\"" << py(v) + 3 << "\" font-size=\"10\" text-anchor=\"end\">" << v
           << "</text>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
        os << (i ? " " : "") << px(pts[i].x) << ',' << py(pts[i].y);
    os << "\"/>\n</svg>\n";
    os.unsetf(std::ios::floatfield);
    os << std::setprecision(6);
}

} // namespace advmap
