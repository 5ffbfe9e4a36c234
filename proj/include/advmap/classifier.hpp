#pragma once

// Soft-margin linear SVM separating fork (FP, +1) from detour (DP, -1) path images.
//
// Training solves the dual
//
//     min  1/2 a'Qa - sum(a)   s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j <x_i, x_j>
//
// with SMO, always updating the maximal violating pair, and stops when the
// KKT gap m(a) - M(a) drops below `tol`. Everything is deterministic: the seed
// only fixes the order in which examples are presented to the solver, which
// decides ties during pair selection.

#include <advmap/random.hpp>
#include <advmap/taxonomy.hpp>
#include <advmap/textio.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace advmap {

struct LabeledImageSet {
    struct Item {
        std::vector<double> features;
        Label label = Label::DP;   // FP or DP
        std::int64_t source = 0;   // record number the image was built from

        friend bool operator==(const Item&, const Item&) = default;
    };

    std::vector<Item> items;
    std::string provenance;

    [[nodiscard]] std::size_t size() const noexcept { return items.size(); }
    [[nodiscard]] bool empty() const noexcept { return items.empty(); }
};

/// Digest over feature values, labels and sources in item order.
inline std::string content_hash(const LabeledImageSet& data)
{
    Fnv1a h;
    for (const auto& item : data.items) {
        h.update(to_string(item.label));
        h.update(std::to_string(item.source));
        for (double v : item.features) {
            h.update(format_double(v));
            h.update(",");
        }
        h.update("\n");
    }
    return h.hex();
}

struct SvmHyperParams {
    double C = 1.0;
    double tol = 1e-3;
    int max_passes = 50;
    std::uint64_t seed = 0;

    friend bool operator==(const SvmHyperParams&, const SvmHyperParams&) = default;
};

struct ClassifierModel {
    std::vector<double> weights;
    double bias = 0.0;
    SvmHyperParams hyperparams;
    std::string training_hash;

    [[nodiscard]] std::size_t dim() const noexcept { return weights.size(); }

    [[nodiscard]] double score(const std::vector<double>& x) const
    {
        if (x.size() != weights.size())
            throw Error(Errc::dimension_mismatch, "feature vector has " + std::to_string(x.size()) + " entries, model expects "
                                                      + std::to_string(weights.size()));
        double s = bias;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += weights[i] * x[i];
        return s;
    }

    friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

/// Anything that maps a feature vector to a real score; positive means FP.
/// The pipeline and the evaluator accept any such scorer.
template <typename T>
concept FeatureScorer = requires(const T& s, const std::vector<double>& x) {
    { s.score(x) } -> std::convertible_to<double>;
};

struct Prediction {
    Label label;
    double score;
};

/// Positive score is FP; zero and below is DP.
template <FeatureScorer Scorer>
Prediction predict(const Scorer& model, const std::vector<double>& x)
{
    const double s = model.score(x);
    return {s > 0.0 ? Label::FP : Label::DP, s};
}

constexpr double class_sign(Label l) noexcept { return l == Label::FP ? 1.0 : -1.0; }

struct SvmSolution {
    ClassifierModel model;
    std::vector<double> alpha; // dual variables, in the input item order
    double kkt_gap = 0.0;      // m(a) - M(a) at exit
    long iterations = 0;
    bool converged = false;
};

namespace detail {

struct SparseRow {
    std::vector<std::uint32_t> index;
    std::vector<double> value;
};

inline double sparse_dot(const SparseRow& a, const SparseRow& b) noexcept
{
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.index.size() && j < b.index.size()) {
        if (a.index[i] == b.index[j])
            s += a.value[i++] * b.value[j++];
        else if (a.index[i] < b.index[j])
            ++i;
        else
            ++j;
    }
    return s;
}

/// Gram matrix access; cached in full for modest training sets.
class LinearKernel {
public:
    static constexpr std::size_t kCacheLimit = 3000;

    explicit LinearKernel(std::vector<SparseRow> rows) : rows_(std::move(rows))
    {
        const std::size_t n = rows_.size();
        if (n <= kCacheLimit) {
            gram_.resize(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j)
                    gram_[i * n + j] = gram_[j * n + i] = sparse_dot(rows_[i], rows_[j]);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

    /// Writes K(i, k) for every k into `out`.
    void column(std::size_t i, std::vector<double>& out) const
    {
        const std::size_t n = rows_.size();
        out.resize(n);
        if (!gram_.empty()) {
            std::copy_n(gram_.begin() + static_cast<std::ptrdiff_t>(i * n), n, out.begin());
            return;
        }
        for (std::size_t k = 0; k < n; ++k)
            out[k] = sparse_dot(rows_[i], rows_[k]);
    }

    [[nodiscard]] double diag(std::size_t i) const
    {
        return gram_.empty() ? sparse_dot(rows_[i], rows_[i]) : gram_[i * rows_.size() + i];
    }

private:
    std::vector<SparseRow> rows_;
    std::vector<double> gram_;
};

inline bool in_up(double y, double a, double C) noexcept { return (y > 0 && a < C) || (y < 0 && a > 0); }
inline bool in_low(double y, double a, double C) noexcept { return (y > 0 && a > 0) || (y < 0 && a < C); }

} // namespace detail

inline void check_training_set(const LabeledImageSet& data)
{
    if (data.items.size() < 2)
        throw Error(Errc::single_class_data, "training needs at least two examples");
    const std::size_t dim = data.items.front().features.size();
    bool pos = false, neg = false;
    for (const auto& item : data.items) {
        if (item.features.size() != dim)
            throw Error(Errc::dimension_mismatch, "training vectors differ in length");
        if (item.label == Label::FP)
            pos = true;
        else if (item.label == Label::DP)
            neg = true;
        else
            throw Error(Errc::invariant_violation, "training labels must be FP or DP");
    }
    if (!pos || !neg)
        throw Error(Errc::single_class_data, "training set contains only one class");
}

/// KKT gap m(a) - M(a) recomputed from scratch for a given dual point.
inline double kkt_gap(const LabeledImageSet& data, const std::vector<double>& alpha, double C)
{
    const std::size_t n = data.items.size();
    const std::size_t dim = data.items.front().features.size();
    std::vector<double> w(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d)
            w[d] += alpha[i] * class_sign(data.items[i].label) * data.items[i].features[d];
    double m = -std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double y = class_sign(data.items[i].label);
        double wx = 0.0;
        for (std::size_t d = 0; d < dim; ++d)
            wx += w[d] * data.items[i].features[d];
        const double neg_yg = -y * (y * wx - 1.0);
        if (detail::in_up(y, alpha[i], C))
            m = std::max(m, neg_yg);
        if (detail::in_low(y, alpha[i], C))
            M = std::min(M, neg_yg);
    }
    return m - M;
}

inline SvmSolution train_detailed(const LabeledImageSet& data, const SvmHyperParams& hp = {})
{
    check_training_set(data);
    if (!(hp.C > 0.0) || !(hp.tol > 0.0) || hp.max_passes < 1)
        throw Error(Errc::invalid_config, "SVM hyperparameters must satisfy C > 0, tol > 0, max_passes >= 1");

    const std::size_t n = data.items.size();
    const std::size_t dim = data.items.front().features.size();
    const double C = hp.C;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(hp.seed);
    shuffle(order, rng);

    std::vector<detail::SparseRow> rows(n);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& item = data.items[order[k]];
        y[k] = class_sign(item.label);
        for (std::size_t d = 0; d < dim; ++d) {
            if (item.features[d] != 0.0) {
                rows[k].index.push_back(static_cast<std::uint32_t>(d));
                rows[k].value.push_back(item.features[d]);
            }
        }
    }
    const detail::LinearKernel kernel(rows);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // (Qa)_k - 1
    std::vector<double> ki, kj;
    const long max_iterations = static_cast<long>(hp.max_passes) * static_cast<long>(n);

    SvmSolution sol;
    constexpr double kTau = 1e-12;
    for (;;) {
        std::size_t i = n, j = n;
        double m = -std::numeric_limits<double>::infinity();
        double M = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const double v = -y[k] * grad[k];
            if (detail::in_up(y[k], alpha[k], C) && v > m) {
                m = v;
                i = k;
            }
            if (detail::in_low(y[k], alpha[k], C) && v < M) {
                M = v;
                j = k;
            }
        }
        sol.kkt_gap = m - M;
        if (i == n || j == n || sol.kkt_gap < hp.tol) {
            sol.converged = true;
            break;
        }
        if (sol.iterations >= max_iterations)
            break;
        ++sol.iterations;

        // Move along u = y_i e_i - y_j e_j by step t >= 0.
        kernel.column(i, ki);
        kernel.column(j, kj);
        double eta = ki[i] + kj[j] - 2.0 * ki[j];
        if (eta <= 0.0)
            eta = kTau;
        const double room_i = y[i] > 0 ? C - alpha[i] : alpha[i];
        const double room_j = y[j] > 0 ? alpha[j] : C - alpha[j];
        const double t = std::min({(m - M) / eta, room_i, room_j});

        // Land exactly on the box edge when a bound is hit.
        alpha[i] = t == room_i ? (y[i] > 0 ? C : 0.0) : alpha[i] + y[i] * t;
        alpha[j] = t == room_j ? (y[j] > 0 ? 0.0 : C) : alpha[j] - y[j] * t;
        for (std::size_t k = 0; k < n; ++k)
            grad[k] += y[k] * t * (ki[k] - kj[k]);
    }

    // Bias from free vectors, or the midpoint of the feasible interval.
    double sum_free = 0.0;
    std::size_t n_free = 0;
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double yg = y[k] * grad[k];
        const bool at_upper = alpha[k] >= C;
        const bool at_lower = alpha[k] <= 0.0;
        if (at_upper) {
            if (y[k] < 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (at_lower) {
            if (y[k] > 0)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            sum_free += yg;
            ++n_free;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    ClassifierModel& model = sol.model;
    model.weights.assign(dim, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (alpha[k] == 0.0)
            continue;
        for (std::size_t p = 0; p < rows[k].index.size(); ++p)
            model.weights[rows[k].index[p]] += alpha[k] * y[k] * rows[k].value[p];
    }
    model.bias = -rho;
    model.hyperparams = hp;
    model.training_hash = content_hash(data);

    sol.alpha.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        sol.alpha[order[k]] = alpha[k];
    return sol;
}

inline ClassifierModel train(const LabeledImageSet& data, const SvmHyperParams& hp = {})
{
    return train_detailed(data, hp).model;
}

/// Seeded shuffle, then the first round(n * train_fraction) items go to training.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(std::vector<T> items, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(Errc::invalid_config, "train_fraction must lie in (0, 1)");
    Rng rng(seed);
    shuffle(items, rng);
    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(items.size()) * train_fraction));
    std::vector<T> test(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(n_train)),
                        std::make_move_iterator(items.end()));
    items.resize(n_train);
    return {std::move(items), std::move(test)};
}

inline std::pair<LabeledImageSet, LabeledImageSet> split(const LabeledImageSet& data, double train_fraction,
                                                          std::uint64_t seed)
{
    auto [train_items, test_items] = split(data.items, train_fraction, seed);
    return {LabeledImageSet{std::move(train_items), data.provenance},
            LabeledImageSet{std::move(test_items), data.provenance}};
}

// Model file: a line-oriented text header followed by one weight per line.
// Numbers use the shortest representation that round-trips exactly.

inline constexpr std::string_view kModelMagic = "advmap-linear-svm 1";

inline void write_model(std::ostream& os, const ClassifierModel& m)
{
    os << kModelMagic << '\n'
       << "dim " << m.weights.size() << '\n'
       << "C " << format_double(m.hyperparams.C) << '\n'
       << "tol " << format_double(m.hyperparams.tol) << '\n'
       << "max_passes " << m.hyperparams.max_passes << '\n'
       << "seed " << m.hyperparams.seed << '\n'
       << "training_hash " << (m.training_hash.empty() ? "-" : m.training_hash) << '\n'
       << "bias " << format_double(m.bias) << '\n'
       << "weights\n";
    for (double w : m.weights)
        os << format_double(w) << '\n';
}

inline ClassifierModel read_model(std::istream& is)
{
    std::string line;
    std::size_t line_no = 0;
    auto next = [&]() -> std::string_view {
        if (!std::getline(is, line))
            throw ParseError(line_no + 1, "unexpected end of model file");
        ++line_no;
        return line;
    };
    auto keyed = [&](std::string_view key) -> std::string {
        std::string_view l = next();
        if (l.size() <= key.size() + 1 || l.substr(0, key.size()) != key || l[key.size()] != ' ')
            throw ParseError(line_no, "expected '" + std::string(key) + " <value>'");
        return std::string(l.substr(key.size() + 1));
    };

    if (next() != kModelMagic)
        throw ParseError(1, "not a model file");
    ClassifierModel m;
    std::size_t dim = 0;
    if (!parse_int(keyed("dim"), dim))
        throw ParseError(line_no, "bad dim");
    if (!parse_double(keyed("C"), m.hyperparams.C))
        throw ParseError(line_no, "bad C");
    if (!parse_double(keyed("tol"), m.hyperparams.tol))
        throw ParseError(line_no, "bad tol");
    if (!parse_int(keyed("max_passes"), m.hyperparams.max_passes))
        throw ParseError(line_no, "bad max_passes");
    if (!parse_int(keyed("seed"), m.hyperparams.seed))
        throw ParseError(line_no, "bad seed");
    m.training_hash = keyed("training_hash");
    if (m.training_hash == "-")
        m.training_hash.clear();
    if (!parse_double(keyed("bias"), m.bias))
        throw ParseError(line_no, "bad bias");
    if (next() != "weights")
        throw ParseError(line_no, "expected 'weights'");
    m.weights.resize(dim);
    for (std::size_t d = 0; d < dim; ++d)
        if (!parse_double(next(), m.weights[d]))
            throw ParseError(line_no, "bad weight");
    for (double w : m.weights)
        if (!std::isfinite(w))
            throw Error(Errc::invariant_violation, "model contains non-finite weights");
    return m;
}

} // namespace advmap
