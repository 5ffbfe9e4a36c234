#pragma once

// Path-pair rasterisation and image augmentation.
//
// A path image has one pixel per grid cell. Original-path cells are painted
// `Original` over any adversarial cell they share, so `AdversarialOnly` marks
// exactly the part of the adversarial path that left the original one.
// Obstacles never enter the image.

#include <advmap/gridworld.hpp>
#include <advmap/random.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace advmap {

enum class Pixel : std::uint8_t { Background = 0, Original = 1, AdversarialOnly = 2 };

class PathImage {
public:
    PathImage() : PathImage(kDefaultGridSize, kDefaultGridSize) {}

    PathImage(int width, int height) : width_(width), height_(height)
    {
        if (width <= 0 || height <= 0)
            throw Error(Errc::invalid_config, "image dimensions must be positive");
        pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Pixel::Background);
    }

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }

    [[nodiscard]] bool contains(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

    [[nodiscard]] Pixel at(Cell c) const { return pixels_[index(c)]; }
    void set(Cell c, Pixel p) { pixels_[index(c)] = p; }

    [[nodiscard]] const std::vector<Pixel>& pixels() const noexcept { return pixels_; }

    /// Pixel counts indexed by Pixel value.
    [[nodiscard]] std::array<std::size_t, 3> histogram() const
    {
        std::array<std::size_t, 3> h{};
        for (Pixel p : pixels_)
            ++h[static_cast<std::size_t>(p)];
        return h;
    }

    /// Row-major string of '0', '1', '2'.
    [[nodiscard]] std::string to_digits() const
    {
        std::string s(pixels_.size(), '0');
        for (std::size_t i = 0; i < pixels_.size(); ++i)
            s[i] = static_cast<char>('0' + static_cast<int>(pixels_[i]));
        return s;
    }

    static PathImage from_digits(int width, int height, std::string_view digits)
    {
        PathImage img(width, height);
        if (digits.size() != img.size())
            throw Error(Errc::dimension_mismatch, "image string has " + std::to_string(digits.size()) + " pixels, expected "
                                                      + std::to_string(img.size()));
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (digits[i] < '0' || digits[i] > '2')
                throw Error(Errc::parse_error, "image string contains a character other than 0/1/2");
            img.pixels_[i] = static_cast<Pixel>(digits[i] - '0');
        }
        return img;
    }

    friend bool operator==(const PathImage&, const PathImage&) = default;

private:
    [[nodiscard]] std::size_t index(Cell c) const noexcept
    {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
    }

    int width_;
    int height_;
    std::vector<Pixel> pixels_;
};

inline PathImage rasterize(const PathPair& pp, int width = kDefaultGridSize, int height = kDefaultGridSize)
{
    PathImage img(width, height);
    auto paint = [&](const Path& p, Pixel value) {
        for (Cell c : p.steps) {
            if (!img.contains(c))
                throw Error(Errc::cell_out_of_raster, "cell " + to_string(c) + " outside " + std::to_string(width) + "x"
                                                          + std::to_string(height) + " raster");
            img.set(c, value);
        }
    };
    paint(pp.adversarial, Pixel::AdversarialOnly);
    paint(pp.original, Pixel::Original);
    return img;
}

enum class AugmentOp { Identity, FlipH, FlipV, Rot90, Rot180, Rot270 };

inline constexpr AugmentOp kNonIdentityOps[5] = {AugmentOp::FlipH, AugmentOp::FlipV, AugmentOp::Rot90, AugmentOp::Rot180,
                                                 AugmentOp::Rot270};

constexpr std::string_view to_string(AugmentOp op) noexcept
{
    switch (op) {
    case AugmentOp::Identity: return "identity";
    case AugmentOp::FlipH: return "flip_h";
    case AugmentOp::FlipV: return "flip_v";
    case AugmentOp::Rot90: return "rot90";
    case AugmentOp::Rot180: return "rot180";
    case AugmentOp::Rot270: return "rot270";
    }
    return "?";
}

inline AugmentOp parse_augment_op(std::string_view s)
{
    for (AugmentOp op : {AugmentOp::Identity, AugmentOp::FlipH, AugmentOp::FlipV, AugmentOp::Rot90, AugmentOp::Rot180,
                         AugmentOp::Rot270})
        if (to_string(op) == s)
            return op;
    throw Error(Errc::parse_error, "unknown augmentation '" + std::string(s) + "'");
}

/// Rotations are clockwise as displayed (y grows downwards).
inline PathImage apply_augment(const PathImage& img, AugmentOp op)
{
    const int w = img.width();
    const int h = img.height();
    const bool rotation = op == AugmentOp::Rot90 || op == AugmentOp::Rot180 || op == AugmentOp::Rot270;
    if (rotation && w != h)
        throw Error(Errc::non_square_rotation, "cannot rotate a " + std::to_string(w) + "x" + std::to_string(h) + " image");

    PathImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Cell dst{x, y};
            switch (op) {
            case AugmentOp::Identity: break;
            case AugmentOp::FlipH: dst = {w - 1 - x, y}; break;
            case AugmentOp::FlipV: dst = {x, h - 1 - y}; break;
            case AugmentOp::Rot90: dst = {w - 1 - y, x}; break;
            case AugmentOp::Rot180: dst = {w - 1 - x, h - 1 - y}; break;
            case AugmentOp::Rot270: dst = {y, h - 1 - x}; break;
            }
            out.set(dst, img.at({x, y}));
        }
    }
    return out;
}

struct AugmentStep {
    std::size_t source; // index into the original list
    AugmentOp op;
};

/// The random draws behind balance_classes: which source image and which
/// non-identity op produce each appended copy.
inline std::vector<AugmentStep> augment_plan(std::size_t sources, std::size_t target_count, std::uint64_t seed)
{
    if (sources == 0)
        throw Error(Errc::invalid_config, "cannot balance an empty class");
    std::vector<AugmentStep> plan;
    Rng rng(seed);
    for (std::size_t n = sources; n < target_count; ++n) {
        const auto src = static_cast<std::size_t>(uniform_index(rng, sources));
        const AugmentOp op = kNonIdentityOps[uniform_index(rng, std::size(kNonIdentityOps))];
        plan.push_back({src, op});
    }
    return plan;
}

/// Grows `minority` to `target_count` by appending randomly augmented copies of
/// its original members. Returns the input unchanged if it is already large enough.
inline std::vector<PathImage> balance_classes(std::vector<PathImage> minority, std::size_t target_count,
                                              std::uint64_t seed)
{
    const auto plan = augment_plan(minority.size(), target_count, seed);
    minority.reserve(minority.size() + plan.size());
    for (const AugmentStep& step : plan)
        minority.push_back(apply_augment(minority[step.source], step.op));
    return minority;
}

/// Two stacked one-hot channels, row-major: [Original plane | AdversarialOnly plane].
inline std::vector<double> flatten(const PathImage& img)
{
    const std::size_t plane = img.size();
    std::vector<double> v(2 * plane, 0.0);
    const auto& px = img.pixels();
    for (std::size_t i = 0; i < plane; ++i) {
        if (px[i] == Pixel::Original)
            v[i] = 1.0;
        else if (px[i] == Pixel::AdversarialOnly)
            v[plane + i] = 1.0;
    }
    return v;
}

/// Plain-text portable pixmap (P3): original red, adversarial-only blue, background white.
inline void write_ppm(std::ostream& os, const PathImage& img)
{
    os << "P3\n" << img.width() << ' ' << img.height() << "\n255\n";
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (x > 0)
                os << ' ';
            switch (img.at({x, y})) {
            case Pixel::Background: os << "255 255 255"; break;
            case Pixel::Original: os << "255 0 0"; break;
            case Pixel::AdversarialOnly: os << "0 0 255"; break;
            }
        }
        os << '\n';
    }
}

} // namespace advmap
