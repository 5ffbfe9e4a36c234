#pragma once

// Dataset files.
//
// A record file is line oriented. The first line is the header
//
//     #advmap-records/1 no|start|goal|map_o|map_a|path_o|path_a|label|attack
//
// and every following line is one record with nine '|'-separated fields:
//
//     no       decimal record number, strictly increasing
//     start    "x:y"
//     goal     "x:y"
//     map_o    row-major '0'/'1' occupancy, width*height characters, or empty
//     map_a    same, for the adversarial map
//     path_o   comma-separated "x:y" steps, or empty when not planned yet
//     path_a   same, for the adversarial path
//     label    UrP | FP | DP | UcP, or empty
//     attack   1 | 0, or empty; 1 exactly when label is UrP or FP
//
// Every line, including the last, ends with '\n'. A JSON sidecar
// (<file>.manifest.json) records grid size, generator/planner/taxonomy
// settings, record count, byte count and an FNV-1a digest of the whole file.

#include <advmap/perturb.hpp>
#include <advmap/planner.hpp>
#include <advmap/taxonomy.hpp>
#include <advmap/imaging.hpp>
#include <advmap/textio.hpp>

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace advmap {

inline constexpr std::string_view kRecordHeader = "#advmap-records/1 no|start|goal|map_o|map_a|path_o|path_a|label|attack";
inline constexpr std::size_t kRecordFields = 9;

struct Record {
    std::int64_t no = 0;
    Cell start;
    Cell goal;
    std::optional<GridMap> map_o;
    std::optional<GridMap> map_a;
    std::optional<Path> path_o;
    std::optional<Path> path_a;
    std::optional<Label> label;
    std::optional<bool> attack;

    [[nodiscard]] bool has_maps() const noexcept { return map_o.has_value() && map_a.has_value(); }
    [[nodiscard]] bool has_paths() const noexcept { return path_o.has_value() && path_a.has_value(); }

    [[nodiscard]] MapPair map_pair() const
    {
        return MapPair{no, Scenario{*map_o, start, goal}, Scenario{*map_a, start, goal}};
    }
    [[nodiscard]] PathPair path_pair() const { return PathPair{*path_o, *path_a}; }

    void set_label(Label l)
    {
        label = l;
        attack = attack_verdict(l);
    }

    friend bool operator==(const Record&, const Record&) = default;
};

inline Record make_record(const MapPair& mp)
{
    Record r;
    r.no = mp.id;
    r.start = mp.original.start;
    r.goal = mp.original.goal;
    r.map_o = mp.original.map;
    r.map_a = mp.adversarial.map;
    return r;
}

struct Manifest {
    std::string dataset_id;
    int width = kDefaultGridSize;
    int height = kDefaultGridSize;
    std::optional<GenConfig> gen;
    std::optional<PlannerConfig> planner;
    int threshold = kDefaultThreshold;
    std::string created;
    std::size_t record_count = 0;
    std::uint64_t content_bytes = 0;
    std::string content_hash;

    friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline std::filesystem::path manifest_path(const std::filesystem::path& records) { return records.string() + ".manifest.json"; }

// ---------------------------------------------------------------------------
// Text encoding of cells and paths

inline std::string format_path(const Path& p)
{
    std::string out;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        if (i)
            out += ',';
        out += to_string(p.steps[i]);
    }
    return out;
}

inline std::optional<Cell> parse_cell(std::string_view s) noexcept
{
    const auto colon = s.find(':');
    if (colon == std::string_view::npos)
        return std::nullopt;
    Cell c;
    if (!parse_int(s.substr(0, colon), c.x) || !parse_int(s.substr(colon + 1), c.y))
        return std::nullopt;
    return c;
}

inline std::optional<Path> parse_path(std::string_view s)
{
    Path p;
    if (s.empty())
        return p;
    for (std::string_view tok : split_fields(s, ',')) {
        auto c = parse_cell(tok);
        if (!c)
            return std::nullopt;
        p.steps.push_back(*c);
    }
    return p;
}

inline std::string format_record(const Record& r)
{
    std::string line = std::to_string(r.no);
    auto field = [&line](std::string_view v) {
        line += '|';
        line += v;
    };
    field(to_string(r.start));
    field(to_string(r.goal));
    field(r.map_o ? r.map_o->to_bits() : "");
    field(r.map_a ? r.map_a->to_bits() : "");
    field(r.path_o ? format_path(*r.path_o) : "");
    field(r.path_a ? format_path(*r.path_a) : "");
    field(r.label ? to_string(*r.label) : "");
    field(r.attack ? (*r.attack ? "1" : "0") : "");
    return line;
}

/// Syntactic parse of one record line; invariants are checked separately.
inline Record parse_record(std::string_view line, int width, int height, std::size_t line_no)
{
    const auto f = split_fields(line, '|');
    if (f.size() != kRecordFields)
        throw ParseError(line_no, "expected " + std::to_string(kRecordFields) + " fields, found " + std::to_string(f.size()));
    Record r;
    if (!parse_int(f[0], r.no))
        throw ParseError(line_no, "bad record number '" + std::string(f[0]) + "'");
    auto s = parse_cell(f[1]);
    auto g = parse_cell(f[2]);
    if (!s || !g)
        throw ParseError(line_no, "bad start or goal cell");
    r.start = *s;
    r.goal = *g;
    auto parse_map = [&](std::string_view bits) -> std::optional<GridMap> {
        if (bits.empty())
            return std::nullopt;
        try {
            return GridMap::from_bits(width, height, bits);
        } catch (const Error& e) {
            if (e.code() == Errc::dimension_mismatch)
                throw Error(Errc::dimension_mismatch, "line " + std::to_string(line_no) + ": " + e.what());
            throw ParseError(line_no, e.what());
        }
    };
    r.map_o = parse_map(f[3]);
    r.map_a = parse_map(f[4]);
    if (!f[5].empty() || !f[6].empty()) {
        r.path_o = parse_path(f[5]);
        r.path_a = parse_path(f[6]);
        if (!r.path_o || !r.path_a)
            throw ParseError(line_no, "bad path token");
    }
    if (!f[7].empty()) {
        r.label = parse_label(f[7]);
        if (!r.label)
            throw ParseError(line_no, "unknown label '" + std::string(f[7]) + "'");
    }
    if (f[8] == "1")
        r.attack = true;
    else if (f[8] == "0")
        r.attack = false;
    else if (!f[8].empty())
        throw ParseError(line_no, "attack must be 0, 1 or empty");
    return r;
}

/// Record invariants. `strict_paths` additionally requires simple, obstacle-free
/// paths when maps are present; imports of external planners skip that.
inline Status validate_record(const Record& r, int width, int height, bool strict_paths = false)
{
    const auto fail = [&](Errc c, const std::string& msg) {
        return Status::failure(c, "record " + std::to_string(r.no) + ": " + msg);
    };
    auto in_grid = [&](Cell c) { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; };
    if (!in_grid(r.start) || !in_grid(r.goal))
        return fail(Errc::out_of_bounds, "start or goal outside grid");
    if (r.map_o.has_value() != r.map_a.has_value())
        return fail(Errc::invariant_violation, "map_o and map_a must be present together");
    if (r.has_maps()) {
        if (r.map_o->width() != width || r.map_o->height() != height || r.map_a->width() != width
            || r.map_a->height() != height)
            return fail(Errc::dimension_mismatch, "map size differs from dataset grid");
        if (Status st = validate_map_pair(r.map_pair()); !st)
            return fail(st.code, st.message);
    }
    if (r.path_o.has_value() != r.path_a.has_value())
        return fail(Errc::invariant_violation, "path_o and path_a must be present together");
    if (r.has_paths()) {
        for (const Path* p : {&*r.path_o, &*r.path_a}) {
            if (Status st = validate_path_steps(*p, width, height); !st)
                return fail(st.code, st.message);
            if (p->front() != r.start)
                return fail(Errc::path_not_from_start, "path does not begin at start");
        }
        if (strict_paths && r.has_maps()) {
            const MapPair mp = r.map_pair();
            if (Status st = validate_path(*r.path_o, mp.original); !st)
                return fail(st.code, st.message);
            if (Status st = validate_path(*r.path_a, mp.adversarial); !st)
                return fail(st.code, st.message);
        }
    }
    if (r.label.has_value() != r.attack.has_value())
        return fail(Errc::invariant_violation, "label and attack must be present together");
    if (r.label) {
        if (!r.has_paths())
            return fail(Errc::invariant_violation, "labelled record without paths");
        if (*r.attack != attack_verdict(*r.label))
            return fail(Errc::invariant_violation, std::string("attack flag inconsistent with label ")
                                                       + std::string(to_string(*r.label)));
    }
    return Status::success();
}

// ---------------------------------------------------------------------------
// Manifest (JSON sidecar)

/// Keys are emitted in a fixed order so the sidecar is stable byte for byte.
inline nlohmann::ordered_json manifest_json(const Manifest& m)
{
    nlohmann::ordered_json j;
    j["dataset_id"] = m.dataset_id;
    j["width"] = m.width;
    j["height"] = m.height;
    if (m.gen) {
        nlohmann::ordered_json g;
        g["obstacle_density"] = m.gen->obstacle_density;
        g["placement"] = std::string(to_string(m.gen->placement));
        g["radius"] = m.gen->radius;
        g["seed"] = m.gen->seed;
        g["require_reachable"] = m.gen->require_reachable;
        j["gen"] = g;
    }
    if (m.planner) {
        nlohmann::ordered_json p;
        p["mode"] = std::string(to_string(m.planner->mode));
        p["max_iterations"] = m.planner->max_iterations;
        p["max_rollout_steps"] = m.planner->max_rollout_steps;
        p["step_reward"] = m.planner->step_reward;
        p["goal_reward"] = m.planner->goal_reward;
        j["planner"] = p;
    }
    j["taxonomy"] = {{"threshold", m.threshold}};
    j["created"] = m.created;
    j["record_count"] = m.record_count;
    j["content_bytes"] = m.content_bytes;
    j["content_hash"] = m.content_hash;
    return j;
}

inline std::string dump_manifest(const Manifest& m) { return manifest_json(m).dump(2) + "\n"; }

inline Manifest parse_manifest(std::string_view text)
{
    Manifest m;
    try {
        const auto j = nlohmann::json::parse(text);
        m.dataset_id = j.value("dataset_id", "");
        m.width = j.at("width").get<int>();
        m.height = j.at("height").get<int>();
        if (j.contains("gen")) {
            const auto& g = j["gen"];
            GenConfig gen;
            gen.width = m.width;
            gen.height = m.height;
            gen.obstacle_density = g.at("obstacle_density").get<double>();
            gen.placement = parse_placement(g.at("placement").get<std::string>());
            gen.radius = g.at("radius").get<int>();
            gen.seed = g.at("seed").get<std::uint64_t>();
            gen.require_reachable = g.value("require_reachable", true);
            m.gen = gen;
        }
        if (j.contains("planner")) {
            const auto& p = j["planner"];
            PlannerConfig pc;
            pc.mode = parse_planner_mode(p.at("mode").get<std::string>());
            pc.max_iterations = p.at("max_iterations").get<int>();
            pc.max_rollout_steps = p.at("max_rollout_steps").get<int>();
            pc.step_reward = p.at("step_reward").get<double>();
            pc.goal_reward = p.at("goal_reward").get<double>();
            m.planner = pc;
        }
        if (j.contains("taxonomy"))
            m.threshold = j["taxonomy"].value("threshold", kDefaultThreshold);
        m.created = j.value("created", "");
        m.record_count = j.value("record_count", std::size_t{0});
        m.content_bytes = j.value("content_bytes", std::uint64_t{0});
        m.content_hash = j.value("content_hash", "");
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, std::string("manifest: ") + e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------
// File helpers

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw Error(Errc::io_failure, "cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes to a sibling temporary file, then renames it over the target.
inline void write_file_atomic(const std::filesystem::path& p, std::string_view content)
{
    const std::filesystem::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(Errc::io_failure, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw Error(Errc::io_failure, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, p, ec);
    if (ec)
        throw Error(Errc::io_failure, "cannot rename " + tmp.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Records

inline std::string serialize_records(const std::vector<Record>& records)
{
    std::string body(kRecordHeader);
    body += '\n';
    for (const auto& r : records) {
        body += format_record(r);
        body += '\n';
    }
    return body;
}

/// Validates, then writes records and the sidecar. Fills in the manifest's
/// record count, byte count and hash; returns the completed manifest.
inline Manifest write_records(const std::filesystem::path& path, const std::vector<Record>& records, Manifest manifest)
{
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i > 0 && records[i].no <= records[i - 1].no)
            throw Error(Errc::invariant_violation, "record numbers must be strictly increasing (record "
                                                       + std::to_string(records[i].no) + ")");
        if (Status st = validate_record(records[i], manifest.width, manifest.height); !st)
            throw Error(Errc::invariant_violation, std::string(to_string(st.code)) + ": " + st.message);
    }
    const std::string body = serialize_records(records);
    manifest.record_count = records.size();
    manifest.content_bytes = body.size();
    manifest.content_hash = hash_hex(body);
    write_file_atomic(path, body);
    write_file_atomic(manifest_path(path), dump_manifest(manifest));
    return manifest;
}

struct Dataset {
    std::vector<Record> records;
    Manifest manifest;
};

namespace detail {

struct Lines {
    std::vector<std::string_view> lines;
    bool terminated = true; // last line ends with '\n'
};

inline Lines split_lines(std::string_view content)
{
    Lines out;
    std::size_t begin = 0;
    while (begin < content.size()) {
        const std::size_t nl = content.find('\n', begin);
        if (nl == std::string_view::npos) {
            out.lines.push_back(content.substr(begin));
            out.terminated = false;
            break;
        }
        out.lines.push_back(content.substr(begin, nl - begin));
        begin = nl + 1;
    }
    return out;
}

} // namespace detail

inline Dataset read_records(const std::filesystem::path& path)
{
    const std::string content = read_file(path);
    Dataset ds;
    ds.manifest = parse_manifest(read_file(manifest_path(path)));
    const Manifest& m = ds.manifest;
    const detail::Lines lines = detail::split_lines(content);

    // A short file is reported as a parse error at the line where it breaks off;
    // any other difference from the recorded digest is corruption.
    if (content.size() < m.content_bytes) {
        if (!lines.terminated)
            throw ParseError(lines.lines.size(), "truncated record (no line terminator)");
        throw ParseError(lines.lines.size() + 1, "file ends after " + std::to_string(lines.lines.size())
                                                      + " lines; manifest lists " + std::to_string(m.record_count)
                                                      + " records");
    }
    if (content.size() != m.content_bytes || hash_hex(content) != m.content_hash)
        throw Error(Errc::hash_mismatch, path.string() + " does not match its manifest digest " + m.content_hash);

    if (lines.lines.empty() || lines.lines.front() != kRecordHeader)
        throw ParseError(1, "missing or unknown header line");
    if (!lines.terminated)
        throw ParseError(lines.lines.size(), "truncated record (no line terminator)");
    for (std::size_t i = 1; i < lines.lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        Record r = parse_record(lines.lines[i], m.width, m.height, line_no);
        if (Status st = validate_record(r, m.width, m.height); !st) {
            if (st.code == Errc::dimension_mismatch)
                throw Error(Errc::dimension_mismatch, "line " + std::to_string(line_no) + ": " + st.message);
            throw Error(Errc::invariant_violation, "line " + std::to_string(line_no) + ": " + st.message);
        }
        if (!ds.records.empty() && r.no <= ds.records.back().no)
            throw ParseError(line_no, "record numbers must be strictly increasing");
        ds.records.push_back(std::move(r));
    }
    if (ds.records.size() != m.record_count)
        throw ParseError(lines.lines.size(), "manifest lists " + std::to_string(m.record_count) + " records, file has "
                                                  + std::to_string(ds.records.size()));
    return ds;
}

// ---------------------------------------------------------------------------
// Import of path pairs produced elsewhere

struct ImportedPair {
    std::int64_t no = 0;
    Cell start;
    Cell goal;
    std::optional<MapPair> maps; // absent when the map columns are empty
    PathPair paths;
};

/// Reads the record grammar without a manifest. Header and '#' lines are
/// skipped; paths must be 8-adjacent but may revisit cells.
inline std::vector<ImportedPair> import_external_pathpairs_text(std::string_view content, int width, int height)
{
    std::vector<ImportedPair> out;
    const detail::Lines lines = detail::split_lines(content);
    for (std::size_t i = 0; i < lines.lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        std::string_view line = lines.lines[i];
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.front() == '#')
            continue;
        Record r = parse_record(line, width, height, line_no);
        if (!r.has_paths() || r.path_o->empty() || r.path_a->empty())
            throw ParseError(line_no, "imported records need both paths");
        for (const Path* p : {&*r.path_o, &*r.path_a}) {
            if (Status st = validate_path_steps(*p, width, height); !st)
                throw Error(st.code, "line " + std::to_string(line_no) + ": " + st.message);
        }
        r.label.reset();
        r.attack.reset();
        if (Status st = validate_record(r, width, height); !st)
            throw Error(st.code, "line " + std::to_string(line_no) + ": " + st.message);
        for (const auto& prev : out)
            if (prev.no == r.no)
                throw Error(Errc::duplicate_record, "line " + std::to_string(line_no) + ": record " + std::to_string(r.no)
                                                        + " appears twice");
        ImportedPair ip{r.no, r.start, r.goal, std::nullopt, r.path_pair()};
        if (r.has_maps())
            ip.maps = r.map_pair();
        out.push_back(std::move(ip));
    }
    return out;
}

inline std::vector<ImportedPair> import_external_pathpairs(const std::filesystem::path& path, int width, int height)
{
    return import_external_pathpairs_text(read_file(path), width, height);
}

// ---------------------------------------------------------------------------
// Image sets: "#advmap-images/1 WxH" header, then no|label|augment|pixels per line.

struct ImageEntry {
    std::int64_t no = 0;
    std::optional<Label> label;
    AugmentOp op = AugmentOp::Identity;
    PathImage image;

    friend bool operator==(const ImageEntry&, const ImageEntry&) = default;
};

inline std::string serialize_images(const std::vector<ImageEntry>& images, int width, int height)
{
    std::string out = "#advmap-images/1 " + std::to_string(width) + "x" + std::to_string(height) + "\n";
    for (const auto& e : images) {
        out += std::to_string(e.no) + "|" + std::string(e.label ? to_string(*e.label) : "") + "|"
               + std::string(to_string(e.op)) + "|" + e.image.to_digits() + "\n";
    }
    return out;
}

inline std::vector<ImageEntry> parse_images(std::string_view content, int& width, int& height)
{
    const detail::Lines lines = detail::split_lines(content);
    constexpr std::string_view prefix = "#advmap-images/1 ";
    if (lines.lines.empty() || lines.lines.front().substr(0, prefix.size()) != prefix)
        throw ParseError(1, "missing image-set header");
    const std::string_view dims = lines.lines.front().substr(prefix.size());
    const auto xpos = dims.find('x');
    if (xpos == std::string_view::npos || !parse_int(dims.substr(0, xpos), width)
        || !parse_int(dims.substr(xpos + 1), height))
        throw ParseError(1, "bad image dimensions");
    std::vector<ImageEntry> out;
    for (std::size_t i = 1; i < lines.lines.size(); ++i) {
        const auto f = split_fields(lines.lines[i], '|');
        if (f.size() != 4)
            throw ParseError(i + 1, "expected 4 fields");
        ImageEntry e;
        if (!parse_int(f[0], e.no))
            throw ParseError(i + 1, "bad record number");
        if (!f[1].empty()) {
            e.label = parse_label(f[1]);
            if (!e.label)
                throw ParseError(i + 1, "unknown label");
        }
        try {
            e.op = parse_augment_op(f[2]);
            e.image = PathImage::from_digits(width, height, f[3]);
        } catch (const Error& err) {
            throw ParseError(i + 1, err.what());
        }
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace advmap
