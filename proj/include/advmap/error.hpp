#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace advmap {

enum class Errc {
    ok = 0,
    // gridworld
    out_of_bounds,
    start_on_obstacle,
    goal_on_obstacle,
    start_equals_goal,
    empty_path,
    path_not_from_start,
    non_adjacent_step,
    step_on_obstacle,
    repeated_cell,
    invalid_map_pair,
    // planner / perturb
    invalid_config,
    generation_exhausted,
    no_candidate_cell,
    // imaging
    cell_out_of_raster,
    non_square_rotation,
    // classifier / metrics
    single_class_data,
    dimension_mismatch,
    single_class_test_set,
    // storage
    io_failure,
    invariant_violation,
    parse_error,
    hash_mismatch,
    // pipeline
    model_missing,
    duplicate_record,
    internal,
};

constexpr std::string_view to_string(Errc e) noexcept
{
    switch (e) {
    case Errc::ok: return "Ok";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::start_on_obstacle: return "StartOnObstacle";
    case Errc::goal_on_obstacle: return "GoalOnObstacle";
    case Errc::start_equals_goal: return "StartEqualsGoal";
    case Errc::empty_path: return "EmptyPath";
    case Errc::path_not_from_start: return "PathNotFromStart";
    case Errc::non_adjacent_step: return "NonAdjacentStep";
    case Errc::step_on_obstacle: return "StepOnObstacle";
    case Errc::repeated_cell: return "RepeatedCell";
    case Errc::invalid_map_pair: return "InvalidMapPair";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::generation_exhausted: return "GenerationExhausted";
    case Errc::no_candidate_cell: return "NoCandidateCell";
    case Errc::cell_out_of_raster: return "CellOutOfRaster";
    case Errc::non_square_rotation: return "NonSquareRotation";
    case Errc::single_class_data: return "SingleClassData";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::single_class_test_set: return "SingleClassTestSet";
    case Errc::io_failure: return "IoFailure";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::parse_error: return "ParseError";
    case Errc::hash_mismatch: return "HashMismatch";
    case Errc::model_missing: return "ModelMissing";
    case Errc::duplicate_record: return "DuplicateRecord";
    case Errc::internal: return "Internal";
    }
    return "Unknown";
}

/// Outcome of a validation routine. Converts to true when no invariant is violated.
struct Status {
    Errc code = Errc::ok;
    std::string message;

    static Status success() { return {}; }
    static Status failure(Errc c, std::string msg) { return {c, std::move(msg)}; }

    [[nodiscard]] bool ok() const noexcept { return code == Errc::ok; }
    explicit operator bool() const noexcept { return ok(); }
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised by the storage layer; carries the 1-based line number of the offending record.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(Errc::parse_error, "line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline void require(const Status& s)
{
    if (!s.ok())
        throw Error(s.code, s.message);
}

} // namespace advmap
