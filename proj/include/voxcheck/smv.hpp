#ifndef VOXCHECK_SMV_HPP
#define VOXCHECK_SMV_HPP

#include <string>
#include <string_view>

#include "voxcheck/checker.hpp"

namespace voxcheck {

/// Renders the environment/trajectory pair as a single symbolic-model-checker
/// module. The encoding stores occupancy as constant boolean arrays — one
/// array `env_base` for the base-resolution leaves (index (x*d + y)*d + z)
/// and one 8-entry array `env_r<level>_<x>_<y>_<z>` per refined voxel, in
/// child-index order (dz*4 + dy*2 + dx) — plus an index structure: per-step
/// `collision` selects the array entries of the leaves the robot touches at
/// that step, and `viol_*` name the smallest violated cell (0 when clear).
/// The single property is `INVARSPEC !collision`. Output is byte-identical
/// for identical inputs.
std::string export_smv(const MultiResEnvironment& env, const Trajectory& trajectory,
                       const RobotModel& robot);

enum class LogParseErrorKind {
    kNoCounterexample,       // log reports the invariant true, or has no trace
    kMissingIndexVariables,  // trace lacks usable viol_level/viol_x/viol_y/viol_z
    kAmbiguousStepNumbering, // state indices or step variables inconsistent
};

class LogParseError : public Error {
public:
    LogParseError(LogParseErrorKind kind, const std::string& message)
        : Error(message), kind_(kind) {}

    LogParseErrorKind kind() const { return kind_; }

private:
    LogParseErrorKind kind_;
};

/// Writes a counterexample in the checker-log trace layout that
/// `parse_counterexample_log` reads: a falsified-invariant banner, then one
/// `-> State: 1.<k> <-` block per step with `variable = value` lines.
/// Variables that keep their previous value are omitted (trace convention).
std::string serialize_counterexample_log(const Counterexample& cex);

/// Parses a checker trace log back into a counterexample: length = number of
/// states, violating cell from the final state's viol_* variables, poses from
/// pose_* when present (zero otherwise). Throws LogParseError with a distinct
/// kind for a passing log, missing index variables, or inconsistent step
/// numbering.
Counterexample parse_counterexample_log(std::string_view text);

}  // namespace voxcheck

#endif
