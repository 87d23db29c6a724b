#ifndef VOXCHECK_CHECKER_HPP
#define VOXCHECK_CHECKER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "voxcheck/robot.hpp"

namespace voxcheck {

/// Evidence for a violated run: the first step at which the robot touches a
/// SOLID leaf. `length` counts states, with the initial state as 1.
struct Counterexample {
    int length = 0;
    Vec3 pose;
    CellId violating_cell;                        // lexicographically smallest violator
    std::vector<CellId> all_violating_cells;      // every solid visited leaf at that step
    std::vector<std::pair<int, Vec3>> trace;      // (step, pose) for steps 1..length
};

struct CheckOutcome {
    std::optional<Counterexample> counterexample;
    std::uint64_t cell_checks = 0;

    bool passed() const { return !counterexample.has_value(); }
};

/// Checks that no step of the trajectory visits a SOLID leaf, stepping the
/// finite path in order and stopping at the first violation. cell_checks is
/// the number of leaf solidity lookups the run performed.
CheckOutcome check_trajectory(const MultiResEnvironment& env, const Trajectory& trajectory,
                              const RobotModel& robot);

struct RefinementProposal {
    std::vector<CellId> cells;
};

struct RealCounterexample {
    Counterexample counterexample;
};

using CounterexampleAnalysis = std::variant<RefinementProposal, RealCounterexample>;

enum class RefinementPolicy {
    kSingleVoxel,  // refine only the reported violating cell
    kMultiVoxel,   // refine every refinable violating cell of the step at once
};

/// Decides whether the counterexample can still be refined away. If the
/// reported cell already has max resolution the violation is real and the
/// workflow must stop; otherwise returns the refinement suggestion under
/// `policy` (multi-voxel proposals drop cells already at max resolution,
/// which cannot be split further).
CounterexampleAnalysis analyze_counterexample(const CheckOutcome& outcome,
                                              std::uint32_t max_resolution,
                                              RefinementPolicy policy);

/// Human-readable counterexample block: violating step, pose, cell, and the
/// trace leading there.
std::string format_counterexample(const Counterexample& cex);

}  // namespace voxcheck

#endif
