#ifndef VOXCHECK_WORKFLOW_HPP
#define VOXCHECK_WORKFLOW_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "voxcheck/checker.hpp"

namespace voxcheck {

struct WorkflowOptions {
    std::uint32_t base_resolution = 4;
    // Refine every refinable violating cell of the failing step at once,
    // instead of only the first one.
    bool multi_voxel_refinement = false;
    // Stop early when a proposed cell is solid throughout at max resolution
    // (refining it can never clear the violation), and after a refinement
    // whose children are all SOLID keep splitting the child the robot
    // touches, several levels deep, before re-checking.
    bool cascade_fully_solid = false;
    // Safety cap on checker runs; 0 picks the theoretical refinement bound
    // plus the trajectory length.
    std::uint64_t max_iterations = 0;
};

struct IterationRecord {
    int iteration = 0;
    std::uint64_t cell_checks = 0;
    std::optional<int> counterexample_length;  // empty on the final Pass iteration
    std::vector<CellId> refined_cells;
};

struct WorkflowReport {
    std::optional<Counterexample> counterexample;
    int iterations = 0;    // checker runs
    int refinements = 0;   // refine operations, including cascade descents
    std::uint64_t cell_checks_total = 0;
    double wall_seconds = 0.0;
    std::vector<IterationRecord> iteration_log;

    bool passed() const { return !counterexample.has_value(); }
};

/// Verify-analyze-refine loop: abstract the environment to the base
/// resolution, check the trajectory, and on a spurious counterexample split
/// the violating voxel into its eight children, repeating until the check
/// passes or the violation survives at max resolution. The final verdict
/// always matches a direct max-resolution check; on Fail the counterexample
/// length and pose are identical.
WorkflowReport run_workflow(std::shared_ptr<const VoxelGrid> max_grid,
                            const Trajectory& trajectory, const RobotModel& robot,
                            const WorkflowOptions& options);

/// Baseline without refinement: abstract once to `resolution` and run the
/// checker on that.
CheckOutcome run_direct(std::shared_ptr<const VoxelGrid> max_grid, std::uint32_t resolution,
                        const Trajectory& trajectory, const RobotModel& robot);

}  // namespace voxcheck

#endif
