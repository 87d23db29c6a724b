#include "voxcheck/workflow.hpp"

#include <algorithm>
#include <chrono>

namespace voxcheck {

namespace {

bool robot_touches_cell(const MultiResEnvironment& env, const Vec3& pose, const RobotModel& robot,
                        const CellId& cell) {
    const Aabb box = cell_aabb(cell, env.max_grid().translate(), env.max_grid().scale());
    for (const Sphere& sphere : occupied_region(pose, robot)) {
        if (sphere_touches_aabb(sphere, box)) return true;
    }
    return false;
}

// Splitting a cell whose children are all SOLID changed nothing the checker
// can see, so keep splitting the child the robot actually touches until the
// picture differentiates (or bottoms out one level above max resolution).
void cascade_descent(MultiResEnvironment& env, const CellId& refined, const Vec3& pose,
                     const RobotModel& robot, WorkflowReport& report, IterationRecord& record) {
    CellId at = refined;
    for (;;) {
        auto kids = children(at);
        std::sort(kids.begin(), kids.end());
        const bool all_solid = std::all_of(kids.begin(), kids.end(),
                                           [&](const CellId& kid) { return env.leaf_solid(kid); });
        if (!all_solid) return;

        const auto visited = std::find_if(kids.begin(), kids.end(), [&](const CellId& kid) {
            return robot_touches_cell(env, pose, robot, kid);
        });
        if (visited == kids.end()) return;  // defensive; the parent was touched
        if (visited->level >= env.max_resolution()) return;

        env = env.refine(*visited);
        ++report.refinements;
        record.refined_cells.push_back(*visited);
        at = *visited;
    }
}

}  // namespace

WorkflowReport run_workflow(std::shared_ptr<const VoxelGrid> max_grid,
                            const Trajectory& trajectory, const RobotModel& robot,
                            const WorkflowOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    trajectory.validate();
    robot.validate();

    MultiResEnvironment env =
        MultiResEnvironment::initial_abstraction(std::move(max_grid), options.base_resolution);
    const std::uint64_t iteration_cap =
        options.max_iterations != 0
            ? options.max_iterations
            : env.refinement_bound() + trajectory.poses.size();

    const RefinementPolicy policy = options.multi_voxel_refinement
                                        ? RefinementPolicy::kMultiVoxel
                                        : RefinementPolicy::kSingleVoxel;
    WorkflowReport report;

    const auto finish = [&](std::optional<Counterexample> cex) {
        report.counterexample = std::move(cex);
        report.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    };

    for (;;) {
        if (static_cast<std::uint64_t>(report.iterations) >= iteration_cap)
            throw Error("run_workflow: iteration cap " + std::to_string(iteration_cap) +
                        " exceeded");
        ++report.iterations;

        const CheckOutcome outcome = check_trajectory(env, trajectory, robot);
        report.cell_checks_total += outcome.cell_checks;

        IterationRecord record;
        record.iteration = report.iterations;
        record.cell_checks = outcome.cell_checks;
        if (outcome.counterexample) record.counterexample_length = outcome.counterexample->length;

        if (outcome.passed()) {
            report.iteration_log.push_back(std::move(record));
            return finish(std::nullopt);
        }

        const CounterexampleAnalysis analysis =
            analyze_counterexample(outcome, env.max_resolution(), policy);
        if (const auto* real = std::get_if<RealCounterexample>(&analysis)) {
            report.iteration_log.push_back(std::move(record));
            return finish(real->counterexample);
        }

        const auto& proposal = std::get<RefinementProposal>(analysis);
        if (options.cascade_fully_solid) {
            const bool hopeless =
                std::any_of(proposal.cells.begin(), proposal.cells.end(),
                            [&](const CellId& cell) { return env.fully_solid_at_max(cell); });
            if (hopeless) {
                // Every constituent of the cell is solid, so refinement can
                // only rediscover this violation; report it now.
                report.iteration_log.push_back(std::move(record));
                return finish(outcome.counterexample);
            }
        }

        for (const CellId& cell : proposal.cells) {
            env = env.refine(cell);
            ++report.refinements;
            record.refined_cells.push_back(cell);
            if (options.cascade_fully_solid) {
                cascade_descent(env, cell, outcome.counterexample->pose, robot, report, record);
            }
        }
        report.iteration_log.push_back(std::move(record));
    }
}

CheckOutcome run_direct(std::shared_ptr<const VoxelGrid> max_grid, std::uint32_t resolution,
                        const Trajectory& trajectory, const RobotModel& robot) {
    const MultiResEnvironment env =
        MultiResEnvironment::initial_abstraction(std::move(max_grid), resolution);
    return check_trajectory(env, trajectory, robot);
}

}  // namespace voxcheck
