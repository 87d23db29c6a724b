#include "voxcheck/checker.hpp"

#include <algorithm>
#include <sstream>

namespace voxcheck {

CheckOutcome check_trajectory(const MultiResEnvironment& env, const Trajectory& trajectory,
                              const RobotModel& robot) {
    trajectory.validate();
    robot.validate();

    const std::uint64_t checks_before = env.cell_checks();
    std::vector<std::pair<int, Vec3>> trace;
    trace.reserve(trajectory.poses.size());

    for (std::size_t i = 0; i < trajectory.poses.size(); ++i) {
        const int step = static_cast<int>(i) + 1;
        const Vec3& pose = trajectory.poses[i];
        trace.emplace_back(step, pose);

        std::vector<CellId> violators;
        for (const LeafHit& hit : visited_cells(env, pose, robot)) {
            if (hit.solid) violators.push_back(hit.cell);
        }
        if (violators.empty()) continue;

        std::sort(violators.begin(), violators.end());
        Counterexample cex;
        cex.length = step;
        cex.pose = pose;
        cex.violating_cell = violators.front();
        cex.all_violating_cells = std::move(violators);
        cex.trace = std::move(trace);

        CheckOutcome outcome;
        outcome.counterexample = std::move(cex);
        outcome.cell_checks = env.cell_checks() - checks_before;
        return outcome;
    }

    CheckOutcome outcome;
    outcome.cell_checks = env.cell_checks() - checks_before;
    return outcome;
}

CounterexampleAnalysis analyze_counterexample(const CheckOutcome& outcome,
                                              std::uint32_t max_resolution,
                                              RefinementPolicy policy) {
    if (!outcome.counterexample)
        throw Error("analyze_counterexample: outcome has no counterexample");

    const Counterexample& cex = *outcome.counterexample;
    if (cex.violating_cell.level == max_resolution) return RealCounterexample{cex};

    RefinementProposal proposal;
    if (policy == RefinementPolicy::kSingleVoxel) {
        proposal.cells.push_back(cex.violating_cell);
    } else {
        for (const CellId& cell : cex.all_violating_cells) {
            if (cell.level < max_resolution) proposal.cells.push_back(cell);
        }
    }
    return proposal;
}

std::string format_counterexample(const Counterexample& cex) {
    std::ostringstream out;
    out << "counterexample of length " << cex.length << "\n";
    out << "  violating cell: " << to_string(cex.violating_cell) << "\n";
    if (cex.all_violating_cells.size() > 1) {
        out << "  all violating cells:";
        for (const CellId& cell : cex.all_violating_cells) out << " " << to_string(cell);
        out << "\n";
    }
    out << "  trace:\n";
    for (const auto& [step, pose] : cex.trace) {
        out << "    state " << step << ": pose (" << pose.x << ", " << pose.y << ", " << pose.z
            << ")";
        if (step == cex.length) out << "  <- collision";
        out << "\n";
    }
    return out.str();
}

}  // namespace voxcheck
