#include <doctest.h>

#include "oracle.hpp"
#include "voxcheck/checker.hpp"

using namespace voxcheck;

namespace {

std::shared_ptr<const VoxelGrid> grid_with(std::uint32_t resolution,
                                           const std::vector<std::array<std::uint32_t, 3>>& solid) {
    VoxelGrid grid(resolution, {0, 0, 0}, 1.0);
    for (const auto& [x, y, z] : solid) grid.set(x, y, z, true);
    return std::make_shared<VoxelGrid>(std::move(grid));
}

RobotModel single_sphere(double radius) {
    RobotModel robot;
    robot.spheres.push_back({{0, 0, 0}, radius});
    return robot;
}

Trajectory line(const Vec3& from, const Vec3& to, int steps) {
    Trajectory t;
    for (int i = 0; i < steps; ++i) {
        const double s = steps == 1 ? 0.0 : double(i) / (steps - 1);
        t.poses.push_back({from.x + s * (to.x - from.x), from.y + s * (to.y - from.y),
                           from.z + s * (to.z - from.z)});
    }
    return t;
}

}  // namespace

TEST_CASE("empty environment always passes, and still does work") {
    const auto env = MultiResEnvironment::initial_abstraction(grid_with(8, {}), 2);
    const auto outcome =
        check_trajectory(env, line({0.1, 0.1, 0.1}, {0.9, 0.9, 0.9}, 10), single_sphere(0.05));
    CHECK(outcome.passed());
    CHECK_FALSE(outcome.counterexample.has_value());
    CHECK(outcome.cell_checks > 0);
    CHECK(outcome.cell_checks == env.cell_checks());
}

TEST_CASE("first-violation semantics: reports the earliest colliding step") {
    // Solid wall at x >= 0.75 (base 4); robot walks into it along x.
    const auto grid = grid_with(4, {{3, 1, 1}});
    const auto env = MultiResEnvironment::initial_abstraction(grid, 4);
    const Trajectory t = line({0.1, 0.4, 0.4}, {0.9, 0.4, 0.4}, 9);  // x = 0.1, 0.2, ..., 0.9
    const auto outcome = check_trajectory(env, t, single_sphere(0.06));
    REQUIRE_FALSE(outcome.passed());
    const Counterexample& cex = *outcome.counterexample;
    // x + 0.06 >= 0.75 first at x = 0.7 -> step 7.
    CHECK(cex.length == 7);
    CHECK(cex.pose.x == doctest::Approx(0.7));
    CHECK(cex.violating_cell == CellId{4, 3, 1, 1});
    REQUIRE(cex.trace.size() == 7);
    CHECK(cex.trace.front().first == 1);
    CHECK(cex.trace.back().first == 7);
    CHECK(cex.trace.back().second.x == doctest::Approx(0.7));
}

TEST_CASE("all violating cells of the step are collected, sorted, smallest first") {
    const auto grid = grid_with(4, {{2, 1, 1}, {2, 2, 1}, {2, 1, 2}});
    const auto env = MultiResEnvironment::initial_abstraction(grid, 4);
    Trajectory t;
    t.poses.push_back({0.6, 0.45, 0.45});  // sphere spans the three solid cells
    const auto outcome = check_trajectory(env, t, single_sphere(0.11));
    REQUIRE_FALSE(outcome.passed());
    const Counterexample& cex = *outcome.counterexample;
    REQUIRE(cex.all_violating_cells.size() == 3);
    CHECK(cex.all_violating_cells[0] == CellId{4, 2, 1, 1});
    CHECK(cex.all_violating_cells[1] == CellId{4, 2, 1, 2});
    CHECK(cex.all_violating_cells[2] == CellId{4, 2, 2, 1});
    CHECK(cex.violating_cell == cex.all_violating_cells.front());
}

TEST_CASE("checker outcome equals brute force on random scenes (property)") {
    for (std::uint64_t seed = 900; seed < 930; ++seed) {
        const auto problem = oracle::random_problem(seed, 16);
        const auto env = MultiResEnvironment::initial_abstraction(problem.grid, 16);
        const auto outcome = check_trajectory(env, problem.trajectory, problem.robot);
        const auto expected =
            oracle::brute_force_check(*problem.grid, problem.trajectory, problem.robot);
        REQUIRE(outcome.passed() == !expected.failed);
        if (expected.failed) {
            const Counterexample& cex = *outcome.counterexample;
            CHECK(cex.length == expected.length);
            CHECK(cex.pose.x == expected.pose.x);
            CHECK(cex.pose.y == expected.pose.y);
            CHECK(cex.pose.z == expected.pose.z);
            CHECK(cex.violating_cell ==
                  CellId{expected.cell.level, expected.cell.x, expected.cell.y, expected.cell.z});
        }
    }
}

TEST_CASE("analyze_counterexample routes by violating-cell level") {
    const auto grid = grid_with(8, {{0, 0, 0}});
    const auto env = MultiResEnvironment::initial_abstraction(grid, 2);
    Trajectory t;
    t.poses.push_back({0.05, 0.05, 0.05});
    const auto outcome = check_trajectory(env, t, single_sphere(0.02));
    REQUIRE_FALSE(outcome.passed());
    CHECK(outcome.counterexample->violating_cell.level == 2);

    SUBCASE("refinable cell yields a single-voxel proposal") {
        const auto analysis = analyze_counterexample(outcome, 8, RefinementPolicy::kSingleVoxel);
        const auto* proposal = std::get_if<RefinementProposal>(&analysis);
        REQUIRE(proposal != nullptr);
        CHECK(proposal->cells == std::vector<CellId>{CellId{2, 0, 0, 0}});
    }
    SUBCASE("multi-voxel proposes every refinable violating cell") {
        CheckOutcome multi = outcome;
        multi.counterexample->all_violating_cells = {
            CellId{2, 0, 0, 0}, CellId{4, 3, 3, 3}, CellId{8, 7, 7, 7}};
        const auto analysis = analyze_counterexample(multi, 8, RefinementPolicy::kMultiVoxel);
        const auto* proposal = std::get_if<RefinementProposal>(&analysis);
        REQUIRE(proposal != nullptr);
        // the max-resolution cell cannot be split and is dropped
        CHECK(proposal->cells ==
              std::vector<CellId>{CellId{2, 0, 0, 0}, CellId{4, 3, 3, 3}});
    }
    SUBCASE("max-level violating cell is a real counterexample") {
        CheckOutcome real = outcome;
        real.counterexample->violating_cell = CellId{8, 0, 0, 0};
        const auto analysis = analyze_counterexample(real, 8, RefinementPolicy::kSingleVoxel);
        const auto* rc = std::get_if<RealCounterexample>(&analysis);
        REQUIRE(rc != nullptr);
        CHECK(rc->counterexample.length == real.counterexample->length);
    }
    SUBCASE("passing outcome cannot be analyzed") {
        CheckOutcome pass;
        CHECK_THROWS_AS(analyze_counterexample(pass, 8, RefinementPolicy::kSingleVoxel), Error);
    }
}

TEST_CASE("format_counterexample lays out step, cell, and trace") {
    Counterexample cex;
    cex.length = 2;
    cex.pose = {0.5, 0.25, 0.125};
    cex.violating_cell = {8, 3, 1, 0};
    cex.all_violating_cells = {{8, 3, 1, 0}, {8, 3, 2, 0}};
    cex.trace = {{1, {0.4, 0.25, 0.125}}, {2, {0.5, 0.25, 0.125}}};
    const std::string text = format_counterexample(cex);
    CHECK(text.find("counterexample of length 2") != std::string::npos);
    CHECK(text.find("violating cell: (8, 3, 1, 0)") != std::string::npos);
    CHECK(text.find("(8, 3, 2, 0)") != std::string::npos);
    CHECK(text.find("state 1") != std::string::npos);
    CHECK(text.find("state 2") != std::string::npos);
    CHECK(text.find("<- collision") != std::string::npos);
}

TEST_CASE("checker work metric counts every returned leaf of every step") {
    const auto grid = grid_with(4, {});
    const auto env = MultiResEnvironment::initial_abstraction(grid, 4);
    const Trajectory t = line({0.125, 0.125, 0.125}, {0.125, 0.125, 0.125}, 3);
    const auto outcome = check_trajectory(env, t, single_sphere(0.05));
    // Sphere strictly inside voxel (0,0,0): exactly one leaf per step.
    CHECK(outcome.cell_checks == 3);
}
