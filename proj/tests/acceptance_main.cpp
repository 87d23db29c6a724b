// Acceptance gate: one self-contained check per shipped guarantee, one
// pass/fail line each, nonzero exit if anything fails.

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "voxcheck/scenario.hpp"
#include "voxcheck/smv.hpp"
#include "voxcheck/workflow.hpp"

using namespace voxcheck;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Criterion {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& message) {
        if (!condition && ok) {
            ok = false;
            detail.str(message);
        } else if (!condition) {
            (void)message;  // keep the first failure message
        }
    }
};

template <typename Body>
void criterion(int number, const std::string& title, Body&& body) {
    Criterion c;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail.str(std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << number << " (" << title << "): " << (c.ok ? "PASS" : "FAIL");
    const std::string detail = c.detail.str();
    if (!detail.empty()) std::cout << " — " << detail;
    std::cout << "\n" << std::flush;
    if (!c.ok) ++failures;
}

std::filesystem::path scenario_path(const char* name) {
    return std::filesystem::path(SCENARIO_DIR) / name;
}

// Results shared between the oracle-equivalence and length-invariance checks.
struct SceneOutcome {
    bool failed = false;
    std::vector<int> lengths;  // one entry per tested base resolution, Fail scenes only
};
std::vector<SceneOutcome> scene_outcomes;

// Descendant index range computed from scratch (no library index algebra).
struct Span {
    std::uint32_t lo, hi;
};
Span span_of(std::uint32_t index, std::uint32_t level, std::uint32_t target) {
    const std::uint32_t k = target / level;
    return {index * k, (index + 1) * k - 1};
}

struct LeafRow {
    std::uint32_t level, x, y, z;
    bool solid;
};

std::vector<LeafRow> parse_leaf_table(const std::string& table) {
    std::vector<LeafRow> rows;
    std::istringstream in(table);
    LeafRow row{};
    int solid = 0;
    while (in >> row.level >> row.x >> row.y >> row.z >> solid) {
        row.solid = solid != 0;
        rows.push_back(row);
    }
    return rows;
}

bool or_over_descendants(const VoxelGrid& grid, const LeafRow& leaf) {
    const Span sx = span_of(leaf.x, leaf.level, grid.resolution());
    const Span sy = span_of(leaf.y, leaf.level, grid.resolution());
    const Span sz = span_of(leaf.z, leaf.level, grid.resolution());
    for (std::uint32_t x = sx.lo; x <= sx.hi; ++x)
        for (std::uint32_t y = sy.lo; y <= sy.hi; ++y)
            for (std::uint32_t z = sz.lo; z <= sz.hi; ++z)
                if (grid.at(x, y, z)) return true;
    return false;
}

// Every abstraction of `grid` reachable by `refine_steps` random refinements
// keeps leaf solidity equal to the OR over max-resolution descendants, and its
// solid region covers every solid max voxel.
void check_abstraction(Criterion& c, std::shared_ptr<const VoxelGrid> grid, std::uint32_t base,
                       int refine_steps, std::mt19937_64& rng) {
    MultiResEnvironment env = MultiResEnvironment::initial_abstraction(grid, base);
    for (int step = 0; step <= refine_steps; ++step) {
        const std::vector<LeafRow> leaves = parse_leaf_table(env.leaf_table());
        for (const LeafRow& leaf : leaves) {
            if (leaf.solid != or_over_descendants(*grid, leaf)) {
                c.require(false, "leaf solidity is not the OR over descendants at level " +
                                     std::to_string(leaf.level));
                return;
            }
        }
        // containment: every solid max voxel lies inside some solid leaf
        for (std::uint32_t x = 0; x < grid->resolution(); ++x) {
            for (std::uint32_t y = 0; y < grid->resolution(); ++y) {
                for (std::uint32_t z = 0; z < grid->resolution(); ++z) {
                    if (!grid->at(x, y, z)) continue;
                    bool covered = false;
                    for (const LeafRow& leaf : leaves) {
                        if (!leaf.solid) continue;
                        const Span sx = span_of(leaf.x, leaf.level, grid->resolution());
                        const Span sy = span_of(leaf.y, leaf.level, grid->resolution());
                        const Span sz = span_of(leaf.z, leaf.level, grid->resolution());
                        if (x >= sx.lo && x <= sx.hi && y >= sy.lo && y <= sy.hi && z >= sz.lo &&
                            z <= sz.hi) {
                            covered = true;
                            break;
                        }
                    }
                    if (!covered) {
                        c.require(false, "solid max voxel not covered by any solid leaf");
                        return;
                    }
                }
            }
        }
        if (step == refine_steps) break;
        // refine a random splittable leaf
        std::vector<CellId> candidates;
        for (const LeafRow& leaf : leaves)
            if (leaf.level < grid->resolution())
                candidates.push_back({leaf.level, leaf.x, leaf.y, leaf.z});
        if (candidates.empty()) break;
        env = env.refine(candidates[rng() % candidates.size()]);
    }
}

}  // namespace

int main() {
    criterion(1, "oracle equivalence on randomized scenes", [](Criterion& c) {
        const auto start = std::chrono::steady_clock::now();
        const std::uint32_t maxes[] = {8, 16, 32};
        const std::uint32_t bases[] = {2, 4, 8};
        int fail_scenes = 0;
        int pass_scenes = 0;
        scene_outcomes.clear();
        for (std::uint64_t seed = 0; seed < 210; ++seed) {
            const auto problem = oracle::random_problem(seed, maxes[seed % 3]);
            const auto expected =
                oracle::brute_force_check(*problem.grid, problem.trajectory, problem.robot);
            SceneOutcome outcome;
            outcome.failed = expected.failed;
            for (const std::uint32_t base : bases) {
                WorkflowOptions options;
                options.base_resolution = base;
                const auto report =
                    run_workflow(problem.grid, problem.trajectory, problem.robot, options);
                c.require(report.passed() == !expected.failed,
                          "verdict mismatch at seed " + std::to_string(seed) + " base " +
                              std::to_string(base));
                if (!c.ok) return;
                if (expected.failed) {
                    const Counterexample& cex = *report.counterexample;
                    c.require(cex.length == expected.length,
                              "length mismatch at seed " + std::to_string(seed));
                    c.require(cex.pose.x == expected.pose.x && cex.pose.y == expected.pose.y &&
                                  cex.pose.z == expected.pose.z,
                              "pose mismatch at seed " + std::to_string(seed));
                    if (!c.ok) return;
                    outcome.lengths.push_back(cex.length);
                }
            }
            scene_outcomes.push_back(std::move(outcome));
            (expected.failed ? fail_scenes : pass_scenes) += 1;
        }
        const double elapsed = seconds_since(start);
        c.require(fail_scenes >= 20 && pass_scenes >= 20,
                  "degenerate sample: " + std::to_string(fail_scenes) + " fail / " +
                      std::to_string(pass_scenes) + " pass");
        c.require(elapsed < 120.0, "exceeded the 2 minute budget");
        if (c.ok)
            c.detail << "210 scenes (" << fail_scenes << " fail, " << pass_scenes
                     << " pass), bases {2,4,8}, " << elapsed << " s";
    });

    criterion(2, "counterexample length invariant across bases", [](Criterion& c) {
        c.require(!scene_outcomes.empty(), "no scene results from criterion 1");
        int checked = 0;
        for (const SceneOutcome& outcome : scene_outcomes) {
            if (!outcome.failed) continue;
            for (const int length : outcome.lengths)
                c.require(length == outcome.lengths.front(),
                          "length differs between base resolutions");
            ++checked;
        }
        if (c.ok) c.detail << checked << " Fail scenes, identical length at every base";
    });

    criterion(3, "abstractions over-approximate the max grid", [](Criterion& c) {
        std::mt19937_64 rng(2026);
        int environments = 0;
        // exhaustive leaf audit at max resolution 8, every base
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const double density = 0.02 + 0.1 * double(seed % 5);
            const auto grid =
                std::make_shared<VoxelGrid>(oracle::random_grid(seed, 8, density));
            for (const std::uint32_t base : {2u, 4u, 8u}) {
                check_abstraction(c, grid, base, 12, rng);
                ++environments;
                if (!c.ok) return;
            }
        }
        // randomized audit at max resolution 32
        for (std::uint64_t seed = 50; seed < 55; ++seed) {
            const auto grid =
                std::make_shared<VoxelGrid>(oracle::random_grid(seed, 32, 0.01));
            for (const std::uint32_t base : {4u, 8u}) {
                check_abstraction(c, grid, base, 20, rng);
                ++environments;
                if (!c.ok) return;
            }
        }
        if (c.ok) c.detail << environments << " abstractions audited leaf by leaf";
    });

    criterion(4, "descendant index algebra", [](Criterion& c) {
        const IndexRange r = descendant_range(CellId{4, 0, 1, 0}, 128);
        c.require(r.lo_x == 0 && r.hi_x == 31, "x range wrong");
        c.require(r.lo_y == 32 && r.hi_y == 63, "y range wrong");
        c.require(r.lo_z == 0 && r.hi_z == 31, "z range wrong");
        if (c.ok) c.detail << "(4,0,1,0) -> level 128 x[0,31] y[32,63] z[0,31]";
    });

    criterion(5, "refinement does a fraction of the direct work", [](Criterion& c) {
        const auto start = std::chrono::steady_clock::now();
        std::ostringstream ratios;
        for (const char* name : {"collision.json", "near_miss.json", "safe.json"}) {
            const Scenario sc = load_scenario(scenario_path(name));
            c.require(sc.max_grid->resolution() == 64, "bundled scenario is not 64^3");

            WorkflowOptions options;
            options.base_resolution = 4;
            const auto report = run_workflow(sc.max_grid, sc.trajectory, sc.robot, options);
            const auto direct = run_direct(sc.max_grid, 64, sc.trajectory, sc.robot);
            c.require(report.passed() == direct.passed(),
                      std::string(name) + ": workflow and direct verdicts differ");

            const auto expected = oracle::brute_force_check(*sc.max_grid, sc.trajectory, sc.robot);
            c.require(report.passed() == !expected.failed,
                      std::string(name) + ": verdict differs from brute force");
            if (expected.failed && report.counterexample) {
                c.require(report.counterexample->length == expected.length,
                          std::string(name) + ": length differs from brute force");
            }

            const double ratio =
                double(report.cell_checks_total) / double(direct.cell_checks);
            ratios << name << " " << int(ratio * 100.0 + 0.5) << "% ";
            if (std::string(name) != "near_miss.json") {
                c.require(ratio <= 0.25,
                          std::string(name) + ": workflow used " +
                              std::to_string(int(ratio * 100)) + "% of the direct cell checks");
            }
            if (!c.ok) return;
        }
        const double elapsed = seconds_since(start);
        c.require(elapsed < 300.0, "exceeded the 5 minute budget");
        if (c.ok) c.detail << ratios.str() << "of direct@64, " << elapsed << " s";
    });

    criterion(6, "refinement count shrinks as the base grows", [](Criterion& c) {
        const Scenario sc = load_scenario(scenario_path("collision.json"));
        std::vector<int> counts;
        for (const std::uint32_t base : {2u, 4u, 8u, 16u}) {
            WorkflowOptions options;
            options.base_resolution = base;
            counts.push_back(run_workflow(sc.max_grid, sc.trajectory, sc.robot, options)
                                 .refinements);
        }
        for (std::size_t i = 1; i < counts.size(); ++i)
            c.require(counts[i] <= counts[i - 1], "refinement count increased with the base");
        if (c.ok) {
            c.detail << "bases {2,4,8,16} ->";
            for (const int count : counts) c.detail << " " << count;
        }
    });

    criterion(7, "binvox writes read back bit-exact", [](Criterion& c) {
        const std::uint32_t resolutions[] = {2, 4, 8, 16, 32};
        int grids = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const double density = double(seed % 11) / 10.0;  // includes 0.0 and 1.0
            const VoxelGrid grid =
                oracle::random_grid(seed, resolutions[seed % 5], density);
            const std::string bytes = write_binvox(grid);
            const VoxelGrid parsed = parse_binvox(bytes);
            c.require(parsed == grid, "round-trip changed a random grid");
            c.require(write_binvox(parsed) == bytes, "second write differs byte-wise");
            if (!c.ok) return;
            ++grids;
        }
        for (const char* name : {"collision.json", "near_miss.json", "safe.json"}) {
            const Scenario sc = load_scenario(scenario_path(name));
            const std::string bytes = write_binvox(*sc.max_grid);
            c.require(parse_binvox(bytes) == *sc.max_grid,
                      std::string(name) + ": environment round-trip mismatch");
            if (!c.ok) return;
            ++grids;
        }
        if (c.ok) c.detail << grids << " grids, parse(write(g)) == g bit for bit";
    });

    criterion(8, "counterexample log and module export round-trip", [](Criterion& c) {
        int round_trips = 0;
        for (std::uint64_t seed = 0; round_trips < 100 && seed < 600; ++seed) {
            const auto problem = oracle::random_problem(seed, 16);
            const auto outcome =
                run_direct(problem.grid, 16, problem.trajectory, problem.robot);
            if (outcome.passed()) continue;
            const Counterexample& original = *outcome.counterexample;
            const Counterexample parsed =
                parse_counterexample_log(serialize_counterexample_log(original));
            c.require(parsed.length == original.length, "log round-trip changed the length");
            c.require(parsed.violating_cell == original.violating_cell,
                      "log round-trip changed the violating cell");
            if (!c.ok) return;
            ++round_trips;
        }
        c.require(round_trips >= 100, "not enough Fail cases: " + std::to_string(round_trips));

        const auto problem = oracle::random_problem(3, 16);
        const auto build = [&] {
            MultiResEnvironment env = MultiResEnvironment::initial_abstraction(problem.grid, 4);
            for (const CellId& cell : {CellId{4, 0, 0, 0}, CellId{4, 3, 3, 3}, CellId{8, 0, 0, 0}})
                env = env.refine(cell);
            return env;
        };
        const MultiResEnvironment env = build();
        const std::string once = export_smv(env, problem.trajectory, problem.robot);
        c.require(once == export_smv(env, problem.trajectory, problem.robot),
                  "repeated export differs");
        c.require(once == export_smv(build(), problem.trajectory, problem.robot),
                  "export from a rebuilt environment differs");
        if (c.ok) c.detail << round_trips << " log round-trips, byte-stable module export";
    });

    criterion(9, "base == max collapses to the direct check", [](Criterion& c) {
        const Scenario sc = load_scenario(scenario_path("collision.json"));
        int cells = 0;
        for (const std::uint32_t resolution : {2u, 4u, 8u, 16u}) {
            const auto scenario_grid =
                std::make_shared<VoxelGrid>(abstract_grid(*sc.max_grid, resolution));
            for (std::uint64_t seed = 40; seed < 43; ++seed) {
                const auto problem = oracle::random_problem(seed, resolution);
                WorkflowOptions options;
                options.base_resolution = resolution;
                const auto report =
                    run_workflow(problem.grid, problem.trajectory, problem.robot, options);
                const auto direct =
                    run_direct(problem.grid, resolution, problem.trajectory, problem.robot);
                c.require(report.passed() == direct.passed(), "verdict differs on the diagonal");
                c.require(report.cell_checks_total == direct.cell_checks,
                          "cell checks differ on the diagonal");
                if (report.counterexample)
                    c.require(report.counterexample->length == direct.counterexample->length,
                              "length differs on the diagonal");
                if (!c.ok) return;
                ++cells;
            }
            WorkflowOptions options;
            options.base_resolution = resolution;
            const auto report = run_workflow(scenario_grid, sc.trajectory, sc.robot, options);
            const auto direct = run_direct(scenario_grid, resolution, sc.trajectory, sc.robot);
            c.require(report.passed() == direct.passed(), "verdict differs on the diagonal");
            c.require(report.cell_checks_total == direct.cell_checks,
                      "cell checks differ on the diagonal");
            if (report.counterexample && direct.counterexample)
                c.require(report.counterexample->length == direct.counterexample->length,
                          "length differs on the diagonal");
            if (!c.ok) return;
            ++cells;
        }
        if (c.ok) c.detail << cells << " diagonal runs, verdict/length/cell checks equal";
    });

    if (failures == 0) {
        std::cout << "all acceptance criteria hold\n";
        return 0;
    }
    std::cout << failures << " acceptance criteria failed\n";
    return 1;
}
