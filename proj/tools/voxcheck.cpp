#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxcheck/scenario.hpp"
#include "voxcheck/smv.hpp"
#include "voxcheck/workflow.hpp"

namespace {

using namespace voxcheck;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

void warn_outside_cube(const Scenario& scenario) {
    const auto outside = poses_outside_cube(scenario.trajectory, scenario.max_grid->cube());
    if (outside.empty()) return;
    std::cerr << "warning: " << outside.size()
              << " trajectory pose(s) lie outside the environment cube (first at step "
              << outside.front() + 1 << "); they visit no cells\n";
}

// The scenario grid, reduced to `max` when a coarser max resolution is asked for.
std::shared_ptr<const VoxelGrid> grid_at(const Scenario& scenario, std::uint32_t max) {
    if (max == scenario.max_grid->resolution()) return scenario.max_grid;
    return std::make_shared<VoxelGrid>(abstract_grid(*scenario.max_grid, max));
}

json cell_record(const CellId& cell) {
    return json{{"level", cell.level}, {"x", cell.x}, {"y", cell.y}, {"z", cell.z}};
}

json report_record(const WorkflowReport& report) {
    json rec{{"result", report.passed() ? "pass" : "fail"},
             {"iterations", report.iterations},
             {"refinements", report.refinements},
             {"cell_checks", report.cell_checks_total},
             {"wall_seconds", report.wall_seconds}};
    if (report.counterexample) {
        const Counterexample& cex = *report.counterexample;
        rec["length"] = cex.length;
        rec["pose"] = {cex.pose.x, cex.pose.y, cex.pose.z};
        rec["violating_cell"] = cell_record(cex.violating_cell);
    }
    json log = json::array();
    for (const IterationRecord& it : report.iteration_log) {
        json entry{{"iteration", it.iteration}, {"cell_checks", it.cell_checks}};
        if (it.counterexample_length) entry["length"] = *it.counterexample_length;
        json refined = json::array();
        for (const CellId& cell : it.refined_cells) refined.push_back(cell_record(cell));
        entry["refined"] = std::move(refined);
        log.push_back(std::move(entry));
    }
    rec["iteration_log"] = std::move(log);
    return rec;
}

void print_report(const WorkflowReport& report) {
    std::cout << "verdict      " << (report.passed() ? "Pass" : "Fail") << "\n";
    if (report.counterexample)
        std::cout << "length       " << report.counterexample->length << "\n";
    std::cout << "iterations   " << report.iterations << "\n";
    std::cout << "refinements  " << report.refinements << "\n";
    std::cout << "cell checks  " << report.cell_checks_total << "\n";
    std::cout << "wall seconds " << report.wall_seconds << "\n";
    if (report.counterexample) std::cout << "\n" << format_counterexample(*report.counterexample);
}

WorkflowReport report_from_direct(const CheckOutcome& outcome, double wall_seconds) {
    WorkflowReport report;
    report.counterexample = outcome.counterexample;
    report.iterations = 1;
    report.refinements = 0;
    report.cell_checks_total = outcome.cell_checks;
    report.wall_seconds = wall_seconds;
    IterationRecord record;
    record.iteration = 1;
    record.cell_checks = outcome.cell_checks;
    if (outcome.counterexample) record.counterexample_length = outcome.counterexample->length;
    report.iteration_log.push_back(std::move(record));
    return report;
}

// Rebuild the final refined environment by replaying the run's refinements.
MultiResEnvironment replay_environment(std::shared_ptr<const VoxelGrid> grid,
                                       std::uint32_t base, const WorkflowReport& report) {
    MultiResEnvironment env = MultiResEnvironment::initial_abstraction(std::move(grid), base);
    for (const IterationRecord& it : report.iteration_log)
        for (const CellId& cell : it.refined_cells) env = env.refine(cell);
    return env;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

struct MatrixCell {
    std::uint32_t base = 0;
    std::uint32_t max = 0;
    WorkflowReport report;
};

int run_cli(int argc, char** argv) {
    CLI::App app{"Trajectory collision verification on voxel environments with "
                 "counterexample-guided voxel refinement"};
    app.require_subcommand(1);

    // --- voxelize ---
    auto* voxelize_cmd = app.add_subcommand(
        "voxelize", "Voxelize a primitive scene description into a binvox file");
    std::string scene_path;
    std::uint32_t vox_resolution = 64;
    std::string vox_out;
    voxelize_cmd->add_option("scene", scene_path, "scene config (JSON)")->required();
    voxelize_cmd->add_option("--resolution", vox_resolution, "grid resolution (power of two)")
        ->required();
    voxelize_cmd->add_option("--out", vox_out, "output binvox path")->required();

    // --- verify ---
    auto* verify_cmd =
        app.add_subcommand("verify", "Verify a scenario's trajectory against its environment");
    std::string scenario_path;
    std::uint32_t base = 4;
    std::uint32_t max_override = 0;
    bool no_refine = false;
    bool multi_voxel = false;
    bool cascade = false;
    bool as_json = false;
    verify_cmd->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
    verify_cmd->add_option("--base", base, "base resolution of the initial abstraction");
    verify_cmd->add_option("--max", max_override,
                           "override max resolution (reduces the environment grid)");
    verify_cmd->add_flag("--no-refine", no_refine,
                         "single direct check at --base, no refinement loop");
    verify_cmd->add_flag("--multi-voxel", multi_voxel,
                         "refine all violating cells of the failing step at once");
    verify_cmd->add_flag("--cascade", cascade,
                         "fail fast on fully solid cells; descend through all-solid children");
    verify_cmd->add_flag("--json", as_json, "print a machine-readable record instead of a table");

    // --- matrix ---
    auto* matrix_cmd = app.add_subcommand(
        "matrix", "Run every base/max resolution combination (base <= max)");
    std::string matrix_scenario;
    std::vector<std::uint32_t> bases{2, 4, 8, 16};
    std::vector<std::uint32_t> maxes;
    unsigned workers = 0;
    std::string csv_path;
    bool matrix_json = false;
    bool matrix_multi_voxel = false;
    bool matrix_cascade = false;
    matrix_cmd->add_option("scenario", matrix_scenario, "scenario file (JSON)")->required();
    matrix_cmd->add_option("--bases", bases, "base resolutions")->delimiter(',');
    matrix_cmd->add_option("--maxes", maxes, "max resolutions (default: the scenario's)")
        ->delimiter(',');
    matrix_cmd->add_option("--workers", workers, "parallel workers (default: hardware)");
    matrix_cmd->add_option("--csv", csv_path, "also write the records as CSV");
    matrix_cmd->add_flag("--multi-voxel", matrix_multi_voxel, "enable multi-voxel refinement");
    matrix_cmd->add_flag("--cascade", matrix_cascade, "enable cascade refinement");
    matrix_cmd->add_flag("--json", matrix_json, "print records as JSON");

    // --- export ---
    auto* export_cmd = app.add_subcommand(
        "export", "Export the (refined) environment: model-checker input, leaf table, "
                  "or per-level binvox snapshots");
    std::string export_scenario;
    std::uint32_t export_base = 4;
    std::uint32_t export_max = 0;
    std::string format = "smv";
    std::string export_out;
    bool export_no_refine = false;
    bool export_multi_voxel = false;
    bool export_cascade = false;
    export_cmd->add_option("scenario", export_scenario, "scenario file (JSON)")->required();
    export_cmd->add_option("--base", export_base, "base resolution");
    export_cmd->add_option("--max", export_max, "override max resolution");
    export_cmd->add_option("--format", format, "smv | leaves | binvox-per-level")
        ->check(CLI::IsMember({"smv", "leaves", "binvox-per-level"}));
    export_cmd->add_option("--out", export_out, "output file (smv, leaves) or directory")
        ->required();
    export_cmd->add_flag("--no-refine", export_no_refine,
                         "export the initial abstraction, skipping the refinement loop");
    export_cmd->add_flag("--multi-voxel", export_multi_voxel, "enable multi-voxel refinement");
    export_cmd->add_flag("--cascade", export_cascade, "enable cascade refinement");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
        app.exit(e);
        return kExitError;
    }

    try {
        if (voxelize_cmd->parsed()) {
            const SceneDescription scene = load_scene_config(scene_path);
            const VoxelGrid grid = voxelize(scene, vox_resolution);
            write_binvox_file(grid, vox_out);
            std::cout << "wrote " << vox_out << " (" << grid.resolution() << "^3, "
                      << grid.solid_count() << " solid)\n";
            return kExitPass;
        }

        if (verify_cmd->parsed()) {
            const Scenario scenario = load_scenario(scenario_path);
            warn_outside_cube(scenario);
            const std::uint32_t max =
                max_override != 0 ? max_override : scenario.max_grid->resolution();
            if (base > max) throw Error("base resolution exceeds max resolution");
            const auto grid = grid_at(scenario, max);

            WorkflowReport report;
            if (no_refine) {
                const auto start = std::chrono::steady_clock::now();
                const CheckOutcome outcome =
                    run_direct(grid, base, scenario.trajectory, scenario.robot);
                report = report_from_direct(
                    outcome, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                           start)
                                 .count());
            } else {
                WorkflowOptions options;
                options.base_resolution = base;
                options.multi_voxel_refinement = multi_voxel;
                options.cascade_fully_solid = cascade;
                report = run_workflow(grid, scenario.trajectory, scenario.robot, options);
            }

            if (as_json) {
                json rec = report_record(report);
                rec["scenario"] = scenario_path;
                rec["base"] = base;
                rec["max"] = max;
                rec["no_refine"] = no_refine;
                rec["multi_voxel"] = multi_voxel;
                rec["cascade"] = cascade;
                std::cout << rec.dump(2) << "\n";
            } else {
                print_report(report);
            }
            return report.passed() ? kExitPass : kExitFail;
        }

        if (matrix_cmd->parsed()) {
            const Scenario scenario = load_scenario(matrix_scenario);
            warn_outside_cube(scenario);
            if (maxes.empty()) maxes = {scenario.max_grid->resolution()};

            std::vector<MatrixCell> cells;
            for (const std::uint32_t m : maxes)
                for (const std::uint32_t b : bases)
                    if (b <= m) cells.push_back(MatrixCell{b, m, {}});

            const unsigned worker_count = std::max(
                1u, workers != 0 ? workers
                                 : std::min<unsigned>(std::thread::hardware_concurrency(),
                                                      static_cast<unsigned>(cells.size())));
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            std::atomic<bool> failed{false};
            std::string failure;
            std::mutex failure_mutex;
            for (unsigned w = 0; w < worker_count; ++w) {
                pool.emplace_back([&] {
                    for (;;) {
                        const std::size_t i = next.fetch_add(1);
                        if (i >= cells.size() || failed.load()) return;
                        try {
                            MatrixCell& cell = cells[i];
                            WorkflowOptions options;
                            options.base_resolution = cell.base;
                            options.multi_voxel_refinement = matrix_multi_voxel;
                            options.cascade_fully_solid = matrix_cascade;
                            cell.report = run_workflow(grid_at(scenario, cell.max),
                                                       scenario.trajectory, scenario.robot,
                                                       options);
                        } catch (const std::exception& e) {
                            std::lock_guard<std::mutex> lock(failure_mutex);
                            failed = true;
                            failure = e.what();
                            return;
                        }
                    }
                });
            }
            for (std::thread& t : pool) t.join();
            if (failed) throw Error("matrix run failed: " + failure);

            json records = json::array();
            for (const MatrixCell& cell : cells) {
                json rec = report_record(cell.report);
                rec["base"] = cell.base;
                rec["max"] = cell.max;
                records.push_back(std::move(rec));
            }

            if (!csv_path.empty()) {
                std::ostringstream csv;
                csv << "base,max,result,length,iterations,refinements,cell_checks,"
                       "wall_seconds\n";
                for (const MatrixCell& cell : cells) {
                    csv << cell.base << "," << cell.max << ","
                        << (cell.report.passed() ? "pass" : "fail") << ",";
                    if (cell.report.counterexample) csv << cell.report.counterexample->length;
                    csv << "," << cell.report.iterations << "," << cell.report.refinements << ","
                        << cell.report.cell_checks_total << "," << cell.report.wall_seconds
                        << "\n";
                }
                write_text_file(csv_path, csv.str());
            }

            if (matrix_json) {
                std::cout << records.dump(2) << "\n";
            } else {
                std::cout << std::left << std::setw(6) << "base" << std::setw(6) << "max"
                          << std::setw(9) << "verdict" << std::setw(8) << "length"
                          << std::setw(13) << "refinements" << std::setw(13) << "cell_checks"
                          << "wall_seconds\n";
                for (const MatrixCell& cell : cells) {
                    std::cout << std::left << std::setw(6) << cell.base << std::setw(6)
                              << cell.max << std::setw(9)
                              << (cell.report.passed() ? "Pass" : "Fail");
                    if (cell.report.counterexample)
                        std::cout << std::setw(8) << cell.report.counterexample->length;
                    else
                        std::cout << std::setw(8) << "-";
                    std::cout << std::setw(13) << cell.report.refinements << std::setw(13)
                              << cell.report.cell_checks_total << cell.report.wall_seconds
                              << "\n";
                }
            }
            return kExitPass;
        }

        if (export_cmd->parsed()) {
            const Scenario scenario = load_scenario(export_scenario);
            warn_outside_cube(scenario);
            const std::uint32_t max =
                export_max != 0 ? export_max : scenario.max_grid->resolution();
            if (export_base > max) throw Error("base resolution exceeds max resolution");
            const auto grid = grid_at(scenario, max);

            MultiResEnvironment env =
                MultiResEnvironment::initial_abstraction(grid, export_base);
            if (!export_no_refine) {
                WorkflowOptions options;
                options.base_resolution = export_base;
                options.multi_voxel_refinement = export_multi_voxel;
                options.cascade_fully_solid = export_cascade;
                const WorkflowReport report =
                    run_workflow(grid, scenario.trajectory, scenario.robot, options);
                env = replay_environment(grid, export_base, report);
            }

            const std::filesystem::path out = export_out;
            if (format == "smv") {
                write_text_file(out, export_smv(env, scenario.trajectory, scenario.robot));
                std::cout << "wrote " << out.string() << "\n";
            } else if (format == "leaves") {
                write_text_file(out, env.leaf_table());
                std::cout << "wrote " << out.string() << "\n";
            } else {
                std::filesystem::create_directories(out);
                for (std::uint32_t level = env.base_resolution(); level <= env.max_resolution();
                     level *= 2) {
                    const std::filesystem::path file =
                        out / ("level_" + std::to_string(level) + ".binvox");
                    write_binvox_file(env.render_at(level), file.string());
                    std::cout << "wrote " << file.string() << "\n";
                }
            }
            return kExitPass;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
