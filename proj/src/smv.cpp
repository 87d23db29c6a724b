#include "voxcheck/smv.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <vector>

namespace voxcheck {

namespace {

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void emit_bool_array(std::ostringstream& out, const std::string& name,
                     const std::vector<bool>& values) {
    out << "  " << name << " := [\n";
    for (std::size_t i = 0; i < values.size(); i += 16) {
        const std::size_t end = std::min(i + 16, values.size());
        out << "    ";
        for (std::size_t j = i; j < end; ++j) {
            out << (values[j] ? "TRUE" : "FALSE");
            if (j + 1 < values.size()) out << ",";
            if (j + 1 < end) out << " ";
        }
        out << "\n";
    }
    out << "  ];\n";
}

// Array reference selecting the entry that stores this leaf's solidity.
std::string leaf_entry(const MultiResEnvironment& env, const CellId& leaf) {
    if (leaf.level == env.base_resolution()) {
        const std::uint32_t d = env.base_resolution();
        const std::size_t idx = (static_cast<std::size_t>(leaf.x) * d + leaf.y) * d + leaf.z;
        return "env_base[" + std::to_string(idx) + "]";
    }
    const CellId parent{leaf.level / 2, leaf.x / 2, leaf.y / 2, leaf.z / 2};
    const std::size_t idx = child_index(leaf.x & 1, leaf.y & 1, leaf.z & 1);
    return "env_r" + std::to_string(parent.level) + "_" + std::to_string(parent.x) + "_" +
           std::to_string(parent.y) + "_" + std::to_string(parent.z) + "[" +
           std::to_string(idx) + "]";
}

void emit_index_case(std::ostringstream& out, const std::string& name,
                     const std::map<int, std::string>& arms, const std::string& fallback) {
    out << "  " << name << " :=\n    case\n";
    for (const auto& [step, expr] : arms) {
        out << "      step = " << step << " : " << expr << ";\n";
    }
    out << "      TRUE : " << fallback << ";\n    esac;\n";
}

}  // namespace

std::string export_smv(const MultiResEnvironment& env, const Trajectory& trajectory,
                       const RobotModel& robot) {
    trajectory.validate();
    robot.validate();
    const int n = static_cast<int>(trajectory.poses.size());

    // Index structure: which array entries each step consults.
    std::map<int, std::string> collision_arms;
    std::map<int, std::string> viol_level, viol_x, viol_y, viol_z;
    for (int step = 1; step <= n; ++step) {
        const std::vector<LeafHit> visited =
            visited_cells(env, trajectory.poses[static_cast<std::size_t>(step - 1)], robot);
        if (visited.empty()) continue;
        std::string expr;
        for (const LeafHit& hit : visited) {
            if (!expr.empty()) expr += " | ";
            expr += leaf_entry(env, hit.cell);
        }
        collision_arms[step] = expr;
        const auto solid = std::find_if(visited.begin(), visited.end(),
                                        [](const LeafHit& hit) { return hit.solid; });
        if (solid != visited.end()) {
            viol_level[step] = std::to_string(solid->cell.level);
            viol_x[step] = std::to_string(solid->cell.x);
            viol_y[step] = std::to_string(solid->cell.y);
            viol_z[step] = std::to_string(solid->cell.z);
        }
    }

    std::ostringstream out;
    out << "MODULE main\n\n";
    out << "VAR\n  step : 1.." << n << ";\n\n";
    out << "ASSIGN\n  init(step) := 1;\n";
    if (n == 1) {
        out << "  next(step) := step;\n";
    } else {
        out << "  next(step) :=\n    case\n      step < " << n
            << " : step + 1;\n      TRUE : step;\n    esac;\n";
    }
    out << "\nDEFINE\n";

    const VoxelGrid base = env.render_at(env.base_resolution());
    std::vector<bool> base_values;
    base_values.reserve(base.voxel_count());
    for (std::uint32_t x = 0; x < base.resolution(); ++x)
        for (std::uint32_t y = 0; y < base.resolution(); ++y)
            for (std::uint32_t z = 0; z < base.resolution(); ++z)
                base_values.push_back(base.at(x, y, z));
    emit_bool_array(out, "env_base", base_values);

    for (const auto& [cell, block] : env.refinements()) {
        const std::string name = "env_r" + std::to_string(cell.level) + "_" +
                                 std::to_string(cell.x) + "_" + std::to_string(cell.y) + "_" +
                                 std::to_string(cell.z);
        emit_bool_array(out, name, std::vector<bool>(block.values.begin(), block.values.end()));
    }

    emit_index_case(out, "collision", collision_arms, "FALSE");
    emit_index_case(out, "viol_level", viol_level, "0");
    emit_index_case(out, "viol_x", viol_x, "0");
    emit_index_case(out, "viol_y", viol_y, "0");
    emit_index_case(out, "viol_z", viol_z, "0");

    out << "\nINVARSPEC !collision\n";
    return out.str();
}

std::string serialize_counterexample_log(const Counterexample& cex) {
    std::vector<std::pair<int, Vec3>> states = cex.trace;
    if (states.empty()) states.emplace_back(cex.length, cex.pose);

    std::ostringstream out;
    out << "-- invariant !collision is false\n";
    out << "-- as demonstrated by the following execution sequence\n";
    out << "Trace Description: collision trace\n";
    out << "Trace Type: Counterexample\n";

    std::map<std::string, std::string> prev;
    const auto emit = [&](std::ostringstream& block, const std::string& name,
                          const std::string& value) {
        const auto it = prev.find(name);
        if (it != prev.end() && it->second == value) return;
        prev[name] = value;
        block << "    " << name << " = " << value << "\n";
    };

    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& [step, pose] = states[i];
        const bool last = i + 1 == states.size();
        out << "  -> State: 1." << (i + 1) << " <-\n";
        std::ostringstream block;
        emit(block, "step", std::to_string(step));
        emit(block, "collision", last ? "TRUE" : "FALSE");
        emit(block, "viol_level", std::to_string(last ? cex.violating_cell.level : 0));
        emit(block, "viol_x", std::to_string(last ? cex.violating_cell.x : 0));
        emit(block, "viol_y", std::to_string(last ? cex.violating_cell.y : 0));
        emit(block, "viol_z", std::to_string(last ? cex.violating_cell.z : 0));
        emit(block, "pose_x", format_number(pose.x));
        emit(block, "pose_y", format_number(pose.y));
        emit(block, "pose_z", format_number(pose.z));
        out << block.str();
    }
    return out.str();
}

Counterexample parse_counterexample_log(std::string_view text) {
    struct State {
        int index = 0;
        std::map<std::string, std::string> assignments;
    };
    std::vector<State> states;
    bool invariant_true = false;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::string_view body = line;
        while (!body.empty() && (body.front() == ' ' || body.front() == '\t'))
            body.remove_prefix(1);
        if (body.empty()) continue;

        if (body.rfind("--", 0) == 0) {
            if (body.find("invariant") != std::string_view::npos &&
                body.find("is true") != std::string_view::npos)
                invariant_true = true;
            continue;
        }
        if (body.rfind("-> State:", 0) == 0) {
            std::string_view rest = body.substr(9);
            while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
            const std::size_t dot = rest.find('.');
            if (dot == std::string_view::npos)
                throw LogParseError(LogParseErrorKind::kAmbiguousStepNumbering,
                                    "malformed state header");
            rest = rest.substr(dot + 1);
            int index = 0;
            const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), index);
            if (res.ec != std::errc())
                throw LogParseError(LogParseErrorKind::kAmbiguousStepNumbering,
                                    "unreadable state index");
            states.push_back(State{index, {}});
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos || states.empty()) continue;
        std::string_view name = body.substr(0, eq);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        std::string_view value = body.substr(eq + 1);
        while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
        while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
        auto& assignments = states.back().assignments;
        if (name == "step" && assignments.contains("step"))
            throw LogParseError(LogParseErrorKind::kAmbiguousStepNumbering,
                                "duplicate step assignment in one state");
        assignments[std::string(name)] = std::string(value);
    }

    if (invariant_true || states.empty())
        throw LogParseError(LogParseErrorKind::kNoCounterexample,
                            "log contains no counterexample trace");

    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].index != static_cast<int>(i) + 1)
            throw LogParseError(LogParseErrorKind::kAmbiguousStepNumbering,
                                "state indices are not sequential from 1");
    }

    const auto parse_int = [](const std::string& value, std::uint32_t& out_value) {
        const auto res = std::from_chars(value.data(), value.data() + value.size(), out_value);
        return res.ec == std::errc() && res.ptr == value.data() + value.size();
    };
    const auto parse_double = [](const std::string& value, double& out_value) {
        const auto res = std::from_chars(value.data(), value.data() + value.size(), out_value);
        return res.ec == std::errc() && res.ptr == value.data() + value.size();
    };

    // Carry values forward through states that omit unchanged variables.
    std::map<std::string, std::string> carried;
    Counterexample cex;
    int last_step = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (const auto& [name, value] : states[i].assignments) carried[name] = value;
        Vec3 pose{};
        if (const auto it = carried.find("pose_x"); it != carried.end())
            parse_double(it->second, pose.x);
        if (const auto it = carried.find("pose_y"); it != carried.end())
            parse_double(it->second, pose.y);
        if (const auto it = carried.find("pose_z"); it != carried.end())
            parse_double(it->second, pose.z);
        cex.trace.emplace_back(static_cast<int>(i) + 1, pose);
        if (const auto it = carried.find("step"); it != carried.end()) {
            std::uint32_t step = 0;
            if (!parse_int(it->second, step))
                throw LogParseError(LogParseErrorKind::kAmbiguousStepNumbering,
                                    "unreadable step value");
            last_step = static_cast<int>(step);
        }
    }

    if (last_step != 0 && last_step != static_cast<int>(states.size()))
        throw LogParseError(LogParseErrorKind::kAmbiguousStepNumbering,
                            "final step variable disagrees with the number of states");

    CellId cell{};
    const char* names[] = {"viol_level", "viol_x", "viol_y", "viol_z"};
    std::uint32_t* fields[] = {&cell.level, &cell.x, &cell.y, &cell.z};
    for (int i = 0; i < 4; ++i) {
        const auto it = carried.find(names[i]);
        if (it == carried.end() || !parse_int(it->second, *fields[i]))
            throw LogParseError(LogParseErrorKind::kMissingIndexVariables,
                                std::string("trace lacks voxel index variable ") + names[i]);
    }
    if (cell.level == 0)
        throw LogParseError(LogParseErrorKind::kMissingIndexVariables,
                            "trace names no violated cell (viol_level = 0)");

    cex.length = static_cast<int>(states.size());
    cex.pose = cex.trace.back().second;
    cex.violating_cell = cell;
    cex.all_violating_cells = {cell};
    return cex;
}

}  // namespace voxcheck
