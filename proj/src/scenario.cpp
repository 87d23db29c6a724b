#include "voxcheck/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace voxcheck {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Vec3 parse_vec3(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        throw Error(what + " must be an array of three numbers");
    return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

SceneDescription parse_scene(const json& j) {
    if (!j.is_object()) throw Error("scene must be an object");
    SceneDescription scene;
    if (!j.contains("domain")) throw Error("scene lacks \"domain\"");
    scene.domain.min = parse_vec3(j["domain"].at("min"), "domain.min");
    scene.domain.max = parse_vec3(j["domain"].at("max"), "domain.max");
    for (const json& p : j.value("primitives", json::array())) {
        const std::string kind = p.at("kind").get<std::string>();
        if (kind == "box") {
            BoxPrimitive box;
            box.min = parse_vec3(p.at("min"), "box.min");
            box.max = parse_vec3(p.at("max"), "box.max");
            scene.primitives.emplace_back(box);
        } else if (kind == "sphere") {
            SpherePrimitive sphere;
            sphere.center = parse_vec3(p.at("center"), "sphere.center");
            sphere.radius = p.at("radius").get<double>();
            scene.primitives.emplace_back(sphere);
        } else {
            throw Error("unknown primitive kind \"" + kind + "\"");
        }
    }
    scene.validate();
    return scene;
}

json parse_document(const std::string& text) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw Error("malformed JSON document");
    return j;
}

}  // namespace

SceneDescription parse_scene_config(const std::string& json_text) {
    try {
        return parse_scene(parse_document(json_text));
    } catch (const json::exception& e) {
        throw Error(std::string("bad scene config: ") + e.what());
    }
}

SceneDescription load_scene_config(const std::filesystem::path& path) {
    try {
        return parse_scene_config(read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
    try {
        const json j = parse_document(json_text);
        if (!j.is_object()) throw Error("scenario must be an object");

        const bool has_scene = j.contains("scene");
        const bool has_binvox = j.contains("binvox");
        if (has_scene == has_binvox)
            throw Error("scenario needs exactly one of \"scene\" or \"binvox\"");

        Scenario scenario;
        if (has_scene) {
            if (!j.contains("max_resolution"))
                throw Error("scenario with a scene needs \"max_resolution\"");
            const std::uint32_t resolution = j["max_resolution"].get<std::uint32_t>();
            scenario.max_grid = std::make_shared<VoxelGrid>(
                voxelize(parse_scene(j["scene"]), resolution));
        } else {
            std::filesystem::path file = j["binvox"].get<std::string>();
            if (file.is_relative()) file = base_dir / file;
            auto grid = std::make_shared<VoxelGrid>(read_binvox_file(file.string()));
            if (j.contains("max_resolution") &&
                j["max_resolution"].get<std::uint32_t>() != grid->resolution())
                throw Error("stated max_resolution disagrees with the binvox resolution");
            scenario.max_grid = std::move(grid);
        }

        if (!j.contains("trajectory") || !j["trajectory"].contains("poses"))
            throw Error("scenario lacks \"trajectory.poses\"");
        for (const json& pose : j["trajectory"]["poses"])
            scenario.trajectory.poses.push_back(parse_vec3(pose, "trajectory pose"));
        scenario.trajectory.validate();

        if (!j.contains("robot") || !j["robot"].contains("spheres"))
            throw Error("scenario lacks \"robot.spheres\"");
        for (const json& s : j["robot"]["spheres"]) {
            RobotModel::SphereShape shape;
            shape.offset = s.contains("offset") ? parse_vec3(s["offset"], "sphere offset")
                                                : Vec3{0.0, 0.0, 0.0};
            shape.radius = s.at("radius").get<double>();
            scenario.robot.spheres.push_back(shape);
        }
        scenario.robot.validate();
        return scenario;
    } catch (const json::exception& e) {
        throw Error(std::string("bad scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    try {
        return parse_scenario(read_file(path), path.parent_path());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace voxcheck
