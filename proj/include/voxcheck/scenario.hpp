#ifndef VOXCHECK_SCENARIO_HPP
#define VOXCHECK_SCENARIO_HPP

#include <filesystem>
#include <memory>
#include <string>

#include "voxcheck/robot.hpp"

namespace voxcheck {

/// A fully resolved verification problem: the max-resolution environment
/// grid plus the robot and its trajectory.
struct Scenario {
    std::shared_ptr<const VoxelGrid> max_grid;
    Trajectory trajectory;
    RobotModel robot;
};

/// Scene-description document:
///   {"domain": {"min": [x,y,z], "max": [x,y,z]},
///    "primitives": [{"kind": "box", "min": [...], "max": [...]},
///                   {"kind": "sphere", "center": [...], "radius": r}]}
SceneDescription parse_scene_config(const std::string& json_text);
SceneDescription load_scene_config(const std::filesystem::path& path);

/// Scenario document bundling environment, trajectory, and robot:
///   {"scene": {...} | "binvox": "env.binvox",
///    "max_resolution": 64,              // required with "scene"
///    "trajectory": {"poses": [[x,y,z], ...]},
///    "robot": {"spheres": [{"offset": [x,y,z], "radius": r}, ...]}}
/// Exactly one of "scene"/"binvox" must be present. With "binvox" the file's
/// resolution is the max resolution (a stated "max_resolution" must agree);
/// relative paths resolve against `base_dir`.
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace voxcheck

#endif
