#include "voxcheck/robot.hpp"

#include <algorithm>

namespace voxcheck {

void Trajectory::validate() const {
    if (poses.empty()) {
        throw Error("trajectory must contain at least one pose");
    }
}

void RobotModel::validate() const {
    if (spheres.empty()) {
        throw Error("robot model must contain at least one sphere");
    }
    for (const auto& s : spheres) {
        if (!(s.radius > 0.0)) {
            throw Error("robot sphere radius must be positive");
        }
    }
}

std::vector<Sphere> occupied_region(const Vec3& pose, const RobotModel& robot) {
    std::vector<Sphere> spheres;
    spheres.reserve(robot.spheres.size());
    for (const auto& s : robot.spheres) {
        spheres.push_back({pose + s.offset, s.radius});
    }
    return spheres;
}

std::vector<LeafHit> visited_cells(const MultiResEnvironment& env, const Vec3& pose,
                                   const RobotModel& robot) {
    std::vector<LeafHit> visited;
    for (const Sphere& sphere : occupied_region(pose, robot)) {
        const double scale = env.max_grid().scale();
        const Vec3 origin = env.max_grid().translate();
        for (const LeafHit& hit : env.leaves_intersecting(bounding_box(sphere))) {
            if (sphere_touches_aabb(sphere, cell_aabb(hit.cell, origin, scale))) {
                visited.push_back(hit);
            }
        }
    }
    std::sort(visited.begin(), visited.end(),
              [](const LeafHit& a, const LeafHit& b) { return a.cell < b.cell; });
    visited.erase(std::unique(visited.begin(), visited.end()), visited.end());
    return visited;
}

std::vector<std::size_t> poses_outside_cube(const Trajectory& trajectory, const Aabb& cube) {
    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < trajectory.poses.size(); ++i) {
        if (!cube.contains(trajectory.poses[i])) {
            outside.push_back(i);
        }
    }
    return outside;
}

}  // namespace voxcheck
