#ifndef VOXCHECK_ROBOT_HPP
#define VOXCHECK_ROBOT_HPP

#include <cstddef>
#include <vector>

#include "voxcheck/environment.hpp"
#include "voxcheck/geometry.hpp"

namespace voxcheck {

/// Ordered gripper positions, one per step; step 1 is the initial position.
struct Trajectory {
    std::vector<Vec3> poses;

    void validate() const;
};

/// Conservative robot occupancy: a set of spheres attached to the pose point.
struct RobotModel {
    struct SphereShape {
        Vec3 offset;
        double radius = 0.0;
    };

    std::vector<SphereShape> spheres;

    void validate() const;
};

/// The robot volume at `pose`, in world coordinates.
std::vector<Sphere> occupied_region(const Vec3& pose, const RobotModel& robot);

/// All leaves whose cuboid the robot volume touches at `pose` (closed
/// sphere-cuboid test, so grazing contact counts), deduplicated and ordered
/// lexicographically by (level, x, y, z). A robot entirely outside the
/// environment cube visits no cells.
std::vector<LeafHit> visited_cells(const MultiResEnvironment& env, const Vec3& pose,
                                   const RobotModel& robot);

/// Indices of poses that lie outside the environment cube. Such poses are
/// legal and visit no cells, but usually indicate a mis-scaled scenario, so
/// callers should warn about them.
std::vector<std::size_t> poses_outside_cube(const Trajectory& trajectory, const Aabb& cube);

}  // namespace voxcheck

#endif
