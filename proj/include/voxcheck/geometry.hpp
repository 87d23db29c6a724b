#ifndef VOXCHECK_GEOMETRY_HPP
#define VOXCHECK_GEOMETRY_HPP

#include <algorithm>
#include <cmath>

namespace voxcheck {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
    friend bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

// Axis-aligned box, min <= max componentwise.
struct Aabb {
    Vec3 min;
    Vec3 max;

    bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }

    Vec3 extent() const { return max - min; }

    friend bool operator==(const Aabb& a, const Aabb& b) { return a.min == b.min && a.max == b.max; }
};

struct Sphere {
    Vec3 center;
    double radius = 0.0;
};

// Closed-set overlap: shared boundary points count.
inline bool aabb_overlap(const Aabb& a, const Aabb& b) {
    return a.min.x <= b.max.x && b.min.x <= a.max.x && a.min.y <= b.max.y && b.min.y <= a.max.y &&
           a.min.z <= b.max.z && b.min.z <= a.max.z;
}

// Positive-measure overlap: the interiors must intersect, touching faces do not count.
inline bool aabb_overlap_interior(const Aabb& a, const Aabb& b) {
    return a.min.x < b.max.x && b.min.x < a.max.x && a.min.y < b.max.y && b.min.y < a.max.y &&
           a.min.z < b.max.z && b.min.z < a.max.z;
}

inline double squared_distance(const Vec3& p, const Aabb& box) {
    const double dx = p.x - std::clamp(p.x, box.min.x, box.max.x);
    const double dy = p.y - std::clamp(p.y, box.min.y, box.max.y);
    const double dz = p.z - std::clamp(p.z, box.min.z, box.max.z);
    return dx * dx + dy * dy + dz * dz;
}

// Closed test: a tangent sphere still touches the box.
inline bool sphere_touches_aabb(const Sphere& s, const Aabb& box) {
    return squared_distance(s.center, box) <= s.radius * s.radius;
}

// Open test: the sphere must occupy part of the box, tangency is not enough.
inline bool sphere_occupies_aabb(const Sphere& s, const Aabb& box) {
    return squared_distance(s.center, box) < s.radius * s.radius;
}

inline Aabb bounding_box(const Sphere& s) {
    const Vec3 r{s.radius, s.radius, s.radius};
    return {s.center - r, s.center + r};
}

}  // namespace voxcheck

#endif
