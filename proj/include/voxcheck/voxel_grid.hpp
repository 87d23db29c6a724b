#ifndef VOXCHECK_VOXEL_GRID_HPP
#define VOXCHECK_VOXEL_GRID_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "voxcheck/geometry.hpp"

namespace voxcheck {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(std::uint32_t v) { return v >= 2 && (v & (v - 1)) == 0; }

/// One cell of the resolution hierarchy: `level` is the cubic resolution the
/// cell belongs to (power of two), indices are 0 <= x,y,z < level.
struct CellId {
    std::uint32_t level = 0;
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t z = 0;

    auto operator<=>(const CellId&) const = default;
};

std::string to_string(const CellId& cell);

/// Dense cubic occupancy grid at a single power-of-two resolution.
/// World mapping: the grid covers the cube [translate, translate + scale]^3,
/// split into resolution^3 voxels of edge scale/resolution.
///
/// Linear storage follows the binvox convention: y runs fastest, then z,
/// then x (index = x*d^2 + z*d + y).
class VoxelGrid {
public:
    VoxelGrid(std::uint32_t resolution, const Vec3& translate, double scale);

    std::uint32_t resolution() const { return resolution_; }
    const Vec3& translate() const { return translate_; }
    double scale() const { return scale_; }
    double voxel_size() const { return scale_ / resolution_; }

    bool at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return occupancy_[linear_index(x, y, z)] != 0;
    }
    void set(std::uint32_t x, std::uint32_t y, std::uint32_t z, bool solid) {
        occupancy_[linear_index(x, y, z)] = solid ? 1 : 0;
    }

    std::size_t voxel_count() const { return occupancy_.size(); }
    std::size_t solid_count() const;

    Aabb cube() const {
        return {translate_, translate_ + Vec3{scale_, scale_, scale_}};
    }

    friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

private:
    std::size_t linear_index(std::uint32_t x, std::uint32_t y, std::uint32_t z) const;

    std::uint32_t resolution_;
    Vec3 translate_;
    double scale_;
    std::vector<std::uint8_t> occupancy_;
};

// --- binvox v1 I/O ---------------------------------------------------------
//
// Layout, bit-exact:
//   #binvox 1\n
//   dim d d d\n
//   translate tx ty tz\n
//   scale s\n
//   data\n
//   (value, count) byte pairs, value in {0,1}, count in [1,255], until d^3
//   voxels have been emitted; voxel order as documented on VoxelGrid.
//
// The writer emits maximal greedy runs capped at 255 and shortest
// round-tripping decimal forms for translate/scale, so output is canonical:
// parse(write(g)) == g bit-for-bit and write(parse(b)) == b for canonical b.

class BinvoxError : public Error {
public:
    BinvoxError(const std::string& message, std::size_t byte_offset);

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

VoxelGrid parse_binvox(std::string_view bytes);
std::string write_binvox(const VoxelGrid& grid);

VoxelGrid read_binvox_file(const std::string& path);
void write_binvox_file(const VoxelGrid& grid, const std::string& path);

// --- scene description and conservative voxelization ------------------------

struct BoxPrimitive {
    Vec3 min;
    Vec3 max;
};

struct SpherePrimitive {
    Vec3 center;
    double radius = 0.0;
};

using Primitive = std::variant<BoxPrimitive, SpherePrimitive>;

/// Primitive scene standing in for a mesh asset pipeline. The grid generated
/// from it covers the smallest axis-aligned cube that contains `domain`,
/// anchored at domain.min.
struct SceneDescription {
    std::vector<Primitive> primitives;
    Aabb domain;

    // Throws Error on empty-volume primitives or primitives outside the domain.
    void validate() const;
};

/// A voxel becomes SOLID iff some primitive's volume overlaps it, i.e. the
/// overlap has positive measure. Any point inside a primitive therefore lies
/// in a SOLID voxel, which is the over-approximating direction.
VoxelGrid voxelize(const SceneDescription& scene, std::uint32_t resolution);

// --- resolution/index algebra ------------------------------------------------

/// The eight cells at level 2L that partition `cell`, in (dz,dy,dx)
/// lexicographic order: index = dz*4 + dy*2 + dx.
std::array<CellId, 8> children(const CellId& cell);

/// Inverse of children (floor-halving). Requires level >= 4; level 2 has no
/// parent within the hierarchy.
CellId parent(const CellId& cell);

/// Inclusive index range [lo, hi] per axis.
struct IndexRange {
    std::uint32_t lo_x, hi_x;
    std::uint32_t lo_y, hi_y;
    std::uint32_t lo_z, hi_z;
};

/// Descendants of `cell` at `target_level` >= cell.level: a k^3 block with
/// k = target_level / cell.level, e.g. (4,0,1,0) -> level 128 indices
/// x in [0,31], y in [32,63], z in [0,31].
IndexRange descendant_range(const CellId& cell, std::uint32_t target_level);

/// World-space cuboid of a cell in a grid with the given transform.
Aabb cell_aabb(const CellId& cell, const Vec3& translate, double scale);

}  // namespace voxcheck

#endif
