#ifndef VOXCHECK_ENVIRONMENT_HPP
#define VOXCHECK_ENVIRONMENT_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "voxcheck/voxel_grid.hpp"

namespace voxcheck {

/// Solidity of the eight children of a refined cell, in the same
/// (dz,dy,dx) lexicographic order as children(): index = dz*4 + dy*2 + dx.
struct ChildBlock {
    std::array<bool, 8> values{};
};

constexpr std::size_t child_index(std::uint32_t dx, std::uint32_t dy, std::uint32_t dz) {
    return dz * 4 + dy * 2 + dx;
}

struct LeafHit {
    CellId cell;
    bool solid = false;

    friend bool operator==(const LeafHit&, const LeafHit&) = default;
};

/// The abstract environment the verification loop works on: a dense grid at
/// base resolution plus a sparse map of per-cell refinements. A cell is a
/// leaf iff it has no entry in the refinement map; every leaf's solidity is
/// the OR over its max-resolution descendants, so the abstraction always
/// over-approximates the stored grid.
///
/// refine() returns a new value and never mutates the receiver, so read
/// queries can run concurrently with building refined successors. All
/// environments derived from one initial_abstraction() share a single
/// cell-check counter, the machine-independent work metric: it counts leaf
/// solidity lookups made by leaves_intersecting().
class MultiResEnvironment {
public:
    static MultiResEnvironment initial_abstraction(std::shared_ptr<const VoxelGrid> max_grid,
                                                   std::uint32_t base_resolution);

    std::uint32_t base_resolution() const { return base_resolution_; }
    std::uint32_t max_resolution() const { return max_grid_->resolution(); }
    const VoxelGrid& max_grid() const { return *max_grid_; }
    std::shared_ptr<const VoxelGrid> max_grid_ptr() const { return max_grid_; }
    Aabb cube() const { return max_grid_->cube(); }
    const std::map<CellId, ChildBlock>& refinements() const { return refinements_; }

    bool is_leaf(const CellId& cell) const;
    bool leaf_solid(const CellId& cell) const;

    /// New environment with `cell` split into its eight children, valued by
    /// OR over each child's max-resolution descendants. Throws Error if the
    /// cell is not a leaf or already has max resolution.
    MultiResEnvironment refine(const CellId& cell) const;

    /// The unique leaf whose half-open cuboid contains `point`; points on the
    /// cube's upper faces belong to the last cell. Throws Error outside the cube.
    CellId leaf_at(const Vec3& point) const;

    /// All leaves whose cuboid intersects `region` (closed test), with their
    /// solidity, ordered lexicographically by (level, x, y, z). Counts one
    /// cell check per returned leaf.
    std::vector<LeafHit> leaves_intersecting(const Aabb& region) const;

    /// True iff every max-resolution descendant of `cell` is SOLID.
    bool fully_solid_at_max(const CellId& cell) const;

    std::uint64_t cell_checks() const { return cell_checks_->load(); }

    /// Upper bound on the number of refine operations possible from the
    /// initial abstraction: sum of L^3 over levels base..max/2.
    std::uint64_t refinement_bound() const;

    std::size_t leaf_count() const;

    /// Line-oriented leaf table "level x y z solid", deterministic order.
    std::string leaf_table() const;

    /// The current abstraction rendered as a dense grid at `level`: a voxel is
    /// solid iff some solid leaf overlaps it with positive volume. At the base
    /// level of a fresh abstraction this reproduces the initial grid.
    VoxelGrid render_at(std::uint32_t level) const;

private:
    MultiResEnvironment() = default;

    // Like leaves_intersecting, but without touching the cell-check counter;
    // used by exports so they do not distort the work metric.
    std::vector<LeafHit> collect_leaves(const Aabb& region) const;

    bool base_solid(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return base_occupancy_[(static_cast<std::size_t>(x) * base_resolution_ + y) *
                                   base_resolution_ +
                               z] != 0;
    }

    std::uint32_t base_resolution_ = 0;
    std::shared_ptr<const VoxelGrid> max_grid_;
    std::vector<std::uint8_t> base_occupancy_;  // (x*d + y)*d + z
    std::map<CellId, ChildBlock> refinements_;
    std::shared_ptr<std::atomic<std::uint64_t>> cell_checks_;
};

/// OR over the max-resolution descendants of `cell` in `max_grid`.
bool any_solid_descendant(const VoxelGrid& max_grid, const CellId& cell);

/// Materialized initial abstraction: `max_grid` reduced to `resolution`.
VoxelGrid abstract_grid(const VoxelGrid& max_grid, std::uint32_t resolution);

}  // namespace voxcheck

#endif
