#include "voxcheck/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace voxcheck {

bool any_solid_descendant(const VoxelGrid& max_grid, const CellId& cell) {
    const IndexRange r = descendant_range(cell, max_grid.resolution());
    for (std::uint32_t x = r.lo_x; x <= r.hi_x; ++x) {
        for (std::uint32_t z = r.lo_z; z <= r.hi_z; ++z) {
            for (std::uint32_t y = r.lo_y; y <= r.hi_y; ++y) {
                if (max_grid.at(x, y, z)) return true;
            }
        }
    }
    return false;
}

MultiResEnvironment MultiResEnvironment::initial_abstraction(
    std::shared_ptr<const VoxelGrid> max_grid, std::uint32_t base_resolution) {
    if (!max_grid) {
        throw Error("initial_abstraction: null grid");
    }
    if (!is_power_of_two(base_resolution)) {
        throw Error("base resolution must be a power of two >= 2");
    }
    if (base_resolution > max_grid->resolution()) {
        throw Error("base resolution " + std::to_string(base_resolution) +
                    " exceeds max resolution " + std::to_string(max_grid->resolution()));
    }

    MultiResEnvironment env;
    env.base_resolution_ = base_resolution;
    env.max_grid_ = std::move(max_grid);
    env.cell_checks_ = std::make_shared<std::atomic<std::uint64_t>>(0);

    const std::uint32_t d = base_resolution;
    env.base_occupancy_.assign(static_cast<std::size_t>(d) * d * d, 0);
    // One pass over the max grid; each max voxel ORs into its base ancestor.
    const VoxelGrid& grid = *env.max_grid_;
    const std::uint32_t k = grid.resolution() / d;
    for (std::uint32_t x = 0; x < grid.resolution(); ++x) {
        for (std::uint32_t z = 0; z < grid.resolution(); ++z) {
            for (std::uint32_t y = 0; y < grid.resolution(); ++y) {
                if (!grid.at(x, y, z)) continue;
                const std::size_t idx =
                    (static_cast<std::size_t>(x / k) * d + y / k) * d + z / k;
                env.base_occupancy_[idx] = 1;
            }
        }
    }
    return env;
}

bool MultiResEnvironment::is_leaf(const CellId& cell) const {
    if (cell.level < base_resolution_ || cell.level > max_resolution()) return false;
    if (cell.x >= cell.level || cell.y >= cell.level || cell.z >= cell.level) return false;
    if (refinements_.contains(cell)) return false;
    if (cell.level == base_resolution_) return true;
    // A deeper cell is a leaf iff its parent chain down to base is refined.
    CellId cur = cell;
    while (cur.level > base_resolution_) {
        cur = parent(cur);
        if (!refinements_.contains(cur)) return false;
    }
    // All strict ancestors above base must be refined as well; the loop above
    // covered them including the base ancestor.
    return true;
}

bool MultiResEnvironment::leaf_solid(const CellId& cell) const {
    if (cell.level == base_resolution_) {
        return base_solid(cell.x, cell.y, cell.z);
    }
    const CellId p = parent(cell);
    const auto it = refinements_.find(p);
    if (it == refinements_.end()) {
        throw Error("leaf_solid: " + to_string(cell) + " is not a leaf");
    }
    return it->second.values[child_index(cell.x & 1, cell.y & 1, cell.z & 1)];
}

MultiResEnvironment MultiResEnvironment::refine(const CellId& cell) const {
    if (refinements_.contains(cell)) {
        throw Error("refine: " + to_string(cell) + " is already refined");
    }
    if (cell.level >= max_resolution()) {
        throw Error("refine: " + to_string(cell) + " already has max resolution");
    }
    if (!is_leaf(cell)) {
        throw Error("refine: " + to_string(cell) + " is not a leaf");
    }

    ChildBlock block;
    const auto kids = children(cell);
    for (std::size_t i = 0; i < kids.size(); ++i) {
        // Child values come from the stored max-resolution grid, not from the
        // parent levels, so abstraction error never compounds.
        block.values[i] = any_solid_descendant(*max_grid_, kids[i]);
    }

    MultiResEnvironment next = *this;
    next.refinements_.emplace(cell, block);
    return next;
}

CellId MultiResEnvironment::leaf_at(const Vec3& point) const {
    const Aabb box = cube();
    if (!box.contains(point)) {
        throw Error("leaf_at: point outside the environment cube");
    }
    const double size = max_grid_->scale() / base_resolution_;
    const auto index = [&](double p, double lo) {
        const auto raw = static_cast<std::int64_t>(std::floor((p - lo) / size));
        return static_cast<std::uint32_t>(
            std::clamp<std::int64_t>(raw, 0, base_resolution_ - 1));
    };
    CellId cell{base_resolution_, index(point.x, box.min.x), index(point.y, box.min.y),
                index(point.z, box.min.z)};
    while (refinements_.contains(cell)) {
        const Aabb cb = cell_aabb(cell, max_grid_->translate(), max_grid_->scale());
        const Vec3 mid = (cb.min + cb.max) * 0.5;
        const std::uint32_t dx = point.x >= mid.x ? 1 : 0;
        const std::uint32_t dy = point.y >= mid.y ? 1 : 0;
        const std::uint32_t dz = point.z >= mid.z ? 1 : 0;
        cell = CellId{cell.level * 2, 2 * cell.x + dx, 2 * cell.y + dy, 2 * cell.z + dz};
    }
    return cell;
}

std::vector<LeafHit> MultiResEnvironment::leaves_intersecting(const Aabb& region) const {
    std::vector<LeafHit> hits = collect_leaves(region);
    cell_checks_->fetch_add(hits.size());
    return hits;
}

std::vector<LeafHit> MultiResEnvironment::collect_leaves(const Aabb& region) const {
    std::vector<LeafHit> hits;
    const Aabb box = cube();
    if (!aabb_overlap(region, box)) {
        return hits;
    }

    const double size = max_grid_->scale() / base_resolution_;
    const auto span = [&](double lo, double hi, double origin) {
        // One cell of slack absorbs floating-point edges; the exact closed
        // overlap test below decides membership.
        const auto lo_raw = static_cast<std::int64_t>(std::floor((lo - origin) / size)) - 1;
        const auto hi_raw = static_cast<std::int64_t>(std::floor((hi - origin) / size)) + 1;
        return std::pair{
            static_cast<std::uint32_t>(std::clamp<std::int64_t>(lo_raw, 0, base_resolution_ - 1)),
            static_cast<std::uint32_t>(std::clamp<std::int64_t>(hi_raw, 0, base_resolution_ - 1))};
    };
    const auto [x0, x1] = span(region.min.x, region.max.x, box.min.x);
    const auto [y0, y1] = span(region.min.y, region.max.y, box.min.y);
    const auto [z0, z1] = span(region.min.z, region.max.z, box.min.z);

    // Descend from base cells into refined children, pruning by cuboid overlap.
    const auto descend = [&](const auto& self, const CellId& cell) -> void {
        const Aabb cb = cell_aabb(cell, max_grid_->translate(), max_grid_->scale());
        if (!aabb_overlap(cb, region)) return;
        const auto it = refinements_.find(cell);
        if (it == refinements_.end()) {
            hits.push_back({cell, leaf_solid(cell)});
            return;
        }
        for (const CellId& kid : children(cell)) {
            self(self, kid);
        }
    };
    for (std::uint32_t x = x0; x <= x1; ++x) {
        for (std::uint32_t y = y0; y <= y1; ++y) {
            for (std::uint32_t z = z0; z <= z1; ++z) {
                descend(descend, CellId{base_resolution_, x, y, z});
            }
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const LeafHit& a, const LeafHit& b) { return a.cell < b.cell; });
    return hits;
}

bool MultiResEnvironment::fully_solid_at_max(const CellId& cell) const {
    const IndexRange r = descendant_range(cell, max_resolution());
    for (std::uint32_t x = r.lo_x; x <= r.hi_x; ++x) {
        for (std::uint32_t z = r.lo_z; z <= r.hi_z; ++z) {
            for (std::uint32_t y = r.lo_y; y <= r.hi_y; ++y) {
                if (!max_grid_->at(x, y, z)) return false;
            }
        }
    }
    return true;
}

std::uint64_t MultiResEnvironment::refinement_bound() const {
    std::uint64_t bound = 0;
    for (std::uint64_t level = base_resolution_; level < max_resolution(); level *= 2) {
        bound += level * level * level;
    }
    return bound;
}

std::size_t MultiResEnvironment::leaf_count() const {
    // Each refinement turns one leaf into eight.
    const std::size_t base = static_cast<std::size_t>(base_resolution_) * base_resolution_ *
                             base_resolution_;
    return base + refinements_.size() * 7;
}

std::string MultiResEnvironment::leaf_table() const {
    const std::vector<LeafHit> leaves = collect_leaves(cube());
    std::ostringstream out;
    for (const LeafHit& leaf : leaves) {
        out << leaf.cell.level << " " << leaf.cell.x << " " << leaf.cell.y << " " << leaf.cell.z
            << " " << (leaf.solid ? 1 : 0) << "\n";
    }
    return out.str();
}

namespace {

CellId ancestor_at(const CellId& cell, std::uint32_t level) {
    const std::uint32_t k = cell.level / level;
    return {level, cell.x / k, cell.y / k, cell.z / k};
}

}  // namespace

VoxelGrid MultiResEnvironment::render_at(std::uint32_t level) const {
    if (!is_power_of_two(level) || level > max_resolution()) {
        throw Error("render_at: bad level " + std::to_string(level));
    }
    VoxelGrid grid(level, max_grid_->translate(), max_grid_->scale());

    for (std::uint32_t x = 0; x < level; ++x) {
        for (std::uint32_t y = 0; y < level; ++y) {
            for (std::uint32_t z = 0; z < level; ++z) {
                const CellId cell{level, x, y, z};
                bool solid;
                if (level < base_resolution_) {
                    // Coarser than any leaf: aggregate the whole subtree.
                    solid = any_solid_descendant(*max_grid_, cell);
                } else {
                    // Walk from the base ancestor toward the render level.
                    CellId cur = ancestor_at(cell, base_resolution_);
                    while (cur.level < level && refinements_.contains(cur)) {
                        cur = ancestor_at(cell, cur.level * 2);
                    }
                    if (cur.level == level && refinements_.contains(cur)) {
                        // Leaves lie deeper; render their aggregate.
                        solid = any_solid_descendant(*max_grid_, cell);
                    } else {
                        // cur is the leaf covering this voxel.
                        solid = leaf_solid(cur);
                    }
                }
                if (solid) grid.set(x, y, z, true);
            }
        }
    }
    return grid;
}

VoxelGrid abstract_grid(const VoxelGrid& max_grid, std::uint32_t resolution) {
    if (resolution > max_grid.resolution())
        throw Error("abstract_grid: resolution exceeds source grid");
    if (max_grid.resolution() % resolution != 0)
        throw Error("abstract_grid: resolution does not divide source grid");

    VoxelGrid grid(resolution, max_grid.translate(), max_grid.scale());
    const std::uint32_t k = max_grid.resolution() / resolution;
    for (std::uint32_t x = 0; x < max_grid.resolution(); ++x) {
        for (std::uint32_t y = 0; y < max_grid.resolution(); ++y) {
            for (std::uint32_t z = 0; z < max_grid.resolution(); ++z) {
                if (max_grid.at(x, y, z)) grid.set(x / k, y / k, z / k, true);
            }
        }
    }
    return grid;
}

}  // namespace voxcheck
