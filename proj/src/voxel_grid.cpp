#include "voxcheck/voxel_grid.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace voxcheck {

std::string to_string(const CellId& cell) {
    std::ostringstream out;
    out << "(" << cell.level << ", " << cell.x << ", " << cell.y << ", " << cell.z << ")";
    return out.str();
}

VoxelGrid::VoxelGrid(std::uint32_t resolution, const Vec3& translate, double scale)
    : resolution_(resolution), translate_(translate), scale_(scale) {
    if (!is_power_of_two(resolution)) {
        throw Error("voxel grid resolution must be a power of two >= 2, got " +
                    std::to_string(resolution));
    }
    if (!(scale > 0.0)) {
        throw Error("voxel grid scale must be positive");
    }
    occupancy_.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);
}

std::size_t VoxelGrid::linear_index(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
    if (x >= resolution_ || y >= resolution_ || z >= resolution_) {
        throw Error("voxel index (" + std::to_string(x) + ", " + std::to_string(y) + ", " +
                    std::to_string(z) + ") outside a " + std::to_string(resolution_) + "^3 grid");
    }
    // binvox order: y fastest, then z, then x
    return (static_cast<std::size_t>(x) * resolution_ + z) * resolution_ + y;
}

std::size_t VoxelGrid::solid_count() const {
    return std::accumulate(occupancy_.begin(), occupancy_.end(), std::size_t{0});
}

// --- binvox ------------------------------------------------------------------

BinvoxError::BinvoxError(const std::string& message, std::size_t byte_offset)
    : Error(message + " (byte offset " + std::to_string(byte_offset) + ")"),
      byte_offset_(byte_offset) {}

namespace {

// One header line up to and including '\n'. Returns false at end of input.
bool take_line(std::string_view bytes, std::size_t& pos, std::string_view& line) {
    if (pos >= bytes.size()) return false;
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) return false;
    line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return true;
}

double parse_double_token(std::istringstream& in, std::string_view what, std::size_t offset) {
    std::string token;
    if (!(in >> token)) {
        throw BinvoxError("malformed header: missing " + std::string(what), offset);
    }
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw BinvoxError("malformed header: bad " + std::string(what) + " '" + token + "'",
                          offset);
    }
    return value;
}

// Shortest decimal form that parses back to the same double.
std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace

VoxelGrid parse_binvox(std::string_view bytes) {
    std::size_t pos = 0;
    std::string_view line;

    std::size_t line_start = pos;
    if (!take_line(bytes, pos, line) || line != "#binvox 1") {
        throw BinvoxError("malformed header: expected '#binvox 1'", line_start);
    }

    line_start = pos;
    if (!take_line(bytes, pos, line) || line.substr(0, 4) != "dim ") {
        throw BinvoxError("malformed header: expected 'dim d d d'", line_start);
    }
    std::istringstream dim_in{std::string(line.substr(4))};
    long dx = 0, dy = 0, dz = 0;
    if (!(dim_in >> dx >> dy >> dz) || dx <= 0 || dy <= 0 || dz <= 0) {
        throw BinvoxError("malformed header: bad dim line", line_start);
    }
    if (dx != dy || dy != dz) {
        throw BinvoxError("non-cubic dims " + std::to_string(dx) + "x" + std::to_string(dy) +
                              "x" + std::to_string(dz),
                          line_start);
    }
    if (!is_power_of_two(static_cast<std::uint32_t>(dx))) {
        throw BinvoxError("unsupported dim " + std::to_string(dx) + ": must be a power of two >= 2",
                          line_start);
    }
    const auto dim = static_cast<std::uint32_t>(dx);

    line_start = pos;
    if (!take_line(bytes, pos, line) || line.substr(0, 10) != "translate ") {
        throw BinvoxError("malformed header: expected 'translate tx ty tz'", line_start);
    }
    std::istringstream tr_in{std::string(line.substr(10))};
    Vec3 translate;
    translate.x = parse_double_token(tr_in, "translate x", line_start);
    translate.y = parse_double_token(tr_in, "translate y", line_start);
    translate.z = parse_double_token(tr_in, "translate z", line_start);

    line_start = pos;
    if (!take_line(bytes, pos, line) || line.substr(0, 6) != "scale ") {
        throw BinvoxError("malformed header: expected 'scale s'", line_start);
    }
    std::istringstream sc_in{std::string(line.substr(6))};
    const double scale = parse_double_token(sc_in, "scale", line_start);
    if (!(scale > 0.0)) {
        throw BinvoxError("malformed header: scale must be positive", line_start);
    }

    line_start = pos;
    if (!take_line(bytes, pos, line) || line != "data") {
        throw BinvoxError("malformed header: expected 'data'", line_start);
    }

    VoxelGrid grid(dim, translate, scale);
    const std::size_t total = grid.voxel_count();
    std::size_t emitted = 0;
    const std::uint32_t d = dim;

    while (emitted < total) {
        if (pos + 2 > bytes.size()) {
            throw BinvoxError("truncated data: got " + std::to_string(emitted) + " of " +
                                  std::to_string(total) + " voxels",
                              bytes.size());
        }
        const auto value = static_cast<std::uint8_t>(bytes[pos]);
        const auto count = static_cast<std::uint8_t>(bytes[pos + 1]);
        if (value > 1) {
            throw BinvoxError("bad run value " + std::to_string(value), pos);
        }
        if (count == 0) {
            throw BinvoxError("bad run count 0", pos + 1);
        }
        if (emitted + count > total) {
            throw BinvoxError("run-length overflow past dim^3", pos);
        }
        if (value) {
            for (std::uint8_t i = 0; i < count; ++i) {
                const std::size_t idx = emitted + i;
                const std::uint32_t y = static_cast<std::uint32_t>(idx % d);
                const std::uint32_t z = static_cast<std::uint32_t>((idx / d) % d);
                const std::uint32_t x = static_cast<std::uint32_t>(idx / (static_cast<std::size_t>(d) * d));
                grid.set(x, y, z, true);
            }
        }
        emitted += count;
        pos += 2;
    }
    if (pos != bytes.size()) {
        throw BinvoxError("run-length overflow past dim^3: trailing bytes after data", pos);
    }
    return grid;
}

std::string write_binvox(const VoxelGrid& grid) {
    std::string out;
    out += "#binvox 1\n";
    const std::string d = std::to_string(grid.resolution());
    out += "dim " + d + " " + d + " " + d + "\n";
    out += "translate " + format_double(grid.translate().x) + " " +
           format_double(grid.translate().y) + " " + format_double(grid.translate().z) + "\n";
    out += "scale " + format_double(grid.scale()) + "\n";
    out += "data\n";

    const std::uint32_t dim = grid.resolution();
    std::uint8_t current = 0;
    std::uint32_t count = 0;
    const auto flush = [&out](std::uint8_t value, std::uint32_t n) {
        out.push_back(static_cast<char>(value));
        out.push_back(static_cast<char>(n));
    };
    for (std::uint32_t x = 0; x < dim; ++x) {
        for (std::uint32_t z = 0; z < dim; ++z) {
            for (std::uint32_t y = 0; y < dim; ++y) {
                const std::uint8_t v = grid.at(x, y, z) ? 1 : 0;
                if (count == 0) {
                    current = v;
                    count = 1;
                } else if (v == current && count < 255) {
                    ++count;
                } else {
                    flush(current, count);
                    current = v;
                    count = 1;
                }
            }
        }
    }
    if (count > 0) flush(current, count);
    return out;
}

VoxelGrid read_binvox_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open binvox file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_binvox(buf.str());
}

void write_binvox_file(const VoxelGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open file for writing: " + path);
    }
    const std::string bytes = write_binvox(grid);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("failed writing binvox file: " + path);
    }
}

// --- voxelization --------------------------------------------------------------

namespace {

Aabb primitive_bounds(const Primitive& primitive) {
    if (const auto* box = std::get_if<BoxPrimitive>(&primitive)) {
        return {box->min, box->max};
    }
    const auto& sphere = std::get<SpherePrimitive>(primitive);
    return bounding_box(Sphere{sphere.center, sphere.radius});
}

bool primitive_occupies(const Primitive& primitive, const Aabb& voxel) {
    if (const auto* box = std::get_if<BoxPrimitive>(&primitive)) {
        return aabb_overlap_interior({box->min, box->max}, voxel);
    }
    const auto& sphere = std::get<SpherePrimitive>(primitive);
    return sphere_occupies_aabb({sphere.center, sphere.radius}, voxel);
}

}  // namespace

void SceneDescription::validate() const {
    const Vec3 ext = domain.extent();
    if (!(ext.x > 0 && ext.y > 0 && ext.z > 0)) {
        throw Error("scene domain must have positive extent");
    }
    std::size_t i = 0;
    for (const auto& primitive : primitives) {
        if (const auto* box = std::get_if<BoxPrimitive>(&primitive)) {
            const Vec3 be = Aabb{box->min, box->max}.extent();
            if (!(be.x > 0 && be.y > 0 && be.z > 0)) {
                throw Error("scene primitive " + std::to_string(i) + ": box has no volume");
            }
        } else if (!(std::get<SpherePrimitive>(primitive).radius > 0)) {
            throw Error("scene primitive " + std::to_string(i) + ": sphere radius must be positive");
        }
        if (!primitive_occupies(primitive, domain)) {
            throw Error("scene primitive " + std::to_string(i) + " does not intersect the domain");
        }
        ++i;
    }
}

VoxelGrid voxelize(const SceneDescription& scene, std::uint32_t resolution) {
    if (!is_power_of_two(resolution)) {
        throw Error("voxelize: resolution must be a power of two >= 2");
    }
    scene.validate();

    const Vec3 ext = scene.domain.extent();
    const double scale = std::max({ext.x, ext.y, ext.z});
    VoxelGrid grid(resolution, scene.domain.min, scale);

    for (const auto& primitive : scene.primitives) {
        // Restrict to the voxels the primitive's bounds can reach, with one
        // voxel of slack; the exact occupancy test decides inside that window.
        const Aabb bounds = primitive_bounds(primitive);
        const double size = grid.voxel_size();
        const auto lo = [&](double bmin, double dmin) {
            const double rel = std::floor((bmin - dmin) / size) - 1;
            return static_cast<std::uint32_t>(std::clamp(rel, 0.0, double(resolution - 1)));
        };
        const auto hi = [&](double bmax, double dmin) {
            const double rel = std::floor((bmax - dmin) / size) + 1;
            return static_cast<std::uint32_t>(std::clamp(rel, 0.0, double(resolution - 1)));
        };
        const std::uint32_t x0 = lo(bounds.min.x, scene.domain.min.x);
        const std::uint32_t x1 = hi(bounds.max.x, scene.domain.min.x);
        const std::uint32_t y0 = lo(bounds.min.y, scene.domain.min.y);
        const std::uint32_t y1 = hi(bounds.max.y, scene.domain.min.y);
        const std::uint32_t z0 = lo(bounds.min.z, scene.domain.min.z);
        const std::uint32_t z1 = hi(bounds.max.z, scene.domain.min.z);

        for (std::uint32_t x = x0; x <= x1; ++x) {
            for (std::uint32_t y = y0; y <= y1; ++y) {
                for (std::uint32_t z = z0; z <= z1; ++z) {
                    if (grid.at(x, y, z)) continue;
                    const Aabb voxel = cell_aabb({resolution, x, y, z}, grid.translate(), scale);
                    if (primitive_occupies(primitive, voxel)) {
                        grid.set(x, y, z, true);
                    }
                }
            }
        }
    }
    return grid;
}

// --- index algebra ---------------------------------------------------------

std::array<CellId, 8> children(const CellId& cell) {
    std::array<CellId, 8> result;
    const std::uint32_t level = cell.level * 2;
    for (std::uint32_t dz = 0; dz < 2; ++dz) {
        for (std::uint32_t dy = 0; dy < 2; ++dy) {
            for (std::uint32_t dx = 0; dx < 2; ++dx) {
                result[dz * 4 + dy * 2 + dx] =
                    CellId{level, 2 * cell.x + dx, 2 * cell.y + dy, 2 * cell.z + dz};
            }
        }
    }
    return result;
}

CellId parent(const CellId& cell) {
    if (cell.level < 4) {
        throw Error("cell at level " + std::to_string(cell.level) + " has no parent");
    }
    return {cell.level / 2, cell.x / 2, cell.y / 2, cell.z / 2};
}

IndexRange descendant_range(const CellId& cell, std::uint32_t target_level) {
    if (target_level < cell.level || target_level % cell.level != 0) {
        throw Error("descendant_range: level " + std::to_string(target_level) +
                    " is not a refinement of level " + std::to_string(cell.level));
    }
    const std::uint32_t k = target_level / cell.level;
    return {cell.x * k, cell.x * k + k - 1, cell.y * k,
            cell.y * k + k - 1, cell.z * k, cell.z * k + k - 1};
}

Aabb cell_aabb(const CellId& cell, const Vec3& translate, double scale) {
    const double size = scale / cell.level;
    const Vec3 lo = translate + Vec3{cell.x * size, cell.y * size, cell.z * size};
    return {lo, lo + Vec3{size, size, size}};
}

}  // namespace voxcheck
