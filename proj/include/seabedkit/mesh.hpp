#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "geomodel.hpp"
#include "vec.hpp"

namespace seabed {

struct Material {
    std::string name;    // stratum id or texture name
    Rgba color{0.8, 0.8, 0.8, 1.0};
    std::string texture; // empty when untextured
};

struct TriangleMesh {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals; // empty or one per position
    std::vector<Vec2> uvs;     // empty or one per position
    std::vector<std::uint32_t> indices;
    Material material;

    std::size_t vertex_count() const { return positions.size(); }
    std::size_t triangle_count() const { return indices.size() / 3; }
    bool empty() const { return indices.empty(); }

    std::array<Vec3, 3> triangle(std::size_t t) const {
        return {positions[indices[3 * t]], positions[indices[3 * t + 1]], positions[indices[3 * t + 2]]};
    }
};

inline double triangle_area(Vec3 a, Vec3 b, Vec3 c) { return 0.5 * norm(cross(b - a, c - a)); }

inline double surface_area(const TriangleMesh& m) {
    double area = 0;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto [a, b, c] = m.triangle(t);
        area += triangle_area(a, b, c);
    }
    return area;
}

/// Unnormalized face normal; its length is twice the triangle area.
inline Vec3 face_normal(const TriangleMesh& m, std::size_t t) {
    const auto [a, b, c] = m.triangle(t);
    return cross(b - a, c - a);
}

/// Per-vertex normals as the area-weighted average of incident face normals.
inline std::vector<Vec3> area_weighted_normals(const TriangleMesh& m) {
    std::vector<Vec3> acc(m.positions.size());
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const Vec3 n = face_normal(m, t);
        for (int k = 0; k < 3; ++k) acc[m.indices[3 * t + k]] += n;
    }
    for (auto& n : acc) n = normalized(n);
    return acc;
}

/// Empty when the mesh satisfies every structural invariant, otherwise the
/// first violation found.
inline std::optional<std::string> check_mesh(const TriangleMesh& m, double min_area = 1e-12) {
    if (m.indices.size() % 3 != 0) return "index count not divisible by 3";
    for (auto i : m.indices)
        if (i >= m.positions.size()) return "index out of range";
    if (!m.normals.empty() && m.normals.size() != m.positions.size()) return "normal count mismatch";
    if (!m.uvs.empty() && m.uvs.size() != m.positions.size()) return "uv count mismatch";
    for (const auto& n : m.normals)
        if (std::abs(norm(n) - 1) > 1e-6) return "normal not unit length";
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto [a, b, c] = m.triangle(t);
        if (!(triangle_area(a, b, c) > min_area)) return "degenerate triangle " + std::to_string(t);
    }
    return std::nullopt;
}

} // namespace seabed
