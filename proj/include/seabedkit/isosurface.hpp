#pragma once

// Marching Cubes with gradient-interpolated vertex normals and invalid-cell
// skipping.
//
// The 256-case triangle table is generated rather than transcribed: on every
// cube face the inside corners (value < iso) are cut off one by one, which
// resolves ambiguous faces the same way from both neighbouring cells and keeps
// closed level sets watertight.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "geomodel.hpp"
#include "mesh.hpp"
#include "vec.hpp"

namespace seabed {

namespace mc {

// Corner c sits at (c & 1, c >> 1 & 1, c >> 2 & 1).
inline constexpr Vec3 corner_offset(int c) {
    return {static_cast<double>(c & 1), static_cast<double>((c >> 1) & 1), static_cast<double>((c >> 2) & 1)};
}

struct Edge {
    int from; // corner with the lower coordinate
    int to;
    int axis;
};

// Edges 0-3 run along x, 4-7 along y, 8-11 along z.
inline const std::array<Edge, 12>& edges() {
    static const std::array<Edge, 12> table = [] {
        std::array<Edge, 12> e{};
        int n = 0;
        for (int axis = 0; axis < 3; ++axis)
            for (int c = 0; c < 8; ++c)
                if (!((c >> axis) & 1)) e[static_cast<std::size_t>(n++)] = {c, c | (1 << axis), axis};
        return e;
    }();
    return table;
}

inline int edge_between(int a, int b) {
    const auto& e = edges();
    for (int i = 0; i < 12; ++i) {
        const auto& ed = e[static_cast<std::size_t>(i)];
        if ((ed.from == a && ed.to == b) || (ed.from == b && ed.to == a)) return i;
    }
    return -1;
}

using TriangleList = std::vector<std::array<std::uint8_t, 3>>;

namespace detail {

// Corner cycles of the six faces, counter-clockwise seen from outside.
inline std::array<std::array<int, 4>, 6> face_cycles() {
    std::array<std::array<int, 4>, 6> faces{};
    int f = 0;
    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;
        for (int side = 0; side < 2; ++side) {
            const int base = side << axis;
            std::array<int, 4> cyc{base, base | (1 << u), base | (1 << u) | (1 << v), base | (1 << v)};
            if (side == 0) std::swap(cyc[1], cyc[3]);
            faces[static_cast<std::size_t>(f++)] = cyc;
        }
    }
    return faces;
}

// Directed edge-to-edge segments whose loops bound the inside region.
inline std::vector<std::pair<int, int>> face_segments(int case_index) {
    auto inside = [&](int c) { return (case_index >> c) & 1; };
    std::vector<std::pair<int, int>> segs;
    for (const auto& cyc : face_cycles()) {
        for (int k = 0; k < 4; ++k) {
            const int ck = cyc[static_cast<std::size_t>(k)], cn = cyc[static_cast<std::size_t>((k + 1) % 4)];
            if (!(inside(ck) && !inside(cn))) continue;
            for (int back = 1; back <= 3; ++back) {
                const int j = (k - back + 4) % 4;
                const int cj = cyc[static_cast<std::size_t>(j)], cj1 = cyc[static_cast<std::size_t>((j + 1) % 4)];
                if (!inside(cj) && inside(cj1)) {
                    segs.emplace_back(edge_between(ck, cn), edge_between(cj, cj1));
                    break;
                }
            }
        }
    }
    return segs;
}

inline std::vector<std::vector<int>> loops(int case_index) {
    std::map<int, int> next;
    for (const auto& [a, b] : face_segments(case_index)) next[a] = b;
    std::vector<std::vector<int>> out;
    while (!next.empty()) {
        std::vector<int> loop;
        int e = next.begin()->first;
        while (next.count(e)) {
            loop.push_back(e);
            const int n = next[e];
            next.erase(e);
            e = n;
        }
        out.push_back(std::move(loop));
    }
    return out;
}

inline Vec3 edge_midpoint(int e) {
    const auto& ed = edges()[static_cast<std::size_t>(e)];
    return (corner_offset(ed.from) + corner_offset(ed.to)) * 0.5;
}

inline std::array<TriangleList, 256> build_table() {
    std::array<TriangleList, 256> table;
    for (int c = 0; c < 256; ++c) {
        for (const auto& loop : loops(c)) {
            for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
                table[static_cast<std::size_t>(c)].push_back({static_cast<std::uint8_t>(loop[0]),
                                                              static_cast<std::uint8_t>(loop[i]),
                                                              static_cast<std::uint8_t>(loop[i + 1])});
            }
        }
    }
    // Orient so face normals point into the inside (lower-valued) region; the
    // face rule gives one consistent orientation, so case 1 fixes the sign.
    const auto& t = table[1].front();
    const Vec3 a = edge_midpoint(t[0]), b = edge_midpoint(t[1]), c = edge_midpoint(t[2]);
    const Vec3 n = cross(b - a, c - a);
    if (dot(n, corner_offset(0) - a) < 0) {
        for (auto& list : table)
            for (auto& tri : list) std::swap(tri[1], tri[2]);
    }
    return table;
}

} // namespace detail

inline const std::array<TriangleList, 256>& triangle_table() {
    static const auto table = detail::build_table();
    return table;
}

} // namespace mc

// ---------------------------------------------------------------------------
// Gradient normals

namespace detail {

/// Field gradient at a valid node: central differences where both neighbours
/// are valid, one-sided otherwise; zero on an axis with no valid neighbour.
inline Vec3 node_gradient(const ScalarField3D& f, std::size_t i, std::size_t j, std::size_t k) {
    const auto& g = f.grid;
    const std::array<std::size_t, 3> idx{i, j, k};
    const double here = f.at(i, j, k);
    Vec3 grad;
    for (int a = 0; a < 3; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        std::optional<double> lo, hi;
        if (idx[ua] > 0) {
            auto n = idx;
            --n[ua];
            const double v = f.at(n[0], n[1], n[2]);
            if (!is_invalid(v)) lo = v;
        }
        if (idx[ua] + 1 < g.dims[ua]) {
            auto n = idx;
            ++n[ua];
            const double v = f.at(n[0], n[1], n[2]);
            if (!is_invalid(v)) hi = v;
        }
        const double h = g.spacing[a];
        if (lo && hi) grad[a] = (*hi - *lo) / (2 * h);
        else if (hi) grad[a] = (*hi - here) / h;
        else if (lo) grad[a] = (here - *lo) / h;
    }
    return grad;
}

inline Vec3 interpolated_gradient(const ScalarField3D& f, std::array<std::size_t, 3> n0, int axis, double t) {
    auto n1 = n0;
    ++n1[static_cast<std::size_t>(axis)];
    const Vec3 g0 = node_gradient(f, n0[0], n0[1], n0[2]);
    const Vec3 g1 = node_gradient(f, n1[0], n1[1], n1[2]);
    return g0 + (g1 - g0) * t;
}

} // namespace detail

inline constexpr double kMinGradient = 1e-12;

/// Unit normal at a point on a grid edge: the negated gradient, linearly
/// interpolated between the edge's end nodes. Points toward lower values.
inline Vec3 estimate_gradient_normal(const ScalarField3D& f, Vec3 p) {
    const auto& g = f.grid;
    std::array<std::size_t, 3> n0{};
    int axis = -1;
    double t = 0;
    for (int a = 0; a < 3; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        double u = (p[a] - g.origin[a]) / g.spacing[a];
        const double r = std::round(u);
        if (std::abs(u - r) < 1e-9) u = r;
        if (u < 0 || u > static_cast<double>(g.dims[ua] - 1))
            fail(ErrorCode::CoordinateOutOfRange, "point outside the grid");
        if (u == r) {
            n0[ua] = static_cast<std::size_t>(r);
            continue;
        }
        if (axis >= 0) fail(ErrorCode::BadArgument, "point is not on a grid edge");
        axis = a;
        n0[ua] = static_cast<std::size_t>(std::floor(u));
        t = u - std::floor(u);
    }
    if (axis < 0) {
        // on a node: any edge through it gives t = 0
        axis = n0[0] + 1 < g.dims[0] ? 0 : (n0[1] + 1 < g.dims[1] ? 1 : 2);
        if (n0[static_cast<std::size_t>(axis)] + 1 >= g.dims[static_cast<std::size_t>(axis)]) {
            const Vec3 grad = detail::node_gradient(f, n0[0], n0[1], n0[2]);
            if (norm(grad) < kMinGradient) fail(ErrorCode::DegenerateGradient, "gradient vanishes");
            return normalized(-grad);
        }
    }
    auto n1 = n0;
    ++n1[static_cast<std::size_t>(axis)];
    if (is_invalid(f.at(n0[0], n0[1], n0[2])) || is_invalid(f.at(n1[0], n1[1], n1[2])))
        fail(ErrorCode::BadArgument, "edge touches an invalid sample");
    const Vec3 grad = detail::interpolated_gradient(f, n0, axis, t);
    if (norm(grad) < kMinGradient) fail(ErrorCode::DegenerateGradient, "gradient vanishes");
    return normalized(-grad);
}

// ---------------------------------------------------------------------------
// Extraction

inline constexpr double kEdgeClamp = 1e-6;

/// Indexed isosurface of `f` at `iso`. Cells with any invalid corner produce no
/// triangles. Triangles face toward decreasing field values.
inline TriangleMesh marching_cubes(const ScalarField3D& f, double iso) {
    const auto& g = f.grid;
    if (g.dims[0] < 2 || g.dims[1] < 2 || g.dims[2] < 2)
        fail(ErrorCode::FieldTooSmall, "field '" + f.name + "' needs at least 2 nodes per axis");
    if (!std::isfinite(iso)) fail(ErrorCode::NonFiniteIso, "iso value must be finite");

    const auto& table = mc::triangle_table();
    const auto& edge_list = mc::edges();

    TriangleMesh mesh;
    mesh.material.name = f.name;
    std::vector<bool> degenerate;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;

    auto vertex_on_edge = [&](std::array<std::size_t, 3> n0, int axis) -> std::uint32_t {
        const std::uint64_t key = 3 * static_cast<std::uint64_t>(g.index(n0[0], n0[1], n0[2])) + static_cast<std::uint64_t>(axis);
        if (const auto it = edge_vertex.find(key); it != edge_vertex.end()) return it->second;

        auto n1 = n0;
        ++n1[static_cast<std::size_t>(axis)];
        const double v0 = f.at(n0[0], n0[1], n0[2]);
        const double v1 = f.at(n1[0], n1[1], n1[2]);
        const double t = std::clamp((iso - v0) / (v1 - v0), kEdgeClamp, 1 - kEdgeClamp);
        const Vec3 p0 = g.node_position(n0[0], n0[1], n0[2]);
        const Vec3 p1 = g.node_position(n1[0], n1[1], n1[2]);
        const Vec3 grad = detail::interpolated_gradient(f, n0, axis, t);

        const auto id = static_cast<std::uint32_t>(mesh.positions.size());
        mesh.positions.push_back(p0 + (p1 - p0) * t);
        const bool flat = norm(grad) < kMinGradient;
        mesh.normals.push_back(flat ? Vec3{} : normalized(-grad));
        degenerate.push_back(flat);
        edge_vertex.emplace(key, id);
        return id;
    };

    std::array<double, 8> val{};
    std::array<std::uint32_t, 12> vid{};
    for (std::size_t k = 0; k + 1 < g.dims[2]; ++k) {
        for (std::size_t j = 0; j + 1 < g.dims[1]; ++j) {
            for (std::size_t i = 0; i + 1 < g.dims[0]; ++i) {
                bool valid = true;
                int case_index = 0;
                for (int c = 0; c < 8 && valid; ++c) {
                    const double v = f.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
                    valid = !is_invalid(v);
                    val[static_cast<std::size_t>(c)] = v;
                    // a corner equal to iso counts as above it
                    if (v < iso) case_index |= 1 << c;
                }
                if (!valid) continue;
                const auto& tris = table[static_cast<std::size_t>(case_index)];
                if (tris.empty()) continue;

                for (int e = 0; e < 12; ++e) {
                    const auto& ed = edge_list[static_cast<std::size_t>(e)];
                    const bool a_in = (case_index >> ed.from) & 1, b_in = (case_index >> ed.to) & 1;
                    if (a_in == b_in) continue;
                    const std::array<std::size_t, 3> n0{i + (ed.from & 1), j + ((ed.from >> 1) & 1),
                                                        k + ((ed.from >> 2) & 1)};
                    vid[static_cast<std::size_t>(e)] = vertex_on_edge(n0, ed.axis);
                }
                for (const auto& t : tris)
                    mesh.indices.insert(mesh.indices.end(), {vid[t[0]], vid[t[1]], vid[t[2]]});
            }
        }
    }

    if (std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end()) {
        const auto face = area_weighted_normals(mesh);
        for (std::size_t v = 0; v < degenerate.size(); ++v) {
            if (!degenerate[v]) continue;
            mesh.normals[v] = norm(face[v]) > 0 ? face[v] : Vec3{0, 0, 1};
        }
    }
    return mesh;
}

} // namespace seabed
