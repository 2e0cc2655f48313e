#pragma once

// Fence diagrams: vertical stratum panels between consecutive boreholes of a
// survey line.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "geomodel.hpp"
#include "mesh.hpp"

namespace seabed {

struct FencePanel {
    std::string survey_line_id;
    std::string borehole_a;
    std::string borehole_b;
    std::vector<TriangleMesh> meshes; // one per stratum, stratigraphic order
};

namespace detail {

// Boundary elevations of the strata that occur at either end of a segment,
// sampled at the columns s = 0, (s = L/2), s = L. boundary[k] is the top of
// stratum k; boundary[n] is the base of the deepest one.
struct PanelColumns {
    std::vector<std::string> strata;
    std::vector<double> s;                     // 2 or 3 column positions
    std::vector<std::vector<double>> boundary; // [column][k]
};

// Column boundaries at one borehole. A stratum missing there gets zero
// thickness at the boundary it would have occupied.
inline std::vector<double> column_boundaries(const Borehole& bh, const std::vector<std::string>& strata) {
    const std::size_t n = strata.size();
    std::vector<std::optional<double>> tops(n + 1);
    for (std::size_t k = 0; k < n; ++k)
        if (const auto* iv = bh.find(strata[k])) tops[k] = bh.world_z(iv->top_depth);
    tops[n] = bh.world_z(bh.intervals.back().bottom_depth);

    std::vector<double> out(n + 1);
    out[n] = *tops[n];
    for (std::size_t k = n; k-- > 0;) {
        // absent strata collapse onto the next present boundary below
        out[k] = tops[k] ? *tops[k] : out[k + 1];
    }
    return out;
}

inline PanelColumns panel_columns(const StratigraphicOrder& order, const Borehole& a, const Borehole& b,
                                  double length) {
    PanelColumns pc;
    std::vector<bool> at_a, at_b;
    for (const auto& s : order.strata) {
        const bool in_a = a.find(s.id) != nullptr, in_b = b.find(s.id) != nullptr;
        if (!in_a && !in_b) continue;
        pc.strata.push_back(s.id);
        at_a.push_back(in_a);
        at_b.push_back(in_b);
    }
    const std::size_t n = pc.strata.size();
    const auto ba = column_boundaries(a, pc.strata);
    const auto bb = column_boundaries(b, pc.strata);

    bool pinch = false;
    for (std::size_t k = 0; k < n; ++k) pinch = pinch || (at_a[k] != at_b[k]);
    if (!pinch) {
        pc.s = {0.0, length};
        pc.boundary = {ba, bb};
        return pc;
    }

    std::vector<double> mid(n + 1);
    for (std::size_t k = 0; k <= n; ++k) mid[k] = 0.5 * (ba[k] + bb[k]);

    // Each run of consecutive one-sided strata pinches to a single point at the
    // midpoint; the envelope edges stay straight.
    for (std::size_t k = 0; k < n;) {
        if (at_a[k] == at_b[k]) {
            ++k;
            continue;
        }
        std::size_t end = k;
        while (end < n && at_a[end] != at_b[end]) ++end;
        double z;
        if (k == 0) {
            z = mid[0];
        } else if (end == n) {
            z = mid[n];
        } else {
            z = 0;
            for (std::size_t q = k; q <= end; ++q) z += mid[q];
            z /= static_cast<double>(end - k + 1);
        }
        for (std::size_t q = k; q <= end; ++q) mid[q] = z;
        k = end;
    }

    pc.s = {0.0, 0.5 * length, length};
    pc.boundary = {ba, mid, bb};
    return pc;
}

} // namespace detail

/// Builds one panel between two boreholes. Strata shared by no endpoint
/// produce nothing; a segment whose ends share no stratum yields an empty panel.
inline FencePanel build_fence_panel(const StratigraphicOrder& order, const Borehole& a, const Borehole& b,
                                    const std::string& line_id = {}) {
    FencePanel panel{line_id, a.id, b.id, {}};
    if (a.intervals.empty() || b.intervals.empty()) return panel;

    bool shared = false;
    for (const auto& iv : a.intervals) shared = shared || b.find(iv.stratum_id) != nullptr;
    if (!shared) return panel;

    const Vec2 d = b.location - a.location;
    const double length = std::hypot(d.x, d.y);
    if (!(length > 0)) fail(ErrorCode::BoreholeMissing, "boreholes '" + a.id + "' and '" + b.id + "' coincide");
    const Vec2 dir = d * (1.0 / length);
    const Vec3 plane_normal{dir.y, -dir.x, 0};

    const auto pc = detail::panel_columns(order, a, b, length);
    auto world = [&](double s, double z) { return Vec3{a.location.x + dir.x * s, a.location.y + dir.y * s, z}; };

    for (std::size_t k = 0; k < pc.strata.size(); ++k) {
        TriangleMesh mesh;
        mesh.material = Material{pc.strata[k], order.color_of(pc.strata[k]), {}};
        for (std::size_t c = 0; c < pc.s.size(); ++c) {
            mesh.positions.push_back(world(pc.s[c], pc.boundary[c][k]));     // top: 2c
            mesh.positions.push_back(world(pc.s[c], pc.boundary[c][k + 1])); // bottom: 2c + 1
        }
        auto emit = [&](std::uint32_t i, std::uint32_t j, std::uint32_t l) {
            if (triangle_area(mesh.positions[i], mesh.positions[j], mesh.positions[l]) > 1e-12)
                mesh.indices.insert(mesh.indices.end(), {i, j, l});
        };
        for (std::uint32_t c = 0; c + 1 < pc.s.size(); ++c) {
            const std::uint32_t tl = 2 * c, bl = 2 * c + 1, tr = 2 * c + 2, br = 2 * c + 3;
            emit(tl, bl, br);
            emit(tl, br, tr);
        }
        if (mesh.indices.empty()) continue;

        // drop corners no triangle uses (pinched-away columns)
        std::vector<std::int64_t> remap(mesh.positions.size(), -1);
        TriangleMesh packed;
        packed.material = mesh.material;
        for (auto& idx : mesh.indices) {
            if (remap[idx] < 0) {
                remap[idx] = static_cast<std::int64_t>(packed.positions.size());
                packed.positions.push_back(mesh.positions[idx]);
            }
            packed.indices.push_back(static_cast<std::uint32_t>(remap[idx]));
        }
        packed.normals.assign(packed.positions.size(), plane_normal);
        panel.meshes.push_back(std::move(packed));
    }
    return panel;
}

/// One panel per consecutive borehole pair of the survey line.
inline std::vector<FencePanel> build_fence_diagram(const Dataset& ds, const std::string& survey_line_id) {
    const auto it = ds.survey_lines.find(survey_line_id);
    if (it == ds.survey_lines.end())
        fail(ErrorCode::SurveyLineNotFound, "unknown survey line '" + survey_line_id + "'");
    const auto& ids = it->second.borehole_ids;
    if (ids.size() < 2) fail(ErrorCode::BoreholeMissing, "survey line '" + survey_line_id + "' has fewer than 2 boreholes");

    std::vector<FencePanel> panels;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        const auto a = ds.boreholes.find(ids[i]);
        const auto b = ds.boreholes.find(ids[i + 1]);
        if (a == ds.boreholes.end() || b == ds.boreholes.end())
            fail(ErrorCode::BoreholeMissing, "survey line '" + survey_line_id + "' references a missing borehole");
        panels.push_back(build_fence_panel(ds.order, a->second, b->second, survey_line_id));
    }
    return panels;
}

inline std::map<std::string, double> panel_cross_section_area(const FencePanel& panel) {
    std::map<std::string, double> out;
    for (const auto& m : panel.meshes) out[m.material.name] += surface_area(m);
    return out;
}

} // namespace seabed
