#pragma once

// Every artifact the service serves, as a pure function of the dataset and the
// canonicalized request parameters. The CLI writes the same bytes.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset_io.hpp"
#include "error.hpp"
#include "fence.hpp"
#include "isosurface.hpp"
#include "png.hpp"
#include "scene_export.hpp"
#include "triangulation.hpp"
#include "volume.hpp"

namespace seabed::products {

inline const ScalarField3D& scalar_field(const DatasetBundle& b, const std::string& name) {
    const auto it = b.dataset.scalar_fields.find(name);
    if (it == b.dataset.scalar_fields.end()) fail(ErrorCode::FieldNotFound, "unknown scalar field '" + name + "'");
    return it->second;
}

inline const VectorField3D& vector_field(const DatasetBundle& b, const std::string& name) {
    const auto it = b.dataset.vector_fields.find(name);
    if (it == b.dataset.vector_fields.end()) fail(ErrorCode::FieldNotFound, "unknown vector field '" + name + "'");
    return it->second;
}

namespace detail {

inline nlohmann::ordered_json grid_json(const GridSpec& g) {
    nlohmann::ordered_json j;
    j["dims"] = {g.dims[0], g.dims[1], g.dims[2]};
    j["origin"] = {g.origin.x, g.origin.y, g.origin.z};
    j["spacing"] = {g.spacing.x, g.spacing.y, g.spacing.z};
    j["extent_min"] = {g.axis_min(0), g.axis_min(1), g.axis_min(2)};
    j["extent_max"] = {g.axis_max(0), g.axis_max(1), g.axis_max(2)};
    j["unit"] = g.unit;
    j["axes"] = {g.axes[0], g.axes[1], g.axes[2]};
    return j;
}

} // namespace detail

inline std::string dataset_summary_json(const DatasetBundle& b) {
    using json = nlohmann::ordered_json;
    const auto& ds = b.dataset;
    json j;
    j["boreholes"] = json::array();
    for (const auto& [id, bh] : ds.boreholes) {
        json intervals = json::array();
        for (const auto& iv : bh.intervals)
            intervals.push_back({{"stratum", iv.stratum_id}, {"top_depth", iv.top_depth}, {"bottom_depth", iv.bottom_depth}});
        j["boreholes"].push_back({{"id", id},
                                  {"x", bh.location.x},
                                  {"y", bh.location.y},
                                  {"collar_elevation", bh.collar_elevation},
                                  {"intervals", intervals}});
    }
    j["strata"] = json::array();
    for (const auto& s : ds.order.strata)
        j["strata"].push_back({{"id", s.id}, {"color", {s.color.r, s.color.g, s.color.b, s.color.a}}});
    j["survey_lines"] = json::array();
    for (const auto& [id, l] : ds.survey_lines) j["survey_lines"].push_back({{"id", id}, {"boreholes", l.borehole_ids}});
    j["horizons"] = horizon_strata(ds);
    j["fields"] = json::array();
    for (const auto& [name, f] : ds.scalar_fields) {
        auto e = detail::grid_json(f.grid);
        const auto [lo, hi] = f.valid_range();
        e["name"] = name;
        e["components"] = 1;
        e["value_range"] = {lo, hi};
        j["fields"].push_back(std::move(e));
    }
    for (const auto& [name, f] : ds.vector_fields) {
        auto e = detail::grid_json(f.grid);
        e["name"] = name;
        e["components"] = 3;
        j["fields"].push_back(std::move(e));
    }
    j["terrain"] = {{"samples", b.bathymetry.empty() ? ds.boreholes.size() : b.bathymetry.size()},
                    {"textured", b.sonar.has_value()}};
    return j.dump(2) + "\n";
}

inline std::vector<std::uint8_t> isosurface_glb(const DatasetBundle& b, const std::string& field, double iso) {
    const auto& f = scalar_field(b, field);
    auto mesh = marching_cubes(f, iso);
    if (mesh.empty())
        fail(ErrorCode::EmptyMesh, "iso " + format_number(iso) + " does not intersect field '" + field + "'");
    const auto [lo, hi] = f.valid_range();
    mesh.material.color = apply_transfer_function(default_transfer_function(lo, hi), iso);
    mesh.material.color.a = 1;
    Scene scene{"isosurface " + field + " " + format_number(iso), {}, {}};
    scene.nodes.push_back({std::move(mesh), field + "@" + format_number(iso), "isosurface"});
    return export_gltf(scene);
}

struct SliceProduct {
    std::vector<std::uint8_t> png;
    std::string extent_header; // "<u label>:<min>,<max>;<v label>:<min>,<max>"
    std::string sidecar_json;
};

inline SliceProduct slice(const DatasetBundle& b, const std::string& field, Axis axis, double coord) {
    const auto& f = scalar_field(b, field);
    const auto [lo, hi] = f.valid_range();
    const auto img = slice_section(f, axis, coord, default_transfer_function(lo, hi));
    const auto& e = img.geo_extent;

    SliceProduct out;
    out.png = encode_png(to_rgba8(img));
    out.extent_header = e.u_label + ":" + format_number(e.u_min) + "," + format_number(e.u_max) + ";" + e.v_label + ":" +
                        format_number(e.v_min) + "," + format_number(e.v_max);
    nlohmann::ordered_json j;
    j["field"] = field;
    j["axis"] = std::string(1, axis_name(axis));
    j["coordinate"] = img.coordinate;
    j["width"] = img.width;
    j["height"] = img.height;
    j["geo_extent"] = {{"u", {{"label", e.u_label}, {"min", e.u_min}, {"max", e.u_max}}},
                       {"v", {{"label", e.v_label}, {"min", e.v_min}, {"max", e.v_max}}}};
    out.sidecar_json = j.dump(2) + "\n";
    return out;
}

inline Scene fence_scene(const DatasetBundle& b, const std::string& line_id) {
    Scene scene{"fence " + line_id, {}, {}};
    for (const auto& panel : build_fence_diagram(b.dataset, line_id)) {
        for (const auto& m : panel.meshes) {
            scene.nodes.push_back(
                {m, line_id + "/" + panel.borehole_a + "-" + panel.borehole_b + "/" + m.material.name, m.material.name});
        }
    }
    if (scene.nodes.empty()) fail(ErrorCode::EmptyScene, "survey line '" + line_id + "' has no shared strata");
    return scene;
}

inline std::vector<std::uint8_t> fence_glb(const DatasetBundle& b, const std::string& line_id) {
    return export_gltf(fence_scene(b, line_id));
}

/// Horizon surface, corrected to any drilling observations recorded for it.
inline TriangleMesh corrected_horizon(const DatasetBundle& b, const std::string& stratum) {
    auto mesh = build_horizon_surface(b.dataset, stratum);
    std::vector<Vec3> obs;
    for (const auto& o : b.corrections.observations)
        if (o.stratum == stratum) obs.push_back(o.position);
    if (!obs.empty()) mesh = apply_drilling_correction(mesh, obs, b.corrections.radius);
    return mesh;
}

inline std::vector<std::uint8_t> horizon_glb(const DatasetBundle& b, const std::string& stratum) {
    Scene scene{"horizon " + stratum, {}, {}};
    scene.nodes.push_back({corrected_horizon(b, stratum), stratum, stratum});
    return export_gltf(scene);
}

/// Layer diagram: every horizon that has enough boreholes, one node each.
inline std::vector<std::uint8_t> horizons_glb(const DatasetBundle& b) {
    Scene scene{"horizons", {}, {}};
    for (const auto& s : horizon_strata(b.dataset)) scene.nodes.push_back({corrected_horizon(b, s), s, s});
    return export_gltf(scene);
}

inline std::vector<std::uint8_t> terrain_glb(const DatasetBundle& b) {
    std::vector<Vec3> samples = b.bathymetry;
    if (samples.empty())
        for (const auto& [id, bh] : b.dataset.boreholes)
            samples.push_back({bh.location.x, bh.location.y, bh.collar_elevation});
    auto mesh = build_terrain_tin(samples);
    mesh.material.color = {0.55, 0.5, 0.4, 1};
    Scene scene{"terrain", {}, {}};
    if (b.sonar) {
        mesh = drape_texture(mesh, b.sonar->extent, "sonar");
        mesh.material.color = {1, 1, 1, 1};
        scene.textures.push_back({"sonar", b.sonar->png});
    }
    scene.nodes.push_back({std::move(mesh), "terrain", "terrain"});
    return export_gltf(scene);
}

inline std::vector<std::uint8_t> spill_frames(const DatasetBundle& b, const SpillConfig& config, std::uint64_t from,
                                              std::uint64_t count) {
    SpillSimulation sim(config, vector_field(b, config.current_field));
    return sim.frames_binary(from, count);
}

} // namespace seabed::products
