#pragma once

// Texture draping and mesh/scene serialization (binary glTF 2.0 and OBJ).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "mesh.hpp"

namespace seabed {

struct SceneNode {
    TriangleMesh mesh;
    std::string label;
    std::string group; // visibility group: stratum id, "terrain", "isosurface", "fence", ...
};

struct EmbeddedTexture {
    std::string name;
    std::vector<std::uint8_t> png;
};

struct Scene {
    std::string name;
    std::vector<SceneNode> nodes;
    std::vector<EmbeddedTexture> textures;
};

struct PlanExtent {
    double x_min = 0, y_min = 0, x_max = 1, y_max = 1;
};

/// Planar orthographic UVs from the vertices' (x, y) over the image extent,
/// clamped to [0, 1]. Geometry is untouched.
inline TriangleMesh drape_texture(const TriangleMesh& mesh, const PlanExtent& extent, const std::string& texture_name) {
    if (!(extent.x_max > extent.x_min) || !(extent.y_max > extent.y_min))
        fail(ErrorCode::DegenerateExtent, "image extent must have x_max > x_min and y_max > y_min");
    TriangleMesh out = mesh;
    out.uvs.clear();
    out.uvs.reserve(mesh.positions.size());
    for (const auto& p : mesh.positions) {
        out.uvs.push_back({std::clamp((p.x - extent.x_min) / (extent.x_max - extent.x_min), 0.0, 1.0),
                           std::clamp((p.y - extent.y_min) / (extent.y_max - extent.y_min), 0.0, 1.0)});
    }
    out.material.texture = texture_name;
    return out;
}

// ---------------------------------------------------------------------------
// GLB

namespace detail {

class BinBuilder {
public:
    // Appends data as a 4-byte aligned buffer view; returns its index.
    std::size_t add_view(std::span<const std::uint8_t> data, std::optional<int> target) {
        while (bin_.size() % 4) bin_.push_back(0);
        nlohmann::ordered_json view;
        view["buffer"] = 0;
        view["byteOffset"] = bin_.size();
        view["byteLength"] = data.size();
        if (target) view["target"] = *target;
        bin_.insert(bin_.end(), data.begin(), data.end());
        views_.push_back(std::move(view));
        return views_.size() - 1;
    }

    std::vector<std::uint8_t>& bin() { return bin_; }
    nlohmann::ordered_json& views() { return views_; }

private:
    std::vector<std::uint8_t> bin_;
    nlohmann::ordered_json views_ = nlohmann::ordered_json::array();
};

inline void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::vector<std::uint8_t> floats_le(const std::vector<float>& v) {
    std::vector<std::uint8_t> out;
    out.reserve(4 * v.size());
    for (float f : v) put_le32(out, std::bit_cast<std::uint32_t>(f));
    return out;
}

constexpr int kArrayBuffer = 34962;
constexpr int kElementArrayBuffer = 34963;
constexpr int kFloat = 5126;
constexpr int kUnsignedInt = 5125;

} // namespace detail

/// Single-file binary glTF: a root node (z-up to y-up rotation) with one child
/// node per scene node, named by its label.
inline std::vector<std::uint8_t> export_gltf(const Scene& scene) {
    if (scene.nodes.empty()) fail(ErrorCode::EmptyScene, "scene '" + scene.name + "' has no nodes");
    {
        std::set<std::string> labels;
        for (const auto& n : scene.nodes) {
            if (n.mesh.empty() || n.mesh.positions.empty())
                fail(ErrorCode::EmptyMesh, "node '" + n.label + "' has an empty mesh");
            if (!labels.insert(n.label).second) fail(ErrorCode::DuplicateId, "node label '" + n.label + "' repeated");
        }
    }

    using json = nlohmann::ordered_json;
    detail::BinBuilder bin;
    json accessors = json::array(), meshes = json::array(), materials = json::array(), nodes = json::array();
    json images = json::array(), textures = json::array();
    std::map<std::string, std::size_t> texture_index;

    for (const auto& tex : scene.textures) {
        const auto view = bin.add_view(tex.png, std::nullopt);
        images.push_back({{"name", tex.name}, {"bufferView", view}, {"mimeType", "image/png"}});
        textures.push_back({{"sampler", 0}, {"source", images.size() - 1}});
        texture_index[tex.name] = textures.size() - 1;
    }

    auto add_accessor = [&](const std::vector<float>& data, const char* type, int components, bool bounds) {
        const auto view = bin.add_view(detail::floats_le(data), detail::kArrayBuffer);
        json acc{{"bufferView", view},
                 {"componentType", detail::kFloat},
                 {"count", data.size() / static_cast<std::size_t>(components)},
                 {"type", type}};
        if (bounds) {
            std::vector<float> lo(static_cast<std::size_t>(components), std::numeric_limits<float>::max());
            std::vector<float> hi(static_cast<std::size_t>(components), std::numeric_limits<float>::lowest());
            for (std::size_t i = 0; i < data.size(); ++i) {
                const auto c = i % static_cast<std::size_t>(components);
                lo[c] = std::min(lo[c], data[i]);
                hi[c] = std::max(hi[c], data[i]);
            }
            acc["min"] = lo;
            acc["max"] = hi;
        }
        accessors.push_back(std::move(acc));
        return accessors.size() - 1;
    };

    json children = json::array();
    for (const auto& node : scene.nodes) {
        const auto& m = node.mesh;
        std::vector<float> pos;
        pos.reserve(3 * m.positions.size());
        for (const auto& p : m.positions)
            pos.insert(pos.end(), {static_cast<float>(p.x), static_cast<float>(p.y), static_cast<float>(p.z)});

        json attributes;
        attributes["POSITION"] = add_accessor(pos, "VEC3", 3, true);
        if (!m.normals.empty()) {
            std::vector<float> nrm;
            for (const auto& n : m.normals)
                nrm.insert(nrm.end(), {static_cast<float>(n.x), static_cast<float>(n.y), static_cast<float>(n.z)});
            attributes["NORMAL"] = add_accessor(nrm, "VEC3", 3, false);
        }
        if (!m.uvs.empty()) {
            // glTF texture space has its origin at the top-left; imagery is north-up
            std::vector<float> uv;
            for (const auto& t : m.uvs) uv.insert(uv.end(), {static_cast<float>(t.x), static_cast<float>(1.0 - t.y)});
            attributes["TEXCOORD_0"] = add_accessor(uv, "VEC2", 2, false);
        }

        std::vector<std::uint8_t> idx;
        idx.reserve(4 * m.indices.size());
        for (auto i : m.indices) detail::put_le32(idx, i);
        const auto idx_view = bin.add_view(idx, detail::kElementArrayBuffer);
        accessors.push_back({{"bufferView", idx_view},
                             {"componentType", detail::kUnsignedInt},
                             {"count", m.indices.size()},
                             {"type", "SCALAR"}});
        const auto idx_accessor = accessors.size() - 1;

        const auto& c = m.material.color;
        json pbr{{"baseColorFactor", {c.r, c.g, c.b, c.a}}, {"metallicFactor", 0.0}, {"roughnessFactor", 1.0}};
        if (!m.material.texture.empty()) {
            const auto it = texture_index.find(m.material.texture);
            if (it == texture_index.end())
                fail(ErrorCode::BadArgument, "texture '" + m.material.texture + "' is not embedded in the scene");
            pbr["baseColorTexture"] = {{"index", it->second}};
        }
        json material{{"name", m.material.name}, {"pbrMetallicRoughness", pbr}, {"doubleSided", true}};
        if (c.a < 1) material["alphaMode"] = "BLEND";
        materials.push_back(std::move(material));

        meshes.push_back({{"name", node.label},
                          {"primitives",
                           json::array({{{"attributes", attributes},
                                         {"indices", idx_accessor},
                                         {"material", materials.size() - 1},
                                         {"mode", 4}}})}});
        nodes.push_back({{"name", node.label}, {"mesh", meshes.size() - 1}, {"extras", {{"group", node.group}}}});
        children.push_back(nodes.size());
    }

    json root{{"name", scene.name}, {"rotation", {-0.7071067811865476, 0.0, 0.0, 0.7071067811865476}}, {"children", children}};
    json all_nodes = json::array({root});
    for (auto& n : nodes) all_nodes.push_back(std::move(n));

    while (bin.bin().size() % 4) bin.bin().push_back(0);

    json doc;
    doc["asset"] = {{"version", "2.0"}, {"generator", "seabedkit"}};
    doc["scene"] = 0;
    doc["scenes"] = json::array({{{"name", scene.name}, {"nodes", {0}}}});
    doc["nodes"] = std::move(all_nodes);
    doc["meshes"] = std::move(meshes);
    doc["materials"] = std::move(materials);
    if (!textures.empty()) {
        doc["textures"] = std::move(textures);
        doc["images"] = std::move(images);
        doc["samplers"] = json::array({{{"magFilter", 9729}, {"minFilter", 9729}}});
    }
    doc["accessors"] = std::move(accessors);
    doc["bufferViews"] = std::move(bin.views());
    doc["buffers"] = json::array({{{"byteLength", bin.bin().size()}}});

    std::string text = doc.dump();
    while (text.size() % 4) text.push_back(' ');

    std::vector<std::uint8_t> out;
    const auto total = 12 + 8 + text.size() + 8 + bin.bin().size();
    out.reserve(total);
    detail::put_le32(out, 0x46546C67); // "glTF"
    detail::put_le32(out, 2);
    detail::put_le32(out, static_cast<std::uint32_t>(total));
    detail::put_le32(out, static_cast<std::uint32_t>(text.size()));
    detail::put_le32(out, 0x4E4F534A); // "JSON"
    out.insert(out.end(), text.begin(), text.end());
    detail::put_le32(out, static_cast<std::uint32_t>(bin.bin().size()));
    detail::put_le32(out, 0x004E4942); // "BIN\0"
    out.insert(out.end(), bin.bin().begin(), bin.bin().end());
    return out;
}

// ---------------------------------------------------------------------------
// OBJ

inline std::string export_obj(const TriangleMesh& mesh) {
    if (mesh.empty() || mesh.positions.empty()) fail(ErrorCode::EmptyMesh, "mesh has no triangles");
    std::string out;
    char buf[128];
    for (const auto& p : mesh.positions) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", p.x, p.y, p.z);
        out += buf;
    }
    for (const auto& t : mesh.uvs) {
        std::snprintf(buf, sizeof buf, "vt %.9g %.9g\n", t.x, t.y);
        out += buf;
    }
    for (const auto& n : mesh.normals) {
        std::snprintf(buf, sizeof buf, "vn %.9g %.9g %.9g\n", n.x, n.y, n.z);
        out += buf;
    }
    const bool uv = !mesh.uvs.empty(), nrm = !mesh.normals.empty();
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        out += 'f';
        for (int k = 0; k < 3; ++k) {
            const auto i = std::to_string(mesh.indices[3 * t + static_cast<std::size_t>(k)] + 1);
            out += ' ' + i;
            if (uv && nrm) out += '/' + i + '/' + i;
            else if (uv) out += '/' + i;
            else if (nrm) out += "//" + i;
        }
        out += '\n';
    }
    return out;
}

} // namespace seabed
