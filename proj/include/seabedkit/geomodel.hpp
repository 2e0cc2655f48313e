#pragma once

// Section-drilling data model: boreholes with stratum columns, the
// stratigraphic order, survey lines and regular gridded fields, plus the
// text/binary ingestion formats for each of them.

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "vec.hpp"

namespace seabed {

struct Rgba {
    double r = 0, g = 0, b = 0, a = 0;
    friend bool operator==(const Rgba&, const Rgba&) = default;
};

struct StratumInterval {
    std::string stratum_id;
    double top_depth = 0;    // meters below collar
    double bottom_depth = 0; // meters below collar
};

struct Borehole {
    std::string id;
    Vec2 location;
    double collar_elevation = 0; // meters, negative below sea level
    std::vector<StratumInterval> intervals;

    const StratumInterval* find(std::string_view stratum_id) const {
        for (const auto& iv : intervals)
            if (iv.stratum_id == stratum_id) return &iv;
        return nullptr;
    }

    // Depths are positive-down from the collar.
    double world_z(double depth) const { return collar_elevation - depth; }
};

struct StratumStyle {
    std::string id;
    Rgba color;
};

/// Youngest (shallowest) first.
struct StratigraphicOrder {
    std::vector<StratumStyle> strata;

    std::optional<std::size_t> index_of(std::string_view id) const {
        for (std::size_t i = 0; i < strata.size(); ++i)
            if (strata[i].id == id) return i;
        return std::nullopt;
    }

    Rgba color_of(std::string_view id) const {
        const auto i = index_of(id);
        return i ? strata[*i].color : Rgba{0.5, 0.5, 0.5, 1.0};
    }
};

struct SurveyLine {
    std::string id;
    std::vector<std::string> borehole_ids;
};

struct GridSpec {
    std::array<std::size_t, 3> dims{0, 0, 0};
    Vec3 origin;
    Vec3 spacing{1, 1, 1};
    std::string unit;
    std::array<std::string, 3> axes{"x", "y", "z"};

    std::size_t node_count() const { return dims[0] * dims[1] * dims[2]; }

    // x-fastest, then y, then z.
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return i + dims[0] * (j + dims[1] * k);
    }

    Vec3 node_position(std::size_t i, std::size_t j, std::size_t k) const {
        return {origin.x + static_cast<double>(i) * spacing.x, origin.y + static_cast<double>(j) * spacing.y,
                origin.z + static_cast<double>(k) * spacing.z};
    }

    double axis_min(int axis) const { return origin[axis]; }
    double axis_max(int axis) const {
        return origin[axis] + static_cast<double>(dims[static_cast<std::size_t>(axis)] - 1) * spacing[axis];
    }
};

inline constexpr double kInvalid = std::numeric_limits<double>::quiet_NaN();

inline bool is_invalid(double v) { return std::isnan(v); }

/// Scalar samples on a regular grid. Invalid samples are stored as NaN; the
/// sentinel declared by the source file (if numeric) is kept for writing back.
struct ScalarField3D {
    std::string name;
    GridSpec grid;
    std::vector<double> values;
    std::optional<double> declared_sentinel;

    double at(std::size_t i, std::size_t j, std::size_t k) const { return values[grid.index(i, j, k)]; }

    std::pair<double, double> valid_range() const {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (double v : values) {
            if (is_invalid(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return {lo, hi};
    }
};

/// Three interleaved components (u, v, w in m/s) per node.
struct VectorField3D {
    std::string name;
    GridSpec grid;
    std::vector<double> values;

    Vec3 at(std::size_t i, std::size_t j, std::size_t k) const {
        const std::size_t n = 3 * grid.index(i, j, k);
        return {values[n], values[n + 1], values[n + 2]};
    }
};

struct Dataset {
    std::map<std::string, Borehole> boreholes;
    StratigraphicOrder order;
    std::map<std::string, SurveyLine> survey_lines;
    std::map<std::string, ScalarField3D> scalar_fields;
    std::map<std::string, VectorField3D> vector_fields;
};

// ---------------------------------------------------------------------------
// Number text helpers

inline std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

/// Shortest text that parses back to exactly `v`.
inline std::string format_number(double v) {
    if (v == 0) v = 0; // drop the sign of -0
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Borehole CSV

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::string at_line(std::size_t line) { return "line " + std::to_string(line); }

} // namespace detail

/// Parses the two-row-kind borehole CSV. Boreholes are returned in order of
/// their header rows; interval rows keep their file order.
inline std::vector<Borehole> parse_boreholes(std::string_view text) {
    std::vector<Borehole> out;
    std::map<std::string, std::size_t, std::less<>> by_id;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;

        const auto fields = detail::split(line, ',');
        if (fields.size() != 4) {
            fail(ErrorCode::MalformedRow,
                 detail::at_line(line_no) + ": expected 4 fields, got " + std::to_string(fields.size()));
        }
        const std::string id(fields[0]);
        if (id.empty()) fail(ErrorCode::MalformedRow, detail::at_line(line_no) + ": empty borehole id");

        const auto known = by_id.find(id);
        const auto x = parse_number(fields[1]);
        if (known == by_id.end() && x) {
            const auto y = parse_number(fields[2]);
            const auto collar = parse_number(fields[3]);
            if (!y || !collar) fail(ErrorCode::MalformedRow, detail::at_line(line_no) + ": unparseable number");
            by_id.emplace(id, out.size());
            out.push_back(Borehole{id, {*x, *y}, *collar, {}});
            continue;
        }
        if (known == by_id.end()) {
            fail(ErrorCode::MalformedRow, detail::at_line(line_no) + ": interval for undeclared borehole '" + id + "'");
        }

        Borehole& bh = out[known->second];
        const std::string stratum(fields[1]);
        const auto top = parse_number(fields[2]);
        const auto bottom = parse_number(fields[3]);
        if (stratum.empty() || !top || !bottom)
            fail(ErrorCode::MalformedRow, detail::at_line(line_no) + ": unparseable interval");
        if (*top < 0 || *bottom <= *top)
            fail(ErrorCode::MalformedRow, detail::at_line(line_no) + ": interval must satisfy 0 <= top < bottom");
        if (bh.find(stratum))
            fail(ErrorCode::DuplicateBoreholeInterval,
                 detail::at_line(line_no) + ": stratum '" + stratum + "' repeated in borehole '" + id + "'");
        if (!bh.intervals.empty() && bh.intervals.back().bottom_depth != *top)
            fail(ErrorCode::NonContiguousColumn, detail::at_line(line_no) + ": borehole '" + id + "' jumps from " +
                                                     format_number(bh.intervals.back().bottom_depth) + " to " +
                                                     format_number(*top));
        bh.intervals.push_back({stratum, *top, *bottom});
    }
    return out;
}

inline std::string serialize_boreholes(std::span<const Borehole> boreholes) {
    std::string out;
    for (const auto& bh : boreholes) {
        out += bh.id + ',' + format_number(bh.location.x) + ',' + format_number(bh.location.y) + ',' +
               format_number(bh.collar_elevation) + '\n';
        for (const auto& iv : bh.intervals) {
            out += bh.id + ',' + iv.stratum_id + ',' + format_number(iv.top_depth) + ',' +
                   format_number(iv.bottom_depth) + '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Strata / survey lines JSON

inline StratigraphicOrder parse_strata(std::string_view text) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("strata") || !doc["strata"].is_array())
        fail(ErrorCode::BadHeader, "strata JSON must be an object with a 'strata' array");

    StratigraphicOrder order;
    std::set<std::string> seen;
    for (const auto& s : doc["strata"]) {
        if (!s.contains("id") || !s["id"].is_string()) fail(ErrorCode::BadHeader, "stratum without string id");
        StratumStyle style{s["id"].get<std::string>(), {0.5, 0.5, 0.5, 1.0}};
        if (style.id.empty()) fail(ErrorCode::BadHeader, "empty stratum id");
        if (!seen.insert(style.id).second) fail(ErrorCode::DuplicateId, "stratum '" + style.id + "' listed twice");
        if (s.contains("color")) {
            const auto& c = s["color"];
            if (!c.is_array() || c.size() != 4) fail(ErrorCode::BadHeader, "color of '" + style.id + "' must be RGBA");
            std::array<double, 4> rgba{};
            for (std::size_t i = 0; i < 4; ++i) {
                if (!c[i].is_number()) fail(ErrorCode::BadHeader, "non-numeric color component");
                rgba[i] = c[i].get<double>();
                if (!(rgba[i] >= 0 && rgba[i] <= 1)) fail(ErrorCode::BadHeader, "color component outside [0,1]");
            }
            style.color = {rgba[0], rgba[1], rgba[2], rgba[3]};
        }
        order.strata.push_back(std::move(style));
    }
    if (order.strata.empty()) fail(ErrorCode::BadHeader, "stratigraphic order is empty");
    return order;
}

inline std::vector<SurveyLine> parse_survey_lines(std::string_view text) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("lines") || !doc["lines"].is_array())
        fail(ErrorCode::BadHeader, "survey line JSON must be an object with a 'lines' array");
    std::vector<SurveyLine> lines;
    for (const auto& l : doc["lines"]) {
        if (!l.contains("id") || !l["id"].is_string() || !l.contains("boreholes") || !l["boreholes"].is_array())
            fail(ErrorCode::BadHeader, "survey line needs 'id' and 'boreholes'");
        SurveyLine line{l["id"].get<std::string>(), {}};
        for (const auto& b : l["boreholes"]) {
            if (!b.is_string()) fail(ErrorCode::BadHeader, "borehole ids must be strings");
            line.borehole_ids.push_back(b.get<std::string>());
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

// ---------------------------------------------------------------------------
// Gridded fields: JSON sidecar header + little-endian float32 payload

struct FieldHeader {
    std::string name;
    GridSpec grid;
    std::optional<double> sentinel;
    int components = 1;
};

inline FieldHeader parse_field_header(std::string_view text) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail(ErrorCode::BadHeader, "field header is not a JSON object");

    auto triple = [&](const char* key) {
        if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != 3)
            fail(ErrorCode::BadHeader, std::string("'") + key + "' must be a 3-element array");
        std::array<double, 3> v{};
        for (std::size_t i = 0; i < 3; ++i) {
            if (!doc[key][i].is_number()) fail(ErrorCode::BadHeader, std::string("'") + key + "' must be numeric");
            v[i] = doc[key][i].get<double>();
        }
        return v;
    };

    FieldHeader h;
    h.name = doc.value("name", std::string{});
    if (h.name.empty()) fail(ErrorCode::BadHeader, "field header needs a non-empty 'name'");

    if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].size() != 3)
        fail(ErrorCode::BadHeader, "'dims' must be a 3-element array");
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& d = doc["dims"][i];
        if (!d.is_number_integer() || d.get<long long>() < 1) fail(ErrorCode::BadHeader, "dims must be positive integers");
        h.grid.dims[i] = d.get<std::size_t>();
    }
    const auto origin = triple("origin");
    const auto spacing = triple("spacing");
    h.grid.origin = {origin[0], origin[1], origin[2]};
    h.grid.spacing = {spacing[0], spacing[1], spacing[2]};
    for (double s : spacing)
        if (!(s > 0) || !std::isfinite(s)) fail(ErrorCode::BadSpacing, "spacing must be > 0");

    h.grid.unit = doc.value("unit", std::string{});
    if (doc.contains("axes")) {
        const auto& axes = doc["axes"];
        if (!axes.is_array() || axes.size() != 3) fail(ErrorCode::BadHeader, "'axes' must list 3 labels");
        for (std::size_t i = 0; i < 3; ++i) h.grid.axes[i] = axes[i].get<std::string>();
    }
    if (doc.contains("sentinel") && !doc["sentinel"].is_null()) {
        if (!doc["sentinel"].is_number()) fail(ErrorCode::BadHeader, "'sentinel' must be a number or null");
        h.sentinel = doc["sentinel"].get<double>();
    }
    h.components = doc.value("components", 1);
    if (h.components != 1 && h.components != 3) fail(ErrorCode::BadHeader, "'components' must be 1 or 3");
    return h;
}

namespace detail {

inline std::vector<float> decode_f32le(std::span<const std::uint8_t> payload, std::size_t count) {
    if (payload.size() != 4 * count) {
        fail(ErrorCode::SizeMismatch,
             "payload has " + std::to_string(payload.size()) + " bytes, expected " + std::to_string(4 * count));
    }
    std::vector<float> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits = static_cast<std::uint32_t>(payload[4 * i]) |
                             static_cast<std::uint32_t>(payload[4 * i + 1]) << 8 |
                             static_cast<std::uint32_t>(payload[4 * i + 2]) << 16 |
                             static_cast<std::uint32_t>(payload[4 * i + 3]) << 24;
        out[i] = std::bit_cast<float>(bits);
    }
    return out;
}

inline void append_f32le(std::vector<std::uint8_t>& out, float v) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    out.push_back(static_cast<std::uint8_t>(bits));
    out.push_back(static_cast<std::uint8_t>(bits >> 8));
    out.push_back(static_cast<std::uint8_t>(bits >> 16));
    out.push_back(static_cast<std::uint8_t>(bits >> 24));
}

inline nlohmann::ordered_json header_json(const std::string& name, const GridSpec& g, std::optional<double> sentinel,
                                          int components) {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["dims"] = {g.dims[0], g.dims[1], g.dims[2]};
    j["origin"] = {g.origin.x, g.origin.y, g.origin.z};
    j["spacing"] = {g.spacing.x, g.spacing.y, g.spacing.z};
    j["unit"] = g.unit;
    j["sentinel"] = sentinel ? nlohmann::ordered_json(*sentinel) : nlohmann::ordered_json(nullptr);
    j["components"] = components;
    j["axes"] = {g.axes[0], g.axes[1], g.axes[2]};
    return j;
}

} // namespace detail

inline ScalarField3D parse_scalar_field(const FieldHeader& h, std::span<const std::uint8_t> payload) {
    if (h.components != 1) fail(ErrorCode::BadHeader, "field '" + h.name + "' is not scalar");
    const auto raw = detail::decode_f32le(payload, h.grid.node_count());
    ScalarField3D f{h.name, h.grid, {}, h.sentinel};
    f.values.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = raw[i];
        if (h.sentinel && v == *h.sentinel) {
            f.values[i] = kInvalid;
        } else if (std::isnan(v) && !h.sentinel) {
            f.values[i] = kInvalid;
        } else if (!std::isfinite(v)) {
            fail(ErrorCode::NonFiniteValue, "field '" + h.name + "' sample " + std::to_string(i) + " is not finite");
        } else {
            f.values[i] = v;
        }
    }
    return f;
}

inline ScalarField3D parse_scalar_field(std::string_view header, std::span<const std::uint8_t> payload) {
    return parse_scalar_field(parse_field_header(header), payload);
}

inline VectorField3D parse_vector_field(const FieldHeader& h, std::span<const std::uint8_t> payload) {
    if (h.components != 3) fail(ErrorCode::BadHeader, "field '" + h.name + "' is not a 3-component vector field");
    const auto raw = detail::decode_f32le(payload, 3 * h.grid.node_count());
    VectorField3D f{h.name, h.grid, {}};
    f.values.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i]))
            fail(ErrorCode::NonFiniteValue, "field '" + h.name + "' component " + std::to_string(i) + " is not finite");
        f.values[i] = raw[i];
    }
    return f;
}

inline VectorField3D parse_vector_field(std::string_view header, std::span<const std::uint8_t> payload) {
    return parse_vector_field(parse_field_header(header), payload);
}

inline std::string serialize_field_header(const ScalarField3D& f) {
    return detail::header_json(f.name, f.grid, f.declared_sentinel, 1).dump(2) + "\n";
}

inline std::string serialize_field_header(const VectorField3D& f) {
    return detail::header_json(f.name, f.grid, std::nullopt, 3).dump(2) + "\n";
}

inline std::vector<std::uint8_t> serialize_field_payload(const ScalarField3D& f) {
    std::vector<std::uint8_t> out;
    out.reserve(4 * f.values.size());
    const float invalid = f.declared_sentinel ? static_cast<float>(*f.declared_sentinel)
                                              : std::numeric_limits<float>::quiet_NaN();
    for (double v : f.values) detail::append_f32le(out, is_invalid(v) ? invalid : static_cast<float>(v));
    return out;
}

inline std::vector<std::uint8_t> serialize_field_payload(const VectorField3D& f) {
    std::vector<std::uint8_t> out;
    out.reserve(4 * f.values.size());
    for (double v : f.values) detail::append_f32le(out, static_cast<float>(v));
    return out;
}

// ---------------------------------------------------------------------------
// Trilinear sampling

namespace detail {

struct AxisCell {
    std::size_t lower = 0;
    double frac = 0;
};

// Grid-index coordinates within 1e-9 of a node snap onto it so node positions
// computed as origin + i * spacing sample their node exactly.
inline std::optional<AxisCell> locate(double p, double origin, double spacing, std::size_t n) {
    double u = (p - origin) / spacing;
    const double r = std::round(u);
    if (std::abs(u - r) < 1e-9) u = r;
    const double last = static_cast<double>(n - 1);
    if (!(u >= 0 && u <= last)) return std::nullopt;
    if (n == 1) return AxisCell{0, 0};
    const auto lower = std::min(static_cast<std::size_t>(u), n - 2);
    return AxisCell{lower, u - static_cast<double>(lower)};
}

// Nested linear interpolation, x first, then y, then z. An end whose weight is
// exactly zero is never read, so a point on a grid plane never looks past it
// and constant data comes back unchanged.
template <typename T, typename Get>
std::optional<T> trilerp(const GridSpec& g, Vec3 p, Get&& get) {
    std::array<AxisCell, 3> cell;
    for (int a = 0; a < 3; ++a) {
        const auto c = locate(p[a], g.origin[a], g.spacing[a], g.dims[static_cast<std::size_t>(a)]);
        if (!c) return std::nullopt;
        cell[static_cast<std::size_t>(a)] = *c;
    }
    auto mix = [](auto&& lo, auto&& hi, double t) -> std::optional<T> {
        if (t == 0) return lo();
        if (t == 1) return hi();
        const auto a = lo();
        if (!a) return std::nullopt;
        const auto b = hi();
        if (!b) return std::nullopt;
        return *a + (*b - *a) * t;
    };
    auto along_x = [&](std::size_t dj, std::size_t dk) {
        const std::size_t j = cell[1].lower + dj, k = cell[2].lower + dk, i = cell[0].lower;
        return mix([&] { return get(g.index(i, j, k)); }, [&] { return get(g.index(i + 1, j, k)); }, cell[0].frac);
    };
    auto along_y = [&](std::size_t dk) {
        return mix([&] { return along_x(0, dk); }, [&] { return along_x(1, dk); }, cell[1].frac);
    };
    return mix([&] { return along_y(0); }, [&] { return along_y(1); }, cell[2].frac);
}

} // namespace detail

/// Trilinear interpolation at `p` (field coordinates). Empty when `p` is outside
/// the grid or any weighted corner is invalid.
inline std::optional<double> sample_trilinear(const ScalarField3D& f, Vec3 p) {
    return detail::trilerp<double>(f.grid, p, [&](std::size_t n) -> std::optional<double> {
        const double v = f.values[n];
        if (is_invalid(v)) return std::nullopt;
        return v;
    });
}

inline std::optional<Vec3> sample_trilinear(const VectorField3D& f, Vec3 p) {
    return detail::trilerp<Vec3>(f.grid, p, [&](std::size_t n) -> std::optional<Vec3> {
        const Vec3 v{f.values[3 * n], f.values[3 * n + 1], f.values[3 * n + 2]};
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) return std::nullopt;
        return v;
    });
}

// ---------------------------------------------------------------------------
// Dataset assembly

/// Checks referential integrity and the stratigraphic ordering of every column.
inline void validate_dataset(const Dataset& ds) {
    if (ds.order.strata.empty()) fail(ErrorCode::BadHeader, "stratigraphic order is empty");
    for (const auto& [id, bh] : ds.boreholes) {
        if (id.empty() || id != bh.id) fail(ErrorCode::MalformedRow, "borehole key mismatch for '" + bh.id + "'");
        std::optional<std::size_t> prev;
        for (std::size_t i = 0; i < bh.intervals.size(); ++i) {
            const auto& iv = bh.intervals[i];
            const auto rank = ds.order.index_of(iv.stratum_id);
            if (!rank)
                fail(ErrorCode::UnknownStratum, "borehole '" + id + "' references unknown stratum '" + iv.stratum_id + "'");
            if (prev && *rank <= *prev)
                fail(ErrorCode::StratumOrderViolation,
                     "borehole '" + id + "' lists '" + iv.stratum_id + "' out of stratigraphic order");
            prev = rank;
            if (!(iv.bottom_depth > iv.top_depth) || iv.top_depth < 0)
                fail(ErrorCode::MalformedRow, "borehole '" + id + "' has an inverted interval");
            if (i > 0 && bh.intervals[i - 1].bottom_depth != iv.top_depth)
                fail(ErrorCode::NonContiguousColumn, "borehole '" + id + "' column is not contiguous");
        }
    }
    for (const auto& [id, line] : ds.survey_lines) {
        if (line.borehole_ids.size() < 2)
            fail(ErrorCode::BoreholeMissing, "survey line '" + id + "' needs at least 2 boreholes");
        for (std::size_t i = 0; i < line.borehole_ids.size(); ++i) {
            if (!ds.boreholes.count(line.borehole_ids[i]))
                fail(ErrorCode::UnknownBorehole,
                     "survey line '" + id + "' references unknown borehole '" + line.borehole_ids[i] + "'");
            if (i > 0 && line.borehole_ids[i] == line.borehole_ids[i - 1])
                fail(ErrorCode::DuplicateId, "survey line '" + id + "' repeats borehole '" + line.borehole_ids[i] + "'");
        }
    }
    for (const auto& [name, f] : ds.scalar_fields)
        if (f.values.size() != f.grid.node_count()) fail(ErrorCode::SizeMismatch, "field '" + name + "'");
    for (const auto& [name, f] : ds.vector_fields)
        if (f.values.size() != 3 * f.grid.node_count()) fail(ErrorCode::SizeMismatch, "field '" + name + "'");
}

} // namespace seabed
