#pragma once

// Loading a dataset directory:
//
//   strata.json          stratigraphic order and colors (required)
//   boreholes.csv        borehole columns (required)
//   survey_lines.json    {"lines": [{"id", "boreholes": [...]}]}
//   fields/<name>.json   field header; payload in fields/<name>.bin
//   bathymetry.csv       x,y,z terrain samples (falls back to borehole collars)
//   sonar.png/sonar.json sidescan mosaic and {"extent": [x_min, y_min, x_max, y_max]}
//   corrections.json     {"radius": r, "observations": [{"stratum", "x", "y", "z"}]}
//   spill.json           default spill configuration

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "geomodel.hpp"
#include "particles.hpp"
#include "scene_export.hpp"

namespace seabed {

struct CorrectionObservation {
    std::string stratum;
    Vec3 position;
};

struct DrillingCorrections {
    double radius = 100;
    std::vector<CorrectionObservation> observations;
};

struct SonarMosaic {
    std::vector<std::uint8_t> png;
    PlanExtent extent;
};

struct DatasetBundle {
    std::filesystem::path root;
    Dataset dataset;
    std::vector<Vec3> bathymetry; // empty: use borehole collars
    std::optional<SonarMosaic> sonar;
    DrillingCorrections corrections;
    SpillConfig spill;
};

inline std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorCode::Io, p.string() + ": cannot open");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorCode::Io, p.string() + ": cannot open");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, std::span<const std::uint8_t> bytes) {
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorCode::Io, p.string() + ": cannot write");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, p.string() + ": write failed");
}

inline void write_file(const std::filesystem::path& p, std::string_view text) {
    write_file(p, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

namespace detail {

// Runs `parse` and prefixes any error with the offending file.
template <typename Fn>
auto in_file(const std::filesystem::path& p, Fn&& parse) {
    try {
        return parse();
    } catch (const Error& e) {
        throw Error(e.code(), p.string() + ": " + e.message());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadHeader, p.string() + ": " + e.what());
    }
}

inline std::vector<Vec3> parse_xyz_csv(std::string_view text) {
    std::vector<Vec3> out;
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 3) fail(ErrorCode::MalformedRow, at_line(line_no) + ": expected x,y,z");
        const auto x = parse_number(f[0]), y = parse_number(f[1]), z = parse_number(f[2]);
        if (!x || !y || !z) fail(ErrorCode::MalformedRow, at_line(line_no) + ": unparseable number");
        out.push_back({*x, *y, *z});
    }
    return out;
}

} // namespace detail

inline DatasetBundle load_dataset(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) fail(ErrorCode::Io, root.string() + ": not a dataset directory");

    DatasetBundle b;
    b.root = root;
    Dataset& ds = b.dataset;

    const auto strata_path = root / "strata.json";
    ds.order = detail::in_file(strata_path, [&] { return parse_strata(read_text_file(strata_path)); });

    const auto bh_path = root / "boreholes.csv";
    detail::in_file(bh_path, [&] {
        for (auto& bh : parse_boreholes(read_text_file(bh_path))) ds.boreholes.emplace(bh.id, std::move(bh));
        return 0;
    });

    const auto lines_path = root / "survey_lines.json";
    if (fs::exists(lines_path)) {
        detail::in_file(lines_path, [&] {
            for (auto& l : parse_survey_lines(read_text_file(lines_path))) {
                const std::string id = l.id;
                if (!ds.survey_lines.emplace(id, std::move(l)).second)
                    fail(ErrorCode::DuplicateId, "survey line '" + id + "' defined twice");
            }
            return 0;
        });
    }

    const auto fields_dir = root / "fields";
    if (fs::is_directory(fields_dir)) {
        std::vector<fs::path> headers;
        for (const auto& e : fs::directory_iterator(fields_dir))
            if (e.path().extension() == ".json") headers.push_back(e.path());
        std::sort(headers.begin(), headers.end());
        for (const auto& hp : headers) {
            auto payload_path = hp;
            payload_path.replace_extension(".bin");
            const auto header = detail::in_file(hp, [&] { return parse_field_header(read_text_file(hp)); });
            const auto payload = detail::in_file(payload_path, [&] { return read_binary_file(payload_path); });
            detail::in_file(payload_path, [&] {
                if (ds.scalar_fields.count(header.name) || ds.vector_fields.count(header.name))
                    fail(ErrorCode::DuplicateId, "field '" + header.name + "' defined twice");
                if (header.components == 1) ds.scalar_fields.emplace(header.name, parse_scalar_field(header, payload));
                else ds.vector_fields.emplace(header.name, parse_vector_field(header, payload));
                return 0;
            });
        }
    }

    // Integrity problems are reported against the files that define the links.
    detail::in_file(bh_path, [&] {
        Dataset columns_only{ds.boreholes, ds.order, {}, {}, {}};
        validate_dataset(columns_only);
        return 0;
    });
    if (fs::exists(lines_path)) detail::in_file(lines_path, [&] { validate_dataset(ds); return 0; });

    const auto bathy_path = root / "bathymetry.csv";
    if (fs::exists(bathy_path))
        b.bathymetry = detail::in_file(bathy_path, [&] { return detail::parse_xyz_csv(read_text_file(bathy_path)); });

    const auto sonar_png = root / "sonar.png", sonar_json = root / "sonar.json";
    if (fs::exists(sonar_png) && fs::exists(sonar_json)) {
        SonarMosaic s;
        s.png = read_binary_file(sonar_png);
        s.extent = detail::in_file(sonar_json, [&] {
            const auto j = nlohmann::json::parse(read_text_file(sonar_json));
            const auto& e = j.at("extent");
            PlanExtent ext{e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>(), e.at(3).get<double>()};
            if (!(ext.x_max > ext.x_min) || !(ext.y_max > ext.y_min))
                fail(ErrorCode::DegenerateExtent, "sonar extent is degenerate");
            return ext;
        });
        b.sonar = std::move(s);
    }

    const auto corr_path = root / "corrections.json";
    if (fs::exists(corr_path)) {
        b.corrections = detail::in_file(corr_path, [&] {
            const auto j = nlohmann::json::parse(read_text_file(corr_path));
            DrillingCorrections c;
            c.radius = j.value("radius", c.radius);
            if (!(c.radius > 0)) fail(ErrorCode::NonPositiveRadius, "radius must be > 0");
            for (const auto& o : j.value("observations", nlohmann::json::array())) {
                const auto stratum = o.at("stratum").get<std::string>();
                if (!ds.order.index_of(stratum)) fail(ErrorCode::UnknownStratum, "unknown stratum '" + stratum + "'");
                c.observations.push_back({stratum, {o.at("x").get<double>(), o.at("y").get<double>(), o.at("z").get<double>()}});
            }
            return c;
        });
    }

    const auto spill_path = root / "spill.json";
    if (fs::exists(spill_path))
        b.spill = detail::in_file(spill_path, [&] { return parse_spill_config(read_text_file(spill_path)); });

    return b;
}

} // namespace seabed
