// seabedkit: batch products and the HTTP service.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "seabedkit/dataset_io.hpp"
#include "seabedkit/products.hpp"
#include "seabedkit/service.hpp"

namespace {

using namespace seabed;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double number_arg(const std::string& flag, const std::string& text) {
    const auto v = parse_number(text);
    if (!v) throw UsageError(flag + ": '" + text + "' is not a finite number");
    return *v;
}

struct Options {
    std::string data;
    std::string out;
    std::string sidecar;
    std::string stratum;
    std::string line;
    std::string field = "temp";
    std::string iso;
    std::string axis;
    std::string coord;
    std::uint64_t frames = 1;
    std::uint64_t from = 0;
    std::optional<std::uint64_t> seed;
    std::string listen = "127.0.0.1:8080";
    bool cors = false;
    std::size_t cache_size = 64;
    std::string static_dir;
};

std::pair<std::string, int> parse_listen(const std::string& s) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) throw UsageError("--listen: expected host:port");
    int port = 0;
    const auto digits = s.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || port < 1 || port > 65535)
        throw UsageError("--listen: port must be in [1, 65535]");
    return {s.substr(0, colon), port};
}

int serve(const Options& o) {
    auto [host, port] = parse_listen(o.listen);
    ServiceConfig cfg;
    cfg.host = host;
    cfg.port = port;
    cfg.data_dir = o.data;
    cfg.cors = o.cors;
    cfg.cache_size = o.cache_size;
    cfg.static_dir = o.static_dir;

    Service service(cfg);
    service.set_dataset(std::make_shared<const DatasetBundle>(load_dataset(cfg.data_dir)));
    httplib::Server server;
    service.bind(server);
    std::cerr << "seabedkit: serving " << cfg.data_dir.string() << " on http://" << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
        std::cerr << "seabedkit: cannot listen on " << o.listen << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seabed geo-data products and service", "seabedkit"};
    app.require_subcommand(1);
    Options o;

    auto data_opt = [&](CLI::App* sub) { sub->add_option("--data", o.data, "dataset directory")->envname("SEABEDKIT_DATA")->required(); };
    auto out_opt = [&](CLI::App* sub) { sub->add_option("--out", o.out, "output path")->required(); };

    auto* ingest = app.add_subcommand("ingest-check", "load and validate a dataset");
    data_opt(ingest);
    ingest->add_option("--out", o.out, "write the dataset summary JSON here");

    auto* terrain = app.add_subcommand("terrain", "terrain TIN as GLB");
    data_opt(terrain);
    out_opt(terrain);

    auto* horizon = app.add_subcommand("horizon", "horizon surface(s) as GLB");
    data_opt(horizon);
    horizon->add_option("--stratum", o.stratum, "stratum id (all horizons when omitted)");
    out_opt(horizon);

    auto* fence = app.add_subcommand("fence", "fence diagram of a survey line as GLB");
    data_opt(fence);
    fence->add_option("--line", o.line, "survey line id")->required();
    out_opt(fence);

    auto* iso = app.add_subcommand("isosurface", "isosurface of a scalar field as GLB");
    data_opt(iso);
    iso->add_option("--field", o.field, "scalar field")->capture_default_str();
    iso->add_option("--iso", o.iso, "iso value")->required();
    out_opt(iso);

    auto* slice = app.add_subcommand("slice", "axis-aligned section of a scalar field as PNG");
    data_opt(slice);
    slice->add_option("--field", o.field, "scalar field")->capture_default_str();
    slice->add_option("--axis", o.axis, "x, y or z")->required();
    slice->add_option("--coord", o.coord, "plane coordinate")->required();
    out_opt(slice);
    slice->add_option("--sidecar", o.sidecar, "write the slice extent JSON here");

    auto* spill = app.add_subcommand("spill", "oil-spill particle frames as a binary stream");
    data_opt(spill);
    spill->add_option("--frames", o.frames, "number of frames")->capture_default_str();
    spill->add_option("--from", o.from, "first frame index")->capture_default_str();
    spill->add_option("--seed", o.seed, "override the configured seed");
    out_opt(spill);

    auto* srv = app.add_subcommand("serve", "run the HTTP service");
    data_opt(srv);
    srv->add_option("--listen", o.listen, "host:port")->capture_default_str();
    srv->add_flag("--cors", o.cors, "allow cross-origin requests");
    srv->add_option("--cache-size", o.cache_size, "memoized products")->capture_default_str();
    srv->add_option("--static", o.static_dir, "viewer bundle served under /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "seabedkit: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (srv->parsed()) return serve(o);

        const auto bundle = load_dataset(o.data);
        if (ingest->parsed()) {
            const auto& ds = bundle.dataset;
            std::cout << o.data << ": " << ds.boreholes.size() << " boreholes, " << ds.order.strata.size() << " strata, "
                      << ds.survey_lines.size() << " survey lines, "
                      << ds.scalar_fields.size() + ds.vector_fields.size() << " fields\n";
            if (!o.out.empty()) write_file(o.out, products::dataset_summary_json(bundle));
        } else if (terrain->parsed()) {
            write_file(o.out, products::terrain_glb(bundle));
        } else if (horizon->parsed()) {
            write_file(o.out, o.stratum.empty() ? products::horizons_glb(bundle) : products::horizon_glb(bundle, o.stratum));
        } else if (fence->parsed()) {
            write_file(o.out, products::fence_glb(bundle, o.line));
        } else if (iso->parsed()) {
            write_file(o.out, products::isosurface_glb(bundle, o.field, number_arg("--iso", o.iso)));
        } else if (slice->parsed()) {
            const auto axis = parse_axis(o.axis);
            if (!axis) throw UsageError("--axis: expected x, y or z");
            const auto s = products::slice(bundle, o.field, *axis, number_arg("--coord", o.coord));
            write_file(o.out, s.png);
            if (!o.sidecar.empty()) write_file(o.sidecar, s.sidecar_json);
        } else if (spill->parsed()) {
            auto cfg = bundle.spill;
            if (o.seed) cfg.seed = *o.seed;
            validate(cfg);
            write_file(o.out, products::spill_frames(bundle, cfg, o.from, o.frames));
        }
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "seabedkit: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "seabedkit: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "seabedkit: " << e.what() << "\n";
        return 1;
    }
}
