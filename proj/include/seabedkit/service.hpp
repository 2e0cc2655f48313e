#pragma once

// HTTP facade over a loaded dataset. Request handling is independent of the
// transport (`handle_get` / `handle_post`); `bind` attaches it to cpp-httplib.

#include <charconv>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dataset_io.hpp"
#include "error.hpp"
#include "products.hpp"

// after Eigen: <resolv.h> defines a `_res` macro
#include <httplib.h>

namespace seabed {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir;
    bool cors = false;
    std::size_t cache_size = 64;
    std::filesystem::path static_dir; // viewer bundle served under "/" when set
};

using QueryParams = std::multimap<std::string, std::string>;

struct HttpResponse {
    int status = 200;
    std::string content_type;
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
};

inline int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::FieldNotFound:
    case ErrorCode::SurveyLineNotFound:
    case ErrorCode::StratumNotFound:
    case ErrorCode::UnknownBorehole:
        return 404;
    case ErrorCode::CoordinateOutOfRange:
        return 416;
    case ErrorCode::EmptyMesh:
    case ErrorCode::EmptyScene:
    case ErrorCode::TooFewPoints:
    case ErrorCode::CollinearInput:
    case ErrorCode::DuplicatePoints:
    case ErrorCode::FieldTooSmall:
    case ErrorCode::BoreholeMissing:
        return 422;
    case ErrorCode::BadArgument:
    case ErrorCode::NonFiniteIso:
    case ErrorCode::BadSpillConfig:
        return 400;
    default:
        return 500;
    }
}

/// Least-recently-used memo of finished responses keyed by canonical query.
class ResponseCache {
public:
    explicit ResponseCache(std::size_t capacity) : capacity_(capacity) {}

    std::optional<HttpResponse> get(const std::string& key) {
        std::lock_guard lock(mutex_);
        const auto it = index_.find(key);
        if (it == index_.end()) return std::nullopt;
        entries_.splice(entries_.begin(), entries_, it->second);
        return it->second->second;
    }

    void put(const std::string& key, const HttpResponse& r) {
        std::lock_guard lock(mutex_);
        if (capacity_ == 0) return;
        if (const auto it = index_.find(key); it != index_.end()) {
            entries_.erase(it->second);
            index_.erase(it);
        }
        entries_.emplace_front(key, r);
        index_[key] = entries_.begin();
        while (entries_.size() > capacity_) {
            index_.erase(entries_.back().first);
            entries_.pop_back();
        }
    }

    void clear() {
        std::lock_guard lock(mutex_);
        entries_.clear();
        index_.clear();
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<std::pair<std::string, HttpResponse>> entries_;
    std::unordered_map<std::string, std::list<std::pair<std::string, HttpResponse>>::iterator> index_;
};

class Service {
public:
    explicit Service(ServiceConfig config) : config_(std::move(config)), cache_(config_.cache_size) {}

    void set_dataset(std::shared_ptr<const DatasetBundle> bundle) {
        std::lock_guard lock(spill_mutex_);
        spill_config_ = bundle ? bundle->spill : SpillConfig{};
        std::atomic_store(&bundle_, std::move(bundle));
        simulation_.reset();
        cache_.clear();
    }

    void clear_cache() { cache_.clear(); }
    std::size_t cache_entries() const { return cache_.size(); }
    const ServiceConfig& config() const { return config_; }

    HttpResponse handle_get(std::string_view path, const QueryParams& query) {
        try {
            const auto bundle = std::atomic_load(&bundle_);
            if (!bundle) return error(503, "dataset not loaded");
            constexpr std::string_view prefix = "/api/v1/";
            if (path.substr(0, prefix.size()) != prefix) return error(404, "unknown path");
            const std::string_view route = path.substr(prefix.size());

            if (route == "spill/frames") return spill_frames(*bundle, query);
            if (route == "spill/config") {
                std::lock_guard lock(spill_mutex_);
                return {200, "application/json", spill_config_to_json(spill_config_), {}};
            }

            const auto key = canonical_key(route, query);
            if (!key) return error(400, "unparseable query parameter");
            if (auto hit = cache_.get(*key)) return *hit;
            auto response = compute(*bundle, route, query);
            if (response.status == 200) cache_.put(*key, response);
            return response;
        } catch (const Error& e) {
            return error(http_status(e.code()), e.what());
        } catch (const std::exception& e) {
            return error(500, e.what());
        }
    }

    HttpResponse handle_post(std::string_view path, std::string_view body) {
        try {
            const auto bundle = std::atomic_load(&bundle_);
            if (!bundle) return error(503, "dataset not loaded");
            if (path != "/api/v1/spill/config") return error(404, "unknown path");
            auto config = parse_spill_config(body, bundle->spill);
            products::vector_field(*bundle, config.current_field);
            std::lock_guard lock(spill_mutex_);
            spill_config_ = std::move(config);
            simulation_.reset();
            return {204, "", "", {}};
        } catch (const Error& e) {
            const int status = e.code() == ErrorCode::FieldNotFound ? 400 : http_status(e.code());
            return error(status, e.what());
        }
    }

    void bind(httplib::Server& server) {
        auto reply = [this](httplib::Response& res, const HttpResponse& r) {
            res.status = r.status;
            for (const auto& [k, v] : r.headers) res.set_header(k, v);
            if (config_.cors) res.set_header("Access-Control-Allow-Origin", "*");
            if (!r.content_type.empty()) res.set_content(r.body, r.content_type);
        };
        server.Get(R"(/api/v1/.*)", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, handle_get(req.path, QueryParams(req.params.begin(), req.params.end())));
        });
        server.Post(R"(/api/v1/.*)", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, handle_post(req.path, req.body));
        });
        if (config_.cors) {
            server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
                res.set_header("Access-Control-Allow-Origin", "*");
                res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
                res.set_header("Access-Control-Allow-Headers", "Content-Type");
                res.status = 204;
            });
        }
        if (!config_.static_dir.empty()) server.set_mount_point("/", config_.static_dir.string());
    }

private:
    static HttpResponse error(int status, const std::string& message) {
        return {status, "application/json", nlohmann::json{{"error", message}}.dump(), {}};
    }

    static std::optional<std::string> param(const QueryParams& q, const std::string& key) {
        const auto it = q.find(key);
        if (it == q.end()) return std::nullopt;
        return it->second;
    }

    // Route plus its parameters in a fixed order, with numbers re-rendered so
    // "20" and "20.0" share an entry. Empty for an unparseable number.
    static std::optional<std::string> canonical_key(std::string_view route, const QueryParams& q) {
        std::string key(route);
        for (const char* name : {"field", "iso", "axis", "coord"}) {
            const auto v = param(q, name);
            if (!v) continue;
            std::string value = *v;
            if (std::string_view(name) == "iso" || std::string_view(name) == "coord") {
                const auto num = parse_number(value);
                if (!num) return std::nullopt;
                value = format_number(*num);
            }
            key += std::string("&") + name + "=" + value;
        }
        return key;
    }

    static std::string as_string(const std::vector<std::uint8_t>& bytes) { return {bytes.begin(), bytes.end()}; }

    HttpResponse compute(const DatasetBundle& b, std::string_view route, const QueryParams& q) {
        constexpr auto glb = "model/gltf-binary";
        if (route == "dataset") return {200, "application/json", products::dataset_summary_json(b), {}};
        if (route == "terrain") return {200, glb, as_string(products::terrain_glb(b)), {}};
        if (route == "horizons") return {200, glb, as_string(products::horizons_glb(b)), {}};
        if (route.starts_with("horizons/"))
            return {200, glb, as_string(products::horizon_glb(b, std::string(route.substr(9)))), {}};
        if (route.starts_with("fence/"))
            return {200, glb, as_string(products::fence_glb(b, std::string(route.substr(6)))), {}};
        if (route == "isosurface") {
            const auto field = param(q, "field");
            const auto iso = param(q, "iso");
            if (!field || !iso) return error(400, "isosurface needs 'field' and 'iso'");
            const auto value = parse_number(*iso);
            if (!value) return error(400, "iso must be a finite number");
            return {200, glb, as_string(products::isosurface_glb(b, *field, *value)), {}};
        }
        if (route == "slice") {
            const auto field = param(q, "field");
            const auto axis = param(q, "axis");
            const auto coord = param(q, "coord");
            if (!field || !axis || !coord) return error(400, "slice needs 'field', 'axis' and 'coord'");
            const auto a = parse_axis(*axis);
            if (!a) return error(400, "axis must be x, y or z");
            const auto value = parse_number(*coord);
            if (!value) return error(400, "coord must be a finite number");
            const auto s = products::slice(b, *field, *a, *value);
            return {200, "image/png", as_string(s.png), {{"X-Geo-Extent", s.extent_header}}};
        }
        return error(404, "unknown path");
    }

    HttpResponse spill_frames(const DatasetBundle& b, const QueryParams& q) {
        auto integer = [&](const char* key, long long fallback) -> std::optional<long long> {
            const auto v = param(q, key);
            if (!v) return fallback;
            long long out = 0;
            const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
            if (ec != std::errc() || ptr != v->data() + v->size()) return std::nullopt;
            return out;
        };
        const auto from = integer("from", 0);
        const auto count = integer("count", 1);
        if (!from || !count) return error(400, "from and count must be integers");
        if (*from < 0) return error(416, "from must be >= 0");
        if (*count < 0 || *count > kMaxFramesPerRequest) return error(400, "count out of range");

        std::lock_guard lock(spill_mutex_);
        if (!simulation_)
            simulation_.emplace(spill_config_, products::vector_field(b, spill_config_.current_field));
        const auto bytes = simulation_->frames_binary(static_cast<std::uint64_t>(*from), static_cast<std::uint64_t>(*count));
        return {200, "application/octet-stream", as_string(bytes), {}};
    }

    static constexpr long long kMaxFramesPerRequest = 10000;

    ServiceConfig config_;
    ResponseCache cache_;
    std::shared_ptr<const DatasetBundle> bundle_;
    std::mutex spill_mutex_;
    SpillConfig spill_config_;
    std::optional<SpillSimulation> simulation_;
};

} // namespace seabed
