#pragma once

// Deterministic oil-spill particle system: seabed emission, advection by a
// current field, buoyant rise, random-walk diffusion and ageing.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "geomodel.hpp"
#include "vec.hpp"

namespace seabed {

struct SpillConfig {
    Vec3 source;
    double emission_rate = 20;     // particles per second
    std::size_t max_particles = 500;
    double lifetime = 60;          // s
    double buoyancy = 0.02;        // m/s upward
    double diffusion = 0.05;       // m per sqrt(s)
    std::uint64_t seed = 42;
    double dt = 0.5;               // s
    std::uint32_t steps_per_frame = 4;
    std::string current_field = "current";
};

inline void validate(const SpillConfig& c) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(c.source.x) || !finite(c.source.y) || !finite(c.source.z))
        fail(ErrorCode::BadSpillConfig, "source must be finite");
    if (!(c.emission_rate >= 0) || !finite(c.emission_rate)) fail(ErrorCode::BadSpillConfig, "emission_rate must be >= 0");
    if (c.max_particles < 1) fail(ErrorCode::BadSpillConfig, "max_particles must be >= 1");
    if (!(c.lifetime > 0) || !finite(c.lifetime)) fail(ErrorCode::BadSpillConfig, "lifetime must be > 0");
    if (!(c.buoyancy >= 0) || !finite(c.buoyancy)) fail(ErrorCode::BadSpillConfig, "buoyancy must be >= 0");
    if (!(c.diffusion >= 0) || !finite(c.diffusion)) fail(ErrorCode::BadSpillConfig, "diffusion must be >= 0");
    if (!(c.dt > 0) || !finite(c.dt)) fail(ErrorCode::BadSpillConfig, "dt must be > 0");
    if (c.steps_per_frame < 1) fail(ErrorCode::BadSpillConfig, "steps_per_frame must be >= 1");
}

/// xorshift64* seeded through splitmix64. Fully specified so golden runs do not
/// depend on the standard library's generators.
class SpillRng {
public:
    SpillRng() = default;
    explicit SpillRng(std::uint64_t seed) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        state_ = z ^ (z >> 31);
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
    }

    static SpillRng from_state(std::uint64_t state) {
        SpillRng r;
        r.state_ = state;
        return r;
    }

    std::uint64_t state() const { return state_; }

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1Dull;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Box-Muller pair of standard normals.
    std::pair<double, double> normal_pair() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    /// Three normals from two Box-Muller pairs; the fourth value is dropped.
    Vec3 normal3() {
        const auto [a, b] = normal_pair();
        const auto [c, d] = normal_pair();
        (void)d;
        return {a, b, c};
    }

private:
    std::uint64_t state_ = 0x9E3779B97F4A7C15ull;
};

struct Particle {
    Vec3 position;
    Vec3 velocity;
    double age = 0;
    bool alive = true;
};

struct ParticleSystemState {
    std::vector<Particle> particles; // spawn order
    std::uint64_t rng_state = 0;
    std::uint64_t step_count = 0;
    double sim_time = 0;
    double emission_accumulator = 0;

    std::size_t live_count() const {
        std::size_t n = 0;
        for (const auto& p : particles) n += p.alive ? 1 : 0;
        return n;
    }
};

inline ParticleSystemState initial_state(const SpillConfig& c) {
    validate(c);
    ParticleSystemState s;
    s.rng_state = SpillRng(c.seed).state();
    return s;
}

/// One explicit Euler step. Live particles draw their three normals in spawn
/// order; dead particles are dropped; then new particles spawn at the source.
/// Particles outside the current field see zero current.
inline ParticleSystemState step(const ParticleSystemState& in, const SpillConfig& c, const VectorField3D& current) {
    ParticleSystemState out = in;
    auto rng = SpillRng::from_state(in.rng_state);
    const double walk = c.diffusion * std::sqrt(c.dt);

    for (auto& p : out.particles) {
        if (!p.alive) continue;
        Vec3 v = sample_trilinear(current, p.position).value_or(Vec3{});
        v.z += c.buoyancy;
        const Vec3 g = rng.normal3();
        p.velocity = v;
        p.position += v * c.dt + g * walk;
        p.age += c.dt;
        if (p.age >= c.lifetime) p.alive = false;
    }
    std::erase_if(out.particles, [](const Particle& p) { return !p.alive; });

    out.emission_accumulator += c.emission_rate * c.dt;
    const double whole = std::floor(out.emission_accumulator);
    out.emission_accumulator -= whole;
    const auto room = c.max_particles > out.particles.size() ? c.max_particles - out.particles.size() : 0;
    const auto spawn = std::min<std::size_t>(room, static_cast<std::size_t>(whole));
    for (std::size_t i = 0; i < spawn; ++i) out.particles.push_back({c.source, {}, 0.0, true});

    out.rng_state = rng.state();
    ++out.step_count;
    out.sim_time = static_cast<double>(out.step_count) * c.dt;
    return out;
}

// ---------------------------------------------------------------------------
// Frames

struct FrameParticle {
    Vec3 position;
    double age = 0;
};

struct ParticleFrame {
    double t = 0;
    std::vector<FrameParticle> particles;
};

inline ParticleFrame emit_frame(const ParticleSystemState& s) {
    ParticleFrame f{s.sim_time, {}};
    for (const auto& p : s.particles)
        if (p.alive) f.particles.push_back({p.position, p.age});
    return f;
}

inline std::string frame_to_json(const ParticleFrame& f) {
    nlohmann::ordered_json j;
    j["t"] = f.t;
    j["particles"] = nlohmann::ordered_json::array();
    for (const auto& p : f.particles) {
        nlohmann::ordered_json e;
        e["p"] = {p.position.x, p.position.y, p.position.z};
        e["age"] = p.age;
        j["particles"].push_back(std::move(e));
    }
    return j.dump();
}

inline ParticleFrame frame_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("t") || !j.contains("particles")) fail(ErrorCode::BadArgument, "not a frame");
    ParticleFrame f{j["t"].get<double>(), {}};
    for (const auto& e : j["particles"]) {
        const auto& p = e.at("p");
        f.particles.push_back({{p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()}, e.at("age").get<double>()});
    }
    return f;
}

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f32(std::vector<std::uint8_t>& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
inline void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> b) : bytes_(b) {}
    bool done() const { return pos_ == bytes_.size(); }
    std::uint64_t uint(int n) {
        if (pos_ + static_cast<std::size_t>(n) > bytes_.size()) fail(ErrorCode::SizeMismatch, "truncated binary data");
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t(bytes_[pos_++]) << (8 * i);
        return v;
    }
    double f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(uint(4))); }
    double f64() { return std::bit_cast<double>(uint(8)); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Binary frame: u32 particle count, f32 time, then (x, y, z, age) as f32 per
/// particle, all little-endian. Frames are self-delimiting, so a stream is
/// plain concatenation.
inline void append_frame_binary(std::vector<std::uint8_t>& out, const ParticleFrame& f) {
    detail::put_u32(out, static_cast<std::uint32_t>(f.particles.size()));
    detail::put_f32(out, f.t);
    for (const auto& p : f.particles) {
        detail::put_f32(out, p.position.x);
        detail::put_f32(out, p.position.y);
        detail::put_f32(out, p.position.z);
        detail::put_f32(out, p.age);
    }
}

inline std::vector<ParticleFrame> decode_frame_stream(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    std::vector<ParticleFrame> frames;
    while (!r.done()) {
        const auto n = r.uint(4);
        ParticleFrame f{r.f32(), {}};
        for (std::uint64_t i = 0; i < n; ++i) {
            const double x = r.f32(), y = r.f32(), z = r.f32();
            f.particles.push_back({{x, y, z}, r.f32()});
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

/// Exact binary image of a state (f64 fields), used for golden comparisons.
inline std::vector<std::uint8_t> serialize_state(const ParticleSystemState& s) {
    std::vector<std::uint8_t> out{'S', 'P', 'S', 'T'};
    detail::put_u64(out, s.rng_state);
    detail::put_u64(out, s.step_count);
    detail::put_f64(out, s.sim_time);
    detail::put_f64(out, s.emission_accumulator);
    detail::put_u64(out, s.particles.size());
    for (const auto& p : s.particles) {
        for (double v : {p.position.x, p.position.y, p.position.z, p.velocity.x, p.velocity.y, p.velocity.z, p.age})
            detail::put_f64(out, v);
        out.push_back(p.alive ? 1 : 0);
    }
    return out;
}

inline ParticleSystemState deserialize_state(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || bytes[0] != 'S' || bytes[1] != 'P' || bytes[2] != 'S' || bytes[3] != 'T')
        fail(ErrorCode::BadArgument, "not a particle state");
    detail::ByteReader r(bytes.subspan(4));
    ParticleSystemState s;
    s.rng_state = r.uint(8);
    s.step_count = r.uint(8);
    s.sim_time = r.f64();
    s.emission_accumulator = r.f64();
    const auto n = r.uint(8);
    for (std::uint64_t i = 0; i < n; ++i) {
        Particle p;
        p.position = {r.f64(), r.f64(), r.f64()};
        p.velocity = {r.f64(), r.f64(), r.f64()};
        p.age = r.f64();
        p.alive = r.uint(1) != 0;
        s.particles.push_back(p);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Config JSON

inline SpillConfig parse_spill_config(std::string_view text, SpillConfig base = {}) {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(ErrorCode::BadSpillConfig, "spill config must be a JSON object");
    try {
        if (j.contains("source")) {
            const auto& s = j["source"];
            if (!s.is_array() || s.size() != 3) fail(ErrorCode::BadSpillConfig, "source must be [x, y, z]");
            base.source = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
        }
        auto number = [&](const char* key, double& dst) {
            if (!j.contains(key)) return;
            if (!j[key].is_number()) fail(ErrorCode::BadSpillConfig, std::string(key) + " must be a number");
            dst = j[key].get<double>();
        };
        number("emission_rate", base.emission_rate);
        number("lifetime", base.lifetime);
        number("buoyancy", base.buoyancy);
        number("diffusion", base.diffusion);
        number("dt", base.dt);
        if (j.contains("max_particles")) {
            if (!j["max_particles"].is_number_integer() || j["max_particles"].get<long long>() < 1)
                fail(ErrorCode::BadSpillConfig, "max_particles must be a positive integer");
            base.max_particles = j["max_particles"].get<std::size_t>();
        }
        if (j.contains("seed")) {
            if (!j["seed"].is_number_integer()) fail(ErrorCode::BadSpillConfig, "seed must be an integer");
            base.seed = j["seed"].is_number_unsigned() ? j["seed"].get<std::uint64_t>()
                                                        : static_cast<std::uint64_t>(j["seed"].get<std::int64_t>());
        }
        if (j.contains("steps_per_frame")) {
            if (!j["steps_per_frame"].is_number_integer() || j["steps_per_frame"].get<long long>() < 1)
                fail(ErrorCode::BadSpillConfig, "steps_per_frame must be a positive integer");
            base.steps_per_frame = j["steps_per_frame"].get<std::uint32_t>();
        }
        if (j.contains("field")) base.current_field = j["field"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::BadSpillConfig, e.what());
    }
    validate(base);
    return base;
}

inline std::string spill_config_to_json(const SpillConfig& c) {
    nlohmann::ordered_json j;
    j["source"] = {c.source.x, c.source.y, c.source.z};
    j["emission_rate"] = c.emission_rate;
    j["max_particles"] = c.max_particles;
    j["lifetime"] = c.lifetime;
    j["buoyancy"] = c.buoyancy;
    j["diffusion"] = c.diffusion;
    j["seed"] = c.seed;
    j["dt"] = c.dt;
    j["steps_per_frame"] = c.steps_per_frame;
    j["field"] = c.current_field;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Frame-indexed playback

/// Frame k is the state after (k + 1) * steps_per_frame steps. Frames are
/// produced by stepping forward from the last computed state; requesting an
/// earlier frame restarts from t = 0.
class SpillSimulation {
public:
    SpillSimulation(SpillConfig config, const VectorField3D& current)
        : config_(std::move(config)), current_(&current), state_(initial_state(config_)) {}

    const SpillConfig& config() const { return config_; }

    ParticleFrame frame(std::uint64_t index) {
        const std::uint64_t target = (index + 1) * config_.steps_per_frame;
        if (state_.step_count > target) state_ = initial_state(config_);
        while (state_.step_count < target) state_ = step(state_, config_, *current_);
        return emit_frame(state_);
    }

    std::vector<std::uint8_t> frames_binary(std::uint64_t from, std::uint64_t count) {
        std::vector<std::uint8_t> out;
        for (std::uint64_t k = from; k < from + count; ++k) append_frame_binary(out, frame(k));
        return out;
    }

private:
    SpillConfig config_;
    const VectorField3D* current_;
    ParticleSystemState state_;
};

} // namespace seabed
