#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "seabedkit/geomodel.hpp"
#include "seabedkit/particles.hpp"

#ifndef SEABEDKIT_FIXTURES
#error "SEABEDKIT_FIXTURES must point at the fixtures directory"
#endif

namespace testsupport {

using seabed::GridSpec;
using seabed::ScalarField3D;
using seabed::Vec2;
using seabed::Vec3;
using seabed::VectorField3D;

inline std::filesystem::path fixtures() { return SEABEDKIT_FIXTURES; }
inline std::filesystem::path ocean() { return fixtures() / "ocean"; }

inline GridSpec grid(std::array<std::size_t, 3> dims, Vec3 origin, Vec3 spacing) {
    GridSpec g;
    g.dims = dims;
    g.origin = origin;
    g.spacing = spacing;
    return g;
}

inline ScalarField3D sample_field(const std::string& name, const GridSpec& g, const std::function<double(Vec3)>& fn) {
    ScalarField3D f{name, g, {}, std::nullopt};
    f.values.resize(g.node_count());
    for (std::size_t k = 0; k < g.dims[2]; ++k)
        for (std::size_t j = 0; j < g.dims[1]; ++j)
            for (std::size_t i = 0; i < g.dims[0]; ++i) f.values[g.index(i, j, k)] = fn(g.node_position(i, j, k));
    return f;
}

/// Unit cube sampled with n nodes per axis.
inline GridSpec unit_cube(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n - 1);
    return grid({n, n, n}, {0, 0, 0}, {h, h, h});
}

inline ScalarField3D sphere_distance(std::size_t n, Vec3 c = {0.5, 0.5, 0.5}) {
    return sample_field("sphere", unit_cube(n), [c](Vec3 p) { return seabed::norm(p - c); });
}

inline VectorField3D uniform_current(Vec3 v, const GridSpec& g) {
    VectorField3D f{"current", g, {}};
    for (std::size_t n = 0; n < g.node_count(); ++n) f.values.insert(f.values.end(), {v.x, v.y, v.z});
    return f;
}

// ---------------------------------------------------------------------------
// Oracles

/// Trilinear value as three nested one-dimensional lerps over the 8 cell
/// corners, x first.
inline double nested_lerp(const ScalarField3D& f, Vec3 p) {
    const auto& g = f.grid;
    std::array<std::size_t, 3> lo{};
    std::array<double, 3> t{};
    for (int a = 0; a < 3; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const double u = (p[a] - g.origin[a]) / g.spacing[a];
        std::size_t i = static_cast<std::size_t>(std::floor(u));
        if (i + 1 >= g.dims[ua]) i = g.dims[ua] - 2;
        lo[ua] = i;
        t[ua] = u - static_cast<double>(i);
    }
    auto at = [&](std::size_t di, std::size_t dj, std::size_t dk) { return f.at(lo[0] + di, lo[1] + dj, lo[2] + dk); };
    auto l = [](double a, double b, double s) { return a * (1 - s) + b * s; };
    const double c00 = l(at(0, 0, 0), at(1, 0, 0), t[0]);
    const double c10 = l(at(0, 1, 0), at(1, 1, 0), t[0]);
    const double c01 = l(at(0, 0, 1), at(1, 0, 1), t[0]);
    const double c11 = l(at(0, 1, 1), at(1, 1, 1), t[0]);
    return l(l(c00, c10, t[1]), l(c01, c11, t[1]), t[2]);
}

/// Circumcircle of a triangle, computed from the perpendicular-bisector
/// intersection.
inline std::pair<Vec2, double> circumcircle(Vec2 a, Vec2 b, Vec2 c) {
    const double d = 2 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, c2 = c.x * c.x + c.y * c.y;
    const Vec2 o{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                 (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
    return {o, std::hypot(a.x - o.x, a.y - o.y)};
}

/// Index of the first point strictly inside some triangle's circumcircle
/// (relative tolerance on the radius), or -1.
inline long first_circumcircle_violation(const std::vector<Vec2>& pts,
                                         const std::vector<std::array<std::uint32_t, 3>>& tris, double rel = 1e-9) {
    for (const auto& t : tris) {
        const auto [o, r] = circumcircle(pts[t[0]], pts[t[1]], pts[t[2]]);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == t[0] || i == t[1] || i == t[2]) continue;
            if (std::hypot(pts[i].x - o.x, pts[i].y - o.y) < r * (1 - rel)) return static_cast<long>(i);
        }
    }
    return -1;
}

inline std::vector<Vec2> random_points(std::uint64_t seed, std::size_t n, double lo = 0, double hi = 100) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
    return pts;
}

// ---------------------------------------------------------------------------
// Spill golden run

inline seabed::SpillConfig golden_spill_config() {
    seabed::SpillConfig c;
    c.source = {0, 0, -20};
    c.emission_rate = 20;
    c.max_particles = 500;
    c.lifetime = 60;
    c.buoyancy = 0.02;
    c.diffusion = 0.05;
    c.seed = 42;
    c.dt = 0.5;
    c.steps_per_frame = 4;
    return c;
}

/// Weak gyre: u = 0.1 + 0.002 y, v = -0.002 x.
inline VectorField3D golden_current() {
    const auto g = grid({5, 5, 5}, {-50, -50, -40}, {25, 25, 10});
    VectorField3D f{"current", g, {}};
    for (std::size_t n = 0; n < g.node_count(); ++n) {
        const auto k = n / 25, j = (n / 5) % 5, i = n % 5;
        const Vec3 p = g.node_position(i, j, k);
        f.values.insert(f.values.end(), {0.1 + 0.002 * p.y, -0.002 * p.x, 0.0});
    }
    return f;
}

inline seabed::ParticleSystemState golden_run(std::size_t steps = 100) {
    const auto cfg = golden_spill_config();
    const auto current = golden_current();
    auto s = seabed::initial_state(cfg);
    for (std::size_t i = 0; i < steps; ++i) s = seabed::step(s, cfg, current);
    return s;
}

inline std::filesystem::path golden_state_path() { return std::filesystem::path(SEABEDKIT_TEST_DATA) / "spill_seed42_100steps.bin"; }

// ---------------------------------------------------------------------------
// Processes

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr
};

inline RunResult run(const std::string& command) {
    RunResult r;
    FILE* pipe = popen((command + " 2>&1").c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("seabedkit_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace testsupport
