#pragma once

// Sectional maps and a reference CPU ray-march compositor for scalar fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "geomodel.hpp"
#include "png.hpp"
#include "vec.hpp"

namespace seabed {

struct ColorStop {
    double t = 0;
    Rgba color;
};

struct TransferFunction {
    double t_min = 0;
    double t_max = 1;
    std::vector<ColorStop> stops; // sorted by t; values outside the domain clamp

    void validate() const {
        if (!(t_min < t_max)) fail(ErrorCode::BadTransferFunction, "domain must satisfy t_min < t_max");
        if (stops.empty()) fail(ErrorCode::BadTransferFunction, "no color stops");
        for (std::size_t i = 0; i < stops.size(); ++i) {
            const auto& c = stops[i].color;
            for (double ch : {c.r, c.g, c.b, c.a})
                if (!(ch >= 0 && ch <= 1)) fail(ErrorCode::BadTransferFunction, "color component outside [0,1]");
            if (i > 0 && !(stops[i].t >= stops[i - 1].t)) fail(ErrorCode::BadTransferFunction, "stops not sorted");
        }
    }
};

/// Blue at t_min, white at the midpoint, red at t_max; constant alpha 0.6.
inline TransferFunction default_transfer_function(double t_min, double t_max) {
    if (!(t_min < t_max)) t_max = t_min + 1;
    return {t_min,
            t_max,
            {{t_min, {0, 0, 1, 0.6}}, {0.5 * (t_min + t_max), {1, 1, 1, 0.6}}, {t_max, {1, 0, 0, 0.6}}}};
}

inline Rgba apply_transfer_function(const TransferFunction& tf, double t) {
    t = std::clamp(t, tf.t_min, tf.t_max);
    const auto& s = tf.stops;
    if (t <= s.front().t) return s.front().color;
    if (t >= s.back().t) return s.back().color;
    const auto hi = std::upper_bound(s.begin(), s.end(), t, [](double v, const ColorStop& c) { return v < c.t; });
    const auto& b = *hi;
    const auto& a = *(hi - 1);
    const double w = (t - a.t) / (b.t - a.t);
    return {lerp(a.color.r, b.color.r, w), lerp(a.color.g, b.color.g, w), lerp(a.color.b, b.color.b, w),
            lerp(a.color.a, b.color.a, w)};
}

enum class Axis { X = 0, Y = 1, Z = 2 };

inline std::optional<Axis> parse_axis(std::string_view s) {
    if (s == "x" || s == "X") return Axis::X;
    if (s == "y" || s == "Y") return Axis::Y;
    if (s == "z" || s == "Z") return Axis::Z;
    return std::nullopt;
}

inline char axis_name(Axis a) { return "xyz"[static_cast<int>(a)]; }

struct GeoExtent {
    std::string u_label, v_label;
    double u_min = 0, u_max = 0;
    double v_min = 0, v_max = 0;
};

struct SectionImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rgba> pixels; // rows top to bottom
    GeoExtent geo_extent;
    Axis axis = Axis::Z;
    double coordinate = 0;

    const Rgba& at(std::size_t col, std::size_t row) const { return pixels[row * width + col]; }
};

namespace detail {

inline std::uint8_t to_byte(double c) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

// The two in-plane axes of a slice: horizontal first, then vertical.
inline std::array<int, 2> plane_axes(Axis axis) {
    switch (axis) {
    case Axis::X: return {1, 2};
    case Axis::Y: return {0, 2};
    case Axis::Z: return {0, 1};
    }
    return {0, 1};
}

} // namespace detail

inline Rgba8Image to_rgba8(const SectionImage& img) {
    Rgba8Image out{static_cast<std::uint32_t>(img.width), static_cast<std::uint32_t>(img.height), {}};
    out.pixels.reserve(4 * img.pixels.size());
    for (const auto& p : img.pixels) {
        out.pixels.push_back(detail::to_byte(p.r));
        out.pixels.push_back(detail::to_byte(p.g));
        out.pixels.push_back(detail::to_byte(p.b));
        out.pixels.push_back(detail::to_byte(p.a));
    }
    return out;
}

/// Axis-aligned section at `coordinate` (field units), one pixel per grid node
/// of the two in-plane axes. Row r holds node index r of the vertical axis.
/// Invalid samples are fully transparent.
inline SectionImage slice_section(const ScalarField3D& f, Axis axis, double coordinate, const TransferFunction& tf) {
    tf.validate();
    const auto& g = f.grid;
    const int a = static_cast<int>(axis);
    const double tol = 1e-9 * g.spacing[a];
    if (!std::isfinite(coordinate) || coordinate < g.axis_min(a) - tol || coordinate > g.axis_max(a) + tol) {
        fail(ErrorCode::CoordinateOutOfRange, std::string("coordinate ") + format_number(coordinate) +
                                                  " outside the " + g.axes[static_cast<std::size_t>(a)] + " extent [" +
                                                  format_number(g.axis_min(a)) + ", " + format_number(g.axis_max(a)) + "]");
    }
    coordinate = std::clamp(coordinate, g.axis_min(a), g.axis_max(a));

    const auto [ua, va] = detail::plane_axes(axis);
    SectionImage img;
    img.axis = axis;
    img.coordinate = coordinate;
    img.width = g.dims[static_cast<std::size_t>(ua)];
    img.height = g.dims[static_cast<std::size_t>(va)];
    img.geo_extent = {g.axes[static_cast<std::size_t>(ua)], g.axes[static_cast<std::size_t>(va)], g.axis_min(ua),
                      g.axis_max(ua), g.axis_min(va), g.axis_max(va)};
    img.pixels.resize(img.width * img.height);

    for (std::size_t row = 0; row < img.height; ++row) {
        for (std::size_t col = 0; col < img.width; ++col) {
            Vec3 p;
            p[a] = coordinate;
            p[ua] = g.origin[ua] + static_cast<double>(col) * g.spacing[ua];
            p[va] = g.origin[va] + static_cast<double>(row) * g.spacing[va];
            const auto v = sample_trilinear(f, p);
            img.pixels[row * img.width + col] = v ? apply_transfer_function(tf, *v) : Rgba{0, 0, 0, 0};
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Ray marching

struct Camera {
    Vec3 eye;
    Vec3 target;
    Vec3 up{0, 0, 1};
    double vertical_fov_deg = 45;
    std::size_t width = 64;
    std::size_t height = 64;
};

struct Ray {
    Vec3 origin;
    Vec3 dir; // unit
};

inline void validate_camera(const Camera& c) {
    auto finite = [](Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); };
    if (!finite(c.eye) || !finite(c.target) || !finite(c.up) || !std::isfinite(c.vertical_fov_deg))
        fail(ErrorCode::DegenerateCamera, "camera parameters must be finite");
    if (c.eye == c.target) fail(ErrorCode::DegenerateCamera, "eye coincides with target");
    if (c.width == 0 || c.height == 0) fail(ErrorCode::DegenerateCamera, "image has no pixels");
    if (!(c.vertical_fov_deg > 0 && c.vertical_fov_deg < 180)) fail(ErrorCode::DegenerateCamera, "fov outside (0, 180)");
    if (norm(cross(c.target - c.eye, c.up)) <= 1e-12 * norm(c.target - c.eye) * norm(c.up))
        fail(ErrorCode::DegenerateCamera, "up vector parallel to the view direction");
}

/// Ray through the centre of pixel (col, row); row 0 is the top of the image.
inline Ray camera_ray(const Camera& c, std::size_t col, std::size_t row) {
    const Vec3 forward = normalized(c.target - c.eye);
    const Vec3 right = normalized(cross(forward, c.up));
    const Vec3 up = cross(right, forward);
    const double tan_half = std::tan(c.vertical_fov_deg * std::numbers::pi / 360.0);
    const double aspect = static_cast<double>(c.width) / static_cast<double>(c.height);
    const double sx = ((static_cast<double>(col) + 0.5) / static_cast<double>(c.width) * 2 - 1) * tan_half * aspect;
    const double sy = (1 - (static_cast<double>(row) + 0.5) / static_cast<double>(c.height) * 2) * tan_half;
    return {c.eye, normalized(forward + right * sx + up * sy)};
}

/// Parametric entry/exit of the ray through the field's bounding box.
inline std::optional<std::pair<double, double>> clip_to_grid(const GridSpec& g, const Ray& r) {
    double t0 = 0, t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        const double lo = g.axis_min(a), hi = g.axis_max(a);
        if (r.dir[a] == 0) {
            if (r.origin[a] < lo || r.origin[a] > hi) return std::nullopt;
            continue;
        }
        double ta = (lo - r.origin[a]) / r.dir[a];
        double tb = (hi - r.origin[a]) / r.dir[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 > t1) return std::nullopt;
    return std::pair{t0, t1};
}

/// Classified samples along a ray, front to back, at t_enter + m * step.
/// Invalid samples carry alpha 0.
inline std::vector<Rgba> ray_samples(const ScalarField3D& f, const TransferFunction& tf, const Ray& r, double step) {
    std::vector<Rgba> out;
    const auto span = clip_to_grid(f.grid, r);
    if (!span) return out;
    const auto [t0, t1] = *span;
    for (std::size_t m = 0;; ++m) {
        const double t = t0 + static_cast<double>(m) * step;
        if (t > t1 + 1e-12 * std::max(1.0, std::abs(t1))) break;
        const auto v = sample_trilinear(f, r.origin + r.dir * t);
        out.push_back(v ? apply_transfer_function(tf, *v) : Rgba{0, 0, 0, 0});
    }
    return out;
}

/// Premultiplied accumulation; `a` is the accumulated opacity.
struct Composite {
    double r = 0, g = 0, b = 0, a = 0;
};

inline constexpr double kEarlyExitAlpha = 0.99;

inline Composite composite_front_to_back(std::span<const Rgba> samples, bool early_exit = true) {
    Composite acc;
    for (const auto& s : samples) {
        const double w = (1 - acc.a) * s.a;
        acc.r += w * s.r;
        acc.g += w * s.g;
        acc.b += w * s.b;
        acc.a += w;
        if (early_exit && acc.a >= kEarlyExitAlpha) break;
    }
    return acc;
}

inline Composite composite_back_to_front(std::span<const Rgba> samples) {
    Composite acc;
    for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
        acc.r = it->a * it->r + (1 - it->a) * acc.r;
        acc.g = it->a * it->g + (1 - it->a) * acc.g;
        acc.b = it->a * it->b + (1 - it->a) * acc.b;
        acc.a = it->a + (1 - it->a) * acc.a;
    }
    return acc;
}

inline Rgba over_background(const Composite& c, const Rgba& bg) {
    const double rest = (1 - c.a) * bg.a;
    return {c.r + rest * bg.r, c.g + rest * bg.g, c.b + rest * bg.b, c.a + rest};
}

inline double default_ray_step(const ScalarField3D& f) {
    const auto& s = f.grid.spacing;
    return 0.5 * std::min({s.x, s.y, s.z});
}

/// Opacity of a sample whose step is `k` times the step its alpha was defined
/// for. Fully opaque and fully transparent samples are unchanged.
inline double rescale_alpha(double a, double k) {
    if (k == 1 || a <= 0 || a >= 1) return a;
    return 1 - std::pow(1 - a, k);
}

/// Fixed-step front-to-back ray marching with early exit at 0.99 opacity.
/// Transfer-function alpha is the opacity of one default_ray_step.
inline SectionImage render_volume_raycast(const ScalarField3D& f, const Camera& cam, const TransferFunction& tf,
                                          double step, const Rgba& background = {0, 0, 0, 1}) {
    if (!(step > 0) || !std::isfinite(step)) fail(ErrorCode::BadStep, "step must be > 0");
    validate_camera(cam);
    tf.validate();
    const double reference = default_ray_step(f);

    SectionImage img;
    img.width = cam.width;
    img.height = cam.height;
    img.pixels.resize(cam.width * cam.height);
    for (std::size_t row = 0; row < cam.height; ++row) {
        for (std::size_t col = 0; col < cam.width; ++col) {
            const auto ray = camera_ray(cam, col, row);
            auto samples = ray_samples(f, tf, ray, step);
            for (auto& smp : samples) smp.a = rescale_alpha(smp.a, step / reference);
            if (!samples.empty()) {
                // the last sample only covers the part of its step inside the grid
                const auto [t0, t1] = *clip_to_grid(f.grid, ray);
                const double covered = t1 - (t0 + static_cast<double>(samples.size() - 1) * step);
                samples.back().a = rescale_alpha(samples.back().a, std::clamp(covered / step, 0.0, 1.0));
            }
            img.pixels[row * cam.width + col] = over_background(composite_front_to_back(samples), background);
        }
    }
    return img;
}

} // namespace seabed
