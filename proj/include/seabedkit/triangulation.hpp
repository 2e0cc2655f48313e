#pragma once

// 2D Delaunay triangulation (Bowyer-Watson) and the surfaces built on it:
// terrain TINs, per-stratum horizon surfaces and drilling correction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "geomodel.hpp"
#include "mesh.hpp"
#include "vec.hpp"

namespace seabed {

inline constexpr double kEpsCirc = 1e-9;
inline constexpr double kEpsDup = 1e-9;

struct Triangulation2D {
    std::vector<Vec2> points;
    std::vector<std::array<std::uint32_t, 3>> triangles; // counter-clockwise
    std::vector<std::uint32_t> convex_hull;              // counter-clockwise, from the lexicographic minimum
};

/// In-circle predicate with the magnitude of its terms, so callers can apply a
/// relative tolerance. `det > 0` means d lies inside the circle through the
/// counter-clockwise triangle (a, b, c).
struct InCircle {
    double det = 0;
    double scale = 0;

    bool inside(double eps = kEpsCirc) const { return det > eps * scale; }
    bool cocircular(double eps = kEpsCirc) const { return std::abs(det) <= eps * scale; }
};

inline InCircle in_circle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
    const double scale = alift * (std::abs(bdx * cdy) + std::abs(cdx * bdy)) +
                         blift * (std::abs(cdx * ady) + std::abs(adx * cdy)) +
                         clift * (std::abs(adx * bdy) + std::abs(bdx * ady));
    return {det, scale};
}

inline bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

/// Andrew's monotone chain; collinear boundary points are dropped.
inline std::vector<std::uint32_t> convex_hull(std::span<const Vec2> pts) {
    std::vector<std::uint32_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return lex_less(pts[i], pts[j]); });
    if (order.size() < 3) return order;

    std::vector<std::uint32_t> hull(2 * order.size());
    std::size_t k = 0;
    for (auto i : order) {
        while (k >= 2 && orient2d(pts[hull[k - 2]], pts[hull[k - 1]], pts[i]) <= 0) --k;
        hull[k++] = i;
    }
    for (std::size_t t = order.size() - 1, lower = k + 1; t-- > 0;) {
        const auto i = order[t];
        while (k >= lower && orient2d(pts[hull[k - 2]], pts[hull[k - 1]], pts[i]) <= 0) --k;
        hull[k++] = i;
    }
    hull.resize(k - 1);
    return hull;
}

inline double polygon_area(std::span<const Vec2> pts, std::span<const std::uint32_t> loop) {
    double twice = 0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec2 a = pts[loop[i]], b = pts[loop[(i + 1) % loop.size()]];
        twice += cross2(a, b);
    }
    return 0.5 * twice;
}

namespace detail {

inline std::uint64_t edge_key(std::uint32_t u, std::uint32_t v) { return (std::uint64_t(u) << 32) | v; }

// Triangle set with a directed-edge index; each live triangle (a, b, c) owns
// the directed edges a->b, b->c and c->a.
class TriangleSet {
public:
    using Tri = std::array<std::uint32_t, 3>;

    explicit TriangleSet(const std::vector<Vec2>& pts) : pts_(pts) {}

    std::size_t add(Tri t) {
        const std::size_t id = tris_.size();
        tris_.push_back(t);
        alive_.push_back(true);
        for (int k = 0; k < 3; ++k) owner_[edge_key(t[k], t[(k + 1) % 3])] = id;
        return id;
    }

    void remove(std::size_t id) {
        alive_[id] = false;
        const Tri& t = tris_[id];
        for (int k = 0; k < 3; ++k) {
            const auto it = owner_.find(edge_key(t[k], t[(k + 1) % 3]));
            if (it != owner_.end() && it->second == id) owner_.erase(it);
        }
    }

    std::optional<std::size_t> owner(std::uint32_t u, std::uint32_t v) const {
        const auto it = owner_.find(edge_key(u, v));
        if (it == owner_.end()) return std::nullopt;
        return it->second;
    }

    bool alive(std::size_t id) const { return alive_[id]; }
    const Tri& tri(std::size_t id) const { return tris_[id]; }
    std::size_t size() const { return tris_.size(); }

    // Vertex of triangle `id` opposite to its directed edge u->v.
    std::uint32_t apex(std::size_t id, std::uint32_t u, std::uint32_t v) const {
        const Tri& t = tris_[id];
        for (int k = 0; k < 3; ++k)
            if (t[k] == u && t[(k + 1) % 3] == v) return t[(k + 2) % 3];
        return t[0];
    }

    std::vector<Tri> live() const {
        std::vector<Tri> out;
        for (std::size_t i = 0; i < tris_.size(); ++i)
            if (alive_[i]) out.push_back(tris_[i]);
        return out;
    }

    // Flips the diagonal a-b shared by (a, b, c) and (b, a, d) into c-d when the
    // quad is strictly convex. Returns false otherwise.
    bool flip(std::uint32_t a, std::uint32_t b) {
        const auto t1 = owner(a, b), t2 = owner(b, a);
        if (!t1 || !t2) return false;
        const auto c = apex(*t1, a, b), d = apex(*t2, b, a);
        if (orient2d(pts_[a], pts_[d], pts_[c]) <= 0 || orient2d(pts_[d], pts_[b], pts_[c]) <= 0) return false;
        remove(*t1);
        remove(*t2);
        add({a, d, c});
        add({d, b, c});
        return true;
    }

private:
    const std::vector<Vec2>& pts_;
    std::vector<Tri> tris_;
    std::vector<bool> alive_;
    std::unordered_map<std::uint64_t, std::size_t> owner_;
};

inline void check_triangulation_input(std::span<const Vec2> pts) {
    if (pts.size() < 3) fail(ErrorCode::TooFewPoints, "need at least 3 points, got " + std::to_string(pts.size()));
    for (const auto& p : pts)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(ErrorCode::BadArgument, "non-finite point coordinate");

    std::vector<std::uint32_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return lex_less(pts[i], pts[j]); });
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size() && pts[order[j]].x - pts[order[i]].x <= kEpsDup; ++j) {
            const Vec2 d = pts[order[j]] - pts[order[i]];
            if (std::hypot(d.x, d.y) < kEpsDup)
                fail(ErrorCode::DuplicatePoints,
                     "points " + std::to_string(order[i]) + " and " + std::to_string(order[j]) + " coincide");
        }
    }

    const Vec2 p0 = pts[order.front()];
    std::size_t far = 0;
    double far_d2 = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 d = pts[i] - p0;
        if (d.x * d.x + d.y * d.y > far_d2) {
            far_d2 = d.x * d.x + d.y * d.y;
            far = i;
        }
    }
    double max_area = 0;
    for (const auto& p : pts) max_area = std::max(max_area, std::abs(orient2d(p0, pts[far], p)));
    if (max_area <= 1e-12 * far_d2) fail(ErrorCode::CollinearInput, "all points are collinear");
}

// Adds triangles on the outside of every reflex boundary vertex until the
// boundary is convex. Needed when the super triangle hid some hull triangles.
inline void fill_hull_pockets(TriangleSet& set, const std::vector<Vec2>& pts) {
    for (bool changed = true; changed;) {
        changed = false;
        std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> out_edges, in_edges;
        for (const auto& t : set.live()) {
            for (int k = 0; k < 3; ++k) {
                const auto u = t[k], v = t[(k + 1) % 3];
                if (!set.owner(v, u)) {
                    out_edges[u].push_back(v);
                    in_edges[v].push_back(u);
                }
            }
        }
        for (const auto& [b, ins] : in_edges) {
            for (auto a : ins) {
                for (auto c : out_edges[b]) {
                    if (a == c) continue;
                    const double turn = orient2d(pts[a], pts[b], pts[c]);
                    const Vec2 ab = pts[b] - pts[a], bc = pts[c] - pts[b];
                    const double len = std::hypot(ab.x, ab.y) * std::hypot(bc.x, bc.y);
                    if (turn >= -1e-12 * len) continue;
                    bool blocked = false;
                    for (std::uint32_t q = 0; q < pts.size() && !blocked; ++q) {
                        if (q == a || q == b || q == c) continue;
                        blocked = orient2d(pts[a], pts[c], pts[q]) >= 0 && orient2d(pts[c], pts[b], pts[q]) >= 0 &&
                                  orient2d(pts[b], pts[a], pts[q]) >= 0;
                    }
                    if (blocked) continue;
                    set.add({a, c, b});
                    changed = true;
                    break;
                }
                if (changed) break;
            }
            if (changed) break;
        }
    }
}

// Lawson flips until every interior edge is locally Delaunay.
inline void legalize(TriangleSet& set, const std::vector<Vec2>& pts) {
    std::deque<std::pair<std::uint32_t, std::uint32_t>> queue;
    for (const auto& t : set.live())
        for (int k = 0; k < 3; ++k) queue.emplace_back(t[k], t[(k + 1) % 3]);

    while (!queue.empty()) {
        const auto [a, b] = queue.front();
        queue.pop_front();
        const auto t1 = set.owner(a, b), t2 = set.owner(b, a);
        if (!t1 || !t2) continue;
        const auto c = set.apex(*t1, a, b), d = set.apex(*t2, b, a);
        if (!in_circle(pts[a], pts[b], pts[c], pts[d]).inside()) continue;
        if (set.flip(a, b)) {
            queue.emplace_back(a, d);
            queue.emplace_back(d, b);
            queue.emplace_back(b, c);
            queue.emplace_back(c, a);
        }
    }
}

// For cocircular quads keep the diagonal incident to the lexicographically
// smallest of the four vertices.
inline void apply_cocircular_tie_break(TriangleSet& set, const std::vector<Vec2>& pts) {
    const std::size_t max_sweeps = 4 * pts.size() + 8;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        for (const auto& t : set.live()) {
            for (int k = 0; k < 3 && !changed; ++k) {
                const auto a = t[k], b = t[(k + 1) % 3];
                const auto t1 = set.owner(a, b), t2 = set.owner(b, a);
                if (!t1 || !t2) continue;
                const auto c = set.apex(*t1, a, b), d = set.apex(*t2, b, a);
                if (!in_circle(pts[a], pts[b], pts[c], pts[d]).cocircular()) continue;
                const std::array<std::uint32_t, 4> quad{a, b, c, d};
                const auto lowest =
                    *std::min_element(quad.begin(), quad.end(), [&](auto i, auto j) { return lex_less(pts[i], pts[j]); });
                if ((lowest == c || lowest == d) && set.flip(a, b)) changed = true;
            }
            if (changed) break;
        }
        if (!changed) return;
    }
}

} // namespace detail

/// Bowyer-Watson with a super triangle and insertion in input order.
inline Triangulation2D delaunay_triangulate(std::span<const Vec2> input) {
    detail::check_triangulation_input(input);
    const auto n = static_cast<std::uint32_t>(input.size());

    std::vector<Vec2> pts(input.begin(), input.end());
    Vec2 lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const Vec2 mid = (lo + hi) * 0.5;
    const double span = std::max(hi.x - lo.x, hi.y - lo.y);
    pts.push_back({mid.x - 100 * span, mid.y - 100 * span});
    pts.push_back({mid.x + 100 * span, mid.y - 100 * span});
    pts.push_back({mid.x, mid.y + 100 * span});

    detail::TriangleSet set(pts);
    set.add({n, n + 1, n + 2});

    for (std::uint32_t p = 0; p < n; ++p) {
        const Vec2 q = pts[p];

        std::optional<std::size_t> seed;
        for (std::size_t id = 0; id < set.size() && !seed; ++id) {
            if (!set.alive(id)) continue;
            const auto& t = set.tri(id);
            if (orient2d(pts[t[0]], pts[t[1]], q) >= 0 && orient2d(pts[t[1]], pts[t[2]], q) >= 0 &&
                orient2d(pts[t[2]], pts[t[0]], q) >= 0)
                seed = id;
        }
        if (!seed) fail(ErrorCode::BadArgument, "point " + std::to_string(p) + " could not be located");

        std::vector<std::size_t> cavity{*seed};
        std::vector<bool> in_cavity(set.size(), false);
        in_cavity[*seed] = true;
        auto mark = [&](std::size_t id) {
            if (id >= in_cavity.size()) in_cavity.resize(set.size(), false);
            in_cavity[id] = true;
            cavity.push_back(id);
        };

        for (std::size_t i = 0; i < cavity.size(); ++i) {
            const auto t = set.tri(cavity[i]);
            for (int k = 0; k < 3; ++k) {
                const auto nb = set.owner(t[(k + 1) % 3], t[k]);
                if (!nb || in_cavity[*nb]) continue;
                const auto& o = set.tri(*nb);
                if (in_circle(pts[o[0]], pts[o[1]], pts[o[2]], q).inside()) mark(*nb);
            }
        }

        // Grow the cavity until it is star-shaped from q.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> boundary;
        for (bool grown = true; grown;) {
            grown = false;
            boundary.clear();
            for (auto id : cavity) {
                const auto& t = set.tri(id);
                for (int k = 0; k < 3; ++k) {
                    const auto u = t[k], v = t[(k + 1) % 3];
                    const auto nb = set.owner(v, u);
                    if (nb && in_cavity[*nb]) continue;
                    if (orient2d(pts[u], pts[v], q) <= 0 && nb) {
                        mark(*nb);
                        grown = true;
                        break;
                    }
                    boundary.emplace_back(u, v);
                }
                if (grown) break;
            }
        }

        for (auto id : cavity) set.remove(id);
        for (const auto& [u, v] : boundary) set.add({u, v, p});
    }

    std::vector<std::size_t> super;
    for (std::size_t id = 0; id < set.size(); ++id) {
        if (!set.alive(id)) continue;
        const auto& t = set.tri(id);
        if (t[0] >= n || t[1] >= n || t[2] >= n) super.push_back(id);
    }
    for (auto id : super) set.remove(id);

    pts.resize(n);
    detail::fill_hull_pockets(set, pts);
    detail::legalize(set, pts);
    detail::apply_cocircular_tie_break(set, pts);

    Triangulation2D out;
    out.points = std::move(pts);
    out.triangles = set.live();
    for (auto& t : out.triangles) std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
    std::sort(out.triangles.begin(), out.triangles.end());
    out.convex_hull = convex_hull(out.points);
    return out;
}

// ---------------------------------------------------------------------------
// Surfaces

/// Delaunay TIN over the (x, y) of the samples, lifted to their z, with
/// area-weighted vertex normals facing +z.
inline TriangleMesh build_terrain_tin(std::span<const Vec3> samples) {
    std::vector<Vec2> xy;
    xy.reserve(samples.size());
    for (const auto& s : samples) xy.push_back({s.x, s.y});
    const auto tri = delaunay_triangulate(xy);

    TriangleMesh mesh;
    mesh.positions.assign(samples.begin(), samples.end());
    for (const auto& t : tri.triangles) mesh.indices.insert(mesh.indices.end(), t.begin(), t.end());
    mesh.normals = area_weighted_normals(mesh);
    mesh.material.name = "terrain";
    return mesh;
}

/// Surface through the top of `stratum_id` at every borehole that has it.
inline TriangleMesh build_horizon_surface(const Dataset& ds, const std::string& stratum_id) {
    if (!ds.order.index_of(stratum_id)) fail(ErrorCode::StratumNotFound, "unknown stratum '" + stratum_id + "'");

    std::vector<Vec3> tops;
    for (const auto& [id, bh] : ds.boreholes) {
        if (const auto* iv = bh.find(stratum_id)) tops.push_back({bh.location.x, bh.location.y, bh.world_z(iv->top_depth)});
    }
    if (tops.size() < 3) {
        fail(ErrorCode::TooFewPoints,
             "stratum '" + stratum_id + "' occurs in " + std::to_string(tops.size()) + " boreholes, need 3");
    }
    auto mesh = build_terrain_tin(tops);
    mesh.material = Material{stratum_id, ds.order.color_of(stratum_id), {}};
    return mesh;
}

/// Strata that occur in at least three boreholes, in stratigraphic order.
inline std::vector<std::string> horizon_strata(const Dataset& ds) {
    std::vector<std::string> out;
    for (const auto& s : ds.order.strata) {
        std::size_t count = 0;
        for (const auto& [id, bh] : ds.boreholes) count += bh.find(s.id) ? 1 : 0;
        if (count >= 3) out.push_back(s.id);
    }
    return out;
}

struct Barycentric {
    std::array<std::uint32_t, 3> vertices{};
    std::array<double, 3> weights{};
};

/// Locates (x, y) in the mesh's planar projection.
inline std::optional<Barycentric> locate_in_plan(const TriangleMesh& m, Vec2 p) {
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto [a3, b3, c3] = m.triangle(t);
        const Vec2 a{a3.x, a3.y}, b{b3.x, b3.y}, c{c3.x, c3.y};
        const double area = orient2d(a, b, c);
        if (std::abs(area) <= 0) continue;
        const double wa = orient2d(b, c, p) / area;
        const double wb = orient2d(c, a, p) / area;
        const double wc = 1 - wa - wb;
        constexpr double tol = -1e-12;
        if (wa >= tol && wb >= tol && wc >= tol)
            return Barycentric{{m.indices[3 * t], m.indices[3 * t + 1], m.indices[3 * t + 2]}, {wa, wb, wc}};
    }
    return std::nullopt;
}

/// Shifts a height-field surface so it passes through the observed borehole
/// elevations.
///
/// Each vertex moves by an inverse-distance-squared blend of per-borehole
/// coefficients, with weights cut to zero beyond `radius` and a background
/// weight of 1/radius^2 for the unchanged surface. The coefficients are solved
/// so that the corrected surface, linearly interpolated at each borehole that
/// lies inside the mesh, reproduces the observation. Boreholes outside the mesh
/// footprint are ignored.
inline TriangleMesh apply_drilling_correction(const TriangleMesh& surface, std::span<const Vec3> boreholes,
                                              double radius) {
    if (!(radius > 0)) fail(ErrorCode::NonPositiveRadius, "radius must be > 0");
    {
        std::vector<std::uint32_t> order(surface.positions.size());
        std::iota(order.begin(), order.end(), 0u);
        const auto& pos = surface.positions;
        std::sort(order.begin(), order.end(), [&](auto i, auto j) {
            return pos[i].x < pos[j].x || (pos[i].x == pos[j].x && pos[i].y < pos[j].y);
        });
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size() && pos[order[j]].x - pos[order[i]].x <= kEpsDup; ++j) {
                if (std::hypot(pos[order[j]].x - pos[order[i]].x, pos[order[j]].y - pos[order[i]].y) < kEpsDup)
                    fail(ErrorCode::NotAHeightField, "two vertices share the same (x, y)");
            }
        }
    }

    struct Obs {
        Vec2 xy;
        Barycentric at;
        double residual;
    };
    std::vector<Obs> obs;
    for (const auto& b : boreholes) {
        const auto at = locate_in_plan(surface, {b.x, b.y});
        if (!at) continue;
        double z = 0;
        for (int k = 0; k < 3; ++k) z += at->weights[k] * surface.positions[at->vertices[k]].z;
        obs.push_back({{b.x, b.y}, *at, b.z - z});
    }

    TriangleMesh out = surface;
    if (obs.empty()) return out;

    const std::size_t nv = surface.positions.size();
    const std::size_t nk = obs.size();
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nk));
    std::vector<std::optional<std::size_t>> exact_hit(nv);
    const double background = 1.0 / (radius * radius);
    for (std::size_t i = 0; i < nv; ++i) {
        const Vec3 v = surface.positions[i];
        double total = background;
        std::vector<double> w(nk, 0.0);
        for (std::size_t k = 0; k < nk && !exact_hit[i]; ++k) {
            const double d = std::hypot(v.x - obs[k].xy.x, v.y - obs[k].xy.y);
            if (d < kEpsDup) {
                exact_hit[i] = k;
            } else if (d <= radius) {
                w[k] = 1.0 / (d * d);
                total += w[k];
            }
        }
        const auto row = static_cast<Eigen::Index>(i);
        if (exact_hit[i]) {
            phi(row, static_cast<Eigen::Index>(*exact_hit[i])) = 1.0;
        } else {
            for (std::size_t k = 0; k < nk; ++k) phi(row, static_cast<Eigen::Index>(k)) = w[k] / total;
        }
    }

    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(nk));
    for (std::size_t j = 0; j < nk; ++j) {
        const auto row = static_cast<Eigen::Index>(j);
        rhs(row) = obs[j].residual;
        for (int k = 0; k < 3; ++k)
            system.row(row) += obs[j].at.weights[k] * phi.row(static_cast<Eigen::Index>(obs[j].at.vertices[k]));
    }
    const Eigen::VectorXd coeff = system.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd shift = phi * coeff;

    for (std::size_t i = 0; i < nv; ++i) {
        // exact hits take the residual itself rather than the solved value
        out.positions[i].z += exact_hit[i] ? obs[*exact_hit[i]].residual : shift(static_cast<Eigen::Index>(i));
    }
    if (!out.normals.empty()) out.normals = area_weighted_normals(out);
    return out;
}

} // namespace seabed
