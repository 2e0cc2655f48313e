#include <gtest/gtest.h>

#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "seabedkit/isosurface.hpp"
#include "support/common.hpp"

using namespace seabed;
using testsupport::grid;
using testsupport::sample_field;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::BadArgument;
}

using EdgeKey = std::pair<std::uint32_t, std::uint32_t>;

// Undirected edge -> number of incident triangles, and directed edge counts.
struct EdgeUse {
    std::map<EdgeKey, int> undirected;
    std::map<EdgeKey, int> directed;
};

EdgeUse edge_use(const TriangleMesh& m) {
    EdgeUse u;
    for (std::size_t t = 0; t < m.triangle_count(); ++t)
        for (int e = 0; e < 3; ++e) {
            const auto a = m.indices[3 * t + e], b = m.indices[3 * t + (e + 1) % 3];
            ++u.undirected[{std::min(a, b), std::max(a, b)}];
            ++u.directed[{a, b}];
        }
    return u;
}

double angle_deg(Vec3 a, Vec3 b) {
    const double c = std::clamp(dot(normalized(a), normalized(b)), -1.0, 1.0);
    return std::acos(c) * 180 / std::numbers::pi;
}

const Vec3 kCenter{0.5, 0.5, 0.5};

double max_radial_error(const TriangleMesh& m, double r) {
    double worst = 0;
    for (const auto& v : m.positions) worst = std::max(worst, std::abs(norm(v - kCenter) - r));
    return worst;
}

} // namespace

TEST(MarchingCubes, ConstantFieldIsEmpty) {
    const auto f = sample_field("c", grid({4, 4, 4}, {0, 0, 0}, {1, 1, 1}), [](Vec3) { return 5.0; });
    const auto m = marching_cubes(f, 20);
    EXPECT_EQ(m.vertex_count(), 0u);
    EXPECT_EQ(m.triangle_count(), 0u);
}

TEST(MarchingCubes, Errors) {
    const auto thin = sample_field("t", grid({2, 1, 2}, {0, 0, 0}, {1, 1, 1}), [](Vec3) { return 0.0; });
    EXPECT_EQ(code_of([&] { marching_cubes(thin, 0.5); }), ErrorCode::FieldTooSmall);
    const auto f = sample_field("c", grid({2, 2, 2}, {0, 0, 0}, {1, 1, 1}), [](Vec3) { return 0.0; });
    EXPECT_EQ(code_of([&] { marching_cubes(f, std::numeric_limits<double>::quiet_NaN()); }), ErrorCode::NonFiniteIso);
    EXPECT_EQ(code_of([&] { marching_cubes(f, std::numeric_limits<double>::infinity()); }), ErrorCode::NonFiniteIso);
}

TEST(MarchingCubes, SingleLowCornerGivesOneTriangle) {
    for (int c = 0; c < 8; ++c) {
        const Vec3 low{double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)};
        const auto f = sample_field("one", grid({2, 2, 2}, {0, 0, 0}, {1, 1, 1}),
                                    [&](Vec3 p) { return norm(p - low) < 1e-12 ? 0.0 : 1.0; });
        const auto m = marching_cubes(f, 0.5);
        ASSERT_EQ(m.triangle_count(), 1u) << "corner " << c;
        // vertices at the edge midpoints next to the low corner
        for (const auto& v : m.positions) EXPECT_NEAR(norm(v - low), 0.5, 1e-12);
        // facing toward the low corner
        const auto [a, b, d] = m.triangle(0);
        const Vec3 centroid = (a + b + d) * (1.0 / 3);
        EXPECT_GT(dot(face_normal(m, 0), low - centroid), 0) << "corner " << c;
    }
}

TEST(MarchingCubes, EveryCaseCrossesOnlySignChangeEdges) {
    for (int ci = 1; ci < 255; ++ci) {
        const auto f = sample_field("c", grid({2, 2, 2}, {0, 0, 0}, {1, 1, 1}), [&](Vec3 p) {
            const int c = int(p.x) | (int(p.y) << 1) | (int(p.z) << 2);
            return (ci >> c) & 1 ? 0.0 : 1.0;
        });
        const auto m = marching_cubes(f, 0.5);
        ASSERT_GT(m.triangle_count(), 0u) << "case " << ci;
        EXPECT_FALSE(check_mesh(m)) << "case " << ci << ": " << *check_mesh(m);
        for (const auto& v : m.positions) {
            // on an edge midpoint whose ends lie on opposite sides
            int halves = 0;
            for (int a = 0; a < 3; ++a) halves += std::abs(v[a] - 0.5) < 1e-12;
            ASSERT_EQ(halves, 1);
            Vec3 lo = v, hi = v;
            for (int a = 0; a < 3; ++a)
                if (std::abs(v[a] - 0.5) < 1e-12) lo[a] = 0, hi[a] = 1;
            EXPECT_NE(*sample_trilinear(f, lo) < 0.5, *sample_trilinear(f, hi) < 0.5);
        }
        // inside a single cell the surface is closed except on the cube faces:
        // no interior edge may be used more than twice
        for (const auto& [e, n] : edge_use(m).undirected) EXPECT_LE(n, 2) << "case " << ci;
    }
}

TEST(MarchingCubes, SphereIsClosedAndAccurate) {
    const double r = 0.3;
    const auto f = testsupport::sphere_distance(64);
    const auto m = marching_cubes(f, r);
    ASSERT_FALSE(check_mesh(m)) << *check_mesh(m);

    const auto use = edge_use(m);
    for (const auto& [e, n] : use.undirected) ASSERT_EQ(n, 2);
    // consistently oriented: each directed edge appears once
    for (const auto& [e, n] : use.directed) ASSERT_EQ(n, 1);

    const double area = surface_area(m);
    const double exact = 4 * std::numbers::pi * r * r;
    EXPECT_NEAR(area, exact, 0.02 * exact);

    const double diag = std::sqrt(3.0) / 63;
    EXPECT_LE(max_radial_error(m, r), 1.5 * diag);

    double worst = 0;
    for (std::size_t v = 0; v < m.vertex_count(); ++v)
        worst = std::max(worst, angle_deg(m.normals[v], kCenter - m.positions[v]));
    EXPECT_LE(worst, 2.0);

    // faces point inward, toward lower distance
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto [a, b, c] = m.triangle(t);
        ASSERT_GT(dot(face_normal(m, t), kCenter - (a + b + c) * (1.0 / 3)), 0);
    }
}

TEST(MarchingCubes, VerticesAreWelded) {
    const auto m = marching_cubes(testsupport::sphere_distance(24), 0.31);
    std::set<std::tuple<double, double, double>> seen;
    for (const auto& v : m.positions) EXPECT_TRUE(seen.insert({v.x, v.y, v.z}).second);
}

TEST(MarchingCubes, RefinementReducesRadialError) {
    const double r = 0.3;
    const double e16 = max_radial_error(marching_cubes(testsupport::sphere_distance(16), r), r);
    const double e32 = max_radial_error(marching_cubes(testsupport::sphere_distance(32), r), r);
    const double e64 = max_radial_error(marching_cubes(testsupport::sphere_distance(64), r), r);
    EXPECT_LT(e32, e16);
    EXPECT_LT(e64, e32);
}

TEST(MarchingCubes, InvalidSlabLeavesHole) {
    auto f = testsupport::sphere_distance(40);
    const auto& g = f.grid;
    for (std::size_t k = 18; k <= 21; ++k)
        for (std::size_t j = 0; j < 40; ++j)
            for (std::size_t i = 0; i < 40; ++i) f.values[g.index(i, j, k)] = kInvalid;
    const auto m = marching_cubes(f, 0.3);
    ASSERT_GT(m.triangle_count(), 0u);
    // cells 17..21 touch an invalid node
    const double z_lo = g.node_position(0, 0, 17).z, z_hi = g.node_position(0, 0, 22).z;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto tri = m.triangle(t);
        const Vec3 c = (tri[0] + tri[1] + tri[2]) * (1.0 / 3);
        ASSERT_TRUE(c.z < z_lo || c.z > z_hi) << c.z;
    }
    int open = 0;
    for (const auto& [e, n] : edge_use(m).undirected) open += n == 1;
    EXPECT_GT(open, 0);
}

TEST(MarchingCubes, LinearFieldNormalsAreExact) {
    const auto f = sample_field("z", grid({4, 5, 6}, {0, 0, 0}, {1, 1, 1}), [](Vec3 p) { return p.z; });
    const auto m = marching_cubes(f, 2.25);
    ASSERT_GT(m.triangle_count(), 0u);
    for (const auto& n : m.normals) EXPECT_EQ(n, (Vec3{0, 0, -1}));
    for (const auto& v : m.positions) EXPECT_NEAR(v.z, 2.25, 1e-12);
    EXPECT_EQ(estimate_gradient_normal(f, {1.5, 2, 3}), (Vec3{0, 0, -1}));
    EXPECT_EQ(estimate_gradient_normal(f, {1, 2, 3.7}), (Vec3{0, 0, -1}));
}

TEST(MarchingCubes, AnisotropicSpacingScalesGradient) {
    // f = x + z sampled with spacing (2, 1, 0.5): gradient (1, 0, 1)
    const auto f = sample_field("s", grid({5, 3, 9}, {0, 0, 0}, {2, 1, 0.5}), [](Vec3 p) { return p.x + p.z; });
    const auto m = marching_cubes(f, 3.3);
    const double c = -1 / std::sqrt(2.0);
    for (const auto& n : m.normals) {
        EXPECT_NEAR(n.x, c, 1e-12);
        EXPECT_NEAR(n.y, 0, 1e-12);
        EXPECT_NEAR(n.z, c, 1e-12);
    }
}

TEST(MarchingCubes, BoundaryNormalsAreUnit) {
    const auto f = sample_field("q", grid({6, 6, 6}, {0, 0, 0}, {0.2, 0.2, 0.2}),
                                [](Vec3 p) { return p.x * p.x + 0.5 * p.y + std::sin(p.z); });
    const auto m = marching_cubes(f, 0.6);
    ASSERT_GT(m.triangle_count(), 0u);
    int on_face = 0;
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        const auto& p = m.positions[v];
        for (int a = 0; a < 3; ++a) on_face += std::abs(p[a]) < 1e-12 || std::abs(p[a] - 1) < 1e-12;
        EXPECT_TRUE(std::isfinite(m.normals[v].x) && std::isfinite(m.normals[v].y) && std::isfinite(m.normals[v].z));
        EXPECT_NEAR(norm(m.normals[v]), 1, 1e-12);
    }
    EXPECT_GT(on_face, 0);
}

TEST(MarchingCubes, NegatedFieldFlipsNormals) {
    auto f = testsupport::sphere_distance(20);
    auto neg = f;
    for (auto& v : neg.values) v = -v;
    const auto m = marching_cubes(f, 0.27);
    const auto n = marching_cubes(neg, -0.27);
    ASSERT_EQ(m.vertex_count(), n.vertex_count());
    std::map<std::tuple<double, double, double>, Vec3> normal_at;
    for (std::size_t v = 0; v < m.vertex_count(); ++v)
        normal_at[{m.positions[v].x, m.positions[v].y, m.positions[v].z}] = m.normals[v];
    for (std::size_t v = 0; v < n.vertex_count(); ++v) {
        const auto it = normal_at.find({n.positions[v].x, n.positions[v].y, n.positions[v].z});
        ASSERT_NE(it, normal_at.end());
        EXPECT_NEAR(norm(it->second + n.normals[v]), 0, 1e-12);
    }
    EXPECT_NEAR(surface_area(m), surface_area(n), 1e-12);
}

TEST(MarchingCubes, CornerExactIsoHasNoDegenerateTriangles) {
    const auto f = sample_field("z", grid({4, 4, 4}, {0, 0, 0}, {1, 1, 1}),
                                [](Vec3 p) { return std::round(p.x + p.y + p.z) / 3; });
    for (double iso : {0.0, 1.0 / 3, 2.0 / 3, 1.0, 2.0}) {
        const auto m = marching_cubes(f, iso);
        EXPECT_FALSE(check_mesh(m, 0)) << iso << ": " << *check_mesh(m, 0);
    }
}

TEST(MarchingCubes, FixtureThermocline) {
    const auto m = marching_cubes(
        sample_field("t", grid({21, 21, 21}, {0, 0, 0}, {0.05, 0.05, 10}), [](Vec3 p) { return 24 - 0.09 * p.z; }), 20);
    ASSERT_GT(m.triangle_count(), 0u);
    for (const auto& v : m.positions) EXPECT_NEAR(v.z, 4 / 0.09, 1e-9);
    for (const auto& nrm : m.normals) EXPECT_NEAR(nrm.z, 1, 1e-12); // colder below
}
