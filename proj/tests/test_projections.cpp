#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "flab/projections.hpp"
#include "flab/setgen.hpp"

using namespace flab;

namespace {

constexpr double pi = std::numbers::pi;

/// Fewest closed intervals of length 2δ covering v, by trying every subset of
/// left endpoints drawn from v itself.
std::size_t exhaustive_cover(const std::vector<double>& v, double delta) {
    const std::size_t n = v.size();
    std::size_t best = n;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const auto k = static_cast<std::size_t>(std::popcount(mask));
        if (k >= best) continue;
        bool ok = true;
        for (double x : v) {
            bool hit = false;
            for (std::size_t i = 0; i < n && !hit; ++i) {
                hit = (mask >> i & 1u) && x >= v[i] && x <= v[i] + 2 * delta;
            }
            if (!hit) {
                ok = false;
                break;
            }
        }
        if (ok) best = k;
    }
    return best;
}

}  // namespace

TEST(Project, PiSpotValues) {
    point_cloud c;
    c.dim = 3;
    c.points = {{1.0, 2.0, 3.0}};
    EXPECT_EQ(project(projection_kind::pi, 0.0, c), std::vector<double>{1.0});
    c.points = {{1.0, 1.0, 1.0}};
    EXPECT_EQ(project(projection_kind::pi, 1.0, c), std::vector<double>{3.0});
}

TEST(Project, RhoAndPiRelatedByChangeOfVariables) {
    // (cos φ, sin φ, 1) is a multiple of L⁻¹(1, θ, θ²) with θ = tan(φ/2) and
    // L(x, y, z) = ((z + x)/2, y/2, (z − x)/2).
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> U(-1.0, 1.0), F(-2.5, 2.5);
    for (int it = 0; it < 1000; ++it) {
        const vec3 x{U(rng), U(rng), U(rng)};
        const double phi = F(rng);
        const double theta = std::tan(phi / 2);
        const vec3 xt{x[0] + x[2], 2 * x[1], x[2] - x[0]};
        const double scale_factor = (1 + std::cos(phi)) / (2 * std::numbers::sqrt2);
        EXPECT_NEAR(project_point(projection_kind::rho, phi, x),
                    scale_factor * project_point(projection_kind::pi, theta, xt), 1e-12);
    }
}

TEST(Project, KindNames) {
    EXPECT_EQ(parse_projection_kind("rho"), projection_kind::rho);
    EXPECT_THROW(parse_projection_kind("sigma"), std::invalid_argument);
}

TEST(CoveringNumber, SpotValues) {
    EXPECT_EQ(covering_number({0.0, 0.5, 1.0}, 0.3), 2u);
    EXPECT_EQ(covering_number({4.2}, 0.01), 1u);
    EXPECT_EQ(covering_number({}, 0.1), 0u);
}

TEST(CoveringNumber, MatchesExhaustiveSearch) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int it = 0; it < 300; ++it) {
        std::vector<double> v(1 + it % 12);
        for (auto& x : v) x = std::round(U(rng) * 64) / 64;
        const double delta = 0.03125 * (1 + it % 5);
        EXPECT_EQ(covering_number(v, delta), exhaustive_cover(v, delta));
    }
}

TEST(Jarnik, NumeratorsMatchDirectEnumeration) {
    for (auto [n, p, q] : {std::array<long long, 3>{16, 1, 2}, {9, 2, 5}, {12, 3, 7}}) {
        std::set<std::int64_t> direct;
        for (long long k = 0; k <= n; ++k)
            for (long long l = 0; l <= n; ++l)
                for (long long m = 0; m <= n; ++m) direct.insert(k * q * q + l * p * q + m * p * p);
        const auto nums = detail::jarnik_numerators(n, p, q);
        EXPECT_EQ(std::vector<std::int64_t>(direct.begin(), direct.end()), nums);
    }
}

TEST(Jarnik, HalfAngleValueCount) {
    // θ = 1/2, n = 16: numerators 4k + 2l + m fill 0..112.
    EXPECT_EQ(detail::jarnik_numerators(16, 1, 2).size(), 113u);
}

TEST(Jarnik, RoutesAgree) {
    const auto A = make_jarnik_grid(1.5, 24);
    for (auto [p, q] : {std::pair<long long, long long>{1, 2}, {2, 5}, {3, 7}, {5, 8}}) {
        const auto row = jarnik_cover(A, 0.1, p, q, true);
        EXPECT_EQ(static_cast<std::size_t>(row.covering_count_float), row.covering_count);
        EXPECT_LE(row.covering_count, row.distinct_values);
    }
}

TEST(Jarnik, ExperimentReport) {
    const auto rep = run_jarnik_experiment(1.5, 0.9, 0.0, 64);
    EXPECT_EQ(rep.n, 64);
    EXPECT_GT(rep.rows.size(), 0u);
    EXPECT_TRUE(rep.values_bound_holds);
    EXPECT_TRUE(rep.routes_agree);
    for (const auto& r : rep.rows) {
        EXPECT_NEAR(r.bound, std::pow(64.0, 1 + 3 * rep.alpha / 1.5), 1e-6 * r.bound);
    }
}

TEST(BoxDimension, FullSquare) {
    const auto g = make_grid_set(2, 2.0, 1.0 / 256);
    std::vector<double> scales;
    for (int k = 2; k <= 7; ++k) scales.push_back(std::ldexp(1.0, -k));
    EXPECT_NEAR(box_dimension_estimate(g, scales).slope, 2.0, 0.05);
}

TEST(BoxDimension, Segment) {
    point_cloud c;
    c.dim = 2;
    c.delta = 1.0 / 1024;
    for (int i = 0; i < 1024; ++i) c.points.push_back({i * c.delta, 0.3, 0.0});
    c.fit_bounds();
    std::vector<double> scales;
    for (int k = 2; k <= 9; ++k) scales.push_back(std::ldexp(1.0, -k));
    EXPECT_NEAR(box_dimension_estimate(c, scales).slope, 1.0, 0.05);
}

TEST(BoxDimension, GridSetsAcrossScales) {
    for (double alpha : {0.5, 1.0, 1.5}) {
        std::vector<double> x, y;
        for (int k = 4; k <= 10; ++k) {
            const double d = std::ldexp(1.0, -k);
            x.push_back(k);
            y.push_back(std::log2(static_cast<double>(occupied_cells(make_grid_set(2, alpha, d), d))));
        }
        EXPECT_NEAR(fit_line(x, y).slope, alpha, 0.1);
    }
}

TEST(FitLine, ExactLine) {
    const auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.residual, 0.0, 1e-12);
}

TEST(Cinematic, SineWaveDeterminants) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> U(-1.0, 1.0), Y(0.0, 2 * pi), T(1.0, 2.0);
    const auto f = sine_wave_g();
    for (int it = 0; it < 50; ++it) {
        const double y = Y(rng);
        const auto v = cinematic_check(f, {U(rng), U(rng)}, y, T(rng));
        // g_x1 g_x2y − g_x2 g_x1y = (cos² y + sin² y)/2.
        EXPECT_NEAR(v.rotational, 0.5, 1e-12);
        EXPECT_NEAR(v.cinematic, 1.0 / (2 * std::numbers::sqrt2), 1e-12);
    }
}

TEST(Cinematic, FiniteDifferencesMatchExactJet) {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> U(-1.0, 1.0), Y(0.0, 2 * pi), T(1.0, 2.0);
    const auto f = sine_wave_g();
    for (int it = 0; it < 50; ++it) {
        const double x1 = U(rng), x2 = U(rng), y = Y(rng), t = T(rng);
        const auto a = f.jet(x1, x2, y, t);
        const auto b = finite_difference_jet(f, x1, x2, y, t);
        const double ea[] = {a.g_x1, a.g_x2, a.g_t, a.g_x1y, a.g_x2y, a.g_ty, a.g_x1yy, a.g_x2yy, a.g_tyy};
        const double eb[] = {b.g_x1, b.g_x2, b.g_t, b.g_x1y, b.g_x2y, b.g_ty, b.g_x1yy, b.g_x2yy, b.g_tyy};
        for (int i = 0; i < 9; ++i) EXPECT_NEAR(ea[i], eb[i], 1e-6) << i;
    }
}

TEST(Cinematic, CircleIsCurved) {
    const auto v = cinematic_check(circle_g(), {0.0, 0.0}, 0.3, 1.0);
    EXPECT_GT(std::abs(v.rotational), 0.1);
    EXPECT_GT(std::abs(v.cinematic), 0.1);
}

TEST(Cinematic, NonFiniteEvaluationThrows) {
    // Outside the semicircle the square root is NaN.
    EXPECT_THROW(cinematic_check(circle_g(), {0.0, 0.0}, 3.0, 1.0), std::domain_error);
}
