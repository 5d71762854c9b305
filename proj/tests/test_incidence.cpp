#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flab/incidence.hpp"
#include "flab/setgen.hpp"

using namespace flab;

namespace {

constexpr double pi = std::numbers::pi;

struct circle_instance {
    std::vector<circle_annulus> P;
    std::vector<disc2> T;
};

circle_instance random_circles(std::mt19937_64& rng, std::size_t np, std::size_t nt, double delta) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    circle_instance in;
    const scale s{delta};
    for (std::size_t i = 0; i < np; ++i) {
        in.P.push_back(make_annulus(s, {U(rng) - 0.5, U(rng) - 0.5}, 1.0 + U(rng)));
    }
    for (std::size_t j = 0; j < nt; ++j) {
        in.T.push_back({{4.0 * U(rng) - 2.0, 4.0 * U(rng) - 2.0}, delta});
    }
    return in;
}

std::vector<sine_strip> random_strips(std::mt19937_64& rng, std::size_t n, double delta) {
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    std::vector<sine_strip> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(make_strip(scale{delta}, {U(rng), U(rng), U(rng)}));
    return out;
}

std::vector<disc2> random_sine_discs(std::mt19937_64& rng, std::size_t n, double delta) {
    std::uniform_real_distribution<double> X(-0.05, 2 * pi + 0.05), Y(-1.0, 1.0);
    std::vector<disc2> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({{X(rng), Y(rng)}, delta});
    return out;
}

std::vector<ball3> random_balls(std::mt19937_64& rng, std::size_t n, double delta) {
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    std::vector<ball3> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({{U(rng), U(rng), U(rng)}, delta});
    return out;
}

std::vector<light_slab> random_slabs(std::mt19937_64& rng, std::size_t n, double delta) {
    std::uniform_real_distribution<double> X(0.0, 2 * pi), Y(-0.8, 0.8);
    std::vector<light_slab> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({X(rng), Y(rng), 10 * delta});
    return out;
}

double circular_gap(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 2 * pi - d);
}

/// Σ over curves of (ordered separated incident triples)^(1/3), by O(m³) enumeration.
template <class Curve, class Obj>
double brute_trilinear(const std::vector<Curve>& P, const std::vector<Obj>& T, double kappa) {
    double sum = 0.0;
    for (const auto& c : P) {
        std::vector<double> x;
        for (const auto& o : T) {
            if (incident(c, o)) x.push_back(separation_coordinate(c, o));
        }
        auto sep = [&](double a, double b) {
            return (circular_separation<Curve> ? circular_gap(a, b) : std::abs(a - b)) >= kappa;
        };
        std::uint64_t n = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < x.size(); ++j)
                for (std::size_t k = 0; k < x.size(); ++k)
                    if (i != j && j != k && i != k && sep(x[i], x[j]) && sep(x[j], x[k]) && sep(x[i], x[k])) ++n;
        sum += std::cbrt(static_cast<double>(n));
    }
    return sum;
}

}  // namespace

TEST(CountIncidences, EmptyObjects) {
    const std::vector<circle_annulus> P{make_annulus(scale{0.01}, {0.0, 0.0}, 1.0)};
    EXPECT_EQ(count_incidences(P, std::vector<disc2>{}).total, 0u);
    EXPECT_EQ(brute_force_incidences(P, std::vector<disc2>{}).total, 0u);
}

TEST(CountIncidences, DiscOnCircle) {
    const std::vector<circle_annulus> P{make_annulus(scale{0.01}, {0.0, 0.0}, 1.0)};
    const std::vector<disc2> T{{{1.0, 0.0}, 0.01}};
    EXPECT_EQ(count_incidences(P, T).total, 1u);
    EXPECT_EQ(brute_force_incidences(P, T).total, 1u);
}

TEST(CountIncidences, MismatchedScalesThrow) {
    const std::vector<circle_annulus> P{make_annulus(scale{0.01}, {0.0, 0.0}, 1.0)};
    const std::vector<disc2> T{{{1.0, 0.0}, 0.02}};
    EXPECT_THROW(count_incidences(P, T), std::invalid_argument);
}

TEST(CountIncidences, IndexedEqualsBruteCircles) {
    std::mt19937_64 rng(1);
    for (int it = 0; it < 20; ++it) {
        const double delta = std::ldexp(1.0, -(4 + it % 6));
        const auto in = random_circles(rng, 50 + 20 * it, 100 + 90 * it, delta);
        const auto a = count_incidences(in.P, in.T);
        const auto b = brute_force_incidences(in.P, in.T);
        EXPECT_EQ(a.total, b.total);
        EXPECT_EQ(a.per_curve, b.per_curve);
    }
}

TEST(CountIncidences, IndexedEqualsBruteLarge) {
    std::mt19937_64 rng(2);
    const auto in = random_circles(rng, 500, 2000, 1.0 / 128);
    EXPECT_EQ(count_incidences(in.P, in.T).per_curve, brute_force_incidences(in.P, in.T).per_curve);
}

TEST(CountIncidences, IndexedEqualsBruteSine) {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 20; ++it) {
        const double delta = std::ldexp(1.0, -(4 + it % 6));
        const auto P = random_strips(rng, 50 + 20 * it, delta);
        const auto T = random_sine_discs(rng, 100 + 90 * it, delta);
        EXPECT_EQ(count_incidences(P, T).per_curve, brute_force_incidences(P, T).per_curve);
    }
}

TEST(CountIncidences, IndexedEqualsBruteSlab) {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 20; ++it) {
        const double delta = std::ldexp(1.0, -(4 + it % 6));
        const auto P = random_balls(rng, 50 + 20 * it, delta);
        const auto T = random_slabs(rng, 100 + 90 * it, delta);
        EXPECT_EQ(count_incidences(P, T).per_curve, brute_force_incidences(P, T).per_curve);
    }
}

TEST(CountIncidences, ThreadCountDoesNotChangeResult) {
    std::mt19937_64 rng(5);
    const auto in = random_circles(rng, 300, 1500, 1.0 / 64);
    count_options one, many;
    many.exec.threads = 8;
    EXPECT_EQ(count_incidences(in.P, in.T, one).per_curve, count_incidences(in.P, in.T, many).per_curve);
}

TEST(CountIncidences, BudgetExceeded) {
    std::mt19937_64 rng(6);
    const auto in = random_circles(rng, 100, 100, 1.0 / 1024);
    count_options opt;
    opt.work_budget = 10.0;
    EXPECT_THROW(count_incidences(in.P, in.T, opt), budget_exceeded);
}

TEST(SeparatedTriples, AllPairsSeparated) {
    EXPECT_EQ(separated_triples_linear({0.0, 0.3, 0.7}, 0.2), 1u);
    EXPECT_EQ(separated_triples_linear({0.0, 0.3, 0.7}, 0.35), 0u);
}

TEST(SeparatedTriples, CircularWrapsAround) {
    // Gaps 1, 1 and 2π − 2 ≈ 4.28.
    EXPECT_EQ(separated_triples_circular({0.0, 1.0, 2.0}, 1.0), 1u);
    EXPECT_EQ(separated_triples_circular({0.5, 1.0, 6.0}, 0.5), 1u);
    EXPECT_EQ(separated_triples_circular({0.5, 1.0, 6.0}, 0.8), 0u);
}

TEST(SeparatedTriples, MatchEnumeration) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 2 * pi);
    for (int it = 0; it < 200; ++it) {
        std::vector<double> x(it % 40);
        for (auto& v : x) v = std::round(U(rng) * 16) / 16;
        std::sort(x.begin(), x.end());
        const double kappa = 0.0625 * (1 + it % 20);
        std::uint64_t lin = 0, circ = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = i + 1; j < x.size(); ++j)
                for (std::size_t k = j + 1; k < x.size(); ++k) {
                    lin += x[j] - x[i] >= kappa && x[k] - x[j] >= kappa;
                    circ += circular_gap(x[i], x[j]) >= kappa && circular_gap(x[j], x[k]) >= kappa &&
                            circular_gap(x[i], x[k]) >= kappa;
                }
        EXPECT_EQ(separated_triples_linear(x, kappa), lin);
        EXPECT_EQ(separated_triples_circular(x, kappa), circ);
    }
}

TEST(CountTrilinear, ThreeSeparatedDiscs) {
    const double delta = 0.01;
    const std::vector<sine_strip> P{make_strip(scale{delta}, {0.0, 0.0, 0.0})};
    const std::vector<disc2> T{{{0.0, 0.0}, delta}, {{0.3, 0.0}, delta}, {{0.7, 0.0}, delta}};
    EXPECT_NEAR(count_trilinear(P, T, 0.2), std::cbrt(6.0), 1e-15);
    EXPECT_EQ(count_trilinear(P, T, 0.35), 0.0);
}

TEST(CountTrilinear, MatchesBruteEnumeration) {
    std::mt19937_64 rng(8);
    for (int it = 0; it < 10; ++it) {
        const auto in = random_circles(rng, 30, 400, 1.0 / 32);
        const auto Ps = random_strips(rng, 30, 1.0 / 32);
        const auto Ts = random_sine_discs(rng, 400, 1.0 / 32);
        const auto Pb = random_balls(rng, 30, 1.0 / 32);
        const auto Tb = random_slabs(rng, 200, 1.0 / 32);
        const double kappa = 0.1 + 0.1 * it;
        EXPECT_NEAR(count_trilinear(in.P, in.T, kappa), brute_trilinear(in.P, in.T, kappa), 1e-9);
        EXPECT_NEAR(count_trilinear(Ps, Ts, kappa), brute_trilinear(Ps, Ts, kappa), 1e-9);
        EXPECT_NEAR(count_trilinear(Pb, Tb, kappa), brute_trilinear(Pb, Tb, kappa), 1e-9);
    }
}

TEST(CountTrilinear, RejectsBadKappa) {
    const std::vector<sine_strip> P;
    const std::vector<disc2> T;
    EXPECT_THROW(count_trilinear(P, T, 0.0), std::invalid_argument);
}

TEST(BroadValue, SingleOccupiedArc) {
    const arc_partition g(3.0, true, false);
    std::vector<double> c(static_cast<std::size_t>(g.m), 0.0);
    c[4] = 7.0;
    for (int A = 1; A <= 3; ++A) {
        EXPECT_EQ(broad_value(c, A, g, broad_mode::exact), 0.0);
        EXPECT_EQ(broad_value(c, A, g, broad_mode::greedy), 0.0);
    }
}

TEST(BroadValue, ConstantProfileSurvives) {
    const arc_partition g(5.0, true, true);
    const std::vector<double> c(static_cast<std::size_t>(g.m), 2.0);
    EXPECT_EQ(broad_value(c, 1, g, broad_mode::exact), 2.0);
    EXPECT_EQ(broad_value(c, 2, g, broad_mode::greedy), 2.0);
}

TEST(BroadValue, ExactSearchTooLarge) {
    const arc_partition g(12.0, true, false);
    const std::vector<double> c(static_cast<std::size_t>(g.m), 1.0);
    try {
        broad_value(c, 1, g, broad_mode::exact);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "exact broad search too large");
    }
    const arc_partition small(2.0, true, false);
    const std::vector<double> d(static_cast<std::size_t>(small.m), 1.0);
    EXPECT_THROW(broad_value(d, 5, small, broad_mode::exact), std::invalid_argument);
}

TEST(BroadValue, ArcCount) {
    EXPECT_EQ(arc_partition(1.0, true, false).m, 7);
    EXPECT_EQ(arc_partition(5.0, true, false).m, 32);
    EXPECT_THROW(arc_partition(0.5, true, false), std::invalid_argument);
}

TEST(BroadValue, GreedyNeverBelowExact) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> C(0, 9);
    std::uniform_real_distribution<double> R(1.0, 5.0);
    for (int it = 0; it < 200; ++it) {
        const arc_partition g(R(rng), it % 3 != 0, it % 3 == 1);
        std::vector<double> c(static_cast<std::size_t>(g.m));
        for (auto& v : c) v = C(rng);
        const int A = 1 + it % 3;
        EXPECT_GE(broad_value(c, A, g, broad_mode::greedy), broad_value(c, A, g, broad_mode::exact));
    }
}

TEST(CountBroad, SumsPerCurveValues) {
    std::mt19937_64 rng(10);
    const auto in = random_circles(rng, 40, 800, 1.0 / 32);
    broad_params bp;
    bp.A = 2;
    bp.R = 2.0;
    bp.mode = broad_mode::exact;
    const auto g = partition_for<circle_annulus>(bp.R);
    double expected = 0.0;
    for (const auto& c : in.P) {
        std::vector<std::uint32_t> ids;
        for (std::uint32_t j = 0; j < in.T.size(); ++j)
            if (incident(c, in.T[j])) ids.push_back(j);
        expected += broad_value(arc_profile(c, in.T, ids, g), bp.A, g, bp.mode);
    }
    EXPECT_DOUBLE_EQ(count_broad(in.P, in.T, bp), expected);
    bp.mode = broad_mode::greedy;
    EXPECT_GE(count_broad(in.P, in.T, bp), expected);
}

TEST(CountBroad, BroadNeverExceedsPlain) {
    std::mt19937_64 rng(11);
    const auto P = random_balls(rng, 100, 1.0 / 64);
    const auto T = random_slabs(rng, 500, 1.0 / 64);
    broad_params bp;
    bp.R = 3.0;
    EXPECT_LE(count_broad(P, T, bp), static_cast<double>(count_incidences(P, T).total));
}

TEST(CountBroad, LiteralModeScalesGlobalValue) {
    std::mt19937_64 rng(12);
    const auto P = random_strips(rng, 20, 1.0 / 32);
    const auto T = random_sine_discs(rng, 300, 1.0 / 32);
    broad_params bp;
    bp.literal = true;
    const double v = count_broad(P, T, bp);
    EXPECT_DOUBLE_EQ(std::fmod(v, 20.0), 0.0);
}

TEST(ArcProfile, SlabsLandInTheirArc) {
    const double delta = 1.0 / 64;
    const std::vector<ball3> P{{{0.0, 0.0, 0.0}, delta}};
    const std::vector<light_slab> T{{0.1, 0.0, 10 * delta}, {3.0, 0.0, 10 * delta}, {3.05, 0.0, 10 * delta}};
    const auto g = partition_for<ball3>(1.0);
    const auto prof = arc_profile(P[0], T, {0, 1, 2}, g);
    EXPECT_EQ(prof[0], 1.0);
    EXPECT_EQ(prof[static_cast<std::size_t>(std::floor(3.0 / g.width))], 2.0);
}
