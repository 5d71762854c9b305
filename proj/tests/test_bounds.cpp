#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flab/bounds.hpp"

using namespace flab;

namespace {

rhs_inputs substituted(double delta, double a, double b) {
    rhs_inputs in{delta, a, b};
    in.nP = std::pow(delta, -b);
    in.nT = std::pow(delta, -a);
    in.R = 1.0;
    return in;
}

/// Exponent read off from theorem_rhs at two scales.
double measured_exponent(theorem_id id, double a, double b) {
    const double d1 = std::ldexp(1.0, -10), d2 = std::ldexp(1.0, -20);
    const double r1 = theorem_rhs(id, substituted(d1, a, b));
    const double r2 = theorem_rhs(id, substituted(d2, a, b));
    return std::log(r2 / r1) / std::log(d1 / d2);
}

}  // namespace

TEST(TheoremRhs, LowLeastSquaresExample) {
    rhs_inputs in{std::ldexp(1.0, -8), 1.0, 1.0};
    in.nP = in.nT = 256;
    EXPECT_NEAR(theorem_rhs(theorem_id::circle_ls_low, in), 16384.0, 1e-9);
}

TEST(TheoremRhs, HighLeastSquaresMatchesDisplay) {
    rhs_inputs in{0.01, 2.0, 2.0, 1.5, 2.5, 300.0, 700.0};
    const double lambda = 4.0 / (3 * 2.0 + 2.0 - 3);
    EXPECT_DOUBLE_EQ(lambda, 0.8);
    const double expected = std::pow(in.delta, -3 * lambda / 4) * std::pow(in.K_P, lambda / 4) *
                            std::pow(in.K_T, 3 * lambda / 4) * std::pow(in.nP, 1 - lambda / 4) *
                            std::pow(in.nT, 1 - 3 * lambda / 4);
    EXPECT_NEAR(theorem_rhs(theorem_id::circle_ls_high, in), expected, 1e-9 * expected);
    EXPECT_THROW(theorem_rhs(theorem_id::circle_ls_low, in), region_error);
}

TEST(TheoremRhs, TrilinearKakeyaExample) {
    rhs_inputs in{0.01, 1.0, 1.0};
    in.nP = 8;
    in.nT = 5;
    EXPECT_NEAR(theorem_rhs(theorem_id::slab_tri_kakeya, in), 20.0, 1e-12);
}

TEST(TheoremRhs, RegionErrorNamesInequality) {
    try {
        theorem_rhs(theorem_id::circle_ls_low, {0.01, 2.0, 2.0});
        FAIL();
    } catch (const region_error& e) {
        EXPECT_EQ(std::string(e.what()), "CIRCLE_LS_LOW requires 3α+β ≤ 7");
    }
    try {
        theorem_rhs(theorem_id::circle_broad, {0.01, 2.0, 2.0});
        FAIL();
    } catch (const region_error& e) {
        EXPECT_EQ(std::string(e.what()), "CIRCLE_BROAD requires 3α+2β ≤ 9");
    }
    EXPECT_THROW(theorem_rhs(theorem_id::circle_l2_high, {0.01, 1.0, 1.0}), region_error);
    EXPECT_THROW(theorem_rhs(theorem_id::circle_l2_low, {0.01, 2.5, 1.0}), region_error);
}

TEST(TheoremRhs, AliasesResolveByRegion) {
    EXPECT_EQ(resolve_theorem("CIRCLE_LS", 1, 1), theorem_id::circle_ls_low);
    EXPECT_EQ(resolve_theorem("CIRCLE_LS", 2, 2), theorem_id::circle_ls_high);
    EXPECT_EQ(resolve_theorem("CIRCLE_L2", 2, 2.5), theorem_id::circle_l2_high);
    EXPECT_EQ(resolve_theorem("SINE_SMALLCAP", 0.5, 1.5), theorem_id::sine_smallcap_low);
    EXPECT_EQ(resolve_theorem("SINE_L2", 1, 1), theorem_id::sine_l2_table);
    EXPECT_EQ(resolve_theorem("SLAB_TRI_KAKEYA", 1, 1), theorem_id::slab_tri_kakeya);
    EXPECT_THROW(resolve_theorem("NOPE", 1, 1), std::invalid_argument);
    for (const auto& [id, name] : theorem_names) {
        EXPECT_EQ(parse_theorem_id(name), id);
        EXPECT_EQ(to_string(id), name);
    }
}

TEST(TheoremRhs, ContinuousAcrossBranchBoundaries) {
    const rhs_inputs base{0.003, 0.0, 0.0, 1.7, 2.3, 900.0, 400.0};
    for (double a : {1.5, 1.8, 2.0}) {
        rhs_inputs lo = base, hi = base;
        lo.alpha = hi.alpha = a;
        lo.beta = 7 - 3 * a;
        hi.beta = lo.beta + 1e-9;
        const double l = theorem_rhs(theorem_id::circle_ls_low, lo);
        EXPECT_NEAR(theorem_rhs(theorem_id::circle_ls_high, hi), l, 1e-6 * l);
    }
    for (double a : {1.2, 1.5, 2.0}) {
        rhs_inputs lo = base, hi = base;
        lo.alpha = hi.alpha = a;
        lo.beta = 4 - a;
        hi.beta = lo.beta + 1e-9;
        const double l = theorem_rhs(theorem_id::circle_l2_low, lo);
        EXPECT_NEAR(theorem_rhs(theorem_id::circle_l2_high, hi), l, 1e-6 * l);
    }
    for (double b : {0.5, 1.0, 2.0}) {
        rhs_inputs lo = base, hi = base;
        lo.alpha = hi.alpha = 0.5;
        lo.beta = b;
        hi.beta = b + 1e-9;
        const double l = theorem_rhs(theorem_id::sine_l2_table, lo);
        EXPECT_NEAR(theorem_rhs(theorem_id::sine_l2_table, hi), l, 1e-6 * l);
    }
}

TEST(DeltaExponent, SpotValues) {
    EXPECT_DOUBLE_EQ(theorem_delta_exponent(theorem_id::circle_ls_low, 1, 1), 1.75);
    EXPECT_DOUBLE_EQ(theorem_delta_exponent(theorem_id::circle_broad, 0, 0), 0.5);
    EXPECT_DOUBLE_EQ(exponent_f(exponent_family::circle_ls, 1, 1), 1.75);
    EXPECT_DOUBLE_EQ(exponent_f(exponent_family::circle_broad_g, 0, 0), 0.5);
}

TEST(DeltaExponent, AgreesWithRhsAtTwoScales) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> A(0.0, 2.0), B(0.0, 3.0);
    int checked = 0;
    for (int it = 0; it < 400; ++it) {
        const double a = A(rng), b = B(rng);
        for (const auto& [id, name] : theorem_names) {
            if (!in_region(id, a, b)) continue;
            ++checked;
            EXPECT_NEAR(measured_exponent(id, a, b), theorem_delta_exponent(id, a, b), 1e-9) << name;
        }
    }
    EXPECT_GT(checked, 2000);
}

TEST(DeltaExponent, FamilyMatchesResolvedTheorem) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> A(0.0, 2.0), B(0.0, 3.0);
    for (int it = 0; it < 200; ++it) {
        const double a = A(rng), b = B(rng);
        EXPECT_NEAR(exponent_f(exponent_family::circle_ls, a, b),
                    theorem_delta_exponent(resolve_theorem("CIRCLE_LS", a, b), a, b), 1e-12);
        EXPECT_NEAR(exponent_f(exponent_family::circle_l2, a, b),
                    theorem_delta_exponent(resolve_theorem("CIRCLE_L2", a, b), a, b), 1e-12);
    }
}

TEST(Inversion, LineAtUEqualsOne) {
    EXPECT_NEAR(invert_to_dim_bound(exponent_family::circle_ls, 1.0, 0.5), 1.5, 1e-8);
    for (double v = 0.0; v <= 1.0; v += 0.125) {
        EXPECT_NEAR(invert_to_dim_bound(exponent_family::circle_ls, 1.0, v), 1.0 + v, 1e-8);
    }
}

TEST(Inversion, LowBranchExample) {
    EXPECT_NEAR(invert_to_dim_bound(exponent_family::circle_ls, 0.9, 1.0), 1.6, 1e-8);
}

TEST(Inversion, VacuousAtZero) {
    // f(0, v) = 1 + v/2 ≥ u + v whenever u + v/2 ≤ 1.
    EXPECT_EQ(invert_to_dim_bound(exponent_family::circle_l2, 0.3, 1.0), 0.0);
}

TEST(Inversion, ClosedForms) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> U(0.0, 1.0), V(0.0, 3.0);
    for (int it = 0; it < 500; ++it) {
        const double u = U(rng), v = V(rng);
        const double ls = std::min(4 * u + v - 3, u + 1);
        const double l2 = std::min(2 * u + v - 2, u + 1);
        if (ls > 0 && ls <= 2) {
            EXPECT_NEAR(invert_to_dim_bound(exponent_family::circle_ls, u, v), ls, 1e-8);
        }
        if (l2 > 0 && l2 <= 2) {
            EXPECT_NEAR(invert_to_dim_bound(exponent_family::circle_l2, u, v), l2, 1e-8);
        }
        const double g = 2 * u + 2 * v / 3 - 1;
        if (g > 0 && g <= 2) {
            EXPECT_NEAR(invert_to_dim_bound(exponent_family::circle_broad_g, u, v), g, 1e-8);
        }
    }
}

TEST(Inversion, FamilyNames) {
    EXPECT_EQ(parse_exponent_family("sine_trilinear"), exponent_family::sine_trilinear);
    EXPECT_THROW(parse_exponent_family("x"), std::invalid_argument);
}

TEST(Conjecture, CasesEqualMin) {
    EXPECT_TRUE(casesversion_equals_minversion(0.2, 0.1));
    EXPECT_TRUE(casesversion_equals_minversion(1.0, 3.0));
    EXPECT_TRUE(casesversion_equals_minversion(0.5, 2.0));
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j)
            EXPECT_TRUE(casesversion_equals_minversion((i + 1) / 50.0, 3.0 * j / 49));
}

TEST(LowerBounds, RegionLabelSpotValue) {
    const auto b = furstenberg_lower_bounds(0.8, 2.5);
    EXPECT_EQ(b.back().name, "best_known");
    EXPECT_NEAR(b.back().value, 1.8, 1e-12);
    EXPECT_EQ(figure_region_label(0.8, 2.5), "u+1");
}

TEST(LowerBounds, BestKnownIsMaxOfProven) {
    for (int i = 1; i <= 20; ++i) {
        for (int j = 0; j <= 30; ++j) {
            const double u = i / 20.0, v = j / 10.0;
            const auto b = furstenberg_lower_bounds(u, v);
            double best = 0.0;
            for (const auto& f : b) {
                EXPECT_GE(f.value, 0.0);
                EXPECT_LE(f.value, 2.0);
                if (f.source != provenance::conjecture && f.name != "best_known") best = std::max(best, f.value);
            }
            EXPECT_DOUBLE_EQ(b.back().value, best);
        }
    }
}

TEST(LowerBounds, ContinuousAcrossFirstBoundary) {
    for (double u : {0.4, 0.6, 0.9}) {
        const double v = 4 - 3 * u;
        const double on = furstenberg_lower_bounds(u, v)[0].value;
        const double past = furstenberg_lower_bounds(u, std::min(3.0, v + 1e-10))[0].value;
        EXPECT_NEAR(on, past, 1e-9);
    }
}

TEST(LowerBounds, DomainChecked) {
    EXPECT_THROW(furstenberg_lower_bounds(0.0, 1.0), std::domain_error);
    EXPECT_THROW(furstenberg_lower_bounds(0.5, 3.5), std::domain_error);
}

TEST(LowerBounds, ExceptionalSetBound) {
    EXPECT_DOUBLE_EQ(oberlin_r3_bound(1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(oberlin_r3_bound(0.2, 1.0), 0.0);
}
