#pragma once

// Incidence theorem right-hand sides, exponent functions, their inversion to
// dimension lower bounds, and the table of known Furstenberg bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flab {

enum class theorem_id {
    circle_ls_low,
    circle_ls_high,
    circle_broad,
    slab_tri_kakeya,
    slab_tri_restriction,
    circle_l2_low,
    circle_l2_high,
    sine_smallcap_low,
    sine_smallcap_high,
    sine_l2_table,
    sine_l2_lambda,
    corollary_table,
};

inline constexpr std::array<std::pair<theorem_id, std::string_view>, 12> theorem_names{{
    {theorem_id::circle_ls_low, "CIRCLE_LS_LOW"},
    {theorem_id::circle_ls_high, "CIRCLE_LS_HIGH"},
    {theorem_id::circle_broad, "CIRCLE_BROAD"},
    {theorem_id::slab_tri_kakeya, "SLAB_TRI_KAKEYA"},
    {theorem_id::slab_tri_restriction, "SLAB_TRI_RESTRICTION"},
    {theorem_id::circle_l2_low, "CIRCLE_L2_LOW"},
    {theorem_id::circle_l2_high, "CIRCLE_L2_HIGH"},
    {theorem_id::sine_smallcap_low, "SINE_SMALLCAP_LOW"},
    {theorem_id::sine_smallcap_high, "SINE_SMALLCAP_HIGH"},
    {theorem_id::sine_l2_table, "SINE_L2_TABLE"},
    {theorem_id::sine_l2_lambda, "SINE_L2_LAMBDA"},
    {theorem_id::corollary_table, "COROLLARY_TABLE"},
}};

inline std::string to_string(theorem_id id) {
    for (const auto& [k, name] : theorem_names) {
        if (k == id) {
            return std::string(name);
        }
    }
    return "UNKNOWN";
}

inline theorem_id parse_theorem_id(std::string_view s) {
    for (const auto& [k, name] : theorem_names) {
        if (name == s) {
            return k;
        }
    }
    throw std::invalid_argument("unknown theorem id: " + std::string(s));
}

/// Ids whose low/high branch is picked by region: CIRCLE_LS, CIRCLE_L2,
/// SINE_SMALLCAP and SINE_L2 (table when α+β ≤ 4, λ-branch otherwise).
inline theorem_id resolve_theorem(std::string_view s, double alpha, double beta) {
    const bool ls_low = 3.0 * alpha + beta <= 7.0;
    const bool l2_low = alpha + beta <= 4.0;
    if (s == "CIRCLE_LS") {
        return ls_low ? theorem_id::circle_ls_low : theorem_id::circle_ls_high;
    }
    if (s == "SINE_SMALLCAP") {
        return ls_low ? theorem_id::sine_smallcap_low : theorem_id::sine_smallcap_high;
    }
    if (s == "CIRCLE_L2") {
        return l2_low ? theorem_id::circle_l2_low : theorem_id::circle_l2_high;
    }
    if (s == "SINE_L2") {
        return l2_low ? theorem_id::sine_l2_table : theorem_id::sine_l2_lambda;
    }
    return parse_theorem_id(s);
}

class region_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct rhs_inputs {
    double delta;
    double alpha;
    double beta;
    double K_P = 1.0;
    double K_T = 1.0;
    double nP = 1.0;
    double nT = 1.0;
    std::optional<double> R = std::nullopt;
    std::optional<double> kappa = std::nullopt;
};

namespace detail {

inline void require(bool ok, theorem_id id, const char* inequality) {
    if (!ok) {
        throw region_error(to_string(id) + " requires " + inequality);
    }
}

/// Exponent e of δ^{-e} in each case of the sine-wave L² table.
inline double sine_l2_table_exponent(double alpha, double beta) {
    if (beta <= 0.5) {
        return 0.5;
    }
    if (beta <= 1.0) {
        return 0.25 + beta / 2.0;
    }
    if (beta <= 2.0) {
        return 0.5 + beta / 4.0;
    }
    if (beta <= std::min(3.0, 4.0 - alpha)) {
        return 1.0;
    }
    throw region_error("SINE_L2_TABLE requires β ≤ min{3, 4−α}");
}

/// Exponent e of δ^{-e} in the first matching row of the corollary table.
inline double corollary_exponent(double a, double b) {
    if (b >= 0 && b <= 0.5 && a < 1 + b) {
        return 0.5 + b / 2 + a / 2;
    }
    if (b >= 0.5 && b <= 1 && a <= 2 - b) {
        return 0.25 + b + a / 2;
    }
    if (b >= 0.5 && b <= 1 && 2 - b < a && a < 1 + b) {
        return 0.75 + 0.75 * b + a / 4;
    }
    if (b >= 0 && b <= 1 && a >= 1 + b) {
        return 1 + b;
    }
    if (b >= 1 && b <= 2 && a <= 1) {
        return 0.5 + 0.75 * b + a / 2;
    }
    if (b >= 1 && b <= 2 && 1 < a && a <= (7 - b) / 3) {
        return 0.75 + 0.75 * b + a / 4;
    }
    if (b >= 2 && b <= 2.5 && b - 1 < a && a <= (7 - b) / 3) {
        return 0.75 + 0.75 * b + a / 4;
    }
    if (b >= 2 && b <= 2.5 && a <= b - 1) {
        return a / 2 + b / 2 + 1;
    }
    if (b >= 2.5 && b <= std::min(3.0, 4 - a)) {
        return a / 2 + b / 2 + 1;
    }
    if (a + b > 4 || 3 * a + b > 7) {
        return a + b - 1;
    }
    throw region_error("COROLLARY_TABLE has no row for (α, β)");
}

/// δ^{-3λ/4} K_P^{λ/4} K_T^{3λ/4} |P|^{1−λ/4} |T|^{1−3λ/4} with λ = 1 covering the low branch.
inline double ls_monomial(const rhs_inputs& in, double lambda) {
    return std::pow(in.delta, -0.75 * lambda) * std::pow(in.K_P, lambda / 4) *
           std::pow(in.K_T, 0.75 * lambda) * std::pow(in.nP, 1 - lambda / 4) *
           std::pow(in.nT, 1 - 0.75 * lambda);
}

/// δ^{-2λ} (K_P K_T)^λ (|P||T|)^{1−λ}; λ = 1/2 is the low branch.
inline double l2_monomial(const rhs_inputs& in, double lambda) {
    return std::pow(in.delta, -2 * lambda) * std::pow(in.K_P * in.K_T, lambda) *
           std::pow(in.nP * in.nT, 1 - lambda);
}

inline double broad_monomial(const rhs_inputs& in) {
    const double R = in.R.value_or(1.0);
    return std::pow(R, 100) * std::pow(in.delta, -0.5) * std::cbrt(in.K_P) *
           std::sqrt(in.K_T) * std::pow(in.nP, 2.0 / 3.0) * std::sqrt(in.nT);
}

}  // namespace detail

/// Validity predicate of each id on (α, β); throws naming the violated inequality.
inline void check_region(theorem_id id, double a, double b) {
    using detail::require;
    require(a >= 0 && a <= 2, id, "0 ≤ α ≤ 2");
    require(b >= 0 && b <= 3, id, "0 ≤ β ≤ 3");
    switch (id) {
        case theorem_id::circle_ls_low:
        case theorem_id::sine_smallcap_low:
            require(3 * a + b <= 7, id, "3α+β ≤ 7");
            break;
        case theorem_id::circle_ls_high:
        case theorem_id::sine_smallcap_high:
            require(3 * a + b > 7, id, "3α+β > 7");
            break;
        case theorem_id::circle_broad:
        case theorem_id::slab_tri_restriction:
            require(3 * a + 2 * b <= 9, id, "3α+2β ≤ 9");
            break;
        case theorem_id::circle_l2_low:
        case theorem_id::sine_l2_table:
            require(a + b <= 4, id, "α+β ≤ 4");
            break;
        case theorem_id::circle_l2_high:
        case theorem_id::sine_l2_lambda:
            require(a + b > 4, id, "α+β > 4");
            break;
        case theorem_id::slab_tri_kakeya:
        case theorem_id::corollary_table:
            break;
    }
}

inline bool in_region(theorem_id id, double a, double b) {
    try {
        check_region(id, a, b);
        if (id == theorem_id::corollary_table) {
            (void)detail::corollary_exponent(a, b);
        }
        return true;
    } catch (const region_error&) {
        return false;
    }
}

/// Right-hand side with C_ε = 1 and ε = 0; C_κ = 1 for the trilinear bound.
inline double theorem_rhs(theorem_id id, const rhs_inputs& in) {
    const double a = in.alpha;
    const double b = in.beta;
    check_region(id, a, b);
    switch (id) {
        case theorem_id::circle_ls_low:
        case theorem_id::sine_smallcap_low:
            return detail::ls_monomial(in, 1.0);
        case theorem_id::circle_ls_high:
        case theorem_id::sine_smallcap_high:
            return detail::ls_monomial(in, 4.0 / (3 * a + b - 3));
        case theorem_id::circle_broad:
        case theorem_id::slab_tri_restriction:
            return detail::broad_monomial(in);
        case theorem_id::slab_tri_kakeya:
            return std::cbrt(in.K_P) * std::pow(in.nP, 2.0 / 3.0) * in.nT;
        case theorem_id::circle_l2_low:
            return detail::l2_monomial(in, 0.5);
        case theorem_id::circle_l2_high:
        case theorem_id::sine_l2_lambda:
            return detail::l2_monomial(in, 1.0 / (a + b - 2));
        case theorem_id::sine_l2_table:
            return std::sqrt(in.K_P * in.K_T * in.nP * in.nT) *
                   std::pow(in.delta, -detail::sine_l2_table_exponent(a, b));
        case theorem_id::corollary_table:
            return in.K_P * in.K_T * std::pow(in.delta, -detail::corollary_exponent(a, b));
    }
    return 0.0;
}

/// Exponent e with RHS ∝ δ^{-e} once |P| = δ^{-β}, |T| = δ^{-α} and K = R = 1.
inline double theorem_delta_exponent(theorem_id id, double a, double b) {
    check_region(id, a, b);
    switch (id) {
        case theorem_id::circle_ls_low:
        case theorem_id::sine_smallcap_low:
            return (a + 3 * b + 3) / 4;
        case theorem_id::circle_ls_high:
        case theorem_id::sine_smallcap_high:
        case theorem_id::circle_l2_high:
        case theorem_id::sine_l2_lambda:
            return a + b - 1;
        case theorem_id::circle_broad:
        case theorem_id::slab_tri_restriction:
            return 0.5 + a / 2 + 2 * b / 3;
        case theorem_id::slab_tri_kakeya:
            return a + 2 * b / 3;
        case theorem_id::circle_l2_low:
            return 1 + (a + b) / 2;
        case theorem_id::sine_l2_table:
            return (a + b) / 2 + detail::sine_l2_table_exponent(a, b);
        case theorem_id::corollary_table:
            return detail::corollary_exponent(a, b);
    }
    return 0.0;
}

enum class exponent_family { circle_ls, circle_l2, sine_smallcap, circle_broad_g, sine_trilinear };

inline exponent_family parse_exponent_family(std::string_view s) {
    if (s == "circle_ls") return exponent_family::circle_ls;
    if (s == "circle_l2") return exponent_family::circle_l2;
    if (s == "sine_smallcap") return exponent_family::sine_smallcap;
    if (s == "circle_broad_g") return exponent_family::circle_broad_g;
    if (s == "sine_trilinear") return exponent_family::sine_trilinear;
    throw std::invalid_argument("unknown exponent family: " + std::string(s));
}

/// Incidence exponent f(α, β) at ε = 0.
inline double exponent_f(exponent_family fam, double a, double b) {
    switch (fam) {
        case exponent_family::circle_ls:
        case exponent_family::sine_smallcap:
            return std::max((a + 3 * b + 3) / 4, a + b - 1);
        case exponent_family::circle_l2:
            return std::max(1 + (a + b) / 2, a + b - 1);
        case exponent_family::circle_broad_g:
            return 0.5 + a / 2 + 2 * b / 3;
        case exponent_family::sine_trilinear:
            return a + 2 * b / 3;
    }
    return 0.0;
}

/// Least d ∈ [0, 2] with f(d, v) ≥ u + v, by bisection; +∞ if f(2, v) < u + v.
/// tol = 0 bisects down to adjacent doubles.
inline double invert_to_dim_bound(exponent_family fam, double u, double v, double tol = 0.0) {
    const double target = u + v;
    if (exponent_f(fam, 0.0, v) >= target) {
        return 0.0;
    }
    if (exponent_f(fam, 2.0, v) < target) {
        return std::numeric_limits<double>::infinity();
    }
    double lo = 0.0;
    double hi = 2.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (exponent_f(fam, mid, v) >= target ? hi : lo) = mid;
    }
    return hi;
}

enum class provenance { theorem, prior, conjecture };

inline const char* to_string(provenance p) {
    switch (p) {
        case provenance::theorem: return "theorem";
        case provenance::prior: return "prior";
        case provenance::conjecture: return "conjecture";
    }
    return "";
}

struct bound_formula {
    std::string name;
    double value;
    std::string region;
    provenance source;
};

inline double clamp_dim(double d) { return std::clamp(d, 0.0, 2.0); }

/// Piecewise display of the conjectured bound, first matching line.
inline double conjecture_cases(double u, double v) {
    if (v <= u) {
        return u + v;
    }
    if (2 * u + v <= 3) {
        return (5 * u + v) / 3;
    }
    return u + 1;
}

inline double conjecture_min(double u, double v) {
    return std::min({u + v, (5 * u + v) / 3, u + 1});
}

inline bool casesversion_equals_minversion(double u, double v, double tol = 1e-12) {
    return std::abs(conjecture_cases(u, v) - conjecture_min(u, v)) <= tol;
}

/// Exceptional-set bound max{3s/2 − t/2, 0} for restricted projections in R³.
inline double oberlin_r3_bound(double s, double t) { return std::max(1.5 * s - 0.5 * t, 0.0); }

inline void check_uv(double u, double v) {
    if (!(u > 0 && u <= 1 && v >= 0 && v <= 3)) {
        throw std::domain_error("(u, v) must lie in (0, 1] × [0, 3]");
    }
}

/// Every dimension lower bound at (u, v), followed by the running maximum
/// of the non-conjectural entries as "best_known".
inline std::vector<bound_formula> furstenberg_lower_bounds(double u, double v) {
    check_uv(u, v);
    std::vector<bound_formula> out;
    const bool b1 = 3 * u + v <= 4;
    out.push_back({"bound1", clamp_dim(b1 ? 4 * u + v - 3 : u + 1),
                   b1 ? "3u+v <= 4" : "3u+v > 4", provenance::theorem});
    const bool s2 = 3 * u + 2 * v <= 6;
    out.push_back({"sine2", clamp_dim(s2 ? 2 * u + 2 * v / 3 - 1 : u + 1),
                   s2 ? "3u+2v <= 6" : "3u+2v > 6", provenance::theorem});
    out.push_back({"sine1", clamp_dim(u + v / 3), "all", provenance::theorem});
    const bool b2 = u + v <= 3;
    out.push_back({"bound2", clamp_dim(b2 ? 2 * u + v - 2 : u + 1), b2 ? "u+v <= 3" : "u+v > 3",
                   provenance::theorem});
    out.push_back({"prior", clamp_dim(u + std::max(v / 3, std::min(u, v))),
                   v / 3 >= std::min(u, v) ? "v/3 >= min{u,v}" : "v/3 < min{u,v}",
                   provenance::prior});
    out.push_back({"zahl", clamp_dim(u + std::min(u, v)), v <= u ? "v <= u" : "v > u",
                   provenance::prior});
    const char* conj_region = v <= u ? "0 <= v <= u" : (2 * u + v <= 3 ? "u < v, 2u+v <= 3" : "2u+v > 3");
    out.push_back({"conjecture", clamp_dim(conjecture_min(u, v)), conj_region, provenance::conjecture});
    double best = 0.0;
    for (const auto& f : out) {
        if (f.source != provenance::conjecture) {
            best = std::max(best, f.value);
        }
    }
    out.push_back({"best_known", best, "max of non-conjectural", provenance::theorem});
    return out;
}

/// Label of the piece attaining the best bound for circular sets in the
/// comparison figure; ties go to the earlier label.
inline std::string figure_region_label(double u, double v) {
    check_uv(u, v);
    struct piece {
        const char* label;
        double value;
        bool active;
    };
    const double prior_min = std::min(u, v);
    const piece pieces[] = {
        {"u+1", u + 1, 3 * u + v > 4 || 3 * u + 2 * v > 6},
        {"4u+v-3", 4 * u + v - 3, 3 * u + v <= 4},
        {"u+v/3", u + v / 3, true},
        {"u+v", u + v, v <= u && v / 3 < prior_min},
        {"2u", 2 * u, u < v && v / 3 < prior_min},
        {"2u+2v/3-1", 2 * u + 2 * v / 3 - 1, 3 * u + 2 * v <= 6},
    };
    const piece* best = nullptr;
    for (const auto& p : pieces) {
        if (p.active && (best == nullptr || p.value > best->value + 1e-12)) {
            best = &p;
        }
    }
    return best->label;
}

}  // namespace flab
