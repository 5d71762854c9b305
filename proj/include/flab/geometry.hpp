#pragma once

// δ-scale primitives: discs, annuli, sine-wave strips, balls, light-plane
// slabs, their intersection predicates and the duality maps between them.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flab {

using vec2 = std::array<double, 2>;
using vec3 = std::array<double, 3>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

/// Common length scale of one experiment.
struct scale {
    double delta;

    explicit scale(double d) : delta(d) {
        if (!(d > 0.0 && d < 1.0)) {
            throw std::invalid_argument("scale: delta must lie in (0, 1)");
        }
    }
};

struct disc2 {
    vec2 center;
    double radius;
};

struct circle_annulus {
    vec2 center;
    double radius;  // t_B, in [1, 2]
    double thickness;
};

/// δ-neighbourhood of the graph of θ ↦ (a cos θ + b sin θ + c)/√2 on [0, 2π].
struct sine_strip {
    vec3 params;
    double thickness;

    double at(double theta) const {
        return (params[0] * std::cos(theta) + params[1] * std::sin(theta) +
                params[2]) *
               inv_sqrt2;
    }
};

struct ball3 {
    vec3 center;
    double radius;
};

/// {p : |⟨p, γ(θ)⟩ − offset| ≤ thickness}.
struct light_slab {
    double theta;
    double offset;
    double thickness;
};

inline vec3 gamma(double theta) {
    return {std::cos(theta) * inv_sqrt2, std::sin(theta) * inv_sqrt2,
            inv_sqrt2};
}

inline double dot(const vec3& a, const vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const vec2& a) { return std::hypot(a[0], a[1]); }
inline double norm(const vec3& a) { return std::sqrt(dot(a, a)); }

inline double distance(const vec2& a, const vec2& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

/// Factory helpers pinning radius/thickness to the ambient scale.
inline disc2 make_disc(const scale& s, vec2 c) { return {c, s.delta}; }

inline circle_annulus make_annulus(const scale& s, vec2 c, double t) {
    if (!(t >= 1.0 && t <= 2.0)) {
        throw std::invalid_argument("annulus radius must lie in [1, 2]");
    }
    return {c, t, s.delta};
}

inline sine_strip make_strip(const scale& s, vec3 abc) {
    if (norm(abc) > 1.0 + 1e-12) {
        throw std::invalid_argument("sine parameters must lie in the unit ball");
    }
    return {abc, s.delta};
}

struct value_range {
    double min;
    double max;
};

/// Exact range of θ ↦ (a cos θ + b sin θ + c)/√2 on [lo, hi].
inline value_range sinusoid_range(const vec3& abc, double lo, double hi) {
    auto f = [&](double th) {
        return (abc[0] * std::cos(th) + abc[1] * std::sin(th) + abc[2]) *
               inv_sqrt2;
    };
    value_range r{std::min(f(lo), f(hi)), std::max(f(lo), f(hi))};
    const double amp = std::hypot(abc[0], abc[1]);
    if (amp == 0.0) {
        return r;
    }
    // a cos θ + b sin θ = amp·cos(θ − φ): maxima at φ + 2πk, minima at φ + π + 2πk.
    const double phi = std::atan2(abc[1], abc[0]);
    const double top = (amp + abc[2]) * inv_sqrt2;
    const double bottom = (abc[2] - amp) * inv_sqrt2;
    for (double crit : {phi, phi + std::numbers::pi}) {
        double k = std::ceil((lo - crit) / two_pi);
        if (crit + k * two_pi <= hi) {
            if (crit == phi) {
                r.max = top;
            } else {
                r.min = bottom;
            }
        }
    }
    return r;
}

inline value_range sine_range(const sine_strip& s, double lo, double hi) {
    return sinusoid_range(s.params, lo, hi);
}

inline bool disc_meets_annulus(const disc2& d, const circle_annulus& b) {
    return std::abs(distance(d.center, b.center) - b.radius) <
           d.radius + b.thickness;
}

/// Horizontal window of half-width d.radius, vertical tolerance
/// d.radius + s.thickness, θ clipped to [0, 2π].
inline bool disc_meets_sinestrip(const disc2& d, const sine_strip& s) {
    const double lo = std::max(d.center[0] - d.radius, 0.0);
    const double hi = std::min(d.center[0] + d.radius, two_pi);
    if (lo > hi) {
        return false;
    }
    const auto r = sine_range(s, lo, hi);
    const double tol = d.radius + s.thickness;
    return d.center[1] > r.min - tol && d.center[1] < r.max + tol;
}

inline bool ball_meets_slab(const ball3& b, const light_slab& t) {
    return std::abs(dot(b.center, gamma(t.theta)) - t.offset) <
           t.thickness + b.radius;
}

inline ball3 dual_circle_to_ball(const circle_annulus& b) {
    return {{b.center[0], b.center[1], b.radius}, b.thickness};
}

/// `dilation` multiplies the strip thickness; 10 for the light-plane pipeline.
inline ball3 dual_sine_to_ball(const sine_strip& s, double dilation = 1.0) {
    return {s.params, dilation * s.thickness};
}

/// Disc at (θ, t) ↦ neighbourhood of the light plane t·γ(θ) + γ(θ)^⊥.
inline light_slab dual_disc_to_slab(const disc2& d, double dilation = 10.0) {
    const double theta = d.center[0];
    const vec3 g = gamma(theta);
    const vec3 anchor{d.center[1] * g[0], d.center[1] * g[1], d.center[1] * g[2]};
    return {theta, dot(anchor, g), dilation * d.radius};
}

/// Inverse parameterisation; exact left inverse of dual_disc_to_slab.
inline disc2 dual_slab_to_disc(const light_slab& t, double radius) {
    return {{t.theta, t.offset}, radius};
}

}  // namespace flab
