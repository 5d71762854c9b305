#pragma once

// Restricted projections, 1-D covering numbers, the rational-angle
// exceptional-set experiment, box counting and the cinematic curvature checker.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "flab/geometry.hpp"
#include "flab/parallel.hpp"
#include "flab/setgen.hpp"

namespace flab {

enum class projection_kind { rho, pi };

inline projection_kind parse_projection_kind(std::string_view s) {
    if (s == "rho") return projection_kind::rho;
    if (s == "pi") return projection_kind::pi;
    throw std::invalid_argument("unknown projection kind: " + std::string(s));
}

/// ρ_θ pairs with the unit vector γ(θ); π_θ pairs with (1, θ, θ²).
inline double project_point(projection_kind kind, double theta, const vec3& p) {
    if (kind == projection_kind::rho) {
        return dot(p, gamma(theta));
    }
    return p[0] + theta * p[1] + theta * theta * p[2];
}

inline std::vector<double> project(projection_kind kind, double theta, const point_cloud& cloud) {
    std::vector<double> out;
    out.reserve(cloud.size());
    for (const auto& p : cloud.points) {
        out.push_back(project_point(kind, theta, p));
    }
    return out;
}

/// Greedy count on values already in increasing order.
inline std::size_t covering_number_sorted(const std::vector<double>& v, double delta) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        const double end = v[i] + 2.0 * delta;
        ++count;
        while (i < v.size() && v[i] <= end) {
            ++i;
        }
    }
    return count;
}

/// Minimal number of closed intervals of length 2δ covering the values.
inline std::size_t covering_number(std::vector<double> values, double delta) {
    std::sort(values.begin(), values.end());
    return covering_number_sorted(values, delta);
}

// ---------------------------------------------------------------------------
// Rational-angle experiment

namespace detail {

/// Distinct numerators N = kq² + lpq + mp², 0 ≤ k, l, m ≤ n, as a sorted list.
/// For fixed (k, l) the m-values form a progression of step p², so each
/// residue class mod p² is a union of intervals handled by a difference array.
inline std::vector<std::int64_t> jarnik_numerators(long long n, long long p, long long q) {
    const std::int64_t step = p * p;
    const std::int64_t top = n * (q * q + p * q + p * p);
    const std::int64_t rows = top / step + 1;
    std::vector<std::vector<std::int32_t>> diff(static_cast<std::size_t>(step),
                                                std::vector<std::int32_t>(rows + 1, 0));
    for (long long k = 0; k <= n; ++k) {
        for (long long l = 0; l <= n; ++l) {
            const std::int64_t base = k * q * q + l * p * q;
            auto& d = diff[static_cast<std::size_t>(base % step)];
            const std::int64_t first = base / step;
            d[first] += 1;
            d[first + n + 1] -= 1;
        }
    }
    std::vector<std::int64_t> out;
    for (std::int64_t r = 0; r < step; ++r) {
        std::int32_t run = 0;
        const auto& d = diff[static_cast<std::size_t>(r)];
        for (std::int64_t j = 0; j < rows; ++j) {
            run += d[j];
            if (run > 0) {
                out.push_back(j * step + r);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Greedy cover of N/(n q²) by intervals of length 2δ, in integer units.
inline std::size_t covering_number_numerators(const std::vector<std::int64_t>& nums, double width) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < nums.size()) {
        const double end = static_cast<double>(nums[i]) + width;
        ++count;
        while (i < nums.size() && static_cast<double>(nums[i]) <= end) {
            ++i;
        }
    }
    return count;
}

}  // namespace detail

struct jarnik_row {
    long long p = 0;
    long long q = 1;
    double theta = 0.0;
    std::size_t covering_count = 0;        // exact numerators route
    std::int64_t covering_count_float = -1;  // projected doubles route; -1 if skipped
    std::size_t distinct_values = 0;
    double value_bound = 0.0;  // 4 n^(1+3α/t) + 1
    double bound = 0.0;        // n^(1+3α/t)
    double ratio = 0.0;
};

/// Covering data for one θ = p/q on the grid {(k, l, m)/n}.
inline jarnik_row jarnik_cover(const jarnik_grid& A, double alpha, long long p, long long q,
                               bool float_route) {
    jarnik_row row;
    row.p = p;
    row.q = q;
    row.theta = static_cast<double>(p) / static_cast<double>(q);
    const double n = static_cast<double>(A.n);
    const auto nums = detail::jarnik_numerators(A.n, p, q);
    row.distinct_values = nums.size();
    row.covering_count =
        detail::covering_number_numerators(nums, 2.0 * A.delta * n * static_cast<double>(q * q));
    if (float_route) {
        const double th = row.theta;
        std::vector<double> v;
        v.reserve(A.size());
        const double inv = 1.0 / n;
        for (long long k = 0; k <= A.n; ++k) {
            for (long long l = 0; l <= A.n; ++l) {
                for (long long m = 0; m <= A.n; ++m) {
                    v.push_back(project_point(projection_kind::pi, th, {k * inv, l * inv, m * inv}));
                }
            }
        }
        row.covering_count_float = static_cast<std::int64_t>(covering_number(std::move(v), A.delta));
    }
    row.bound = std::pow(n, 1.0 + 3.0 * alpha / A.t);
    row.value_bound = 4.0 * row.bound + 1.0;
    row.ratio = static_cast<double>(row.covering_count) / row.bound;
    return row;
}

struct jarnik_report {
    double t = 0.0;
    double s = 0.0;
    double epsilon = 0.0;
    long long n_j = 0;
    long long n = 0;
    double delta = 0.0;
    double alpha = 0.0;
    double q_max = 0.0;
    std::vector<jarnik_row> rows;
    double max_ratio = 0.0;
    bool values_bound_holds = true;
    bool routes_agree = true;
};

struct jarnik_options {
    exec_policy exec{};
    /// Run the double-precision route when (n+1)³ does not exceed this.
    std::size_t float_route_limit = std::size_t{1} << 25;
};

inline jarnik_report run_jarnik_experiment(double t, double s, double epsilon, long long n_j,
                                           const jarnik_options& opt = {}) {
    const auto angles = make_rational_angles(t, s, epsilon, n_j);
    const auto A = make_jarnik_grid(t, n_j);
    jarnik_report rep;
    rep.t = t;
    rep.s = s;
    rep.epsilon = epsilon;
    rep.n_j = n_j;
    rep.n = A.n;
    rep.delta = A.delta;
    rep.alpha = angles.alpha;
    rep.q_max = angles.q_max;
    rep.rows.resize(angles.fractions.size());
    const bool float_route = A.size() <= opt.float_route_limit;
    parallel_for(rep.rows.size(), opt.exec, [&](std::size_t i) {
        const auto [p, q] = angles.fractions[i];
        rep.rows[i] = jarnik_cover(A, angles.alpha, p, q, float_route);
    });
    for (const auto& r : rep.rows) {
        rep.max_ratio = std::max(rep.max_ratio, r.ratio);
        rep.values_bound_holds &= static_cast<double>(r.distinct_values) <= r.value_bound;
        if (r.covering_count_float >= 0) {
            rep.routes_agree &= static_cast<std::size_t>(r.covering_count_float) == r.covering_count;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Box counting

struct dimension_fit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square
};

/// Least-squares line through (x_i, y_i).
inline dimension_fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto m = static_cast<double>(x.size());
    if (x.size() < 2) {
        return {0.0, x.empty() ? 0.0 : y[0], 0.0};
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    dimension_fit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / m);
    return f;
}

/// Number of δ-grid cells met by the cloud.
inline std::size_t occupied_cells(const point_cloud& cloud, double delta) {
    std::unordered_set<std::array<std::int64_t, 3>, detail::cell_key_hash> cells;
    cells.reserve(cloud.size());
    for (const auto& p : cloud.points) {
        // Nudge inward so lattice points on a cell boundary land consistently.
        vec3 q = p;
        for (int d = 0; d < cloud.dim; ++d) {
            q[d] += 1e-9 * delta;
        }
        cells.insert(detail::cell_of(q, delta, cloud.dim));
    }
    return cells.size();
}

/// Slope of log₂(cell count) against log₂(1/δ).
inline dimension_fit box_dimension_estimate(const point_cloud& cloud, const std::vector<double>& scales) {
    std::vector<double> x, y;
    for (double d : scales) {
        (void)scale{d};
        x.push_back(-std::log2(d));
        y.push_back(std::log2(static_cast<double>(std::max<std::size_t>(1, occupied_cells(cloud, d)))));
    }
    return fit_line(x, y);
}

// ---------------------------------------------------------------------------
// Cinematic curvature

/// Partials of g(x₁, x₂, y₁, t) at one point, indexed as named.
struct cinematic_jet {
    double g_x1, g_x2, g_t;
    double g_x1y, g_x2y, g_ty;
    double g_x1yy, g_x2yy, g_tyy;
};

struct cinematic_fn {
    std::function<double(double, double, double, double)> g;
    /// Exact partials when available; otherwise central differences are used.
    std::function<cinematic_jet(double, double, double, double)> jet;
};

/// g = ⟨(x₁, x₂, t), (cos y₁, sin y₁, 1)⟩/√2.
inline cinematic_fn sine_wave_g() {
    cinematic_fn f;
    f.g = [](double x1, double x2, double y, double t) {
        return (x1 * std::cos(y) + x2 * std::sin(y) + t) * inv_sqrt2;
    };
    f.jet = [](double, double, double y, double) {
        const double c = std::cos(y) * inv_sqrt2;
        const double s = std::sin(y) * inv_sqrt2;
        return cinematic_jet{c, s, inv_sqrt2, -s, c, 0.0, -c, -s, 0.0};
    };
    return f;
}

/// Upper semicircle of radius t centred at x.
inline cinematic_fn circle_g() {
    cinematic_fn f;
    f.g = [](double x1, double x2, double y, double t) {
        return x2 + std::sqrt(t * t - (y - x1) * (y - x1));
    };
    return f;
}

/// First partials by central differences of step h; their y-derivatives by
/// five-point stencils of step hy, nested on the first partials.
inline cinematic_jet finite_difference_jet(const cinematic_fn& f, double x1, double x2, double y,
                                           double t, double h = 1e-4, double hy = 1e-2) {
    auto dx1 = [&](double yy) { return (f.g(x1 + h, x2, yy, t) - f.g(x1 - h, x2, yy, t)) / (2 * h); };
    auto dx2 = [&](double yy) { return (f.g(x1, x2 + h, yy, t) - f.g(x1, x2 - h, yy, t)) / (2 * h); };
    auto dt = [&](double yy) { return (f.g(x1, x2, yy, t + h) - f.g(x1, x2, yy, t - h)) / (2 * h); };
    auto d1 = [&](auto&& fn) {
        return (fn(y - 2 * hy) - 8 * fn(y - hy) + 8 * fn(y + hy) - fn(y + 2 * hy)) / (12 * hy);
    };
    auto d2 = [&](auto&& fn) {
        return (-fn(y - 2 * hy) + 16 * fn(y - hy) - 30 * fn(y) + 16 * fn(y + hy) - fn(y + 2 * hy)) /
               (12 * hy * hy);
    };
    return {dx1(y), dx2(y), dt(y), d1(dx1), d1(dx2), d1(dt), d2(dx1), d2(dx2), d2(dt)};
}

struct cinematic_values {
    double rotational;
    double cinematic;
};

inline cinematic_values cinematic_check(const cinematic_fn& f, vec2 x, double y1, double t) {
    const cinematic_jet j =
        f.jet ? f.jet(x[0], x[1], y1, t) : finite_difference_jet(f, x[0], x[1], y1, t);
    const double rot = j.g_x1 * j.g_x2y - j.g_x2 * j.g_x1y;
    const double cin = j.g_x1 * (j.g_x2y * j.g_tyy - j.g_ty * j.g_x2yy) -
                       j.g_x2 * (j.g_x1y * j.g_tyy - j.g_ty * j.g_x1yy) +
                       j.g_t * (j.g_x1y * j.g_x2yy - j.g_x2y * j.g_x1yy);
    if (!std::isfinite(rot) || !std::isfinite(cin)) {
        throw std::domain_error("cinematic_check: non-finite evaluation");
    }
    return {rot, cin};
}

}  // namespace flab
