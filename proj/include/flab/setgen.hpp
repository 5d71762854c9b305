#pragma once

// Generators for (δ, α)-sets and the explicit configurations used by the
// sharpness and projection experiments, plus Katz–Tao certification.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flab/geometry.hpp"
#include "flab/parallel.hpp"

namespace flab {

/// Finite δ-separated family of centres. Unused trailing coordinates are 0.
struct point_cloud {
    int dim = 2;
    double delta = 0.0;
    std::vector<vec3> points;
    vec3 lo{0.0, 0.0, 0.0};
    vec3 hi{0.0, 0.0, 0.0};

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    double diameter() const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
        }
        return std::sqrt(s);
    }

    void fit_bounds() {
        if (points.empty()) {
            return;
        }
        lo = hi = points.front();
        for (const auto& p : points) {
            for (int i = 0; i < 3; ++i) {
                lo[i] = std::min(lo[i], p[i]);
                hi[i] = std::max(hi[i], p[i]);
            }
        }
    }
};

inline double snap(double x, double step) { return std::round(x / step) * step; }

/// Rounds every coordinate to the lattice (δ/16)·Z.
inline vec3 snap_to_lattice(vec3 p, double delta) {
    const double h = delta / 16.0;
    return {snap(p[0], h), snap(p[1], h), snap(p[2], h)};
}

namespace detail {

inline double dist2(const vec3& a, const vec3& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return s;
}

struct cell_key_hash {
    std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto v : k) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

inline std::array<std::int64_t, 3> cell_of(const vec3& p, double h, int dim) {
    std::array<std::int64_t, 3> k{0, 0, 0};
    for (int i = 0; i < dim; ++i) {
        k[i] = static_cast<std::int64_t>(std::floor(p[i] / h));
    }
    return k;
}

/// Uniform double in [0, 1) from the top 53 bits; stable across platforms.
inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Greedy δ-net in input order: a point is kept iff every kept point lies at
/// distance ≥ δ from it.
inline std::vector<vec3> thin_to_separation(const std::vector<vec3>& in, double delta, int dim) {
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::size_t>, detail::cell_key_hash>
        cells;
    std::vector<vec3> kept;
    const double tol2 = delta * delta * (1.0 - 1e-9);
    for (const auto& p : in) {
        const auto k = detail::cell_of(p, delta, dim);
        bool clash = false;
        std::array<std::int64_t, 3> n{};
        const int r0 = -1, r1 = 1;
        for (n[0] = k[0] + r0; n[0] <= k[0] + r1 && !clash; ++n[0]) {
            for (n[1] = dim > 1 ? k[1] + r0 : 0; n[1] <= (dim > 1 ? k[1] + r1 : 0) && !clash; ++n[1]) {
                for (n[2] = dim > 2 ? k[2] + r0 : 0; n[2] <= (dim > 2 ? k[2] + r1 : 0) && !clash; ++n[2]) {
                    auto it = cells.find(n);
                    if (it == cells.end()) {
                        continue;
                    }
                    for (auto idx : it->second) {
                        if (detail::dist2(kept[idx], p, dim) < tol2) {
                            clash = true;
                            break;
                        }
                    }
                }
            }
        }
        if (!clash) {
            cells[k].push_back(kept.size());
            kept.push_back(p);
        }
    }
    return kept;
}

// ---------------------------------------------------------------------------
// Katz–Tao certification

struct nonconcentration_cert {
    double alpha = 0.0;
    double K_lower = 0.0;
    double K_upper = 0.0;
    double sandwich_factor = 1.0;
    double argmax_radius = 0.0;
    std::size_t centres_used = 0;
    bool exhaustive = true;
};

struct kt_options {
    /// 0 means every cloud point is a centre; otherwise a deterministic
    /// stride subset of this size is used and the upper bound is not certified.
    std::size_t max_centres = 0;
    exec_policy exec{};
};

/// K_lower = max over cloud centres p and radii r = 2^j δ ≤ first dyadic
/// radius ≥ diam(bounds) of |B(p, r) ∩ cloud| / (r/δ)^α, closed balls.
inline nonconcentration_cert katz_tao_constant(const point_cloud& cloud, double alpha,
                                               const kt_options& opt = {}) {
    if (cloud.empty()) {
        throw std::invalid_argument("empty family");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("katz_tao_constant: alpha must be non-negative");
    }
    const double delta = cloud.delta;
    int levels = 1;
    {
        const double diam = cloud.diameter();
        double r = delta;
        while (r < diam * (1.0 - 1e-12)) {
            r *= 2.0;
            ++levels;
        }
    }
    const std::size_t n = cloud.size();
    std::vector<std::size_t> centres;
    const bool exhaustive = opt.max_centres == 0 || n <= opt.max_centres;
    if (exhaustive) {
        centres.resize(n);
        std::iota(centres.begin(), centres.end(), std::size_t{0});
    } else {
        for (std::size_t i = 0; i < opt.max_centres; ++i) {
            centres.push_back(i * n / opt.max_centres);
        }
    }
    std::vector<double> weight(levels);
    for (int j = 0; j < levels; ++j) {
        weight[j] = std::pow(2.0, -j * alpha);
    }
    const double inv_d2 = 1.0 / (delta * delta);
    std::vector<std::pair<double, int>> best(centres.size(), {0.0, 0});
    parallel_for(centres.size(), opt.exec, [&](std::size_t c) {
        const vec3& p = cloud.points[centres[c]];
        std::vector<std::size_t> hist(levels + 1, 0);
        for (const auto& q : cloud.points) {
            const double x = detail::dist2(p, q, cloud.dim) * inv_d2 * (1.0 - 1e-9);
            int j = 0;
            if (x > 1.0) {
                int e = 0;
                const double m = std::frexp(x, &e);
                const int c2 = (m == 0.5) ? e - 1 : e;  // ceil(log2 x)
                j = (c2 + 1) / 2;
            }
            hist[std::min(j, levels)] += 1;
        }
        std::size_t cum = 0;
        for (int j = 0; j < levels; ++j) {
            cum += hist[j];
            const double v = static_cast<double>(cum) * weight[j];
            if (v > best[c].first) {
                best[c] = {v, j};
            }
        }
    });
    nonconcentration_cert cert;
    cert.alpha = alpha;
    for (const auto& [v, j] : best) {
        if (v > cert.K_lower) {
            cert.K_lower = v;
            cert.argmax_radius = std::ldexp(delta, j);
        }
    }
    cert.sandwich_factor = std::pow(4.0, alpha);
    cert.K_upper = cert.sandwich_factor * cert.K_lower;
    cert.centres_used = centres.size();
    cert.exhaustive = exhaustive;
    return cert;
}

// ---------------------------------------------------------------------------
// (δ, α)-sets

/// Grid of spacing δ^(α/dim) in [0, 1)^dim with ⌈δ^(−α/dim)⌉ points per axis.
inline point_cloud make_grid_set(int dim, double alpha, double delta) {
    if (dim < 1 || dim > 3) {
        throw std::invalid_argument("make_grid_set: dim must be 1, 2 or 3");
    }
    if (!(alpha >= 0.0 && alpha <= dim)) {
        throw std::invalid_argument("make_grid_set: alpha must lie in [0, dim]");
    }
    (void)scale{delta};
    const double spacing = std::pow(delta, alpha / dim);
    const auto per_axis = static_cast<std::size_t>(std::ceil(1.0 / spacing - 1e-9));
    point_cloud c;
    c.dim = dim;
    c.delta = delta;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) {
        total *= per_axis;
    }
    c.points.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        vec3 p{0.0, 0.0, 0.0};
        std::size_t rest = idx;
        for (int i = dim - 1; i >= 0; --i) {
            p[i] = static_cast<double>(rest % per_axis) * spacing;
            rest /= per_axis;
        }
        c.points.push_back(snap_to_lattice(p, delta));
    }
    for (int i = 0; i < dim; ++i) {
        c.hi[i] = 1.0;
    }
    return c;
}

/// Self-similar set: each cell keeps `branches` of its ratio^dim subcells,
/// evenly spread in row-major order. δ = ratio^(−depth); α = log M / log L.
/// A one-dimensional set is embedded in the plane on the x-axis.
inline point_cloud make_cantor_set(int dim, int branches, int ratio, int depth) {
    if (dim < 1 || dim > 3 || ratio < 2 || depth < 1) {
        throw std::invalid_argument("make_cantor_set: need dim in 1..3, ratio >= 2, depth >= 1");
    }
    int sub = 1;
    for (int i = 0; i < dim; ++i) {
        sub *= ratio;
    }
    if (branches < 1 || branches > sub) {
        throw std::invalid_argument("make_cantor_set: branches must lie in [1, ratio^dim]");
    }
    std::vector<int> chosen;
    for (int b = 0; b < branches; ++b) {
        chosen.push_back(static_cast<int>(static_cast<long long>(b) * sub / branches));
    }
    std::vector<std::array<long long, 3>> cells{{0, 0, 0}};
    for (int level = 0; level < depth; ++level) {
        std::vector<std::array<long long, 3>> next;
        next.reserve(cells.size() * chosen.size());
        for (const auto& cell : cells) {
            for (int code : chosen) {
                std::array<long long, 3> child{0, 0, 0};
                int rest = code;
                for (int i = dim - 1; i >= 0; --i) {
                    child[i] = cell[i] * ratio + rest % ratio;
                    rest /= ratio;
                }
                next.push_back(child);
            }
        }
        cells = std::move(next);
    }
    const double delta = std::pow(static_cast<double>(ratio), -depth);
    point_cloud c;
    c.dim = std::max(dim, 2);
    c.delta = delta;
    for (const auto& cell : cells) {
        c.points.push_back({cell[0] * delta, cell[1] * delta, cell[2] * delta});
    }
    for (int i = 0; i < dim; ++i) {
        c.hi[i] = 1.0;
    }
    return c;
}

inline constexpr double random_set_K_cap = 16.0;

/// Uniform sample of ⌈δ^(−α)⌉ lattice points in [0, 1)^dim, thinned to a
/// δ-net; resampled with the next seed until the certificate has K_lower ≤ 16.
inline point_cloud make_random_set(int dim, double alpha, double delta, std::uint64_t seed,
                                   const kt_options& opt = {2048, {}}) {
    if (dim < 1 || dim > 3 || !(alpha >= 0.0 && alpha <= dim)) {
        throw std::invalid_argument("make_random_set: need dim in 1..3 and alpha in [0, dim]");
    }
    (void)scale{delta};
    const auto target = static_cast<std::size_t>(std::ceil(std::pow(delta, -alpha) - 1e-9));
    for (int attempt = 0; attempt < 32; ++attempt) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
        std::vector<vec3> raw(target, vec3{0.0, 0.0, 0.0});
        for (auto& p : raw) {
            for (int i = 0; i < dim; ++i) {
                p[i] = detail::unit_draw(rng);
            }
            p = snap_to_lattice(p, delta);
        }
        point_cloud c;
        c.dim = std::max(dim, 2);
        c.delta = delta;
        c.points = thin_to_separation(raw, delta, dim);
        for (int i = 0; i < dim; ++i) {
            c.hi[i] = 1.0;
        }
        if (katz_tao_constant(c, alpha, opt).K_lower <= random_set_K_cap) {
            return c;
        }
    }
    throw std::runtime_error("make_random_set: no sample certified with K_lower <= 16");
}

// ---------------------------------------------------------------------------
// Curve families

enum class family_kind { grid, random };

template <class Curve>
struct curve_family {
    std::vector<Curve> curves;
    point_cloud params;  // dual parameter points
};

inline point_cloud parameter_cloud(double beta, double delta, family_kind kind, std::uint64_t seed) {
    if (!(beta >= 0.0 && beta <= 3.0)) {
        throw std::invalid_argument("family dimension must lie in [0, 3]");
    }
    return kind == family_kind::grid ? make_grid_set(3, beta, delta)
                                     : make_random_set(3, beta, delta, seed);
}

/// Annuli with (x_B, t_B − 1) ranging over a (δ, β)-set in [0, 1)³.
inline curve_family<circle_annulus> make_circle_family(double beta, double delta,
                                                       family_kind kind, std::uint64_t seed = 0) {
    curve_family<circle_annulus> f;
    f.params = parameter_cloud(beta, delta, kind, seed);
    const scale s{delta};
    for (auto& p : f.params.points) {
        p[2] += 1.0;
        f.curves.push_back(make_annulus(s, {p[0], p[1]}, p[2]));
    }
    f.params.lo[2] += 1.0;
    f.params.hi[2] += 1.0;
    return f;
}

/// Strips with (a, b, c) ranging over a (δ, β)-set in [−1/2, 1/2)³ ⊂ B³(0, 1).
inline curve_family<sine_strip> make_sine_family(double beta, double delta, family_kind kind,
                                                 std::uint64_t seed = 0) {
    curve_family<sine_strip> f;
    f.params = parameter_cloud(beta, delta, kind, seed);
    const scale s{delta};
    for (auto& p : f.params.points) {
        for (int i = 0; i < 3; ++i) {
            p[i] -= 0.5;
        }
        f.curves.push_back(make_strip(s, p));
    }
    for (int i = 0; i < 3; ++i) {
        f.params.lo[i] -= 0.5;
        f.params.hi[i] -= 0.5;
    }
    return f;
}

/// Discs centred on the points of a planar cloud.
inline std::vector<disc2> discs_from(const point_cloud& c) {
    std::vector<disc2> out;
    out.reserve(c.size());
    for (const auto& p : c.points) {
        out.push_back({{p[0], p[1]}, c.delta});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plank sharpness configuration

/// Plank of size 1 × δ^(1/2) × δ centred at (0, 0, 1)/√2:
/// long axis (1, 0, −1)/√2 (a null direction inside γ(0)^⊥),
/// medium axis (0, 1, 0), short axis γ(0).
struct plank_axes {
    vec3 centre{0.0, 0.0, inv_sqrt2};
    vec3 long_axis{inv_sqrt2, 0.0, -inv_sqrt2};
    vec3 medium_axis{0.0, 1.0, 0.0};
    vec3 short_axis{inv_sqrt2, 0.0, inv_sqrt2};
};

struct plank_example {
    std::vector<ball3> P;
    std::vector<light_slab> T;
    point_cloud P_cloud;  // ball centres
    point_cloud T_cloud;  // slab parameters (θ signed in (−π, π], offset)
    plank_axes axes;
};

inline constexpr double plank_slab_dilation = 10.0;

inline plank_example make_plank_sharpness_example(double beta, double delta) {
    if (!(beta >= 0.5 && beta <= 2.0)) {
        throw std::invalid_argument("sharpness construction undefined");
    }
    (void)scale{delta};
    plank_example ex;
    const auto& ax = ex.axes;
    auto place = [&](double s, double m) {
        vec3 p;
        for (int i = 0; i < 3; ++i) {
            p[i] = ax.centre[i] + s * ax.long_axis[i] + m * ax.medium_axis[i];
        }
        ex.P.push_back({p, delta});
    };
    if (beta <= 1.0) {
        const auto count = static_cast<std::size_t>(std::ceil(std::pow(delta, -beta) - 1e-9));
        for (std::size_t i = 0; i < count; ++i) {
            place(-0.5 + (static_cast<double>(i) + 0.5) / static_cast<double>(count), 0.0);
        }
    } else {
        const auto along = static_cast<std::size_t>(std::llround(1.0 / delta));
        const auto copies = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(std::pow(delta, (1.0 - beta) / 2.0))));
        const double gap = std::pow(delta, beta / 2.0);
        for (std::size_t j = 0; j < copies; ++j) {
            const double m = (static_cast<double>(j) - 0.5 * static_cast<double>(copies - 1)) * gap;
            for (std::size_t i = 0; i < along; ++i) {
                place(-0.5 + (static_cast<double>(i) + 0.5) * delta, m);
            }
        }
    }
    // δ^(−1/2) normals γ(θ), δ apart with |θ| ≤ δ^(1/2)/2, make angle
    // ≤ δ^(1/2) with γ(0); the single offset ⟨centre, γ(θ)⟩ = 1/2 places every slab through the plank.
    const auto nslabs = std::max<long long>(1, std::llround(1.0 / std::sqrt(delta)));
    ex.T_cloud.dim = 2;
    ex.T_cloud.delta = delta;
    for (long long j = 0; j < nslabs; ++j) {
        const double th = (static_cast<double>(j) - 0.5 * static_cast<double>(nslabs - 1)) * delta;
        ex.T.push_back({th < 0 ? th + two_pi : th, 0.5, plank_slab_dilation * delta});
        ex.T_cloud.points.push_back({th, 0.5, 0.0});
    }
    ex.T_cloud.fit_bounds();
    ex.P_cloud.dim = 3;
    ex.P_cloud.delta = delta;
    for (const auto& b : ex.P) {
        ex.P_cloud.points.push_back(b.center);
    }
    ex.P_cloud.fit_bounds();
    return ex;
}

// ---------------------------------------------------------------------------
// Jarník-type configuration

/// A = {(k, l, m)/n : 0 ≤ k, l, m ≤ n}, held implicitly.
struct jarnik_grid {
    long long n = 2;
    double t = 0.0;
    double delta = 0.0;

    std::size_t size() const {
        const auto m = static_cast<std::size_t>(n + 1);
        return m * m * m;
    }

    point_cloud cloud() const {
        point_cloud c;
        c.dim = 3;
        c.delta = delta;
        c.points.reserve(size());
        const double inv = 1.0 / static_cast<double>(n);
        for (long long k = 0; k <= n; ++k) {
            for (long long l = 0; l <= n; ++l) {
                for (long long m = 0; m <= n; ++m) {
                    c.points.push_back({k * inv, l * inv, m * inv});
                }
            }
        }
        c.hi = {1.0, 1.0, 1.0};
        return c;
    }
};

inline jarnik_grid make_jarnik_grid(double t, long long n_j) {
    if (!(t > 0.0 && t < 3.0) || n_j < 1) {
        throw std::invalid_argument("make_jarnik_grid: need t in (0, 3) and n_j >= 1");
    }
    jarnik_grid g;
    g.t = t;
    g.n = std::max<long long>(2, std::llround(std::pow(static_cast<double>(n_j), 2.0 * t / 3.0)));
    g.delta = std::pow(static_cast<double>(g.n), -3.0 / t);
    return g;
}

struct rational_angles {
    double alpha = 0.0;
    double q_max = 0.0;
    long long n = 0;
    double delta = 0.0;
    std::vector<std::pair<long long, long long>> fractions;  // (p, q), reduced
    std::vector<double> values;
    std::size_t enumerated = 0;  // before δ-thinning
};

/// Reduced p/q in (1/4, 3/4) with q ≤ n^(3α/(2t)), α = s − t/3 − ε, thinned to
/// δ-separation in increasing order.
inline rational_angles make_rational_angles(double t, double s, double epsilon, long long n_j) {
    const double alpha = s - t / 3.0 - epsilon;
    if (!(t > 0.0 && t < 3.0) || !(s > t / 3.0 && s <= std::min(1.0, t)) ||
        !(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("parameters outside Jarnik regime");
    }
    const auto grid = make_jarnik_grid(t, n_j);
    rational_angles out;
    out.alpha = alpha;
    out.n = grid.n;
    out.delta = grid.delta;
    out.q_max = std::pow(static_cast<double>(grid.n), 3.0 * alpha / (2.0 * t));
    const auto qmax = static_cast<long long>(std::floor(out.q_max * (1.0 + 1e-12)));
    std::vector<std::pair<long long, long long>> all;
    for (long long q = 1; q <= qmax; ++q) {
        for (long long p = 1; p < q; ++p) {
            if (4 * p > q && 4 * p < 3 * q && std::gcd(p, q) == 1) {
                all.emplace_back(p, q);
            }
        }
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.first * b.second < b.first * a.second;
    });
    out.enumerated = all.size();
    for (const auto& [p, q] : all) {
        const double v = static_cast<double>(p) / static_cast<double>(q);
        if (out.values.empty() || v - out.values.back() >= grid.delta) {
            out.fractions.emplace_back(p, q);
            out.values.push_back(v);
        }
    }
    return out;
}

struct furstenberg_dual {
    point_cloud F;
    std::size_t raw_count = 0;
    std::size_t dedup_count = 0;
};

/// {(θ, Γ_z(θ)) : θ ∈ Θ, z ∈ A} snapped to δ·Z² and deduplicated.
inline furstenberg_dual make_furstenberg_dual(const point_cloud& A, const std::vector<double>& theta,
                                              double delta) {
    (void)scale{delta};
    std::vector<std::pair<long long, long long>> keys;
    keys.reserve(A.size() * theta.size());
    for (double th : theta) {
        const double c = std::cos(th), s = std::sin(th);
        for (const auto& z : A.points) {
            const double y = (z[0] * c + z[1] * s + z[2]) * inv_sqrt2;
            keys.emplace_back(std::llround(th / delta), std::llround(y / delta));
        }
    }
    furstenberg_dual out;
    out.raw_count = keys.size();
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    out.dedup_count = keys.size();
    out.F.dim = 2;
    out.F.delta = delta;
    for (const auto& [a, b] : keys) {
        out.F.points.push_back({a * delta, b * delta, 0.0});
    }
    out.F.fit_bounds();
    return out;
}

}  // namespace flab
