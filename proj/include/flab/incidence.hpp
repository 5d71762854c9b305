#pragma once

// Exact incidence counting between curve families and δ-objects: plain
// counts, κ-trilinear counts and broad counts, with a spatially indexed
// engine and a brute-force reference.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "flab/geometry.hpp"
#include "flab/parallel.hpp"

namespace flab {

enum class count_method { indexed, brute };

inline const char* to_string(count_method m) {
    return m == count_method::indexed ? "indexed" : "brute";
}

struct incidence_report {
    std::uint64_t total = 0;
    std::vector<std::uint32_t> per_curve;
    double elapsed_ms = 0.0;
    count_method method = count_method::indexed;
};

class budget_exceeded : public std::runtime_error {
public:
    budget_exceeded(double estimate, double budget)
        : std::runtime_error("work budget exceeded: estimated " + std::to_string(estimate) +
                             " rasterised cells > budget " + std::to_string(budget)),
          estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

struct count_options {
    count_method method = count_method::indexed;
    exec_policy exec{};
    /// Cap on Σ over curves of rasterised cells; 0 disables the check.
    double work_budget = 0.0;
};

/// Incidence predicate for each supported (curve, object) pairing.
inline bool incident(const circle_annulus& b, const disc2& d) { return disc_meets_annulus(d, b); }
inline bool incident(const sine_strip& s, const disc2& d) { return disc_meets_sinestrip(d, s); }
inline bool incident(const ball3& b, const light_slab& t) { return ball_meets_slab(b, t); }

template <class Curve, class Obj>
concept incidence_kind = requires(const Curve& c, const Obj& o) {
    { incident(c, o) } -> std::same_as<bool>;
};

namespace detail {

/// Discs bucketed on a uniform grid; curves walk the rows they cross.
class disc_grid_index {
public:
    explicit disc_grid_index(std::span<const disc2> discs) : discs_(discs) {
        if (discs.empty()) {
            return;
        }
        double x1 = discs[0].center[0], y1 = discs[0].center[1];
        x0_ = x1;
        y0_ = y1;
        for (const auto& d : discs) {
            x0_ = std::min(x0_, d.center[0]);
            y0_ = std::min(y0_, d.center[1]);
            x1 = std::max(x1, d.center[0]);
            y1 = std::max(y1, d.center[1]);
            rmax_ = std::max(rmax_, d.radius);
        }
        const double w = std::max(x1 - x0_, 1e-12), h = std::max(y1 - y0_, 1e-12);
        cell_ = std::max({4.0 * rmax_, std::sqrt(w * h / static_cast<double>(discs.size())),
                          std::sqrt(w * h / 4.0e6)});
        nx_ = static_cast<long>(w / cell_) + 1;
        ny_ = static_cast<long>(h / cell_) + 1;
        offsets_.assign(static_cast<std::size_t>(nx_ * ny_ + 1), 0);
        std::vector<std::size_t> cell_of(discs.size());
        for (std::size_t i = 0; i < discs.size(); ++i) {
            cell_of[i] = cell_index(col(discs[i].center[0]), row(discs[i].center[1]));
            ++offsets_[cell_of[i] + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        items_.resize(discs.size());
        auto fill = offsets_;
        for (std::size_t i = 0; i < discs.size(); ++i) {
            items_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
        }
    }

    double work_per_curve() const { return discs_.empty() ? 0.0 : 4.0 * static_cast<double>(nx_ + ny_); }

    /// Calls f(j) once for every disc whose centre lies in a cell that can
    /// meet the dilated annulus.
    template <class F>
    void candidates(const circle_annulus& b, F&& f) const {
        if (discs_.empty()) {
            return;
        }
        const double tol = rmax_ + b.thickness;
        const double slack = 1e-9 * (1.0 + b.radius);
        const double r_out = b.radius + tol + slack;
        const double r_in = b.radius - tol - slack;
        const double xb = b.center[0], yb = b.center[1];
        const long j_lo = std::max(0L, row(yb - r_out));
        const long j_hi = std::min(ny_ - 1, row(yb + r_out));
        for (long j = j_lo; j <= j_hi; ++j) {
            const double ylo = y0_ + static_cast<double>(j) * cell_;
            const double yhi = ylo + cell_;
            const double dy_min = std::max({0.0, ylo - yb, yb - yhi});
            const double dy_max = std::max(std::abs(ylo - yb), std::abs(yhi - yb));
            if (dy_min > r_out) {
                continue;
            }
            const double x_out = std::sqrt(r_out * r_out - dy_min * dy_min);
            const double x_in = r_in > dy_max ? std::sqrt(r_in * r_in - dy_max * dy_max) : -1.0;
            if (x_in <= 0.0) {
                visit_cols(j, xb - x_out, xb + x_out, f);
                continue;
            }
            const long a0 = col(xb - x_out), a1 = col(xb - x_in);
            const long b0 = col(xb + x_in), b1 = col(xb + x_out);
            if (a1 >= b0) {
                visit_range(j, a0, b1, f);
            } else {
                visit_range(j, a0, a1, f);
                visit_range(j, b0, b1, f);
            }
        }
    }

private:
    long col(double x) const { return static_cast<long>(std::floor((x - x0_) / cell_)); }
    long row(double y) const { return static_cast<long>(std::floor((y - y0_) / cell_)); }
    std::size_t cell_index(long c, long r) const {
        return static_cast<std::size_t>(std::clamp(r, 0L, ny_ - 1) * nx_ + std::clamp(c, 0L, nx_ - 1));
    }

    template <class F>
    void visit_cols(long j, double xa, double xb, F& f) const {
        visit_range(j, col(xa), col(xb), f);
    }

    template <class F>
    void visit_range(long j, long c0, long c1, F& f) const {
        c0 = std::max(c0, 0L);
        c1 = std::min(c1, nx_ - 1);
        if (c0 > c1) {
            return;
        }
        const std::size_t lo = offsets_[static_cast<std::size_t>(j * nx_ + c0)];
        const std::size_t hi = offsets_[static_cast<std::size_t>(j * nx_ + c1 + 1)];
        for (std::size_t k = lo; k < hi; ++k) {
            f(items_[k]);
        }
    }

    std::span<const disc2> discs_;
    double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0, rmax_ = 0.0;
    long nx_ = 0, ny_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> items_;
};

/// Objects keyed by (θ, y), bucketed into θ-bins and sorted by y inside each
/// bin. A sinusoid query bounds its range over each bin in closed form.
class theta_bin_index {
public:
    struct entry {
        double theta;
        double y;
        std::uint32_t id;
    };

    /// `window` widens each bin by the objects' horizontal half-width;
    /// `clip` restricts θ to [0, 2π].
    theta_bin_index(std::vector<entry> entries, double bin_width, double window, bool clip)
        : window_(window), clip_(clip) {
        if (entries.empty()) {
            return;
        }
        std::sort(entries.begin(), entries.end(), [](const entry& a, const entry& b) {
            return a.theta < b.theta || (a.theta == b.theta && a.id < b.id);
        });
        const double t0 = entries.front().theta;
        std::size_t start = 0;
        while (start < entries.size()) {
            const double base = t0 + std::floor((entries[start].theta - t0) / bin_width) * bin_width;
            std::size_t end = start;
            while (end < entries.size() && entries[end].theta < base + bin_width) {
                ++end;
            }
            bin b;
            b.lo = entries[start].theta;
            b.hi = entries[end - 1].theta;
            std::vector<entry> chunk(entries.begin() + static_cast<long>(start),
                                     entries.begin() + static_cast<long>(end));
            std::sort(chunk.begin(), chunk.end(), [](const entry& a, const entry& c) {
                return a.y < c.y || (a.y == c.y && a.id < c.id);
            });
            for (const auto& e : chunk) {
                b.ys.push_back(e.y);
                b.ids.push_back(e.id);
            }
            bins_.push_back(std::move(b));
            start = end;
        }
    }

    double work_per_curve() const { return static_cast<double>(bins_.size()); }

    /// Calls f(id) for objects whose y lies within `tol` of the range of
    /// θ ↦ (a cos θ + b sin θ + c)/√2 over the widened bin.
    template <class F>
    void candidates(const vec3& abc, double tol, F&& f) const {
        for (const auto& b : bins_) {
            double lo = b.lo - window_, hi = b.hi + window_;
            if (clip_) {
                lo = std::max(lo, 0.0);
                hi = std::min(hi, two_pi);
                if (lo > hi) {
                    continue;
                }
            }
            const auto r = sinusoid_range(abc, lo, hi);
            const double slack = 1e-9;
            auto first = std::lower_bound(b.ys.begin(), b.ys.end(), r.min - tol - slack);
            auto last = std::upper_bound(first, b.ys.end(), r.max + tol + slack);
            for (auto it = first; it != last; ++it) {
                f(b.ids[static_cast<std::size_t>(it - b.ys.begin())]);
            }
        }
    }

private:
    struct bin {
        double lo = 0.0, hi = 0.0;
        std::vector<double> ys;
        std::vector<std::uint32_t> ids;
    };
    std::vector<bin> bins_;
    double window_ = 0.0;
    bool clip_ = false;
};

template <class T, class Get>
void require_uniform(std::span<const T> xs, Get get) {
    for (const auto& x : xs) {
        if (get(x) != get(xs.front())) {
            throw std::invalid_argument("mismatched scales");
        }
    }
}

template <class Curve, class Obj>
void check_scales(std::span<const Curve> P, std::span<const Obj> T) {
    if (P.empty() || T.empty()) {
        return;
    }
    if constexpr (std::is_same_v<Obj, disc2>) {
        require_uniform(P, [](const Curve& c) { return c.thickness; });
        require_uniform(T, [](const disc2& d) { return d.radius; });
        if (P.front().thickness != T.front().radius) {
            throw std::invalid_argument("mismatched scales");
        }
    } else {
        require_uniform(P, [](const ball3& b) { return b.radius; });
        require_uniform(T, [](const light_slab& t) { return t.thickness; });
        const double q = T.front().thickness / P.front().radius;
        auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * b; };
        if (!(near(q, 1.0) || near(q, 10.0) || near(q, 0.1))) {
            throw std::invalid_argument("mismatched scales");
        }
    }
}

/// Visits, for every curve i (in parallel), the ascending list of objects
/// incident to it: visit(i, ids).
template <class Curve, class Obj, class Visit>
    requires incidence_kind<Curve, Obj>
void scan_incidences(std::span<const Curve> P, std::span<const Obj> T, const count_options& opt,
                     Visit&& visit) {
    check_scales(P, T);
    auto run = [&](auto&& gather) {
        parallel_for(P.size(), opt.exec, [&](std::size_t i) {
            std::vector<std::uint32_t> ids;
            gather(P[i], ids);
            std::sort(ids.begin(), ids.end());
            visit(i, ids);
        });
    };
    auto check_budget = [&](double per_curve) {
        const double est = per_curve * static_cast<double>(P.size());
        if (opt.work_budget > 0.0 && est > opt.work_budget) {
            throw budget_exceeded(est, opt.work_budget);
        }
    };
    if (opt.method == count_method::brute) {
        check_budget(static_cast<double>(T.size()));
        run([&](const Curve& c, std::vector<std::uint32_t>& ids) {
            for (std::size_t j = 0; j < T.size(); ++j) {
                if (incident(c, T[j])) {
                    ids.push_back(static_cast<std::uint32_t>(j));
                }
            }
        });
        return;
    }
    if constexpr (std::is_same_v<Curve, circle_annulus>) {
        const disc_grid_index index(T);
        check_budget(index.work_per_curve());
        run([&](const Curve& c, std::vector<std::uint32_t>& ids) {
            index.candidates(c, [&](std::uint32_t j) {
                if (incident(c, T[j])) {
                    ids.push_back(j);
                }
            });
        });
    } else {
        std::vector<theta_bin_index::entry> entries;
        entries.reserve(T.size());
        double window = 0.0, tol_obj = 0.0;
        for (std::size_t j = 0; j < T.size(); ++j) {
            if constexpr (std::is_same_v<Obj, disc2>) {
                entries.push_back({T[j].center[0], T[j].center[1], static_cast<std::uint32_t>(j)});
                window = std::max(window, T[j].radius);
                tol_obj = std::max(tol_obj, T[j].radius);
            } else {
                entries.push_back({T[j].theta, T[j].offset, static_cast<std::uint32_t>(j)});
                tol_obj = std::max(tol_obj, T[j].thickness);
            }
        }
        double bin_width = 8.0 * std::max(window, 1e-6);
        if constexpr (std::is_same_v<Obj, light_slab>) {
            const double d = T.empty() ? 1.0 : T.front().thickness / 10.0;
            bin_width = 8.0 * d;
        }
        const theta_bin_index index(std::move(entries), bin_width, window,
                                    std::is_same_v<Obj, disc2>);
        check_budget(index.work_per_curve());
        run([&](const Curve& c, std::vector<std::uint32_t>& ids) {
            vec3 abc;
            double tol;
            if constexpr (std::is_same_v<Curve, sine_strip>) {
                abc = c.params;
                tol = tol_obj + c.thickness;
            } else {
                abc = c.center;
                tol = tol_obj + c.radius;
            }
            index.candidates(abc, tol, [&](std::uint32_t j) {
                if (incident(c, T[j])) {
                    ids.push_back(j);
                }
            });
        });
    }
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

template <class Curve, class Obj>
    requires incidence_kind<Curve, Obj>
incidence_report count_incidences(std::span<const Curve> P, std::span<const Obj> T,
                                  const count_options& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    incidence_report rep;
    rep.method = opt.method;
    rep.per_curve.assign(P.size(), 0);
    detail::scan_incidences(P, T, opt, [&](std::size_t i, const std::vector<std::uint32_t>& ids) {
        rep.per_curve[i] = static_cast<std::uint32_t>(ids.size());
    });
    for (auto c : rep.per_curve) {
        rep.total += c;
    }
    rep.elapsed_ms = detail::elapsed_ms(t0);
    return rep;
}

template <class Curve, class Obj>
incidence_report count_incidences(const std::vector<Curve>& P, const std::vector<Obj>& T,
                                  const count_options& opt = {}) {
    return count_incidences(std::span<const Curve>(P), std::span<const Obj>(T), opt);
}

template <class Curve, class Obj>
incidence_report brute_force_incidences(const std::vector<Curve>& P, const std::vector<Obj>& T,
                                        exec_policy exec = {}) {
    count_options opt;
    opt.method = count_method::brute;
    opt.exec = exec;
    return count_incidences(P, T, opt);
}

// ---------------------------------------------------------------------------
// Separation coordinates

/// Coordinate used for trilinear separation and arc assignment:
/// angle of the disc centre about x_B (circles), the disc's θ (sine waves),
/// the slab angle (light planes).
inline double separation_coordinate(const circle_annulus& b, const disc2& d) {
    const double a = std::atan2(d.center[1] - b.center[1], d.center[0] - b.center[0]);
    return a < 0.0 ? a + two_pi : a;
}
inline double separation_coordinate(const sine_strip&, const disc2& d) { return d.center[0]; }
inline double separation_coordinate(const ball3&, const light_slab& t) { return t.theta; }

/// Whether separation is measured around the circle.
template <class Curve>
inline constexpr bool circular_separation = std::is_same_v<Curve, circle_annulus>;

// ---------------------------------------------------------------------------
// κ-trilinear counts

/// Unordered triples i < j < k of sorted x with x_j − x_i ≥ κ and x_k − x_j ≥ κ.
inline std::uint64_t separated_triples_linear(const std::vector<double>& x, double kappa) {
    const std::size_t m = x.size();
    std::uint64_t total = 0;
    std::size_t left = 0, right = 0;
    for (std::size_t j = 0; j < m; ++j) {
        while (left < j && x[j] - x[left] >= kappa) {
            ++left;
        }
        if (right < j + 1) {
            right = j + 1;
        }
        while (right < m && !(x[right] - x[j] >= kappa)) {
            ++right;
        }
        total += static_cast<std::uint64_t>(left) * static_cast<std::uint64_t>(m - right);
    }
    return total;
}

/// Unordered triples on the circle [0, 2π) whose three arc gaps are all ≥ κ.
inline std::uint64_t separated_triples_circular(const std::vector<double>& x, double kappa) {
    const std::size_t m = x.size();
    if (m < 3) {
        return 0;
    }
    std::vector<std::size_t> nxt(m);
    std::size_t p = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (p < j + 1) {
            p = j + 1;
        }
        while (p < m && !(x[p] - x[j] >= kappa)) {
            ++p;
        }
        nxt[j] = p;
    }
    std::vector<std::uint64_t> prefix(m + 1, 0);
    for (std::size_t j = 0; j < m; ++j) {
        prefix[j + 1] = prefix[j] + nxt[j];
    }
    std::uint64_t total = 0;
    std::size_t b = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t a = nxt[i];
        b = std::max(b, i + 1);
        while (b < m && two_pi - (x[b] - x[i]) >= kappa) {
            ++b;
        }
        if (a >= b) {
            continue;
        }
        const std::size_t jstar =
            static_cast<std::size_t>(std::lower_bound(nxt.begin() + static_cast<long>(a),
                                                      nxt.begin() + static_cast<long>(b), b) -
                                     nxt.begin());
        total += static_cast<std::uint64_t>(jstar - a) * b - (prefix[jstar] - prefix[a]);
    }
    return total;
}

/// I_κ = Σ_B (ordered separated incident triples)^(1/3).
template <class Curve, class Obj>
    requires incidence_kind<Curve, Obj>
double count_trilinear(const std::vector<Curve>& P, const std::vector<Obj>& T, double kappa,
                       const count_options& opt = {}) {
    if (!(kappa > 0.0 && kappa <= two_pi)) {
        throw std::invalid_argument("count_trilinear: kappa must lie in (0, 2π]");
    }
    std::vector<double> per(P.size(), 0.0);
    detail::scan_incidences(std::span<const Curve>(P), std::span<const Obj>(T), opt,
                            [&](std::size_t i, const std::vector<std::uint32_t>& ids) {
                                std::vector<double> x;
                                x.reserve(ids.size());
                                for (auto j : ids) {
                                    x.push_back(separation_coordinate(P[i], T[j]));
                                }
                                std::sort(x.begin(), x.end());
                                const std::uint64_t u = circular_separation<Curve>
                                                            ? separated_triples_circular(x, kappa)
                                                            : separated_triples_linear(x, kappa);
                                per[i] = std::cbrt(6.0 * static_cast<double>(u));
                            });
    double sum = 0.0;
    for (double v : per) {
        sum += v;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Broad counts

enum class broad_mode { exact, greedy };

/// Equal partition of [0, 2π] into m = ⌈2πR⌉ arcs; a direction excludes the
/// arcs at arc-distance < 1/R from it (and from its antipode for lines).
struct arc_partition {
    int m = 1;
    double width = two_pi;
    double reach = 1.0;
    bool wrap = true;
    bool antipodal = false;

    arc_partition(double R, bool wrap_, bool antipodal_) : wrap(wrap_), antipodal(antipodal_) {
        if (!(R >= 1.0)) {
            throw std::invalid_argument("broad: R must be at least 1");
        }
        m = static_cast<int>(std::ceil(two_pi * R - 1e-9));
        width = two_pi / m;
        reach = 1.0 / R;
    }

    double point_to_arc(double psi, int i) const {
        const double a = i * width, b = (i + 1) * width;
        if (psi >= a && psi <= b) {
            return 0.0;
        }
        double d = std::min(std::abs(psi - a), std::abs(psi - b));
        if (wrap) {
            d = std::min({d, std::abs(psi + two_pi - b), std::abs(psi - two_pi - a)});
        }
        return d;
    }

    std::vector<bool> excluded(double psi) const {
        std::vector<bool> out(static_cast<std::size_t>(m), false);
        auto mark = [&](double p) {
            for (int i = 0; i < m; ++i) {
                if (point_to_arc(p, i) < reach) {
                    out[static_cast<std::size_t>(i)] = true;
                }
            }
        };
        mark(psi);
        if (antipodal) {
            mark(std::fmod(psi + std::numbers::pi, two_pi));
        }
        return out;
    }

    /// Arcs [iw, (i+1)w] meeting the closed interval [lo, hi].
    template <class F>
    void arcs_meeting(double lo, double hi, F&& f) const {
        if (hi - lo >= two_pi) {
            for (int i = 0; i < m; ++i) {
                f(i);
            }
            return;
        }
        if (!wrap) {
            lo = std::max(lo, 0.0);
            hi = std::min(hi, two_pi);
            if (lo > hi) {
                return;
            }
            const int a = std::max(0, static_cast<int>(std::floor(lo / width)) - 1);
            const int b = std::min(m - 1, static_cast<int>(std::floor(hi / width)) + 1);
            for (int i = a; i <= b; ++i) {
                if (lo <= (i + 1) * width && hi >= i * width) {
                    f(i);
                }
            }
            return;
        }
        std::vector<bool> hit(static_cast<std::size_t>(m), false);
        for (double shift : {-two_pi, 0.0, two_pi}) {
            const double l = lo + shift, h = hi + shift;
            if (h < 0.0 || l > two_pi) {
                continue;
            }
            const int a = std::max(0, static_cast<int>(std::floor(std::max(l, 0.0) / width)) - 1);
            const int b = std::min(m - 1, static_cast<int>(std::floor(std::min(h, two_pi) / width)) + 1);
            for (int i = a; i <= b; ++i) {
                if (l <= (i + 1) * width && h >= i * width) {
                    hit[static_cast<std::size_t>(i)] = true;
                }
            }
        }
        for (int i = 0; i < m; ++i) {
            if (hit[static_cast<std::size_t>(i)]) {
                f(i);
            }
        }
    }
};

namespace detail {

/// One direction per piece of the line between consecutive points where
/// the excluded set can change; interior points dominate the breakpoints.
inline std::vector<std::uint64_t> candidate_masks(const arc_partition& g) {
    std::vector<double> cuts;
    for (int k = 0; k <= g.m; ++k) {
        for (double sgn : {-1.0, 1.0}) {
            double c = k * g.width + sgn * g.reach;
            cuts.push_back(c);
            if (g.antipodal) {
                cuts.push_back(c - std::numbers::pi);
                cuts.push_back(c + std::numbers::pi);
            }
        }
    }
    std::vector<double> pts;
    for (double c : cuts) {
        if (g.wrap) {
            c = std::fmod(c, two_pi);
            if (c < 0.0) {
                c += two_pi;
            }
            pts.push_back(c);
        } else if (c > 0.0 && c < two_pi) {
            pts.push_back(c);
        }
    }
    pts.push_back(0.0);
    if (!g.wrap) {
        pts.push_back(two_pi);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> probes;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        probes.push_back(0.5 * (pts[i] + pts[i + 1]));
    }
    if (g.wrap) {
        double mid = 0.5 * (pts.back() + pts.front() + two_pi);
        probes.push_back(mid >= two_pi ? mid - two_pi : mid);
    }
    std::vector<std::uint64_t> masks;
    for (double psi : probes) {
        const auto ex = g.excluded(psi);
        std::uint64_t mask = 0;
        for (int i = 0; i < g.m; ++i) {
            if (ex[static_cast<std::size_t>(i)]) {
                mask |= std::uint64_t{1} << i;
            }
        }
        masks.push_back(mask);
    }
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    std::vector<std::uint64_t> maximal;
    for (auto a : masks) {
        bool dominated = false;
        for (auto b : masks) {
            if (a != b && (a & b) == a) {
                dominated = true;
                break;
            }
        }
        if (!dominated) {
            maximal.push_back(a);
        }
    }
    return maximal;
}

inline bool coverable(std::uint64_t need, int left, const std::vector<std::vector<std::uint64_t>>& by_arc) {
    if (need == 0) {
        return true;
    }
    if (left == 0) {
        return false;
    }
    const int i = std::countr_zero(need);
    for (auto mask : by_arc[static_cast<std::size_t>(i)]) {
        if (coverable(need & ~mask, left - 1, by_arc)) {
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// min over A direction placements of the max surviving c_τ.
inline double broad_value(const std::vector<double>& c, int A, const arc_partition& g, broad_mode mode) {
    if (A < 1) {
        throw std::invalid_argument("broad: A must be at least 1");
    }
    if (static_cast<int>(c.size()) != g.m) {
        throw std::invalid_argument("broad: profile length must equal the arc count");
    }
    if (mode == broad_mode::greedy) {
        std::vector<bool> gone(c.size(), false);
        for (int a = 0; a < A; ++a) {
            int best = -1;
            for (int i = 0; i < g.m; ++i) {
                if (!gone[static_cast<std::size_t>(i)] && (best < 0 || c[static_cast<std::size_t>(i)] > c[static_cast<std::size_t>(best)])) {
                    best = i;
                }
            }
            if (best < 0) {
                break;
            }
            const auto ex = g.excluded((best + 0.5) * g.width);
            for (int i = 0; i < g.m; ++i) {
                if (ex[static_cast<std::size_t>(i)]) {
                    gone[static_cast<std::size_t>(i)] = true;
                }
            }
        }
        double v = 0.0;
        for (int i = 0; i < g.m; ++i) {
            if (!gone[static_cast<std::size_t>(i)]) {
                v = std::max(v, c[static_cast<std::size_t>(i)]);
            }
        }
        return v;
    }
    if (A > 4 || g.m > 64) {
        throw std::invalid_argument("exact broad search too large");
    }
    const auto masks = detail::candidate_masks(g);
    std::vector<std::vector<std::uint64_t>> by_arc(static_cast<std::size_t>(g.m));
    for (auto mask : masks) {
        for (int i = 0; i < g.m; ++i) {
            if (mask >> i & 1U) {
                by_arc[static_cast<std::size_t>(i)].push_back(mask);
            }
        }
    }
    std::vector<double> levels(c.begin(), c.end());
    levels.push_back(0.0);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (double v : levels) {
        std::uint64_t need = 0;
        for (int i = 0; i < g.m; ++i) {
            if (c[static_cast<std::size_t>(i)] > v) {
                need |= std::uint64_t{1} << i;
            }
        }
        if (detail::coverable(need, A, by_arc)) {
            return v;
        }
    }
    return levels.back();
}

struct broad_params {
    int A = 1;
    double R = 1.0;
    broad_mode mode = broad_mode::greedy;
    /// Sine waves only: sum over curves of inf sup I(P, T_τ).
    bool literal = false;
};

template <class Curve>
arc_partition partition_for(double R) {
    if constexpr (std::is_same_v<Curve, circle_annulus>) {
        return {R, true, true};
    } else if constexpr (std::is_same_v<Curve, sine_strip>) {
        return {R, false, false};
    } else {
        return {R, true, false};
    }
}

/// Arc profile c_τ of one curve from its incident objects.
template <class Curve, class Obj>
std::vector<double> arc_profile(const Curve& c, const std::vector<Obj>& T,
                                const std::vector<std::uint32_t>& ids, const arc_partition& g) {
    std::vector<double> prof(static_cast<std::size_t>(g.m), 0.0);
    auto bump = [&](int i) { prof[static_cast<std::size_t>(i)] += 1.0; };
    for (auto j : ids) {
        const auto& o = T[j];
        if constexpr (std::is_same_v<Curve, circle_annulus>) {
            const double d = distance(o.center, c.center);
            const double phi = separation_coordinate(c, o);
            const double half = d <= o.radius ? std::numbers::pi : std::asin(o.radius / d);
            g.arcs_meeting(phi - half, phi + half, bump);
        } else if constexpr (std::is_same_v<Curve, sine_strip>) {
            g.arcs_meeting(o.center[0] - o.radius, o.center[0] + o.radius, bump);
        } else {
            g.arcs_meeting(o.theta, o.theta, bump);
        }
    }
    return prof;
}

template <class Curve, class Obj>
    requires incidence_kind<Curve, Obj>
double count_broad(const std::vector<Curve>& P, const std::vector<Obj>& T, const broad_params& bp,
                   const count_options& opt = {}) {
    const auto g = partition_for<Curve>(bp.R);
    if (bp.mode == broad_mode::exact && (bp.A > 4 || g.m > 64)) {
        throw std::invalid_argument("exact broad search too large");
    }
    std::vector<std::vector<double>> profiles(P.size());
    detail::scan_incidences(std::span<const Curve>(P), std::span<const Obj>(T), opt,
                            [&](std::size_t i, const std::vector<std::uint32_t>& ids) {
                                profiles[i] = arc_profile(P[i], T, ids, g);
                            });
    if (bp.literal) {
        std::vector<double> global(static_cast<std::size_t>(g.m), 0.0);
        for (const auto& p : profiles) {
            for (int i = 0; i < g.m; ++i) {
                global[static_cast<std::size_t>(i)] += p[static_cast<std::size_t>(i)];
            }
        }
        return static_cast<double>(P.size()) * broad_value(global, bp.A, g, bp.mode);
    }
    std::vector<double> per(P.size(), 0.0);
    parallel_for(P.size(), opt.exec, [&](std::size_t i) { per[i] = broad_value(profiles[i], bp.A, g, bp.mode); });
    double sum = 0.0;
    for (double v : per) {
        sum += v;
    }
    return sum;
}

}  // namespace flab
