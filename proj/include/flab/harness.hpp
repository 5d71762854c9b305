#pragma once

// Dyadic δ sweeps: build the families, certify them, count, compare with the
// theorem right-hand sides, fit exponents and issue verdicts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flab/bounds.hpp"
#include "flab/incidence.hpp"
#include "flab/io.hpp"
#include "flab/projections.hpp"
#include "flab/setgen.hpp"

namespace flab {

struct construction_spec {
    std::string kind = "grid";  // grid | random | plank | empty
    double dim = 1.0;
    std::uint64_t seed = 0;  // added to the experiment seed
};

struct experiment_spec {
    std::string name = "sweep";
    std::string geometry = "circle";  // circle | sine | slab
    construction_spec P;
    construction_spec T;
    std::vector<std::string> theorems;
    std::vector<double> deltas;
    double kappa = 0.5;
    broad_params broad{};
    std::uint64_t seed = 1;
    unsigned threads = 1;
    double budget = 1e7;
    std::size_t kt_max_centres = 256;
    double slope_tolerance = 0.15;
    double drift_limit = 8.0;
    std::string csv_path;
    std::string json_path;
};

struct sweep_row {
    double delta = 0.0;
    int k = 0;
    std::size_t nP = 0;
    std::size_t nT = 0;
    double K_P_lower = 0.0;
    double K_P_upper = 0.0;
    double K_T_lower = 0.0;
    double K_T_upper = 0.0;
    double measured = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

struct sweep_table {
    std::string theorem;
    std::string measure;  // plain | tri | broad
    std::vector<sweep_row> rows;
    double fitted_slope = 0.0;
    double fitted_intercept = 0.0;
    double theorem_exponent = 0.0;
    bool degenerate = false;
};

/// Returns k with δ = 2^(−k), or nullopt if δ is not dyadic.
inline std::optional<int> dyadic_level(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        return std::nullopt;
    }
    int e = 0;
    const double m = std::frexp(delta, &e);
    if (m != 0.5) {
        return std::nullopt;
    }
    return 1 - e;
}

inline void validate(const experiment_spec& s) {
    if (s.deltas.empty()) {
        throw std::invalid_argument("spec: empty delta list");
    }
    for (std::size_t i = 0; i < s.deltas.size(); ++i) {
        if (!dyadic_level(s.deltas[i])) {
            throw std::invalid_argument("spec: delta " + format_real(s.deltas[i]) + " is not 2^-k");
        }
        if (i > 0 && !(s.deltas[i] < s.deltas[i - 1])) {
            throw std::invalid_argument("spec: delta list must be strictly decreasing");
        }
    }
    if (s.geometry != "circle" && s.geometry != "sine" && s.geometry != "slab") {
        throw std::invalid_argument("spec: unknown geometry " + s.geometry);
    }
    if ((s.P.kind == "plank") != (s.T.kind == "plank") || (s.P.kind == "plank" && s.geometry != "slab")) {
        throw std::invalid_argument("spec: plank constructions need geometry slab for both P and T");
    }
    if (s.theorems.empty()) {
        throw std::invalid_argument("spec: no theorems listed");
    }
}

/// Measure implied by a theorem id: trilinear for the Kakeya-type bound,
/// broad for the R^100 bounds, plain incidences otherwise.
inline std::string measure_for(std::string_view theorem) {
    if (theorem == "SLAB_TRI_KAKEYA") {
        return "tri";
    }
    if (theorem == "CIRCLE_BROAD" || theorem == "SLAB_TRI_RESTRICTION") {
        return "broad";
    }
    return "plain";
}

// ---------------------------------------------------------------------------
// JSON forms

inline construction_spec construction_from_json(const ordered_json& j) {
    construction_spec c;
    c.kind = j.value("kind", c.kind);
    c.dim = j.value("dim", c.dim);
    c.seed = j.value("seed", c.seed);
    return c;
}

inline ordered_json to_json(const construction_spec& c) {
    return {{"kind", c.kind}, {"dim", c.dim}, {"seed", c.seed}};
}

inline experiment_spec spec_from_json(const ordered_json& j) {
    experiment_spec s;
    s.name = j.value("name", s.name);
    s.geometry = j.value("geometry", s.geometry);
    if (j.contains("P")) s.P = construction_from_json(j.at("P"));
    if (j.contains("T")) s.T = construction_from_json(j.at("T"));
    s.theorems = j.value("theorems", s.theorems);
    if (j.contains("deltas")) {
        s.deltas = j.at("deltas").get<std::vector<double>>();
    } else if (j.contains("k")) {
        for (int k : j.at("k").get<std::vector<int>>()) {
            s.deltas.push_back(std::ldexp(1.0, -k));
        }
    }
    if (j.contains("tri")) {
        s.kappa = j.at("tri").value("kappa", s.kappa);
    }
    if (j.contains("broad")) {
        const auto& b = j.at("broad");
        s.broad.A = b.value("A", s.broad.A);
        s.broad.R = b.value("R", s.broad.R);
        s.broad.mode = b.value("mode", std::string("greedy")) == "exact" ? broad_mode::exact : broad_mode::greedy;
        s.broad.literal = b.value("literal", s.broad.literal);
    }
    s.seed = j.value("seed", s.seed);
    s.threads = j.value("threads", s.threads);
    s.budget = j.value("budget", s.budget);
    s.kt_max_centres = j.value("kt_max_centres", s.kt_max_centres);
    s.slope_tolerance = j.value("slope_tolerance", s.slope_tolerance);
    s.drift_limit = j.value("drift_limit", s.drift_limit);
    if (j.contains("outputs")) {
        s.csv_path = j.at("outputs").value("csv", s.csv_path);
        s.json_path = j.at("outputs").value("json", s.json_path);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Families at one scale

struct cell_families {
    std::vector<circle_annulus> circles;
    std::vector<sine_strip> strips;
    std::vector<ball3> balls;
    std::vector<disc2> discs;
    std::vector<light_slab> slabs;
    point_cloud P_cloud;
    point_cloud T_cloud;
    std::size_t nP = 0;
    std::size_t nT = 0;
};

inline family_kind to_family_kind(const std::string& k) {
    if (k == "grid") return family_kind::grid;
    if (k == "random") return family_kind::random;
    throw std::invalid_argument("unknown construction kind: " + k);
}

inline point_cloud planar_cloud(const construction_spec& c, double delta, std::uint64_t seed) {
    if (c.kind == "empty") {
        point_cloud e;
        e.delta = delta;
        return e;
    }
    if (!(c.dim >= 0.0 && c.dim <= 2.0)) {
        throw std::invalid_argument("disc family dimension must lie in [0, 2]");
    }
    return to_family_kind(c.kind) == family_kind::grid ? make_grid_set(2, c.dim, delta)
                                                      : make_random_set(2, c.dim, delta, seed);
}

inline cell_families build_families(const experiment_spec& s, double delta) {
    cell_families f;
    const std::uint64_t pseed = s.seed + s.P.seed;
    const std::uint64_t tseed = s.seed + s.T.seed + 0x9e3779b97f4a7c15ULL;
    if (s.P.kind == "plank") {
        auto ex = make_plank_sharpness_example(s.P.dim, delta);
        f.balls = std::move(ex.P);
        f.slabs = std::move(ex.T);
        f.P_cloud = std::move(ex.P_cloud);
        f.T_cloud = std::move(ex.T_cloud);
        f.nP = f.balls.size();
        f.nT = f.slabs.size();
        return f;
    }
    f.T_cloud = planar_cloud(s.T, delta, tseed);
    if (s.geometry == "sine") {
        // Centre the disc box on the strips' range of heights.
        for (auto& p : f.T_cloud.points) {
            p[1] -= 0.5;
        }
        f.T_cloud.lo[1] -= 0.5;
        f.T_cloud.hi[1] -= 0.5;
    }
    f.discs = discs_from(f.T_cloud);
    f.nT = f.discs.size();
    if (s.geometry == "circle") {
        auto fam = make_circle_family(s.P.dim, delta, to_family_kind(s.P.kind), pseed);
        f.circles = std::move(fam.curves);
        f.P_cloud = std::move(fam.params);
        f.nP = f.circles.size();
    } else if (s.P.kind == "empty") {
        f.P_cloud.delta = delta;
        f.nP = 0;
    } else if (s.geometry == "sine") {
        auto fam = make_sine_family(s.P.dim, delta, to_family_kind(s.P.kind), pseed);
        f.strips = std::move(fam.curves);
        f.P_cloud = std::move(fam.params);
        f.nP = f.strips.size();
    } else {
        // Balls at the sine-wave parameters, slabs dual to the discs.
        auto fam = make_sine_family(s.P.dim, delta, to_family_kind(s.P.kind), pseed);
        f.P_cloud = std::move(fam.params);
        for (const auto& p : f.P_cloud.points) {
            f.balls.push_back({p, delta});
        }
        for (const auto& d : f.discs) {
            f.slabs.push_back(dual_disc_to_slab(d));
        }
        f.discs.clear();
        f.nP = f.balls.size();
        f.nT = f.slabs.size();
    }
    return f;
}

/// Counts the given measure on whichever pairing the cell holds.
inline double measure_cell(const cell_families& f, const std::string& measure, const experiment_spec& s,
                           const count_options& opt) {
    auto run = [&](const auto& P, const auto& T) -> double {
        if (P.empty() || T.empty()) {
            return 0.0;
        }
        if (measure == "tri") {
            return count_trilinear(P, T, s.kappa, opt);
        }
        if (measure == "broad") {
            broad_params bp = s.broad;
            const auto g = partition_for<typename std::decay_t<decltype(P)>::value_type>(bp.R);
            if (bp.mode == broad_mode::exact && g.m > 64) {
                bp.mode = broad_mode::greedy;
            }
            return count_broad(P, T, bp, opt);
        }
        return static_cast<double>(count_incidences(P, T, opt).total);
    };
    if (s.geometry == "circle") {
        return run(f.circles, f.discs);
    }
    if (s.geometry == "sine") {
        return run(f.strips, f.discs);
    }
    return run(f.balls, f.slabs);
}

inline dimension_fit fit_positive(const std::vector<sweep_row>& rows, double sweep_row::*field, bool& degenerate) {
    std::vector<double> x, y;
    for (const auto& r : rows) {
        if (r.*field > 0.0) {
            x.push_back(static_cast<double>(r.k));
            y.push_back(std::log2(r.*field));
        }
    }
    degenerate = x.size() < 2;
    return fit_line(x, y);
}

/// One table per theorem id, rows in decreasing δ.
inline std::vector<sweep_table> run_sweep(const experiment_spec& s) {
    validate(s);
    count_options opt;
    opt.exec.threads = std::max(1u, s.threads);
    opt.work_budget = s.budget;
    kt_options kt;
    kt.max_centres = s.kt_max_centres;
    kt.exec = opt.exec;

    std::vector<sweep_table> tables;
    for (const auto& name : s.theorems) {
        sweep_table t;
        t.theorem = name;
        t.measure = measure_for(name);
        tables.push_back(t);
    }
    for (double delta : s.deltas) {
        const int k = *dyadic_level(delta);
        const auto f = build_families(s, delta);
        sweep_row base;
        base.delta = delta;
        base.k = k;
        base.nP = f.nP;
        base.nT = f.nT;
        if (!f.P_cloud.empty()) {
            const auto c = katz_tao_constant(f.P_cloud, s.P.dim, kt);
            base.K_P_lower = c.K_lower;
            base.K_P_upper = c.K_upper;
        }
        if (!f.T_cloud.empty()) {
            const auto c = katz_tao_constant(f.T_cloud, s.T.dim, kt);
            base.K_T_lower = c.K_lower;
            base.K_T_upper = c.K_upper;
        }
        std::vector<std::pair<std::string, double>> cache;
        for (auto& t : tables) {
            auto hit = std::find_if(cache.begin(), cache.end(), [&](const auto& e) { return e.first == t.measure; });
            double measured = 0.0;
            if (hit != cache.end()) {
                measured = hit->second;
            } else {
                try {
                    measured = measure_cell(f, t.measure, s, opt);
                } catch (const budget_exceeded& e) {
                    throw std::runtime_error("budget exceeded at delta = 2^-" + std::to_string(k) + ": " + e.what());
                }
                cache.emplace_back(t.measure, measured);
            }
            const theorem_id id = resolve_theorem(t.theorem, s.T.dim, s.P.dim);
            rhs_inputs in{delta, s.T.dim, s.P.dim, base.K_P_lower, base.K_T_lower,
                          static_cast<double>(f.nP), static_cast<double>(f.nT), s.broad.R, s.kappa};
            sweep_row row = base;
            row.measured = measured;
            row.rhs = theorem_rhs(id, in);
            row.ratio = row.rhs > 0.0 ? measured / row.rhs : 0.0;
            t.rows.push_back(row);
        }
    }
    for (auto& t : tables) {
        const auto fit = fit_positive(t.rows, &sweep_row::measured, t.degenerate);
        t.fitted_slope = fit.slope;
        t.fitted_intercept = fit.intercept;
        bool rhs_degenerate = false;
        t.theorem_exponent = fit_positive(t.rows, &sweep_row::rhs, rhs_degenerate).slope;
    }
    return tables;
}

inline std::string tables_to_csv(const std::vector<sweep_table>& tables) {
    csv_table out({"theorem", "measure", "delta", "k", "nP", "nT", "K_P_lower", "K_P_upper", "K_T_lower",
                   "K_T_upper", "measured", "rhs", "ratio", "fitted_slope", "theorem_exponent"});
    for (const auto& t : tables) {
        for (const auto& r : t.rows) {
            out.row()
                .add(t.theorem)
                .add(t.measure)
                .add(r.delta)
                .add(r.k)
                .add(r.nP)
                .add(r.nT)
                .add(r.K_P_lower)
                .add(r.K_P_upper)
                .add(r.K_T_lower)
                .add(r.K_T_upper)
                .add(r.measured)
                .add(r.rhs)
                .add(r.ratio)
                .add(t.fitted_slope)
                .add(t.theorem_exponent);
        }
    }
    return out.str();
}

inline ordered_json to_json(const sweep_row& r) {
    return {{"delta", r.delta},         {"k", r.k},
            {"nP", r.nP},               {"nT", r.nT},
            {"K_P_lower", r.K_P_lower}, {"K_P_upper", r.K_P_upper},
            {"K_T_lower", r.K_T_lower}, {"K_T_upper", r.K_T_upper},
            {"measured", r.measured},   {"rhs", r.rhs},
            {"ratio", r.ratio}};
}

inline ordered_json to_json(const sweep_table& t) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows) {
        rows.push_back(to_json(r));
    }
    return {{"theorem", t.theorem},
            {"measure", t.measure},
            {"fitted_slope", t.fitted_slope},
            {"fitted_intercept", t.fitted_intercept},
            {"theorem_exponent", t.theorem_exponent},
            {"degenerate", t.degenerate},
            {"rows", rows}};
}

// ---------------------------------------------------------------------------
// Verdicts

struct verify_options {
    /// Test hook: multiplies the measured value of the last row.
    double inflate_last = 1.0;
};

struct theorem_verdict {
    std::string theorem;
    bool pass = false;
    double C = 0.0;
    double drift = 1.0;
    bool ratio_ok = true;
    bool drift_ok = true;
    bool slope_checked = false;
    bool slope_ok = true;
    double fitted_slope = 0.0;
    double theorem_exponent = 0.0;
};

/// PASS needs measured ≤ C·rhs on every row with C = max ratio·(1 + 1e−9),
/// upward drift max_{i<j} ratio_j/ratio_i ≤ drift_limit, and, with two or
/// more scales, fitted slope ≤ theorem exponent + tolerance.
inline theorem_verdict judge(sweep_table t, const experiment_spec& s, const verify_options& vo = {}) {
    if (!t.rows.empty() && vo.inflate_last != 1.0) {
        auto& r = t.rows.back();
        r.measured *= vo.inflate_last;
        r.ratio = r.rhs > 0.0 ? r.measured / r.rhs : 0.0;
        bool deg = false;
        const auto fit = fit_positive(t.rows, &sweep_row::measured, deg);
        t.fitted_slope = fit.slope;
        t.degenerate = deg;
    }
    theorem_verdict v;
    v.theorem = t.theorem;
    v.fitted_slope = t.fitted_slope;
    v.theorem_exponent = t.theorem_exponent;
    double max_ratio = 0.0;
    for (const auto& r : t.rows) {
        max_ratio = std::max(max_ratio, r.ratio);
    }
    v.C = max_ratio * (1.0 + 1e-9);
    double lowest = 0.0;
    for (const auto& r : t.rows) {
        v.ratio_ok &= r.measured <= v.C * r.rhs;
        if (r.ratio > 0.0) {
            if (lowest > 0.0) {
                v.drift = std::max(v.drift, r.ratio / lowest);
            }
            lowest = lowest > 0.0 ? std::min(lowest, r.ratio) : r.ratio;
        }
    }
    v.drift_ok = v.drift <= s.drift_limit;
    v.slope_checked = !t.degenerate && t.rows.size() >= 2;
    if (v.slope_checked) {
        v.slope_ok = t.fitted_slope <= t.theorem_exponent + s.slope_tolerance;
    }
    v.pass = v.ratio_ok && v.drift_ok && v.slope_ok;
    return v;
}

struct verify_report {
    std::vector<sweep_table> tables;
    std::vector<theorem_verdict> verdicts;
    bool pass = false;
};

inline verify_report verify(const experiment_spec& s, const verify_options& vo = {}) {
    verify_report rep;
    rep.tables = run_sweep(s);
    rep.pass = true;
    for (const auto& t : rep.tables) {
        rep.verdicts.push_back(judge(t, s, vo));
        rep.pass &= rep.verdicts.back().pass;
    }
    return rep;
}

inline ordered_json to_json(const verify_report& rep, const experiment_spec& s) {
    ordered_json theorems = ordered_json::array();
    for (std::size_t i = 0; i < rep.verdicts.size(); ++i) {
        const auto& v = rep.verdicts[i];
        theorems.push_back({{"theorem", v.theorem},
                            {"verdict", v.pass ? "PASS" : "FAIL"},
                            {"C", v.C},
                            {"drift", v.drift},
                            {"drift_limit", s.drift_limit},
                            {"ratio_ok", v.ratio_ok},
                            {"slope_checked", v.slope_checked},
                            {"slope_ok", v.slope_ok},
                            {"fitted_slope", v.fitted_slope},
                            {"theorem_exponent", v.theorem_exponent},
                            {"slope_tolerance", s.slope_tolerance},
                            {"table", to_json(rep.tables[i])}});
    }
    return {{"name", s.name},
            {"geometry", s.geometry},
            {"P", to_json(s.P)},
            {"T", to_json(s.T)},
            {"seed", s.seed},
            {"verdict", rep.pass ? "PASS" : "FAIL"},
            {"theorems", theorems}};
}

inline ordered_json sweep_to_json(const std::vector<sweep_table>& tables, const experiment_spec& s) {
    ordered_json arr = ordered_json::array();
    for (const auto& t : tables) {
        arr.push_back(to_json(t));
    }
    return {{"name", s.name}, {"geometry", s.geometry}, {"P", to_json(s.P)},
            {"T", to_json(s.T)}, {"seed", s.seed},      {"tables", arr}};
}

// ---------------------------------------------------------------------------
// Lower-bound grid data

/// Grid over u ∈ (0, 1], v ∈ [0, 3] of every lower-bound formula plus the
/// label of the region attaining the best circular bound.
inline std::string figure_data_csv(int n) {
    if (n < 2) {
        throw std::invalid_argument("figure grid needs n >= 2");
    }
    std::vector<std::string> header{"u", "v"};
    for (const auto& f : furstenberg_lower_bounds(1.0, 0.0)) {
        header.push_back(f.name);
    }
    header.push_back("region");
    csv_table out(header);
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i + 1) / n;
        for (int j = 0; j < n; ++j) {
            const double v = 3.0 * j / (n - 1);
            out.row().add(u).add(v);
            for (const auto& f : furstenberg_lower_bounds(u, v)) {
                out.add(f.value);
            }
            out.add(figure_region_label(u, v));
        }
    }
    return out.str();
}

/// Writes figure_bounds.csv into `dir` and returns its path.
inline std::string emit_figure_data(const std::string& dir, int n = 101) {
    const std::string path = dir + "/figure_bounds.csv";
    write_file(path, figure_data_csv(n));
    return path;
}

}  // namespace flab
