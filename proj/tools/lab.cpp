// lab: command-line front end for generation, counting, sweeps and bounds.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flab/bounds.hpp"
#include "flab/harness.hpp"
#include "flab/incidence.hpp"
#include "flab/io.hpp"
#include "flab/projections.hpp"
#include "flab/setgen.hpp"

namespace {

struct globals {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    double budget = 1e7;
    std::string out;
};

void emit(const globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
    } else {
        flab::write_file(g.out, text);
    }
}

/// Numeric rows with any dim/delta columns (as written by gen) removed.
std::vector<std::vector<double>> coordinate_rows(const std::string& text) {
    const auto csv = flab::parse_numeric_csv(text);
    std::vector<std::vector<double>> out;
    for (const auto& r : csv.rows) {
        std::vector<double> c;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i < csv.header.size() && (csv.header[i] == "dim" || csv.header[i] == "delta")) continue;
            c.push_back(r[i]);
        }
        out.push_back(std::move(c));
    }
    return out;
}

/// Families read from CSV files; radii and thicknesses follow δ (slabs 10δ).
flab::cell_families families_from_files(const std::string& geom, const std::string& ptext,
                                        const std::string& ttext, double delta) {
    flab::cell_families f;
    const auto P = coordinate_rows(ptext);
    const auto T = coordinate_rows(ttext);
    auto at = [](const std::vector<double>& r, std::size_t i) { return i < r.size() ? r[i] : 0.0; };
    for (const auto& r : P) {
        const flab::vec3 v{at(r, 0), at(r, 1), at(r, 2)};
        if (geom == "circle") {
            f.circles.push_back({{v[0], v[1]}, v[2], delta});
        } else if (geom == "sine") {
            f.strips.push_back({v, delta});
        } else {
            f.balls.push_back({v, delta});
        }
    }
    for (const auto& r : T) {
        if (geom == "slab") {
            f.slabs.push_back({at(r, 0), at(r, 1), flab::plank_slab_dilation * delta});
        } else {
            f.discs.push_back({{at(r, 0), at(r, 1)}, delta});
        }
    }
    f.nP = P.size();
    f.nT = T.size();
    return f;
}

std::vector<std::uint32_t> plain_per_curve(const flab::cell_families& f, const std::string& geom,
                                           const flab::count_options& opt) {
    if (geom == "circle") return flab::count_incidences(f.circles, f.discs, opt).per_curve;
    if (geom == "sine") return flab::count_incidences(f.strips, f.discs, opt).per_curve;
    return flab::count_incidences(f.balls, f.slabs, opt).per_curve;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discretised Furstenberg incidence lab"};
    app.require_subcommand(1);
    app.fallthrough();
    globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();
    app.add_option("--budget", g.budget, "Work budget in rasterised cells")->capture_default_str();
    app.add_option("--out", g.out, "Output file (default stdout)");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a point cloud and its Katz-Tao certificate");
    std::string gen_kind = "grid";
    int gen_dim = 2;
    double gen_alpha = 1.0, gen_delta = 1.0 / 64;
    int cantor_branches = 2, cantor_ratio = 4, cantor_depth = 3;
    std::string cert_out;
    gen->add_option("--kind", gen_kind, "grid|random|cantor|plank")->capture_default_str();
    gen->add_option("--dim", gen_dim, "Ambient dimension")->capture_default_str();
    gen->add_option("--alpha", gen_alpha, "Dimension parameter (β for plank)")->capture_default_str();
    gen->add_option("--delta", gen_delta, "Scale")->capture_default_str();
    gen->add_option("--branches", cantor_branches)->capture_default_str();
    gen->add_option("--ratio", cantor_ratio)->capture_default_str();
    gen->add_option("--depth", cantor_depth)->capture_default_str();
    gen->add_option("--cert", cert_out, "Write the certificate JSON here (default stderr)");

    // count
    auto* count = app.add_subcommand("count", "Count incidences at one scale");
    std::string c_geom = "circle", c_construction = "grid", c_mode = "plain", c_method = "indexed";
    std::string c_pfile, c_tfile;
    double c_alpha = 1.0, c_beta = 1.0, c_delta = 1.0 / 64, c_kappa = 0.25, c_R = 1.0;
    int c_A = 1;
    bool c_literal = false;
    count->add_option("--kind", c_geom, "circle|sine|slab")->capture_default_str();
    count->add_option("--p", c_pfile, "Curve/ball CSV: x,y,t | a,b,c | x,y,z");
    count->add_option("--t", c_tfile, "Disc/slab CSV: x,y | theta,offset");
    count->add_option("--construction", c_construction, "grid|random|plank when no files are given")
        ->capture_default_str();
    count->add_option("--alpha", c_alpha, "Dimension of the discs/slabs")->capture_default_str();
    count->add_option("--beta", c_beta, "Dimension of the curves/balls")->capture_default_str();
    count->add_option("--delta", c_delta)->capture_default_str();
    count->add_option("--mode", c_mode, "plain|tri|broad")->capture_default_str();
    count->add_option("--method", c_method, "indexed|brute (plain, tri) or greedy|exact (broad)")
        ->capture_default_str();
    count->add_option("--kappa", c_kappa)->capture_default_str();
    count->add_option("--A", c_A)->capture_default_str();
    count->add_option("--R", c_R)->capture_default_str();
    count->add_flag("--broad-literal", c_literal, "Sine waves: the global-profile broad count");

    // sweep / verify
    auto* sweep = app.add_subcommand("sweep", "Run a dyadic sweep from an experiment spec");
    auto* verify = app.add_subcommand("verify", "Run a sweep and issue per-theorem verdicts");
    std::string spec_path;
    std::string json_out;
    double inflate = 1.0;
    sweep->add_option("--spec", spec_path, "ExperimentSpec JSON")->required();
    sweep->add_option("--json", json_out, "Also write the tables as JSON");
    verify->add_option("--spec", spec_path, "ExperimentSpec JSON")->required();
    verify->add_option("--inflate-last", inflate, "Test hook: scale the last measured value");

    // project
    auto* proj = app.add_subcommand("project", "Covering numbers of restricted projections");
    std::string p_kind = "pi", theta_file, cloud_file;
    double p_delta = 1.0 / 64;
    bool p_jarnik = false;
    double j_t = 1.5, j_s = 0.6, j_eps = 0.0;
    long long j_nj = 256;
    proj->add_option("--kind", p_kind, "rho|pi")->capture_default_str();
    proj->add_option("--theta-file", theta_file, "One angle per line");
    proj->add_option("--cloud-file", cloud_file, "CSV of x,y,z");
    proj->add_option("--delta", p_delta)->capture_default_str();
    proj->add_flag("--jarnik", p_jarnik, "Run the rational-angle experiment instead");
    proj->add_option("--t", j_t)->capture_default_str();
    proj->add_option("--s", j_s)->capture_default_str();
    proj->add_option("--epsilon", j_eps)->capture_default_str();
    proj->add_option("--nj", j_nj)->capture_default_str();

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Dimension lower bounds and grid data");
    double b_u = 1.0, b_v = 0.5;
    int b_grid = 0;
    std::string b_invert;
    bounds->add_option("--u", b_u)->capture_default_str();
    bounds->add_option("--v", b_v)->capture_default_str();
    bounds->add_option("--grid", b_grid, "Emit an n×n CSV grid over (u, v)");
    bounds->add_option("--invert", b_invert, "circle_ls|circle_l2|sine_smallcap|circle_broad_g|sine_trilinear");

    // check-cinematic
    auto* cin = app.add_subcommand("check-cinematic", "Rotational and cinematic determinants");
    std::string cin_g = "sine";
    double x1 = 0.0, x2 = 0.0, y1 = 0.3, tt = 1.0;
    cin->add_option("--g", cin_g, "sine|circle")->capture_default_str();
    cin->add_option("--x1", x1)->capture_default_str();
    cin->add_option("--x2", x2)->capture_default_str();
    cin->add_option("--y1", y1)->capture_default_str();
    cin->add_option("--t", tt)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    using flab::ordered_json;
    try {
        if (*gen) {
            flab::point_cloud c;
            double alpha = gen_alpha;
            if (gen_kind == "grid") {
                c = flab::make_grid_set(gen_dim, gen_alpha, gen_delta);
            } else if (gen_kind == "random") {
                c = flab::make_random_set(gen_dim, gen_alpha, gen_delta, g.seed);
            } else if (gen_kind == "cantor") {
                c = flab::make_cantor_set(gen_dim, cantor_branches, cantor_ratio, cantor_depth);
                alpha = std::log(static_cast<double>(cantor_branches)) / std::log(static_cast<double>(cantor_ratio));
            } else if (gen_kind == "plank") {
                c = flab::make_plank_sharpness_example(gen_alpha, gen_delta).P_cloud;
            } else {
                throw std::invalid_argument("unknown kind: " + gen_kind);
            }
            flab::kt_options kt;
            kt.exec.threads = g.threads;
            const auto cert = flab::katz_tao_constant(c, alpha, kt);
            ordered_json j{{"kind", gen_kind},           {"dim", c.dim},
                           {"delta", c.delta},           {"points", c.size()},
                           {"alpha", cert.alpha},        {"K_lower", cert.K_lower},
                           {"K_upper", cert.K_upper},    {"argmax_radius", cert.argmax_radius},
                           {"exhaustive", cert.exhaustive}};
            emit(g, flab::cloud_to_csv(c));
            if (cert_out.empty()) {
                std::cerr << flab::dump_json(j);
            } else {
                flab::write_file(cert_out, flab::dump_json(j));
            }
        } else if (*count) {
            flab::experiment_spec s;
            s.geometry = c_geom;
            s.P = {c_construction, c_beta, 0};
            s.T = {c_construction, c_alpha, 0};
            s.seed = g.seed;
            s.kappa = c_kappa;
            s.broad = {c_A, c_R, c_method == "exact" ? flab::broad_mode::exact : flab::broad_mode::greedy,
                       c_literal};
            const auto f = (c_pfile.empty() || c_tfile.empty())
                               ? flab::build_families(s, c_delta)
                               : families_from_files(c_geom, flab::read_file(c_pfile),
                                                     flab::read_file(c_tfile), c_delta);
            flab::count_options opt;
            opt.exec.threads = g.threads;
            opt.work_budget = g.budget;
            opt.method = c_method == "brute" ? flab::count_method::brute : flab::count_method::indexed;
            const auto t0 = std::chrono::steady_clock::now();
            const double total = flab::measure_cell(f, c_mode, s, opt);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            const auto per = plain_per_curve(f, c_geom, opt);
            std::uint64_t lo = per.empty() ? 0 : per.front(), hi = 0, sum = 0;
            for (auto v : per) {
                lo = std::min<std::uint64_t>(lo, v);
                hi = std::max<std::uint64_t>(hi, v);
                sum += v;
            }
            ordered_json summary{{"curves", per.size()},
                                 {"min", lo},
                                 {"max", hi},
                                 {"mean", per.empty() ? 0.0 : static_cast<double>(sum) / per.size()}};
            ordered_json j{{"kind", c_geom},      {"mode", c_mode},
                           {"delta", c_delta},    {"nP", f.nP},
                           {"nT", f.nT},          {"total", total},
                           {"per_curve_summary", summary}, {"elapsed_ms", ms},
                           {"method", c_method}};
            emit(g, flab::dump_json(j));
        } else if (*sweep || *verify) {
            auto s = flab::spec_from_json(ordered_json::parse(flab::read_file(spec_path)));
            if (app.get_option("--seed")->count()) s.seed = g.seed;
            if (app.get_option("--threads")->count()) s.threads = g.threads;
            if (app.get_option("--budget")->count()) s.budget = g.budget;
            if (*sweep) {
                const auto tables = flab::run_sweep(s);
                const std::string csv = flab::tables_to_csv(tables);
                const std::string js = flab::dump_json(flab::sweep_to_json(tables, s));
                emit(g, csv);
                if (!s.csv_path.empty()) flab::write_file(s.csv_path, csv);
                if (!json_out.empty()) flab::write_file(json_out, js);
                if (!s.json_path.empty()) flab::write_file(s.json_path, js);
            } else {
                flab::verify_options vo;
                vo.inflate_last = inflate;
                const auto rep = flab::verify(s, vo);
                emit(g, flab::dump_json(flab::to_json(rep, s)));
                return rep.pass ? 0 : 1;
            }
        } else if (*proj) {
            if (p_jarnik) {
                flab::jarnik_options jo;
                jo.exec.threads = g.threads;
                const auto rep = flab::run_jarnik_experiment(j_t, j_s, j_eps, j_nj, jo);
                flab::csv_table t({"theta", "p", "q", "covering_count", "bound", "ratio", "distinct_values",
                                   "value_bound"});
                for (const auto& r : rep.rows) {
                    t.row().add(r.theta).add(r.p).add(r.q).add(r.covering_count).add(r.bound).add(r.ratio)
                        .add(r.distinct_values).add(r.value_bound);
                }
                emit(g, t.str());
            } else {
                if (theta_file.empty() || cloud_file.empty()) {
                    throw std::invalid_argument("project needs --theta-file and --cloud-file (or --jarnik)");
                }
                const auto cloud = flab::cloud_from_csv(flab::read_file(cloud_file), p_delta);
                const auto thetas = flab::parse_numeric_csv(flab::read_file(theta_file)).rows;
                const auto kind = flab::parse_projection_kind(p_kind);
                flab::csv_table t({"theta", "covering_count", "bound", "ratio"});
                // Trivial bound: the number of projected points.
                const double bound = static_cast<double>(cloud.size());
                for (const auto& row : thetas) {
                    const double th = row.at(0);
                    const auto n = flab::covering_number(flab::project(kind, th, cloud), p_delta);
                    t.row().add(th).add(n).add(bound).add(bound > 0 ? static_cast<double>(n) / bound : 0.0);
                }
                emit(g, t.str());
            }
        } else if (*bounds) {
            if (b_grid > 0) {
                emit(g, flab::figure_data_csv(b_grid));
            } else if (!b_invert.empty()) {
                const double d = flab::invert_to_dim_bound(flab::parse_exponent_family(b_invert), b_u, b_v);
                ordered_json j{{"family", b_invert}, {"u", b_u}, {"v", b_v}, {"dim_bound", d}};
                emit(g, flab::dump_json(j));
            } else {
                ordered_json arr = ordered_json::array();
                for (const auto& f : flab::furstenberg_lower_bounds(b_u, b_v)) {
                    arr.push_back({{"name", f.name},
                                   {"value", f.value},
                                   {"region", f.region},
                                   {"provenance", flab::to_string(f.source)}});
                }
                emit(g, flab::dump_json(arr));
            }
        } else if (*cin) {
            const auto fn = cin_g == "circle" ? flab::circle_g() : flab::sine_wave_g();
            const auto v = flab::cinematic_check(fn, {x1, x2}, y1, tt);
            ordered_json j{{"g", cin_g}, {"rotational", v.rotational}, {"cinematic", v.cinematic}};
            emit(g, flab::dump_json(j));
        }
    } catch (const std::exception& e) {
        std::cerr << "lab: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
