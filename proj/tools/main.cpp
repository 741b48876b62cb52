// gtdet: command-line harness over the library. Exit codes: 0 ok, 1 usage, 2 numeric failure,
// 3 verification failure.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "gtdet/dynamics.hpp"
#include "gtdet/errors.hpp"
#include "gtdet/fredholm.hpp"
#include "gtdet/io.hpp"
#include "gtdet/kernels.hpp"
#include "gtdet/painleve.hpp"
#include "gtdet/patterns.hpp"
#include "gtdet/rmt.hpp"
#include "gtdet/verify.hpp"

using namespace gtdet;
namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1, kExitNumeric = 2, kExitVerification = 3;

struct Common {
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    std::string name;
};

// Output files of one run plus its manifest.
class Run {
public:
    Run(std::string command, const Common& c, const CLI::App& sub) : c_(c) {
        m_.command = std::move(command);
        dir_ = output_directory(c.out);
        fs::create_directories(dir_);
        base_ = c.name.empty() ? m_.command : c.name;
        for (const CLI::Option* o : sub.get_options()) {
            if (o->get_name() == "--help" || o->get_name() == "--config" || o->get_name().empty()) continue;
            std::string key = o->get_name().substr(o->get_name().find_first_not_of('-'));
            m_.config[key] = o->count() > 0 ? o->as<std::string>() : o->get_default_str();
        }
        t0_ = std::chrono::steady_clock::now();
    }

    Format format() const { return parse_format(c_.format); }

    std::ofstream open(const std::string& suffix, const std::string& ext) {
        std::string file = base_ + suffix + "." + ext;
        m_.outputs.push_back(file);
        std::ofstream os(fs::path(dir_) / file);
        if (!os) throw ArgumentError("out: cannot write to " + (fs::path(dir_) / file).string());
        return os;
    }
    std::ofstream open_data(const std::string& suffix = "") { return open(suffix, extension(format())); }

    void check(CheckResult r) { m_.checks.push_back(std::move(r)); }
    void estimate(const std::string& key, double v) { m_.error_estimates[key] = v; }

    int finish() {
        m_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        bool ok = std::all_of(m_.checks.begin(), m_.checks.end(), [](const CheckResult& r) { return r.pass; });
        m_.exit_code = ok ? 0 : kExitVerification;
        std::ofstream os(fs::path(dir_) / (base_ + ".manifest.json"));
        os << m_.to_json().dump(2) << '\n';
        for (const auto& f : m_.outputs) std::cout << (fs::path(dir_) / f).string() << '\n';
        return m_.exit_code;
    }

private:
    const Common& c_;
    RunManifest m_;
    std::string dir_, base_;
    std::chrono::steady_clock::time_point t0_;
};

CheckResult simple_check(std::string id, std::string title, double measured, double threshold) {
    CheckResult r;
    r.id = std::move(id);
    r.title = std::move(title);
    r.measured = measured;
    r.threshold = threshold;
    r.pass = measured <= threshold;
    return r;
}

// "a,b,c;d,e,f" -> tuples
std::vector<std::vector<double>> parse_tuples(const std::string& key, const std::string& s) {
    std::vector<std::vector<double>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) {
            try {
                out.push_back(parse_list(item));
            } catch (const ArgumentError& e) {
                throw ArgumentError(key + ": " + e.what());
            }
        }
    if (out.empty()) throw ArgumentError(key + ": no entries");
    return out;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

void add_common(CLI::App* s, Common& c) {
    s->add_option("--seed", c.seed, "RNG seed; trial k uses stream k")->capture_default_str();
    s->add_option("--out", c.out, "output directory (default $GTDET_OUTPUT_DIR, else .)");
    s->add_option("--format", c.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
    s->add_option("--name", c.name, "output file stem (default: subcommand name)");
}

// key=value lines; '#' starts a comment. Keys are option names without the leading dashes.
std::vector<std::string> read_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("config: cannot read " + path);
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ArgumentError("config: line " + std::to_string(lineno) + " is not key=value");
        args.push_back("--" + trim(line.substr(0, eq)));
        args.push_back(trim(line.substr(eq + 1)));
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interlacing particle systems, determinantal kernels, Tracy-Widom and random matrices"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    Common c;
    std::string config_file;
    std::function<int(const CLI::App&)> action;

    // ---- simulate ---------------------------------------------------------------------
    int N = 3, trials = 100, steps = 10;
    double t = 1.0, p = 0.5;
    std::string dynamics = "continuous";
    auto* sim = app.add_subcommand("simulate", "Run the interlacing dynamics from the packed pattern");
    add_common(sim, c);
    sim->add_option("--N", N, "depth")->check(CLI::Range(1, 64))->capture_default_str();
    sim->add_option("--t", t, "continuous time")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--trials", trials)->check(CLI::Range(1, 1000000))->capture_default_str();
    sim->add_option("--dynamics", dynamics)->check(CLI::IsMember({"continuous", "discrete"}))->capture_default_str();
    sim->add_option("--p", p, "jump probability (discrete)")->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
    sim->add_option("--steps", steps, "steps (discrete)")->check(CLI::Range(0, 100000))->capture_default_str();
    sim->callback([&] {
        action = [&](const CLI::App& s) {
            Run run("simulate", c, s);
            auto os = run.open_data();
            TableWriter w(os, run.format(), {"trial", "level", "k", "x"});
            for (int r = 0; r < trials; ++r) {
                Engine g = make_engine(c.seed, static_cast<std::uint64_t>(r));
                GTPattern pat = packed_pattern(N);
                if (dynamics == "continuous") {
                    continuous_time_advance(pat, t, g);
                } else {
                    for (int k = 0; k < steps; ++k) sequential_update_inplace(pat, p, g);
                }
                for (int n = 1; n <= N; ++n)
                    for (int k = 0; k < n; ++k)
                        w.row({double(r), double(n), double(k + 1), double(pat.level(static_cast<std::size_t>(n))[static_cast<std::size_t>(k)])});
            }
            return run.finish();
        };
    });

    // ---- tasep ------------------------------------------------------------------------
    auto* tas = app.add_subcommand("tasep", "Compare the projected dynamics with a direct TASEP simulation");
    add_common(tas, c);
    tas->add_option("--N", N)->check(CLI::Range(1, 64))->capture_default_str();
    tas->add_option("--t", t)->check(CLI::PositiveNumber)->capture_default_str();
    tas->add_option("--trials", trials)->check(CLI::Range(2, 1000000))->capture_default_str();
    tas->callback([&] {
        action = [&](const CLI::App& s) {
            Run run("tasep", c, s);
            std::vector<std::vector<double>> proj(static_cast<std::size_t>(N)), direct(static_cast<std::size_t>(N));
            for (int r = 0; r < trials; ++r) {
                Engine g = make_engine(c.seed, 2 * static_cast<std::uint64_t>(r));
                Engine h = make_engine(c.seed, 2 * static_cast<std::uint64_t>(r) + 1);
                GTPattern pat = packed_pattern(N);
                continuous_time_advance(pat, t, g);
                auto x = project_tasep(pat);
                auto y = direct_tasep_simulate(N, t, h);
                for (int k = 0; k < N; ++k) {
                    proj[static_cast<std::size_t>(k)].push_back(double(x[static_cast<std::size_t>(k)]));
                    direct[static_cast<std::size_t>(k)].push_back(double(y[static_cast<std::size_t>(k)]));
                }
            }
            auto os = run.open_data();
            TableWriter w(os, run.format(), {"particle", "mean_projected", "mean_direct", "ks_two_sample"});
            double worst = 0.0;
            for (int k = 0; k < N; ++k) {
                auto& a = proj[static_cast<std::size_t>(k)];
                auto& b = direct[static_cast<std::size_t>(k)];
                double ma = 0, mb = 0;
                for (double v : a) ma += v;
                for (double v : b) mb += v;
                double ks = ks_two_sample(a, b);
                worst = std::max(worst, ks);
                w.row({double(k + 1), ma / trials, mb / trials, ks});
            }
            // Integer-valued samples make the KS test conservative; level 0.001, Bonferroni over N.
            double crit = std::sqrt(-0.5 * std::log(0.0005 / N)) * std::sqrt(2.0 / trials);
            run.check(simple_check("tasep-projection", "projected vs direct TASEP, two-sample KS per particle", worst, crit));
            return run.finish();
        };
    });

    // ---- kernel-eval ------------------------------------------------------------------
    std::string kind = "tasep", points;
    auto* ke = app.add_subcommand("kernel-eval", "Evaluate a correlation kernel on all pairs of points");
    add_common(ke, c);
    ke->add_option("--kind", kind)
        ->check(CLI::IsMember({"tasep", "gue", "diffusion", "gue-minor", "airy", "airy-ext"}))
        ->capture_default_str();
    ke->add_option("--points", points, "';'-separated tuples: n,t,x (tasep, gue, diffusion), n,x (gue-minor), x (airy), t,x (airy-ext)")
        ->required();
    ke->callback([&] {
        action = [&](const CLI::App& s) {
            Run run("kernel-eval", c, s);
            auto pts = parse_tuples("points", points);
            const std::map<std::string, std::size_t> arity{{"tasep", 3}, {"gue", 3}, {"diffusion", 3}, {"gue-minor", 2}, {"airy", 1}, {"airy-ext", 2}};
            for (const auto& q : pts)
                if (q.size() != arity.at(kind)) throw ArgumentError("points: kind " + kind + " needs " + std::to_string(arity.at(kind)) + " numbers per point");
            auto os = run.open_data();
            TableWriter w(os, run.format(), {"i", "j", "value", "error_estimate"});
            double worst = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = 0; j < pts.size(); ++j) {
                    const auto& a = pts[i];
                    const auto& b = pts[j];
                    double v = 0.0, e = 0.0;
                    if (kind == "tasep") {
                        auto r = tasep_spacelike_kernel_checked({int(a[0]), a[1], std::int64_t(a[2])}, {int(b[0]), b[1], std::int64_t(b[2])});
                        v = r.value;
                        e = r.error_estimate;
                    } else if (kind == "diffusion") {
                        auto r = diffusion_kernel_checked({int(a[0]), a[1], a[2]}, {int(b[0]), b[1], b[2]});
                        v = r.value;
                        e = r.error_estimate;
                    } else if (kind == "gue") {
                        v = extended_gue_kernel({int(a[0]), a[1], a[2]}, {int(b[0]), b[1], b[2]});
                    } else if (kind == "gue-minor") {
                        v = gue_minor_kernel(a[1], int(a[0]), b[1], int(b[0]));
                    } else if (kind == "airy") {
                        v = airy_kernel(a[0], b[0]);
                    } else {
                        v = extended_airy_kernel(a[1], a[0], b[1], b[0]);
                    }
                    worst = std::max(worst, e);
                    w.row({double(i), double(j), v, e});
                }
            run.estimate("max_error_estimate", worst);
            return run.finish();
        };
    });

    // ---- tw2 --------------------------------------------------------------------------
    std::string s_grid = "-5:3:0.5", method = "both";
    auto* tw = app.add_subcommand("tw2", "Tracy-Widom GUE distribution on a grid");
    add_common(tw, c);
    tw->add_option("--s-grid", s_grid, "a:b:step")->capture_default_str();
    tw->add_option("--method", method)->check(CLI::IsMember({"fredholm", "painleve", "both"}))->capture_default_str();
    tw->callback([&] {
        action = [&](const CLI::App& s) {
            Run run("tw2", c, s);
            std::vector<double> grid;
            try {
                grid = parse_grid(s_grid);
            } catch (const ArgumentError& e) {
                throw ArgumentError(std::string("s-grid: ") + e.what());
            }
            std::vector<std::string> cols{"s"};
            if (method != "painleve") cols.insert(cols.end(), {"F2", "error_estimate"});
            if (method != "fredholm") cols.push_back("F2_painleve");
            if (method == "both") cols.push_back("route_difference");
            auto os = run.open_data();
            TableWriter w(os, run.format(), cols);
            double worst_err = 0.0, worst_diff = 0.0;
            for (double sv : grid) {
                std::vector<double> row{sv};
                double f = 0.0;
                if (method != "painleve") {
                    auto r = tw2_cdf(sv);
                    f = r.value;
                    worst_err = std::max(worst_err, r.error_estimate);
                    row.insert(row.end(), {r.value, r.error_estimate});
                }
                if (method != "fredholm") {
                    double pv = tw2_cdf_painleve(sv);
                    row.push_back(pv);
                    if (method == "both") {
                        row.push_back(std::abs(pv - f));
                        worst_diff = std::max(worst_diff, std::abs(pv - f));
                    }
                }
                w.row(row);
            }
            if (method != "painleve") run.check(simple_check("tw2-error", "Fredholm error estimate on every grid point", worst_err, 1e-8));
            if (method == "both") run.check(simple_check("tw2-routes", "Fredholm vs Painleve", worst_diff, 1e-6));
            run.estimate("max_error_estimate", worst_err);
            return run.finish();
        };
    });

    // ---- airy2 ------------------------------------------------------------------------
    std::string times = "0,1", thresholds = "-1,0";
    auto* a2 = app.add_subcommand("airy2", "Joint distribution of the Airy2 process at up to four times");
    add_common(a2, c);
    a2->add_option("--times", times, "strictly increasing times")->capture_default_str();
    a2->add_option("--s", thresholds, "';'-separated threshold tuples, one value per time")->capture_default_str();
    a2->callback([&] {
        action = [&](const CLI::App& s) {
            Run run("airy2", c, s);
            auto ts = parse_tuples("times", times).front();
            auto rows = parse_tuples("s", thresholds);
            std::vector<std::string> cols;
            for (std::size_t k = 0; k < ts.size(); ++k) cols.push_back("s" + std::to_string(k + 1));
            cols.insert(cols.end(), {"value", "error_estimate"});
            auto os = run.open_data();
            TableWriter w(os, run.format(), cols);
            double worst = 0.0;
            for (auto row : rows) {
                if (row.size() != ts.size()) throw ArgumentError("s: each tuple needs one threshold per time");
                auto r = airy2_joint_cdf(ts, row);
                worst = std::max(worst, r.error_estimate);
                row.insert(row.end(), {r.value, r.error_estimate});
                w.row(row);
            }
            run.estimate("max_error_estimate", worst);
            return run.finish();
        };
    });

    // ---- tasep-cdf --------------------------------------------------------------------
    std::string tpoints = "250,1000", tthresholds = "0";
    long long depth = 0;
    auto* tc = app.add_subcommand("tasep-cdf", "P(x_n(t) >= s jointly) by the discrete Fredholm determinant");
    add_common(tc, c);
    tc->add_option("--points", tpoints, "';'-separated n,t pairs in space-like order")->capture_default_str();
    tc->add_option("--s", tthresholds, "';'-separated integer threshold tuples")->capture_default_str();
    tc->add_option("--depth", depth, "lattice window per point (0 = automatic)")->check(CLI::NonNegativeNumber)->capture_default_str();
    tc->callback([&] {
        action = [&](const CLI::App& s) {
            Run run("tasep-cdf", c, s);
            std::vector<SpaceTimePoint> pts;
            for (const auto& q : parse_tuples("points", tpoints)) {
                if (q.size() != 2 || q[0] != std::floor(q[0])) throw ArgumentError("points: need integer n and time t per point");
                pts.push_back({static_cast<int>(q[0]), q[1]});
            }
            std::vector<std::string> cols;
            for (std::size_t k = 0; k < pts.size(); ++k) cols.push_back("s" + std::to_string(k + 1));
            cols.insert(cols.end(), {"value", "error_estimate"});
            auto os = run.open_data();
            TableWriter w(os, run.format(), cols);
            double worst = 0.0;
            for (auto row : parse_tuples("s", tthresholds)) {
                if (row.size() != pts.size()) throw ArgumentError("s: each tuple needs one threshold per point");
                std::vector<std::int64_t> si;
                for (double v : row) {
                    if (v != std::floor(v)) throw ArgumentError("s: thresholds must be integers");
                    si.push_back(static_cast<std::int64_t>(v));
                }
                auto r = tasep_joint_cdf_discrete(pts, si, depth);
                worst = std::max(worst, r.error_estimate);
                row.insert(row.end(), {r.value, r.error_estimate});
                w.row(row);
            }
            run.estimate("max_error_estimate", worst);
            return run.finish();
        };
    });

    // ---- rmt-sample -------------------------------------------------------------------
    std::string ensemble = "gue", rtimes = "0", hc_a = "0,1", hc_b = "0,2", us = "0";
    int bins = 0;
    BmEdgeParams bm;
    auto* rs = app.add_subcommand("rmt-sample", "Random-matrix samples, edge statistics and the HCIZ check");
    add_common(rs, c);
    rs->add_option("--ensemble", ensemble)
        ->check(CLI::IsMember({"gue", "ou", "bm", "minors", "edge", "edge-bm", "hciz"}))
        ->capture_default_str();
    rs->add_option("--N", N)->check(CLI::Range(1, 400))->capture_default_str();
    rs->add_option("--times", rtimes, "times (ou, bm: matrix time; edge: rescaled)")->capture_default_str();
    rs->add_option("--trials", trials)->check(CLI::Range(1, 1000000))->capture_default_str();
    rs->add_option("--bins", bins, "0 writes raw samples, otherwise a CSV histogram")->check(CLI::Range(0, 100000))->capture_default_str();
    rs->add_option("--a", hc_a, "hciz: eigenvalues of A")->capture_default_str();
    rs->add_option("--b", hc_b, "hciz: eigenvalues of B")->capture_default_str();
    rs->add_option("--L", bm.L, "edge-bm: scale parameter")->check(CLI::PositiveNumber)->capture_default_str();
    rs->add_option("--eta", bm.eta)->capture_default_str();
    rs->add_option("--tau", bm.tau)->capture_default_str();
    rs->add_option("--alpha", bm.alpha)->capture_default_str();
    rs->add_option("--beta", bm.beta)->capture_default_str();
    rs->add_option("--us", us, "edge-bm: ascending u values")->capture_default_str();
    rs->callback([&] {
        action = [&](const CLI::App& s) {
            Run run("rmt-sample", c, s);
            auto ts = parse_tuples("times", rtimes).front();
            Engine g = make_engine(c.seed, 0);
            if (ensemble == "hciz") {
                auto r = hciz_check(parse_list(hc_a), parse_list(hc_b), static_cast<std::size_t>(trials), g);
                auto os = run.open_data();
                TableWriter w(os, run.format(), {"mc_estimate", "std_error", "exact_value", "z_score"});
                w.row({r.mc_estimate, r.std_error, r.exact_value, r.z_score});
                run.check(simple_check("hciz-z", "|z| of Monte Carlo vs closed form", std::abs(r.z_score), 3.0));
                return run.finish();
            }
            if (ensemble == "edge" || ensemble == "edge-bm") {
                EdgeMcResult r = ensemble == "edge" ? edge_process_mc(N, ts, g, static_cast<std::size_t>(trials))
                                                    : edge_process_bm(bm, parse_list(us), g, static_cast<std::size_t>(trials));
                const double sv = ensemble == "edge" ? 1.0 : std::sqrt(bm.tau / 2.0) / std::pow(bm.eta, 1.0 / 6.0);
                for (std::size_t k = 0; k < r.samples.size(); ++k) {
                    run.estimate("ks_to_f2_" + std::to_string(k), r.ks_to_f2[k]);
                    if (bins > 0) {
                        auto os = run.open("_t" + std::to_string(k), "csv");
                        export_histogram(os, r.samples[k], static_cast<std::size_t>(bins),
                                         [sv](double x) { return tw2_density(x / sv) / sv; }, "f2_density");
                    }
                }
                if (bins == 0) {
                    auto os = run.open_data();
                    TableWriter w(os, run.format(), {"trial", "time_index", "time", "value"});
                    for (std::size_t k = 0; k < r.samples.size(); ++k)
                        for (std::size_t i = 0; i < r.samples[k].size(); ++i) w.row({double(i), double(k), r.times[k], r.samples[k][i]});
                }
                auto os = run.open("_correlation", "csv");
                TableWriter w(os, Format::Csv, {"i", "j", "correlation"});
                for (Eigen::Index i = 0; i < r.correlation.rows(); ++i)
                    for (Eigen::Index j = 0; j < r.correlation.cols(); ++j) w.row({double(i), double(j), r.correlation(i, j)});
                return run.finish();
            }
            // Eigenvalue samples: rows (trial, time or level, k, λ).
            std::vector<double> pooled;
            std::vector<std::vector<double>> rows;
            double worst_interlace = 0.0;
            for (int tr = 0; tr < trials; ++tr) {
                if (ensemble == "gue") {
                    auto v = eigenvalues(sample_gue(N, g)).values;
                    for (std::size_t k = 0; k < v.size(); ++k) rows.push_back({double(tr), 0.0, double(k + 1), v[k]});
                } else if (ensemble == "minors") {
                    auto m = minor_eigenvalues(sample_gue(N, g));
                    worst_interlace = std::max(worst_interlace, interlacing_violation(m));
                    for (std::size_t l = 0; l < m.levels.size(); ++l)
                        for (std::size_t k = 0; k < m.levels[l].size(); ++k) rows.push_back({double(tr), double(l + 1), double(k + 1), m.levels[l][k]});
                } else {
                    std::vector<HermitianMatrix> path;
                    if (ensemble == "bm") {
                        path = sample_matrix_bm(N, ts, g);
                    } else {
                        HermitianMatrix h = sample_gue(N, g);
                        double prev = 0.0;
                        for (double tv : ts) {
                            if (!(tv >= prev)) throw ArgumentError("times: must be ascending and >= 0");
                            h = ou_step(h, tv - prev, N, g);
                            path.push_back(h);
                            prev = tv;
                        }
                    }
                    for (std::size_t q = 0; q < path.size(); ++q) {
                        auto v = eigenvalues(path[q]).values;
                        for (std::size_t k = 0; k < v.size(); ++k) rows.push_back({double(tr), ts[q], double(k + 1), v[k]});
                    }
                }
            }
            for (const auto& r : rows) pooled.push_back(r[3]);
            if (ensemble == "minors") run.check(simple_check("interlacing", "largest interlacing violation", worst_interlace, 1e-9));
            if (bins > 0) {
                auto os = run.open("", "csv");
                if (ensemble == "gue") {
                    // Exact one-point density per eigenvalue through the variance bridge.
                    const double cs = gue_to_kernel_scale(N);
                    const int n = N;
                    export_histogram(os, pooled, static_cast<std::size_t>(bins),
                                     [cs, n](double x) { return cs * gue_minor_kernel(cs * x, n, cs * x, n) / n; }, "exact_density");
                } else {
                    export_histogram(os, pooled, static_cast<std::size_t>(bins));
                }
            } else {
                auto os = run.open_data();
                TableWriter w(os, run.format(), {"trial", ensemble == "minors" ? "level" : "time", "k", "lambda"});
                for (const auto& r : rows) w.row(r);
            }
            return run.finish();
        };
    });

    // ---- verify -----------------------------------------------------------------------
    std::string suite = "exact";
    auto* ve = app.add_subcommand("verify", "Run the oracle suite");
    add_common(ve, c);
    ve->add_option("--suite", suite)->check(CLI::IsMember({"exact", "all"}))->capture_default_str();
    ve->callback([&] {
        action = [&](const CLI::App& s) {
            Run run("verify", c, s);
            auto os = run.open("", "csv");
            os << "id,pass,measured,threshold,seconds,time_limit\n";
            run_suite(suite, [&](const CheckResult& r) {
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << ": " << r.title << " | measured " << format_number(r.measured)
                          << " (threshold " << r.threshold << "), " << r.seconds << " s | " << r.detail << std::endl;
                os << r.id << ',' << (r.pass ? 1 : 0) << ',' << format_number(r.measured) << ',' << format_number(r.threshold) << ','
                   << format_number(r.seconds) << ',' << format_number(r.time_limit) << '\n';
                run.check(r);
            });
            os.close();
            return run.finish();
        };
    });

    for (auto* s : {sim, tas, ke, tw, a2, tc, rs, ve}) s->add_option("--config", config_file, "key=value file; command-line flags override it");

    // Config entries are spliced in right after the subcommand so that later flags win.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (!args.empty() && args[0].rfind("-", 0) != 0 && !app.get_subcommand_no_throw(args[0]))
            throw ArgumentError("unknown subcommand '" + args[0] + "'");
        auto it = std::find(args.begin(), args.end(), "--config");
        if (it != args.end()) {
            if (it + 1 == args.end()) throw ArgumentError("config: missing file name");
            auto extra = read_config(*(it + 1));
            std::size_t pos = args.empty() ? 0 : 1;
            args.insert(args.begin() + static_cast<long>(pos), extra.begin(), extra.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    try {
        return action(*chosen);
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RefusalError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}
