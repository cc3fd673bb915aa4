// cli.cpp - nhsw subcommands: spectrum, quench, observe, single-mode, steady-state, lightcone, reproduce

#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nhsw/nhsw.hpp"

namespace nhsw::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<std::string> subcommands = {"spectrum", "quench", "observe", "single-mode",
                                              "steady-state", "lightcone", "reproduce"};

const std::vector<std::string> reproduce_targets = {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6",
                                                    "fig7", "fig8", "fig9", "appendix-H", "appendix-I"};

struct ParamFlags {
    std::string config;
    std::optional<double> J, h, gamma, gamma_prime;
    std::optional<int> dimension, n_sites;

    void attach(CLI::App* app) {
        app->set_help_flag("--help", "print this help and exit");  // frees --h for the field
        app->add_option("--config", config, "key = value file with defaults (J, h, gamma, gamma_prime, dimension, n_sites)");
        app->add_option("--J", J, "nearest-neighbour coupling");
        app->add_option("--h", h, "transverse field");
        app->add_option("--gamma", gamma, "dissipation strength");
        app->add_option("--gamma-prime,--gamma_prime", gamma_prime, "quartic non-Hermitian strength (single mode)");
        app->add_option("--dim,--dimension", dimension, "lattice dimension");
        app->add_option("--n-sites,--n_sites", n_sites, "sites per axis (even)");
    }

    ModelParams resolve(ModelParams base) const {
        if (!config.empty()) base = load_params(config, base);
        if (J) base.J = *J;
        if (h) base.h = *h;
        if (gamma) base.gamma = *gamma;
        if (gamma_prime) base.gamma_prime = *gamma_prime;
        if (dimension) base.dimension = *dimension;
        if (n_sites) base.n_sites = *n_sites;
        validate(base);
        return base;
    }
};

class Clock {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

json divergence_json(const std::optional<Divergence>& d) {
    if (!d) return nullptr;
    return {{"mode", d->mode}, {"t_lower", d->t_lower}, {"t_upper", d->t_upper}, {"cap", d->cap}};
}

// Writes the table to path ("-" for the output stream) and appends its manifest.
void emit(const Table& t, const std::string& path, RunManifest m, const Clock& clock, std::ostream& out) {
    if (path == "-") {
        write_csv(t, out);
        return;
    }
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    write_csv(t, path);
    m.outputs = {path};
    m.wall_seconds = clock.seconds();
    append_manifest(m, path);
}

void warn_dimension(const ModelParams& p, std::ostream& err) {
    if (untested_dimension(p)) err << "warning: dimension " << p.dimension << " > 3 is untested\n";
}

Flavor flavor_option(const std::string& s) { return parse_flavor(s); }

// ---- spectrum ----------------------------------------------------------------------------------

struct SpectrumCmd {
    ParamFlags params;
    std::string flavor = "boson";
    std::string out = "-";

    void attach(CLI::App& app) {
        auto* c = app.add_subcommand("spectrum", "complex dispersion and Bogolyubov angle on the momentum grid");
        params.attach(c);
        c->add_option("--flavor", flavor, "boson or fermion");
        c->add_option("--out", out, "output CSV, '-' for stdout");
    }

    int run(std::ostream& out_s, std::ostream& err) {
        Clock clock;
        const ModelParams p = params.resolve({});
        warn_dimension(p, err);
        const Spectrum s = spectrum_over_grid(flavor_option(flavor), p);
        if (const auto w = s.warnings())
            err << "warning: " << w << " grid point(s) with |b/a| >= 1; principal-branch angles may jump there\n";
        RunManifest m;
        m.subcommand = "spectrum";
        m.parameters = params_json(p);
        m.parameters["flavor"] = flavor;
        emit(spectrum_table(s), out, m, clock, out_s);
        return 0;
    }
};

// ---- quench ------------------------------------------------------------------------------------

struct QuenchCmd {
    ParamFlags params;
    std::string flavor = "boson";
    std::string out = "trajectory.csv";
    double t_start = 0.0, t_end = 13.0, dt = 1e-3, cap = 1e6;
    int steps = 300;
    int workers = default_workers();
    bool full_grid = false;

    void attach(CLI::App& app) {
        auto* c = app.add_subcommand("quench", "integrate the mode equations after switching on gamma");
        params.attach(c);
        c->add_option("--flavor", flavor, "boson or fermion");
        c->add_option("--t-start", t_start, "first sample time");
        c->add_option("--t-end", t_end, "last sample time");
        c->add_option("--steps", steps, "number of output intervals");
        c->add_option("--dt", dt, "RK4 step");
        c->add_option("--cap", cap, "divergence cap on |G|");
        c->add_option("--workers", workers, "threads for the mode-parallel integration");
        c->add_flag("--full-grid", full_grid, "integrate every mode instead of one per reflection orbit");
        c->add_option("--out", out, "trajectory CSV, '-' for stdout");
    }

    int run(std::ostream& out_s, std::ostream& err) {
        Clock clock;
        QuenchSpec spec;
        spec.post = params.resolve({});
        warn_dimension(spec.post, err);
        spec.pre = spec.post;
        spec.pre.gamma = 0.0;
        spec.t_start = t_start;
        spec.t_end = t_end;
        spec.steps = steps;
        spec.dt = dt;
        spec.cap = cap;
        const Trajectory tr = run_quench(flavor_option(flavor), spec, {workers, !full_grid});
        RunManifest m;
        m.subcommand = "quench";
        m.parameters = params_json(spec.post);
        m.parameters["flavor"] = flavor;
        m.integrator = {{"method", "rk4"}, {"dt", dt}, {"t_start", t_start}, {"t_end", t_end},
                        {"steps", steps}, {"cap", cap}, {"symmetry_reduced", !full_grid}};
        m.divergence = divergence_json(tr.divergence);
        emit(trajectory_table(tr), out, m, clock, out_s);
        if (tr.divergence)
            err << "divergence: |G| exceeded " << tr.divergence->cap << " in mode " << tr.divergence->mode
                << " between t = " << tr.divergence->t_lower << " and " << tr.divergence->t_upper
                << "; samples stop at t = " << tr.times.back() << "\n";
        return 0;
    }
};

// ---- observe -----------------------------------------------------------------------------------

struct ObserveCmd {
    ParamFlags params;
    std::optional<std::string> flavor;
    std::string input;
    std::string observable = "one_body";
    std::string out = "-";
    int r_min = 0, r_max = 30, half_width = 25;
    double sigma = 1.0;
    std::string guess_dispersion = "A";
    std::optional<double> t_end;
    int steps = 300;
    int workers = default_workers();

    void attach(CLI::App& app) {
        auto* c = app.add_subcommand("observe", "real-space observables from a mode trajectory");
        params.attach(c);
        c->add_option("--input", input, "trajectory CSV written by quench");
        c->add_option("--observable", observable, "one_body, zz, magnetization or guess")
            ->check(CLI::IsMember({"one_body", "zz", "magnetization", "guess"}));
        c->add_option("--flavor", flavor, "boson or fermion (default: from the trajectory manifest)");
        c->add_option("--r-min", r_min, "smallest distance (1D)");
        c->add_option("--r-max", r_max, "largest distance (1D)");
        c->add_option("--half-width", half_width, "square half width (2D)");
        c->add_option("--sigma", sigma, "guess envelope width");
        c->add_option("--guess-dispersion", guess_dispersion, "A (coefficient) or E (exact dispersion)")
            ->check(CLI::IsMember({"A", "E"}));
        c->add_option("--t-end", t_end, "guess without --input: last time");
        c->add_option("--steps", steps, "guess without --input: number of intervals");
        c->add_option("--workers", workers, "threads");
        c->add_option("--out", out, "output CSV, '-' for stdout");
    }

    int run(std::ostream& out_s, std::ostream& err) {
        Clock clock;
        ModelParams base;
        Flavor fl = Flavor::bosonic;
        RunManifest m;
        m.subcommand = "observe";
        if (!input.empty()) {
            if (auto prev = last_manifest(input)) {
                const auto& pj = (*prev)["parameters"];
                base.J = pj.value("J", base.J);
                base.h = pj.value("h", base.h);
                base.gamma = pj.value("gamma", base.gamma);
                base.dimension = pj.value("dimension", base.dimension);
                base.n_sites = pj.value("n_sites", base.n_sites);
                fl = parse_flavor(pj.value("flavor", std::string("boson")));
            }
            m.inputs[input] = file_digest(input);
        }
        if (flavor) fl = parse_flavor(*flavor);
        const ModelParams p = params.resolve(base);
        m.parameters = params_json(p);
        m.parameters["flavor"] = to_string(fl);
        m.parameters["observable"] = observable;

        const auto distances = [&] {
            if (p.dimension == 1) return line_offsets(r_min, r_max);
            if (p.dimension == 2) return square_offsets(half_width);
            throw domain_error("observables are written for dimension 1 or 2");
        };

        if (observable == "guess") {
            std::vector<double> times;
            if (!input.empty()) times = trajectory_from_table(read_csv(input), fl, p).times;
            else times = sample_times(0.0, t_end.value_or(13.0), steps);
            m.parameters["sigma"] = sigma;
            m.parameters["guess_dispersion"] = guess_dispersion;
            const CorrelationField f = guess_correlation(
                p, {sigma}, distances(), times, guess_dispersion == "E" ? GuessDispersion::exact : GuessDispersion::coefficient);
            emit(field_table(f), out, m, clock, out_s);
            return 0;
        }
        if (input.empty()) throw domain_error("--input is required for observable " + observable);
        const Trajectory tr = trajectory_from_table(read_csv(input), fl, p);
        if (observable == "magnetization") {
            const auto s = magnetization(tr);
            Table t{{"t", "Sz"}, {}};
            for (std::size_t i = 0; i < s.size(); ++i) t.add({format_double(tr.times[i]), format_double(s[i])});
            emit(t, out, m, clock, out_s);
        } else if (observable == "zz") {
            emit(field_table(zz_correlation(tr, distances(), workers), true), out, m, clock, out_s);
        } else {
            if (fl == Flavor::fermionic) err << "note: one-body field of a fermionic trajectory is a diagnostic only\n";
            emit(field_table(one_body_correlation(tr, distances(), workers)), out, m, clock, out_s);
        }
        return 0;
    }
};

// ---- single-mode -------------------------------------------------------------------------------

struct SingleModeCmd {
    ParamFlags params;
    std::string engine = "ed";
    int n_max = 10;
    double t_end = 10.0, dt = 1e-3, cap = 1e6;
    int steps = 1000;
    bool print_tf = false, print_tf_prime = false;
    std::string out = "-";

    void attach(CLI::App& app) {
        auto* c = app.add_subcommand("single-mode", "k = 0 mode: truncated-Fock ED or equations of motion");
        params.attach(c);
        c->add_option("--engine", engine, "ed or eom")->check(CLI::IsMember({"ed", "eom"}));
        c->add_option("--n-max", n_max, "Fock truncation");
        c->add_option("--t-end", t_end, "last sample time");
        c->add_option("--steps", steps, "number of output intervals");
        c->add_option("--dt", dt, "RK4 step (eom)");
        c->add_option("--cap", cap, "divergence cap on G (eom)");
        c->add_flag("--tf", print_tf, "print the divergence time from the ground-state squeezing");
        c->add_flag("--tf-prime", print_tf_prime, "print the nonlinearity onset time (needs --gamma-prime > 0)");
        c->add_option("--out", out, "output CSV, '-' for stdout");
    }

    int run(std::ostream& out_s, std::ostream& err) {
        Clock clock;
        const ModelParams p = params.resolve({});
        ModelParams herm = p;
        herm.gamma = 0.0;
        herm.gamma_prime = 0.0;
        const GroundState gs = ground_state_hermitian(herm, n_max);
        const auto times = sample_times(0.0, t_end, steps);
        RunManifest m;
        m.subcommand = "single-mode";
        m.parameters = params_json(p);
        m.parameters["engine"] = engine;
        m.parameters["n_max"] = n_max;
        m.integrator = {{"t_end", t_end}, {"steps", steps}};
        SingleModeSeries s;
        if (engine == "ed") {
            m.integrator["method"] = "dense matrix exponential";
            s = evolve_ed(build_single_mode_hamiltonian(p, n_max), gs.state, times);
        } else {
            m.integrator["method"] = "rk4";
            m.integrator["dt"] = dt;
            m.integrator["cap"] = cap;
            const SingleModeEomResult r = evolve_eom(p, single_mode_initial(p), times, dt, cap);
            m.divergence = divergence_json(r.divergence);
            if (r.divergence)
                err << "divergence: G exceeded " << cap << " between t = " << r.divergence->t_lower << " and "
                    << r.divergence->t_upper << "\n";
            s = r.series;
        }
        Table t{{"t", "G", "Re_F", "Im_F", "norm_log"}, {}};
        for (std::size_t i = 0; i < s.g.size(); ++i)
            t.add({format_double(s.times[i]), format_double(s.g[i]), format_double(s.f[i].real()),
                   format_double(s.f[i].imag()), format_double(s.norm_log[i])});
        // Summary lines go to stderr when the CSV occupies stdout.
        std::ostream& info = out == "-" ? err : out_s;
        if (print_tf) {
            info << "squeezing r=" << format_double(gs.squeeze.r) << " phi=" << format_double(gs.squeeze.phi) << "\n";
            info << "t_f=" << format_double(divergence_time(gs.squeeze, p.gamma)) << "\n";
        }
        if (print_tf_prime) {
            ModelParams lin = p;
            lin.gamma_prime = 0.0;
            const auto onset = nonlinearity_onset(build_single_mode_hamiltonian(lin, n_max), gs.state, p.gamma,
                                                  p.gamma_prime, t_end);
            info << "t_f_prime=" << (onset ? format_double(*onset) : std::string("not-reached")) << "\n";
        }
        emit(t, out, m, clock, out_s);
        return 0;
    }
};

// ---- steady-state ------------------------------------------------------------------------------

struct SteadyStateCmd {
    ParamFlags params;
    std::string flavor = "boson";
    std::string out = "-";
    int workers = default_workers();

    void attach(CLI::App& app) {
        auto* c = app.add_subcommand("steady-state", "stationary occupations for gamma < 0");
        params.attach(c);
        c->add_option("--flavor", flavor, "boson or fermion");
        c->add_option("--workers", workers, "threads");
        c->add_option("--out", out, "per-k CSV, '-' for stdout");
    }

    int run(std::ostream& out_s, std::ostream& err) {
        Clock clock;
        const ModelParams p = params.resolve({});
        warn_dimension(p, err);
        const StationarySolution sol = solve_stationary(flavor_option(flavor), p, workers);
        Table t;
        if (p.dimension == 1) t.header = {"k"};
        else
            for (int d = 0; d < p.dimension; ++d) t.header.push_back("k_" + std::to_string(d + 1));
        t.header.push_back("selected_G");
        t.header.push_back("residual");
        for (const auto& r : sol.roots) {
            std::vector<std::string> row;
            for (double k : sol.grid.momentum(r.k)) row.push_back(format_double(k));
            row.push_back(format_double(r.selected));
            row.push_back(format_double(r.residual));
            t.add(std::move(row));
        }
        RunManifest m;
        m.subcommand = "steady-state";
        m.parameters = params_json(p);
        m.parameters["flavor"] = flavor;
        emit(t, out, m, clock, out_s);
        (out == "-" ? err : out_s) << "stationary_magnetization=" << format_double(sol.magnetization) << "\n";
        return 0;
    }
};

// ---- lightcone ---------------------------------------------------------------------------------

void print_fit(std::ostream& os, const std::string& label, const EdgeFit& f) {
    os << label << " velocity=" << format_double(f.velocity) << " intercept=" << format_double(f.intercept)
       << " rms=" << format_double(f.rms) << " threshold=" << format_double(f.threshold)
       << " points=" << f.points.size() << "\n";
}

struct LightconeCmd {
    std::string input;
    std::string mode = "edge";
    std::optional<double> threshold;
    std::optional<int> r_min, r_max;
    double max_jump = 0.3;
    std::size_t max_ridges = 0;
    bool keep_initial = false;
    std::string out_points;

    void attach(CLI::App& app) {
        auto* c = app.add_subcommand("lightcone", "edge and ridge velocities from an observable CSV");
        c->set_help_flag("--help", "print this help and exit");
        c->add_option("--input", input, "field CSV written by observe")->required();
        c->add_option("--mode", mode, "edge, ridges (1D), axis or radial (2D)")
            ->check(CLI::IsMember({"edge", "ridges", "axis", "radial"}));
        c->add_option("--threshold", threshold, "fraction of the field maximum (default 1e-3 in 1D, 1e-2 per slice in 2D)");
        c->add_option("--r-min", r_min, "1D window lower distance");
        c->add_option("--r-max", r_max, "1D window upper distance");
        c->add_option("--max-jump", max_jump, "ridge linking: largest time shift between neighbouring distances");
        c->add_option("--max-ridges", max_ridges, "ridges to report (0 = all)");
        c->add_flag("--keep-initial", keep_initial, "keep distances already active at the first sample");
        c->add_option("--out-points", out_points, "CSV of the fitted point set");
    }

    int run(std::ostream& out_s, std::ostream&) {
        Clock clock;
        CorrelationField f = field_from_table(read_csv(input));
        RunManifest m;
        m.subcommand = "lightcone";
        m.inputs[input] = file_digest(input);
        m.parameters = {{"mode", mode}, {"max_jump", max_jump}, {"keep_initial", keep_initial}};
        EdgeFit fit;
        if (mode == "axis" || mode == "radial") {
            const double thr = threshold.value_or(1e-2);
            fit = radial_edge_2d(f, {thr, mode == "axis" ? EdgeMode::axis : EdgeMode::radial});
            print_fit(out_s, mode, fit);
        } else {
            if (r_min || r_max) f = window(f, r_min.value_or(-1 << 30), r_max.value_or(1 << 30));
            const double thr = threshold.value_or(1e-3);
            if (mode == "edge") {
                fit = edge_velocity(f, {thr, !keep_initial});
                print_fit(out_s, "edge", fit);
            } else {
                RidgeOptions o;
                o.threshold_fraction = thr;
                o.max_jump = max_jump;
                o.max_ridges = max_ridges;
                const RidgeReport rep = track_extrema(f, o);
                if (rep.ridges.empty()) throw domain_error("no ridge with at least 3 linked extrema");
                for (std::size_t i = 0; i < rep.ridges.size(); ++i)
                    print_fit(out_s, (rep.dominant && *rep.dominant == i) ? "ridge dominant" : "ridge", rep.ridges[i]);
                fit = rep.ridges[rep.dominant.value_or(0)];
            }
        }
        m.parameters["threshold"] = fit.threshold;
        if (!out_points.empty()) emit(points_table(fit), out_points, m, clock, out_s);
        return 0;
    }
};

// ---- reproduce ---------------------------------------------------------------------------------

struct Reproducer {
    Reproducer(fs::path d, int w, std::ostream& l) : dir(std::move(d)), workers(w), log(l) {}

    fs::path dir;
    int workers;
    std::ostream& log;
    Clock clock;
    std::ostringstream summary;

    void write(const std::string& name, const Table& t, const json& params) {
        RunManifest m;
        m.subcommand = "reproduce";
        m.parameters = params;
        emit(t, (dir / name).string(), m, clock, log);
    }

    void finish(const std::string& target, const std::string& gnuplot) {
        std::ofstream(dir / (target + ".gp")) << gnuplot;
        std::ofstream(dir / (target + "_summary.txt")) << summary.str();
        log << summary.str();
    }

    static Table magnetization_table(const std::vector<std::pair<std::string, std::vector<double>>>& cols,
                                     const std::vector<double>& times) {
        Table t{{"t"}, {}};
        for (const auto& c : cols) t.header.push_back(c.first);
        for (std::size_t i = 0; i < times.size(); ++i) {
            std::vector<std::string> row{format_double(times[i])};
            for (const auto& c : cols) row.push_back(format_double(c.second[i]));
            t.add(std::move(row));
        }
        return t;
    }

    static Table series_table(const SingleModeSeries& s) {
        Table t{{"t", "G", "Re_F", "Im_F", "norm_log"}, {}};
        for (std::size_t i = 0; i < s.g.size(); ++i)
            t.add({format_double(s.times[i]), format_double(s.g[i]), format_double(s.f[i].real()),
                   format_double(s.f[i].imag()), format_double(s.norm_log[i])});
        return t;
    }

    void fig1() {
        std::string gp = "set datafile separator ','\nset multiplot layout 4,2\n";
        for (auto [h, g] : std::vector<std::pair<double, double>>{{20, 10}, {2, 1}, {0.5, 1}, {0.1, 1}}) {
            ModelParams p;
            p.J = 1;
            p.h = h;
            p.gamma = g;
            p.n_sites = 256;
            const std::string tag = "fig1_h" + format_double(h) + "_g" + format_double(g);
            for (Flavor fl : {Flavor::bosonic, Flavor::fermionic}) {
                const Spectrum s = spectrum_over_grid(fl, p);
                json pj = params_json(p);
                pj["flavor"] = to_string(fl);
                write(tag + "_" + to_string(fl) + ".csv", spectrum_table(s), pj);
                summary << tag << " " << to_string(fl) << ": " << s.warnings() << " branch warning(s)\n";
            }
            gp += "set title 'h=" + format_double(h) + ", gamma=" + format_double(g) + "'\n";
            gp += "plot '" + tag + "_boson.csv' u 1:2 w l t 'Re E', '" + tag + "_fermion.csv' u 1:2 w l dt 2 t 'Re eps'\n";
            gp += "plot '" + tag + "_boson.csv' u 1:3 w l t 'Im E', '" + tag + "_fermion.csv' u 1:3 w l dt 2 t 'Im eps'\n";
        }
        finish("fig1", gp + "unset multiplot\n");
    }

    void fig2() {
        LightCone1DSettings s;
        s.workers = workers;
        const ModelParams p = chain_params(0.2);
        const LightCone1D lc = lightcone_1d(p, s);
        const json pj = params_json(p);
        write("fig2_eom.csv", field_table(lc.eom), pj);
        write("fig2_guess.csv", field_table(lc.guess), pj);
        write("fig2_edge_eom.csv", points_table(lc.edge_eom), pj);
        write("fig2_edge_guess.csv", points_table(lc.edge_guess), pj);
        summary << "window R in [" << s.window_min << ", " << s.window_max << "], threshold " << s.threshold << "\n";
        summary << "V_CE eom=" << format_double(lc.edge_eom.velocity) << " guess=" << format_double(lc.edge_guess.velocity) << "\n";
        if (lc.ridges_eom.dominant)
            summary << "V_m eom=" << format_double(lc.ridges_eom.ridges[*lc.ridges_eom.dominant].velocity) << "\n";
        if (lc.ridges_guess.dominant)
            summary << "V_m guess=" << format_double(lc.ridges_guess.ridges[*lc.ridges_guess.dominant].velocity) << "\n";
        finish("fig2",
               "set datafile separator ','\nset pm3d map\nset multiplot layout 2,1\n"
               "splot 'fig2_eom.csv' u 1:2:3 every ::1 w pm3d t 'G_R(t) EoM'\n"
               "splot 'fig2_guess.csv' u 1:2:3 every ::1 w pm3d t 'guess'\nunset multiplot\n");
    }

    void single_mode_pair(const std::string& tag, double gamma, double t_end) {
        const ModelParams p = chain_params(gamma);
        ModelParams herm = p;
        herm.gamma = 0;
        const GroundState gs = ground_state_hermitian(herm, 10);
        const auto times = sample_times(0, t_end, static_cast<int>(std::lround(t_end * 100)));
        const SingleModeSeries ed = evolve_ed(build_single_mode_hamiltonian(p, 10), gs.state, times);
        const SingleModeEomResult eom = evolve_eom(p, single_mode_initial(p), times);
        json pj = params_json(p);
        pj["n_max"] = 10;
        write(tag + "_ed.csv", series_table(ed), pj);
        write(tag + "_eom.csv", series_table(eom.series), pj);
        summary << "squeezing r=" << format_double(gs.squeeze.r) << "\n";
        if (gamma > 0) summary << "t_f=" << format_double(divergence_time(gs.squeeze, gamma)) << "\n";
        if (eom.divergence) summary << "EoM blow-up near t=" << format_double(eom.divergence->time()) << "\n";
        finish(tag, "set datafile separator ','\nset logscale y\nplot '" + tag + "_ed.csv' u 1:2 w l t 'ED', '" + tag +
                        "_eom.csv' u 1:2 w l dt 2 t 'EoM'\n");
    }

    void fig4() {
        ModelParams p = chain_params(0.2, 100);
        p.dimension = 2;
        LightCone2DSettings s;
        s.workers = workers;
        const LightCone2D lc = lightcone_2d(p, s);
        const json pj = params_json(p);
        write("fig4_field.csv", field_table(lc.field), pj);
        write("fig4_axis_points.csv", points_table(lc.axis), pj);
        summary << "per-slice threshold " << s.threshold << "\n";
        summary << "axis V_CE=" << format_double(lc.axis.velocity) << "\n";
        finish("fig4", "set datafile separator ','\nset pm3d map\n"
                       "splot 'fig4_field.csv' u 1:2:($3==5?$4:1/0) w pm3d t 'G_{x,y}(t=5)'\n");
    }

    void appendix_h() {
        ModelParams p = chain_params(0.2, 100);
        p.dimension = 2;
        LightCone2DSettings s;
        s.workers = workers;
        const LightCone2D lc = lightcone_2d(p, s);
        write("appendix-H_radial_points.csv", points_table(lc.radial), params_json(p));
        summary << "radial V_CE=" << format_double(lc.radial.velocity) << " (per-slice threshold " << s.threshold << ")\n";
        summary << "axis V_CE=" << format_double(lc.axis.velocity) << "\n";
        finish("appendix-H", "set datafile separator ','\nplot 'appendix-H_radial_points.csv' u 2:1 w p t '|R|*(t)'\n");
    }

    void fig5() {
        const QuenchSpec spec = quench_from(chain_params(0.2), 13.0, 300);
        const Trajectory b = run_quench(Flavor::bosonic, spec, {workers, true});
        const auto mb = magnetization(b);
        const auto mf = magnetization(run_quench(Flavor::fermionic, spec, {workers, true}));
        std::vector<double> rel(mb.size());
        double worst = 0;
        for (std::size_t i = 0; i < mb.size(); ++i) worst = std::max(worst, rel[i] = std::abs(mb[i] - mf[i]) / std::abs(mf[i]));
        write("fig5.csv", magnetization_table({{"Sz_boson", mb}, {"Sz_fermion", mf}, {"rel_diff", rel}}, b.times),
              params_json(spec.post));
        summary << "max relative difference " << format_double(worst) << "\n";
        finish("fig5", "set datafile separator ','\nplot 'fig5.csv' u 1:2 w l t 'boson', '' u 1:3 w l dt 2 t 'fermion'\n");
    }

    void fig6() {
        const QuenchSpec spec = quench_from(chain_params(0.2), 13.0, 300);
        for (Flavor fl : {Flavor::bosonic, Flavor::fermionic}) {
            const Trajectory tr = run_quench(fl, spec, {workers, true});
            json pj = params_json(spec.post);
            pj["flavor"] = to_string(fl);
            write(std::string("fig6_") + to_string(fl) + ".csv", field_table(zz_correlation(tr, line_offsets(0, 15), workers), true), pj);
        }
        finish("fig6", "set datafile separator ','\nset pm3d map\nset multiplot layout 2,1\n"
                       "splot 'fig6_boson.csv' u 1:2:5 w pm3d t 'log10 Re C^zz boson'\n"
                       "splot 'fig6_fermion.csv' u 1:2:5 w pm3d t 'fermion'\nunset multiplot\n");
    }

    void fig8() {
        std::string gp = "set datafile separator ','\nplot ";
        for (double gamma : {-0.2, -0.9}) {
            const ModelParams p = chain_params(gamma);
            const QuenchSpec spec = quench_from(p, 13.0, 300);
            const Trajectory b = run_quench(Flavor::bosonic, spec, {workers, true});
            const auto mb = magnetization(b);
            const auto mf = magnetization(run_quench(Flavor::fermionic, spec, {workers, true}));
            const double sb = solve_stationary(Flavor::bosonic, p, workers).magnetization;
            const double sf = solve_stationary(Flavor::fermionic, p, workers).magnetization;
            const std::string name = "fig8_gamma" + format_double(gamma) + ".csv";
            write(name, magnetization_table({{"Sz_boson", mb}, {"Sz_fermion", mf}}, b.times), params_json(p));
            summary << "gamma=" << format_double(gamma) << " stationary boson=" << format_double(sb)
                    << " fermion=" << format_double(sf) << " dynamics(t=13) boson=" << format_double(mb.back())
                    << " fermion=" << format_double(mf.back()) << "\n";
            gp += "'" + name + "' u 1:2 w l t 'boson " + format_double(gamma) + "', '' u 1:3 w l dt 2 t 'fermion', " +
                  format_double(sb) + " t '', ";
        }
        gp.resize(gp.size() - 2);
        finish("fig8", gp + "\n");
    }

    void fig9() {
        const ModelParams p = chain_params(0.2);
        const auto times = sample_times(0, 13, 300);
        const auto dist = line_offsets(0, 30);
        write("fig9_guess_A.csv", field_table(guess_correlation(p, {}, dist, times, GuessDispersion::coefficient)), params_json(p));
        write("fig9_guess_E.csv", field_table(guess_correlation(p, {}, dist, times, GuessDispersion::exact)), params_json(p));
        finish("fig9", "set datafile separator ','\nset pm3d map\nset multiplot layout 2,1\n"
                       "splot 'fig9_guess_A.csv' u 1:2:3 w pm3d t 'A_k'\nsplot 'fig9_guess_E.csv' u 1:2:3 w pm3d t 'E_k'\n"
                       "unset multiplot\n");
    }

    void appendix_i() {
        ModelParams p = chain_params(0.2);
        ModelParams herm = p;
        herm.gamma = 0;
        const GroundState gs = ground_state_hermitian(herm, 10);
        const auto times = sample_times(0, 20, 2000);
        ModelParams nl = p;
        nl.gamma_prime = 0.05;
        write("appendix-I_linear.csv", series_table(evolve_ed(build_single_mode_hamiltonian(p, 10), gs.state, times)), params_json(p));
        write("appendix-I_quartic.csv", series_table(evolve_ed(build_single_mode_hamiltonian(nl, 10), gs.state, times)), params_json(nl));
        const auto onset = nonlinearity_onset(build_single_mode_hamiltonian(p, 10), gs.state, 0.2, 0.05, 20.0);
        summary << "t_f_prime=" << (onset ? format_double(*onset) : std::string("not-reached")) << "\n";
        finish("appendix-I", "set datafile separator ','\nplot 'appendix-I_linear.csv' u 1:2 w l t 'gamma_prime=0', "
                             "'appendix-I_quartic.csv' u 1:2 w l t 'gamma_prime=0.05'\n");
    }

    void run(const std::string& target) {
        fs::create_directories(dir);
        if (target == "fig1") fig1();
        else if (target == "fig2") fig2();
        else if (target == "fig3") single_mode_pair("fig3", 0.2, 15.0);
        else if (target == "fig4") fig4();
        else if (target == "fig5") fig5();
        else if (target == "fig6") fig6();
        else if (target == "fig7") single_mode_pair("fig7", -0.2, 20.0);
        else if (target == "fig8") fig8();
        else if (target == "fig9") fig9();
        else if (target == "appendix-H") appendix_h();
        else if (target == "appendix-I") appendix_i();
        else throw domain_error("unknown reproduce target '" + target + "'");
    }
};

struct ReproduceCmd {
    std::string target;
    std::string out_dir = "out";
    int workers = default_workers();

    void attach(CLI::App& app) {
        auto* c = app.add_subcommand("reproduce", "regenerate figure data and gnuplot scripts");
        c->set_help_flag("--help", "print this help and exit");
        c->add_option("target", target, "fig1..fig9, appendix-H, appendix-I or all")->required();
        c->add_option("--out-dir", out_dir, "output directory");
        c->add_option("--workers", workers, "threads");
    }

    int run(std::ostream& out_s, std::ostream&) {
        std::vector<std::string> targets = target == "all" ? reproduce_targets : std::vector<std::string>{target};
        for (const auto& t : targets) {
            out_s << "== " << t << "\n";
            Reproducer r{out_dir, workers, out_s};
            r.run(t);
        }
        return 0;
    }
};

std::string usage() {
    std::string s = "usage: nhsw <subcommand> [options]\nsubcommands:";
    for (const auto& c : subcommands) s += " " + c;
    return s + "\nrun 'nhsw <subcommand> --help' for options\n";
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    if (argc < 2) {
        err << usage();
        return 64;
    }
    const std::string first = argv[1];
    const bool help = first == "-h" || first == "--help";
    if (!help && std::find(subcommands.begin(), subcommands.end(), first) == subcommands.end()) {
        err << "unknown subcommand '" << first << "'\n" << usage();
        return 64;
    }

    CLI::App app{"Linear spin-wave dynamics of the non-Hermitian transverse-field Ising model", "nhsw"};
    app.require_subcommand(1);
    SpectrumCmd spectrum;
    QuenchCmd quench;
    ObserveCmd observe;
    SingleModeCmd single;
    SteadyStateCmd steady;
    LightconeCmd lightcone;
    ReproduceCmd reproduce;
    spectrum.attach(app);
    quench.attach(app);
    observe.attach(app);
    single.attach(app);
    steady.attach(app);
    lightcone.attach(app);
    reproduce.attach(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand("spectrum")) return spectrum.run(out, err);
        if (app.got_subcommand("quench")) return quench.run(out, err);
        if (app.got_subcommand("observe")) return observe.run(out, err);
        if (app.got_subcommand("single-mode")) return single.run(out, err);
        if (app.got_subcommand("steady-state")) return steady.run(out, err);
        if (app.got_subcommand("lightcone")) return lightcone.run(out, err);
        if (app.got_subcommand("reproduce")) return reproduce.run(out, err);
    } catch (const domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const io_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    err << usage();
    return 64;
}

}  // namespace nhsw::cli
