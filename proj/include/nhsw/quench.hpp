// quench.hpp - initial conditions, equations of motion and RK4 integration of all modes

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "nhsw/model.hpp"
#include "nhsw/parallel.hpp"
#include "nhsw/rk4.hpp"

namespace nhsw {

struct ModeState {
    cplx f;  // <a_k a_-k>
    cplx g;  // <a_k^dag a_k>, stored complex to expose drift
};

inline ModeState operator+(const ModeState& x, const ModeState& y) { return {x.f + y.f, x.g + y.g}; }
inline ModeState operator*(double s, const ModeState& x) { return {s * x.f, s * x.g}; }

// |F|^2 - G(1 +/- G); zero for pure Gaussian states.
inline double purity_defect(Flavor fl, const ModeState& s) {
    const double g = s.g.real();
    return std::norm(s.f) - (fl == Flavor::bosonic ? g * (1.0 + g) : g * (1.0 - g));
}

inline ModeState eom_rhs(Flavor fl, const CoeffPair& c, const ModeState& s) {
    const cplx I(0.0, 1.0);
    const double ia = c.a.imag();
    const double f2 = std::norm(s.f);
    if (fl == Flavor::bosonic) {
        return {4.0 * ia * s.f * s.g - 2.0 * I * c.a * s.f - I * c.b * (1.0 + 2.0 * s.g),
                -2.0 * c.b * s.f.imag() + 2.0 * ia * (f2 + s.g + s.g * s.g)};
    }
    return {-8.0 * ia * s.f * s.g - 4.0 * I * c.a * s.f + 2.0 * I * c.b * (1.0 - 2.0 * s.g),
            4.0 * ia * (f2 + s.g - s.g * s.g) + 4.0 * I * c.b * s.f.real()};
}

inline ModeState initial_mode(Flavor fl, const ModelParams& pre, std::span<const double> k) {
    if (fl == Flavor::bosonic) {
        ModelParams herm = pre;
        herm.gamma = 0.0;
        const CoeffPair c = bosonic_coeffs(herm, k);
        const double a = c.a.real(), b = c.b.real();
        if (std::abs(b) >= std::abs(a)) {
            std::ostringstream os;
            os << "pre-quench vacuum unstable: |B/A| >= 1 at k = (";
            for (std::size_t j = 0; j < k.size(); ++j) os << (j ? ", " : "") << k[j];
            os << ")";
            throw domain_error(os.str());
        }
        const double alpha = 0.5 * std::atanh(-b / a);
        const double sh = std::sinh(alpha), ch = std::cosh(alpha);
        return {cplx(ch * sh, 0.0), cplx(sh * sh, 0.0)};
    }
    if (k.size() != 1) throw domain_error("fermionic theory is defined in one dimension only");
    const double ai = 0.25 * pre.J * std::cos(k[0]) + 0.5 * pre.h;
    const double ib = 0.25 * pre.J * std::sin(k[0]);
    if (ai == 0.0) throw domain_error("pre-quench fermionic angle undefined (A = 0) at k = " +
                                      std::to_string(k[0]));
    const double theta = std::atan(ib / ai);
    const double s = std::sin(0.5 * theta), c = std::cos(0.5 * theta);
    return {cplx(0.0, -s * c), cplx(s * s, 0.0)};
}

inline std::vector<ModeState> initial_conditions(Flavor fl, const ModelParams& pre, const KGrid& grid) {
    validate(pre);
    if (pre.gamma != 0.0) throw domain_error("pre-quench state requires gamma = 0");
    if (fl == Flavor::fermionic && grid.dimension() != 1)
        throw domain_error("fermionic theory is defined in one dimension only");
    std::vector<ModeState> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = initial_mode(fl, pre, grid.momentum(i));
    return out;
}

struct QuenchSpec {
    ModelParams pre;
    ModelParams post;
    double t_start{0.0};
    double t_end{13.0};
    int steps{300};    // output intervals; steps + 1 samples including both ends
    double dt{1e-3};   // integrator step, shrunk per interval to land on samples
    double cap{1e6};   // |G| above this ends the trajectory
};

inline void validate(const QuenchSpec& s) {
    validate(s.pre);
    validate(s.post);
    require_linear(s.post, "quench");
    if (s.pre.J != s.post.J || s.pre.h != s.post.h || s.pre.dimension != s.post.dimension ||
        s.pre.n_sites != s.post.n_sites)
        throw domain_error("pre- and post-quench parameters must share J, h, dimension and n_sites");
    if (s.pre.gamma != 0.0) throw domain_error("pre-quench gamma must be 0");
    if (!(s.dt > 0)) throw domain_error("dt must be positive");
    if (s.steps < 1) throw domain_error("steps must be >= 1");
    if (!(s.t_end > s.t_start)) throw domain_error("t_end must exceed t_start");
    if (!(s.cap > 0)) throw domain_error("cap must be positive");
}

inline QuenchSpec quench_from(const ModelParams& post, double t_end, int steps) {
    QuenchSpec s;
    s.post = post;
    s.pre = post;
    s.pre.gamma = 0.0;
    s.t_end = t_end;
    s.steps = steps;
    return s;
}

inline std::vector<double> sample_times(double t0, double t1, int steps) {
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) t[i] = t0 + (t1 - t0) * static_cast<double>(i) / steps;
    t.back() = t1;
    return t;
}

struct Divergence {
    std::size_t mode{0};
    double t_lower{0.0};  // last accepted step
    double t_upper{0.0};  // rejected step, one dt later
    double cap{1e6};
    double time() const { return 0.5 * (t_lower + t_upper); }
};

// Outcome of integrating one mode over the sample grid.
struct ModeRun {
    std::size_t valid{0};  // samples written
    std::optional<Divergence> divergence;
    bool nonfinite{false};
    double nonfinite_time{0.0};
};

template <class Rhs, class State, class Accept>
ModeRun run_samples(const Rhs& rhs, State y, const std::vector<double>& times, double dt,
                    Accept&& accept, double (*occupation)(const State&), double cap,
                    std::vector<State>* out) {
    ModeRun run;
    auto store = [&](std::size_t i, const State& s) {
        if (out) (*out)[i] = s;
        accept(i, s);
    };
    store(0, y);
    run.valid = 1;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double span = times[i + 1] - times[i];
        const long n = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
        const double h = span / static_cast<double>(n);
        for (long j = 0; j < n; ++j) {
            const double t = times[i] + h * static_cast<double>(j);
            State next = rk4_step(rhs, y, h);
            const double g = occupation(next);
            if (!std::isfinite(g) || std::abs(g) > cap) {
                // A step that overflows from deep inside the blow-up counts as crossing the cap.
                if (std::isfinite(g) || std::abs(occupation(y)) >= std::sqrt(cap)) {
                    run.divergence = Divergence{0, t, t + h, cap};
                } else {
                    run.nonfinite = true;
                    run.nonfinite_time = t + h;
                }
                return run;
            }
            y = next;
        }
        store(i + 1, y);
        run.valid = i + 2;
    }
    return run;
}

inline double mode_occupation(const ModeState& s) {
    if (!std::isfinite(s.f.real()) || !std::isfinite(s.f.imag()) || !std::isfinite(s.g.imag()))
        return std::numeric_limits<double>::quiet_NaN();
    return std::abs(s.g);
}

// Integrates one mode with fixed coefficients; samples written to out (sized like times).
inline ModeRun integrate_mode(Flavor fl, const CoeffPair& c, const ModeState& init,
                              const std::vector<double>& times, double dt, double cap,
                              std::vector<ModeState>& out) {
    out.assign(times.size(), ModeState{});
    auto rhs = [&](const ModeState& s) { return eom_rhs(fl, c, s); };
    return run_samples(rhs, init, times, dt, [](std::size_t, const ModeState&) {}, &mode_occupation,
                       cap, &out);
}

struct Trajectory {
    Flavor flavor{Flavor::bosonic};
    ModelParams params;  // post-quench
    KGrid grid;
    std::vector<double> times;
    std::vector<std::vector<ModeState>> states;  // [sample][mode]
    std::optional<Divergence> divergence;
};

struct IntegrateOptions {
    int workers{1};
    bool symmetry{true};  // integrate one mode per reflection orbit and copy
};

// Representative of the orbit under independent sign flips of each axis label.
// Bosonic data depend on cos(k_j) only; fermionic data (1D) pick up F -> -F.
inline std::size_t orbit_representative(const KGrid& grid, std::size_t flat) {
    auto n = grid.labels(flat);
    for (auto& v : n) v = grid.wrap(std::abs(v));
    return grid.flat_index(n);
}

inline Trajectory integrate(Flavor fl, const QuenchSpec& spec, const std::vector<ModeState>& init,
                            const KGrid& grid, const IntegrateOptions& opt = {}) {
    validate(spec);
    if (init.size() != grid.size()) throw domain_error("initial state size does not match grid");
    if (fl == Flavor::fermionic && grid.dimension() != 1)
        throw domain_error("fermionic theory is defined in one dimension only");

    Trajectory tr;
    tr.flavor = fl;
    tr.params = spec.post;
    tr.grid = grid;
    tr.times = sample_times(spec.t_start, spec.t_end, spec.steps);
    const std::size_t ns = tr.times.size(), nm = grid.size();
    tr.states.assign(ns, std::vector<ModeState>(nm));

    std::vector<std::size_t> reps;
    std::vector<std::size_t> rep_of(nm);
    for (std::size_t i = 0; i < nm; ++i) {
        rep_of[i] = opt.symmetry ? orbit_representative(grid, i) : i;
        if (rep_of[i] == i) reps.push_back(i);
    }

    std::vector<ModeRun> runs(reps.size());
    parallel_for(reps.size(), opt.workers, [&](std::size_t r) {
        const std::size_t m = reps[r];
        const CoeffPair c = coeffs(fl, spec.post, grid.momentum(m));
        auto rhs = [&](const ModeState& s) { return eom_rhs(fl, c, s); };
        auto put = [&](std::size_t i, const ModeState& s) { tr.states[i][m] = s; };
        runs[r] = run_samples(rhs, init[m], tr.times, spec.dt, put, &mode_occupation, spec.cap,
                              static_cast<std::vector<ModeState>*>(nullptr));
        if (runs[r].divergence) runs[r].divergence->mode = m;
    });

    // Earliest failure wins; ties go to the lowest mode index.
    std::size_t valid = ns;
    const ModeRun* first_bad = nullptr;
    std::size_t first_bad_mode = 0;
    const Divergence* first_div = nullptr;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const ModeRun& run = runs[r];
        valid = std::min(valid, run.valid);
        if (run.nonfinite && (!first_bad || run.nonfinite_time < first_bad->nonfinite_time)) {
            first_bad = &run;
            first_bad_mode = reps[r];
        }
        if (run.divergence && (!first_div || run.divergence->t_lower < first_div->t_lower))
            first_div = &*run.divergence;
    }
    if (first_bad && (!first_div || first_bad->nonfinite_time <= first_div->t_upper)) {
        std::ostringstream os;
        os << "non-finite state before reaching the divergence cap: mode " << first_bad_mode
           << " at t = " << first_bad->nonfinite_time;
        throw numerical_error(os.str());
    }
    if (first_div) tr.divergence = *first_div;

    tr.times.resize(valid);
    tr.states.resize(valid);
    for (std::size_t m = 0; m < nm; ++m) {
        const std::size_t r = rep_of[m];
        if (r == m) continue;
        const double sign = (fl == Flavor::fermionic) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < valid; ++i) tr.states[i][m] = {sign * tr.states[i][r].f, tr.states[i][r].g};
    }
    return tr;
}

// Convenience: ground-state initial data plus integration.
inline Trajectory run_quench(Flavor fl, const QuenchSpec& spec, const IntegrateOptions& opt = {}) {
    validate(spec);
    const KGrid grid = make_kgrid(spec.post);
    return integrate(fl, spec, initial_conditions(fl, spec.pre, grid), grid, opt);
}

// Down-state population of an isolated two-level site, |beta|^2 / (|beta|^2 + |alpha|^2 e^{-2 gamma t}).
inline double single_site_exact(double gamma, cplx alpha, cplx beta, double t) {
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    if (std::abs(a2 + b2 - 1.0) > 1e-12) throw domain_error("single-site amplitudes must be normalized");
    if (b2 == 0.0) return 0.0;
    return b2 / (b2 + a2 * std::exp(-2.0 * gamma * t));
}

}  // namespace nhsw
