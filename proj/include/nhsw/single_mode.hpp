// single_mode.hpp - truncated-Fock ED of the k = 0 mode, squeezing analytics, divergence estimates

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nhsw/quench.hpp"

namespace nhsw {

struct FockVector {
    Eigen::VectorXcd amplitudes;  // |0> ... |N_max>
    int n_max() const { return static_cast<int>(amplitudes.size()) - 1; }
};

struct SqueezeParams {
    double r{0.0};
    double phi{0.0};
};

// A and B of the single-mode Hamiltonian: the bosonic coefficients at k = 0.
inline CoeffPair single_mode_coeffs(const ModelParams& p) {
    const std::vector<double> k0(static_cast<std::size_t>(std::max(1, p.dimension)), 0.0);
    return bosonic_coeffs(p, k0);
}

// H = A/2 (a^dag a + a a^dag) + B/2 (a^dag a^dag + a a) - i gamma'/2 n^2 on |0>..|n_max>.
inline Eigen::MatrixXcd build_single_mode_hamiltonian(const ModelParams& p, int n_max = 10) {
    if (n_max < 4) throw domain_error("n_max must be >= 4");
    const CoeffPair c = single_mode_coeffs(p);
    const int d = n_max + 1;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n < d; ++n) {
        h(n, n) = c.a * (n + 0.5) - cplx(0.0, 0.5 * p.gamma_prime * n * n);
        if (n + 2 < d) {
            const cplx pair = 0.5 * c.b * std::sqrt(static_cast<double>((n + 1) * (n + 2)));
            h(n + 2, n) = pair;
            h(n, n + 2) = pair;
        }
    }
    return h;
}

struct GroundState {
    FockVector state;
    SqueezeParams squeeze;
    double energy{0.0};
};

inline GroundState ground_state_hermitian(const ModelParams& p, int n_max = 10) {
    if (p.gamma != 0.0 || p.gamma_prime != 0.0)
        throw domain_error("ground state requires gamma = gamma_prime = 0");
    const CoeffPair c = single_mode_coeffs(p);
    if (std::abs(c.b) >= std::abs(c.a)) throw domain_error("single mode unstable: |B/A| >= 1");
    const Eigen::MatrixXcd h = build_single_mode_hamiltonian(p, n_max);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw numerical_error("Hermitian eigensolve did not converge");
    Eigen::VectorXcd v = es.eigenvectors().col(0);
    const cplx v0 = v(0);
    if (std::abs(v0) == 0.0) throw numerical_error("ground state has no vacuum component");
    v *= std::conj(v0) / std::abs(v0);
    for (Eigen::Index n = 1; n < v.size(); n += 2) v(n) = 0.0;  // H conserves parity; drop eigensolver noise
    v /= v.norm();
    GroundState gs;
    gs.state.amplitudes = v;
    gs.energy = es.eigenvalues()(0);
    const cplx ratio = v(2) / v(0);  // -e^{i phi} tanh(r) / sqrt(2)
    const double t = std::sqrt(2.0) * std::abs(ratio);
    if (t >= 1.0) throw numerical_error("squeezing ratio out of range");
    gs.squeeze.r = std::atanh(t);
    gs.squeeze.phi = t == 0.0 ? 0.0 : std::arg(-ratio);
    return gs;
}

struct SingleModeSeries {
    std::vector<double> times;
    std::vector<double> g;          // <n>
    std::vector<cplx> f;            // <a a>
    std::vector<double> n2;         // <n n>
    std::vector<double> norm_log;   // log of the unnormalized squared norm, cumulative
    std::vector<FockVector> states; // normalized states at each sample
};

inline void measure(const Eigen::VectorXcd& v, SingleModeSeries& out) {
    const int d = static_cast<int>(v.size());
    double n1 = 0.0, n2 = 0.0;
    cplx aa(0.0, 0.0);
    for (int n = 0; n < d; ++n) {
        const double p = std::norm(v(n));
        n1 += n * p;
        n2 += static_cast<double>(n) * n * p;
        if (n + 2 < d) aa += std::conj(v(n)) * std::sqrt(static_cast<double>((n + 1) * (n + 2))) * v(n + 2);
    }
    out.g.push_back(n1);
    out.n2.push_back(n2);
    out.f.push_back(aa);
}

inline SingleModeSeries evolve_ed(const Eigen::MatrixXcd& h, const FockVector& psi0, const std::vector<double>& times) {
    if (times.empty() || times.front() != 0.0) throw domain_error("times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw domain_error("times must be ascending");
    if (h.rows() != psi0.amplitudes.size()) throw domain_error("state and Hamiltonian sizes differ");
    SingleModeSeries out;
    Eigen::VectorXcd v = psi0.amplitudes / psi0.amplitudes.norm();
    double log_norm = 0.0;
    out.times = times;
    measure(v, out);
    out.norm_log.push_back(0.0);
    out.states.push_back({v});
    Eigen::MatrixXcd u;
    double last_span = -1.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double span = times[i] - times[i - 1];
        if (span != last_span) {
            u = (cplx(0.0, -span) * h).exp();
            last_span = span;
        }
        v = u * v;
        const double n2 = v.squaredNorm();
        if (!std::isfinite(n2)) throw numerical_error("ED norm overflow at t = " + std::to_string(times[i]));
        if (n2 < 1e-300) throw numerical_error("ED norm underflow at t = " + std::to_string(times[i]));
        log_norm += std::log(n2);
        v /= std::sqrt(n2);
        measure(v, out);
        out.norm_log.push_back(log_norm);
        out.states.push_back({v});
    }
    return out;
}

// Equations-of-motion engine for the same mode, with d/dt log|psi|^2 = 2 Im<H> carried along.
struct ModeStateLog {
    ModeState s;
    double log_norm{0.0};
};
inline ModeStateLog operator+(const ModeStateLog& x, const ModeStateLog& y) { return {x.s + y.s, x.log_norm + y.log_norm}; }
inline ModeStateLog operator*(double a, const ModeStateLog& x) { return {a * x.s, a * x.log_norm}; }

struct SingleModeEomResult {
    SingleModeSeries series;
    std::optional<Divergence> divergence;
};

inline double log_state_occupation(const ModeStateLog& x) { return mode_occupation(x.s); }

inline SingleModeEomResult evolve_eom(const ModelParams& p, const ModeState& init, const std::vector<double>& times,
                                      double dt = 1e-3, double cap = 1e6) {
    if (p.gamma_prime != 0.0) throw domain_error("the quadratic equations of motion do not include gamma_prime");
    const CoeffPair c = single_mode_coeffs(p);
    auto rhs = [&](const ModeStateLog& x) {
        const double im_h = c.a.imag() * (x.s.g.real() + 0.5) + c.b.imag() * x.s.f.real();
        return ModeStateLog{eom_rhs(Flavor::bosonic, c, x.s), 2.0 * im_h};
    };
    SingleModeEomResult res;
    auto& s = res.series;
    auto put = [&](std::size_t i, const ModeStateLog& x) {
        s.times.push_back(times[i]);
        s.g.push_back(x.s.g.real());
        s.f.push_back(x.s.f);
        s.n2.push_back(std::numeric_limits<double>::quiet_NaN());
        s.norm_log.push_back(x.log_norm);
    };
    const ModeRun run = run_samples(rhs, ModeStateLog{init, 0.0}, times, dt, put, &log_state_occupation, cap,
                                    static_cast<std::vector<ModeStateLog>*>(nullptr));
    if (run.nonfinite) throw numerical_error("non-finite single-mode state at t = " + std::to_string(run.nonfinite_time));
    res.divergence = run.divergence;
    return res;
}

// Single-mode initial data from the pre-quench k = 0 angle.
inline ModeState single_mode_initial(const ModelParams& p) {
    ModelParams pre = p;
    pre.gamma = 0.0;
    pre.gamma_prime = 0.0;
    const std::vector<double> k0(static_cast<std::size_t>(std::max(1, p.dimension)), 0.0);
    return initial_mode(Flavor::bosonic, pre, k0);
}

// t_f = ln(1 / tanh r) / gamma; +infinity when r = 0.
inline double divergence_time(const SqueezeParams& sq, double gamma) {
    if (!(gamma > 0)) throw domain_error("divergence time requires gamma > 0");
    if (sq.r < 0) throw domain_error("squeezing magnitude must be >= 0");
    if (sq.r == 0.0) return std::numeric_limits<double>::infinity();
    return std::log(1.0 / std::tanh(sq.r)) / gamma;
}

// First time with gamma <n> <= gamma' <n n> along the gamma' = 0 ED trajectory;
// nullopt when the window ends first.
inline std::optional<double> nonlinearity_onset(const Eigen::MatrixXcd& h, const FockVector& psi0, double gamma,
                                                double gamma_prime, double t_end, double sample_dt = 0.05,
                                                double tol = 1e-10) {
    if (!(gamma_prime > 0)) throw domain_error("nonlinearity onset requires gamma_prime > 0");
    if (!(t_end > 0) || !(sample_dt > 0)) throw domain_error("onset window must be positive");
    auto crossing = [&](const Eigen::VectorXcd& v) {
        SingleModeSeries tmp;
        measure(v / v.norm(), tmp);
        return gamma_prime * tmp.n2[0] - gamma * tmp.g[0];
    };
    Eigen::VectorXcd v = psi0.amplitudes / psi0.amplitudes.norm();
    if (crossing(v) >= 0) return 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil(t_end / sample_dt - 1e-9)));
    const double step = t_end / n;
    const Eigen::MatrixXcd u = (cplx(0.0, -step) * h).exp();
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXcd w = u * v;
        w /= w.norm();
        if (!w.allFinite()) throw numerical_error("ED state became non-finite during onset search");
        if (crossing(w) >= 0) {
            double lo = 0.0, hi = step;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                Eigen::VectorXcd x = (cplx(0.0, -mid) * h).exp() * v;
                if (crossing(x) >= 0) hi = mid; else lo = mid;
            }
            return step * i + 0.5 * (lo + hi);
        }
        v = w;
    }
    return std::nullopt;
}

}  // namespace nhsw
