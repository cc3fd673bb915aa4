// observables.hpp - real-space correlators built from mode trajectories

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhsw/parallel.hpp"
#include "nhsw/quench.hpp"
#include "nhsw/spectra.hpp"

namespace nhsw {

enum class FieldKind { one_body, zz, guess };

inline const char* to_string(FieldKind k) {
    switch (k) {
        case FieldKind::one_body: return "one_body";
        case FieldKind::zz: return "zz";
        case FieldKind::guess: return "guess";
    }
    return "?";
}

using Offset = std::vector<int>;

struct CorrelationField {
    FieldKind kind{FieldKind::one_body};
    Flavor flavor{Flavor::bosonic};
    int dimension{1};
    std::vector<Offset> distances;
    std::vector<double> times;
    Eigen::MatrixXcd values;  // distance x time
    ModelParams params;
};

struct GuessEnvelope {
    double sigma{1.0};
};

enum class GuessDispersion { coefficient, exact };  // A_k or E_k in the phase and growth factors

inline std::vector<Offset> line_offsets(int r_min, int r_max) {
    std::vector<Offset> out;
    for (int r = r_min; r <= r_max; ++r) out.push_back({r});
    return out;
}

inline std::vector<Offset> square_offsets(int half_width) {
    std::vector<Offset> out;
    for (int x = -half_width; x <= half_width; ++x)
        for (int y = -half_width; y <= half_width; ++y) out.push_back({x, y});
    return out;
}

inline void check_offsets(const std::vector<Offset>& d, int dimension, int n_sites) {
    for (const auto& r : d) {
        if (static_cast<int>(r.size()) != dimension)
            throw domain_error("distance has " + std::to_string(r.size()) + " components, lattice has " +
                               std::to_string(dimension));
        for (int c : r)
            if (std::abs(c) > n_sites / 2)
                throw domain_error("distance component " + std::to_string(c) + " lies beyond half the lattice");
    }
}

namespace detail {

// Roots of unity e^{2 pi i m / N}; e^{i k R} for k = 2 pi n / N is root[(n R) mod N].
inline std::vector<cplx> unit_roots(int n) {
    std::vector<cplx> w(n);
    for (int m = 0; m < n; ++m) {
        const double x = 2.0 * std::numbers::pi * m / n;
        w[m] = cplx(std::cos(x), std::sin(x));
    }
    return w;
}

inline cplx phase(const std::vector<cplx>& roots, int label, int r) {
    const int n = static_cast<int>(roots.size());
    long m = (static_cast<long>(label) * r) % n;
    if (m < 0) m += n;
    return roots[m];
}

// S(R) = sum_k e^{i s k.R} x_k for every R in the product of per-axis offset lists,
// contracted one axis at a time (last axis first) in a fixed order.
class StagedTransform {
public:
    StagedTransform(const KGrid& grid, const std::vector<Offset>& wanted, int sign)
        : n_(grid.n_sites()), dim_(grid.dimension()), roots_(unit_roots(grid.n_sites())), sign_(sign) {
        axes_.resize(dim_);
        for (const auto& r : wanted)
            for (int d = 0; d < dim_; ++d) axes_[d].push_back(r[d]);
        for (auto& a : axes_) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
        for (const auto& r : wanted) {
            std::size_t flat = 0;
            for (int d = 0; d < dim_; ++d) {
                const auto& a = axes_[d];
                flat = flat * a.size() + static_cast<std::size_t>(std::lower_bound(a.begin(), a.end(), r[d]) - a.begin());
            }
            pick_.push_back(flat);
        }
    }

    std::vector<cplx> operator()(const std::vector<cplx>& x) const {
        // Layout: leading axes contracted so far hold offsets, trailing ones hold momenta.
        std::vector<cplx> cur = x;
        std::size_t outer = cur.size() / n_;  // product of remaining axis sizes before the current one
        std::size_t inner = 1;                // product of already transformed axis sizes
        for (int d = dim_ - 1; d >= 0; --d) {
            const auto& offs = axes_[d];
            std::vector<cplx> next(outer * offs.size() * inner);
            std::vector<cplx> ph(offs.size() * n_);
            for (std::size_t q = 0; q < offs.size(); ++q)
                for (int i = 0; i < n_; ++i) ph[q * n_ + i] = phase(roots_, sign_ * (i - n_ / 2), offs[q]);
            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t q = 0; q < offs.size(); ++q)
                    for (std::size_t in = 0; in < inner; ++in) {
                        cplx acc(0.0, 0.0);
                        for (int i = 0; i < n_; ++i) acc += ph[q * n_ + i] * cur[(o * n_ + i) * inner + in];
                        next[(o * offs.size() + q) * inner + in] = acc;
                    }
            cur.swap(next);
            inner *= offs.size();
            if (d > 0) outer /= n_;
        }
        std::vector<cplx> out(pick_.size());
        for (std::size_t j = 0; j < pick_.size(); ++j) out[j] = cur[pick_[j]];
        return out;
    }

private:
    int n_, dim_;
    std::vector<cplx> roots_;
    int sign_;
    std::vector<std::vector<int>> axes_;
    std::vector<std::size_t> pick_;
};

inline std::vector<Offset> negated(const std::vector<Offset>& d) {
    std::vector<Offset> out = d;
    for (auto& r : out)
        for (auto& c : r) c = -c;
    return out;
}

}  // namespace detail

// G_R(t) = N^-D sum_k cos(k.R) G_k(t), evaluated as the mean of the e^{+ikR} and e^{-ikR} sums.
inline CorrelationField one_body_correlation(const Trajectory& tr, const std::vector<Offset>& distances,
                                             int workers = 1) {
    const KGrid& grid = tr.grid;
    check_offsets(distances, grid.dimension(), grid.n_sites());
    CorrelationField out{FieldKind::one_body, tr.flavor, grid.dimension(), distances, tr.times,
                         Eigen::MatrixXcd(distances.size(), tr.times.size()), tr.params};
    std::vector<Offset> both = distances;
    const auto neg = detail::negated(distances);
    both.insert(both.end(), neg.begin(), neg.end());
    const detail::StagedTransform transform(grid, both, +1);
    const double norm = 1.0 / static_cast<double>(grid.size());
    const std::size_t nd = distances.size();
    parallel_for(tr.times.size(), workers, [&](std::size_t t) {
        std::vector<cplx> g(grid.size());
        for (std::size_t m = 0; m < g.size(); ++m) g[m] = tr.states[t][m].g;
        const auto s = transform(g);
        for (std::size_t j = 0; j < nd; ++j) out.values(j, t) = 0.5 * (s[j] + s[nd + j]) * norm;
    });
    return out;
}

// C^zz_R(t) from the factorized double sum:
// [conj(S_F) S_F + S_G+ (N delta_R0 +/- S_G-)] / N^2, S_F = sum e^{-ikR} F_k, S_G+- = sum e^{+-ikR} G_k.
inline CorrelationField zz_correlation(const Trajectory& tr, const std::vector<Offset>& distances, int workers = 1) {
    const KGrid& grid = tr.grid;
    if (grid.dimension() != 1) throw domain_error("zz correlation is implemented for one dimension");
    check_offsets(distances, 1, grid.n_sites());
    CorrelationField out{FieldKind::zz, tr.flavor, 1, distances, tr.times,
                         Eigen::MatrixXcd(distances.size(), tr.times.size()), tr.params};
    const detail::StagedTransform plus(grid, distances, +1), minus(grid, distances, -1);
    const int n = grid.n_sites();
    const double pm = tr.flavor == Flavor::bosonic ? 1.0 : -1.0;
    const double inv = 1.0 / (static_cast<double>(n) * n);
    parallel_for(tr.times.size(), workers, [&](std::size_t t) {
        std::vector<cplx> f(n), g(n);
        for (int m = 0; m < n; ++m) {
            f[m] = tr.states[t][m].f;
            g[m] = tr.states[t][m].g;
        }
        const auto sf = minus(f), sgp = plus(g), sgm = minus(g);
        for (std::size_t j = 0; j < distances.size(); ++j) {
            const double delta = (distances[j][0] % n == 0) ? static_cast<double>(n) : 0.0;
            out.values(j, t) = (std::conj(sf[j]) * sf[j] + sgp[j] * (delta + pm * sgm[j])) * inv;
        }
    });
    return out;
}

// <S^z>(t) = 1/2 - N^-D sum_k Re G_k(t).
inline std::vector<double> magnetization(const Trajectory& tr) {
    std::vector<double> out(tr.times.size());
    const double norm = 1.0 / static_cast<double>(tr.grid.size());
    for (std::size_t t = 0; t < tr.times.size(); ++t) {
        cplx acc(0.0, 0.0);
        for (const auto& s : tr.states[t]) acc += s.g;
        out[t] = 0.5 - (acc * norm).real();
    }
    return out;
}

// Three Gaussians of width sigma centred at 0 and +-pi.
inline double guess_weight(double k, double sigma) {
    const double pi = std::numbers::pi, s2 = 2.0 * sigma * sigma;
    return std::exp(-(k - pi) * (k - pi) / s2) + std::exp(-(k + pi) * (k + pi) / s2) + std::exp(-k * k / s2);
}

inline CorrelationField guess_correlation(const ModelParams& p, const GuessEnvelope& env,
                                          const std::vector<Offset>& distances, const std::vector<double>& times,
                                          GuessDispersion mode = GuessDispersion::coefficient) {
    validate(p);
    if (p.dimension != 1) throw domain_error("guess field is defined for dimension 1");
    if (!(env.sigma > 0)) throw domain_error("envelope sigma must be positive");
    check_offsets(distances, 1, p.n_sites);
    const KGrid grid = make_kgrid(p);
    const int n = p.n_sites;
    std::vector<double> w(n), re(n), im(n);
    for (int m = 0; m < n; ++m) {
        const double k = grid.momentum(m)[0];
        w[m] = guess_weight(k, env.sigma);
        const CoeffPair c = bosonic_coeffs(p, grid.momentum(m));
        const cplx x = mode == GuessDispersion::coefficient ? c.a : dispersion(Flavor::bosonic, c).value;
        re[m] = x.real();
        im[m] = x.imag();
    }
    CorrelationField out{FieldKind::guess, Flavor::bosonic, 1, distances, times,
                         Eigen::MatrixXcd(distances.size(), times.size()), p};
    const auto roots = detail::unit_roots(n);
    for (std::size_t j = 0; j < distances.size(); ++j) {
        std::vector<double> kern(n);
        for (int m = 0; m < n; ++m) kern[m] = w[m] * detail::phase(roots, m - n / 2, distances[j][0]).real();
        for (std::size_t t = 0; t < times.size(); ++t) {
            double acc = 0.0;
            for (int m = 0; m < n; ++m)
                acc += kern[m] * std::cos(2.0 * re[m] * times[t]) * std::exp(2.0 * im[m] * times[t]);
            out.values(j, t) = cplx(acc / n, 0.0);
        }
    }
    return out;
}

}  // namespace nhsw
