// spectra.hpp - complex Bogolyubov angles and quasiparticle dispersions

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "nhsw/model.hpp"

namespace nhsw {

struct DispersionPoint {
    std::vector<double> k;
    cplx energy;                 // E_k or eps_k
    cplx angle;                  // theta_k
    bool defined{true};          // false where Re(a) == 0
    bool branch_warning{false};  // |b/a| >= 1, principal branch may jump here
};

struct Spectrum {
    Flavor flavor{Flavor::bosonic};
    KGrid grid;
    std::vector<DispersionPoint> points;

    std::size_t warnings() const {
        std::size_t n = 0;
        for (const auto& p : points) n += p.branch_warning ? 1 : 0;
        return n;
    }
};

inline cplx bogolyubov_angle(Flavor f, const CoeffPair& c) {
    if (c.a == cplx(0.0, 0.0)) throw domain_error("Bogolyubov angle undefined for a = 0");
    if (f == Flavor::bosonic) return std::atanh(-c.b / c.a);
    return std::atan(cplx(0.0, 1.0) * c.b / c.a);
}

struct Energy {
    cplx value;
    bool defined{true};
};

inline Energy dispersion(Flavor f, const CoeffPair& c) {
    const double re = c.a.real();
    if (re == 0.0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {cplx(nan, nan), false};
    }
    cplx e = (re > 0 ? 1.0 : -1.0) * std::sqrt(c.a * c.a - c.b * c.b);
    if (f == Flavor::fermionic) e *= 2.0;
    return {e, true};
}

// Truncated small-J series; test oracle only.
inline cplx dispersion_expansion(Flavor f, const ModelParams& p, double k, int order) {
    if (order != 1 && order != 2) throw domain_error("expansion order must be 1 or 2");
    if (p.dimension != 1) throw domain_error("expansion is defined for dimension 1");
    const cplx z(p.h, p.gamma);
    cplx e = z + 0.5 * p.J * std::cos(k);
    if (order == 2) {
        const double s = f == Flavor::bosonic ? -std::cos(k) * std::cos(k) : std::sin(k) * std::sin(k);
        e += p.J * p.J * s / (8.0 * z);
    }
    return e;
}

inline Spectrum spectrum_over_grid(Flavor f, const ModelParams& p) {
    require_linear(p, "spectrum");
    if (f == Flavor::fermionic && p.dimension != 1)
        throw domain_error("fermionic theory is defined in one dimension only");
    Spectrum s{f, make_kgrid(p), {}};
    s.points.reserve(s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        auto k = s.grid.momentum(i);
        const CoeffPair c = coeffs(f, p, k);
        DispersionPoint pt;
        pt.k.assign(k.begin(), k.end());
        const Energy e = dispersion(f, c);
        pt.energy = e.value;
        pt.defined = e.defined;
        if (c.a == cplx(0.0, 0.0)) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            pt.angle = cplx(nan, nan);
            pt.branch_warning = true;
        } else {
            pt.angle = bogolyubov_angle(f, c);
            pt.branch_warning = std::abs(c.b / c.a) >= 1.0;
        }
        s.points.push_back(std::move(pt));
    }
    return s;
}

}  // namespace nhsw
