// steady_state.hpp - stationary quartics for the mode occupations at negative gamma

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nhsw/parallel.hpp"
#include "nhsw/quench.hpp"

namespace nhsw {

using Quartic = std::array<double, 5>;  // ascending degree

struct StationaryRoot {
    std::size_t k{0};  // flat grid index
    std::array<cplx, 4> roots;
    double selected{0.0};
    double residual{0.0};
    cplx f;            // stationary F paired with the selected G
};

struct StationarySolution {
    Flavor flavor{Flavor::bosonic};
    KGrid grid;
    std::vector<StationaryRoot> roots;
    double magnetization{0.0};
};

// B^2 enters as Re(b^2): real for bosons, negative for the imaginary fermionic b.
inline Quartic stationary_polynomial(Flavor fl, const CoeffPair& c) {
    const double ia = c.a.imag();
    if (ia == 0.0) throw domain_error("stationary equation is degenerate for Im(a) = 0");
    const double b2 = (c.b * c.b).real();
    const double a2 = std::norm(c.a);
    const double ia3 = ia * ia * ia;
    if (fl == Flavor::bosonic)
        return {-2.0 * b2 * ia, 8.0 * ia * (a2 - b2), 8.0 * ia * (a2 - b2 + 4.0 * ia * ia), 64.0 * ia3, 32.0 * ia3};
    return {16.0 * b2 * ia, 64.0 * ia * (a2 - b2), 64.0 * ia * (b2 - a2) - 256.0 * ia3, 512.0 * ia3, -256.0 * ia3};
}

inline double poly_eval(const Quartic& p, double x) {
    return (((p[4] * x + p[3]) * x + p[2]) * x + p[1]) * x + p[0];
}

inline double poly_deriv(const Quartic& p, double x) {
    return ((4.0 * p[4] * x + 3.0 * p[3]) * x + 2.0 * p[2]) * x + p[1];
}

// Eigenvalues of the companion matrix.
inline std::array<cplx, 4> quartic_roots(const Quartic& p) {
    if (p[4] == 0.0) throw domain_error("leading quartic coefficient vanishes");
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (int i = 1; i < 4; ++i) m(i, i - 1) = 1.0;
    for (int i = 0; i < 4; ++i) m(i, 3) = -p[i] / p[4];
    Eigen::EigenSolver<Eigen::Matrix4d> es(m, false);
    if (es.info() != Eigen::Success) throw numerical_error("companion eigensolve did not converge");
    std::array<cplx, 4> r;
    for (int i = 0; i < 4; ++i) r[i] = es.eigenvalues()(i);
    std::sort(r.begin(), r.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return r;
}

inline bool is_real_root(cplx r) { return std::abs(r.imag()) <= 1e-9 * (1.0 + std::abs(r)); }

// Stationary F from dF/dt = 0, which is linear in F once G is fixed.
inline cplx stationary_f(Flavor fl, const CoeffPair& c, double g) {
    const cplx I(0.0, 1.0);
    const double ia = c.a.imag();
    if (fl == Flavor::bosonic) return I * c.b * (1.0 + 2.0 * g) / (4.0 * ia * g - 2.0 * I * c.a);
    return 2.0 * I * c.b * (1.0 - 2.0 * g) / (8.0 * ia * g + 4.0 * I * c.a);
}

// Lowest admissible real root: >= 0 for bosons, inside [0, 1] for fermions; one Newton polish.
inline StationaryRoot select_root(Flavor fl, const CoeffPair& c, std::size_t k_index) {
    const Quartic p = stationary_polynomial(fl, c);
    StationaryRoot out;
    out.k = k_index;
    out.roots = quartic_roots(p);
    const double slack = 1e-12;
    double best = std::numeric_limits<double>::infinity();
    for (const cplx& r : out.roots) {
        if (!is_real_root(r)) continue;
        const double x = r.real();
        const bool ok = fl == Flavor::bosonic ? x >= -slack : (x >= -slack && x <= 1.0 + slack);
        if (ok && x < best) best = x;
    }
    if (!std::isfinite(best)) {
        std::ostringstream os;
        os << "no admissible real stationary root at k index " << k_index << "; roots:";
        for (const cplx& r : out.roots) os << " (" << r.real() << (r.imag() < 0 ? "" : "+") << r.imag() << "i)";
        throw numerical_error(os.str());
    }
    const double d = poly_deriv(p, best);
    if (d != 0.0) {
        const double polished = best - poly_eval(p, best) / d;
        if (std::abs(poly_eval(p, polished)) <= std::abs(poly_eval(p, best))) best = polished;
    }
    if (best < 0.0) best = 0.0;
    out.selected = best;
    out.residual = std::abs(poly_eval(p, best));
    out.f = stationary_f(fl, c, best);
    return out;
}

inline StationarySolution solve_stationary(Flavor fl, const ModelParams& params, int workers = 1) {
    validate(params);
    require_linear(params, "steady-state");
    if (!(params.gamma < 0))
        throw domain_error("stationary branch is only selected for gamma < 0 (got gamma = " +
                           std::to_string(params.gamma) + ")");
    if (fl == Flavor::fermionic && params.dimension != 1)
        throw domain_error("fermionic theory is defined in one dimension only");
    StationarySolution sol;
    sol.flavor = fl;
    sol.grid = make_kgrid(params);
    sol.roots.resize(sol.grid.size());
    parallel_for(sol.grid.size(), workers, [&](std::size_t i) {
        sol.roots[i] = select_root(fl, coeffs(fl, params, sol.grid.momentum(i)), i);
    });
    double acc = 0.0;
    for (const auto& r : sol.roots) acc += r.selected;
    sol.magnetization = 0.5 - acc / static_cast<double>(sol.grid.size());
    return sol;
}

}  // namespace nhsw
