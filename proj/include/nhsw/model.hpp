// model.hpp - model parameters, hypercubic momentum grids, quadratic coefficients

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nhsw/errors.hpp"

namespace nhsw {

using cplx = std::complex<double>;

enum class Flavor { bosonic, fermionic };

inline const char* to_string(Flavor f) { return f == Flavor::bosonic ? "boson" : "fermion"; }

inline Flavor parse_flavor(const std::string& s) {
    if (s == "boson" || s == "bosonic") return Flavor::bosonic;
    if (s == "fermion" || s == "fermionic") return Flavor::fermionic;
    throw domain_error("unknown flavor '" + s + "' (expected boson or fermion)");
}

struct ModelParams {
    double J{1.0};            // nearest-neighbour coupling
    double h{5.0};            // transverse field
    double gamma{0.0};        // dissipation strength, either sign
    double gamma_prime{0.0};  // quartic non-Hermitian term, single mode only
    int dimension{1};
    int n_sites{200};         // sites per axis, even
};

inline void validate(const ModelParams& p) {
    if (p.n_sites < 2 || p.n_sites % 2 != 0)
        throw domain_error("n_sites must be even and >= 2 (k = pi has to lie on the grid), got " +
                           std::to_string(p.n_sites));
    if (p.dimension < 1) throw domain_error("dimension must be >= 1");
    if (!std::isfinite(p.J) || !std::isfinite(p.h) || !std::isfinite(p.gamma) ||
        !std::isfinite(p.gamma_prime))
        throw domain_error("couplings must be finite");
    if (p.gamma_prime < 0) throw domain_error("gamma_prime must be >= 0");
}

// D > 3 is accepted by the hypercubic formulas but nothing above 3 is exercised.
inline bool untested_dimension(const ModelParams& p) { return p.dimension > 3; }

inline void require_linear(const ModelParams& p, const char* where) {
    if (p.gamma_prime != 0)
        throw domain_error(std::string(where) + ": gamma_prime is only used by the single-mode module");
}

class KGrid {
public:
    KGrid() = default;
    KGrid(int dimension, int n_sites) : dim_(dimension), n_(n_sites) {
        std::size_t total = 1;
        for (int d = 0; d < dim_; ++d) total *= static_cast<std::size_t>(n_);
        size_ = total;
        axis_.resize(n_);
        for (int i = 0; i < n_; ++i)
            axis_[i] = 2.0 * std::numbers::pi * static_cast<double>(i - n_ / 2) / n_;
        k_.resize(size_ * dim_);
        for (std::size_t flat = 0; flat < size_; ++flat) {
            std::size_t rem = flat;
            for (int d = dim_ - 1; d >= 0; --d) {
                k_[flat * dim_ + d] = axis_[rem % n_];
                rem /= n_;
            }
        }
    }

    int dimension() const { return dim_; }
    int n_sites() const { return n_; }
    std::size_t size() const { return size_; }

    std::span<const double> momentum(std::size_t flat) const {
        return {k_.data() + flat * dim_, static_cast<std::size_t>(dim_)};
    }
    // Axis values, index i <-> n = i - N/2.
    const std::vector<double>& axis() const { return axis_; }

    // Integer labels n_j in [-N/2, N/2).
    std::vector<int> labels(std::size_t flat) const {
        std::vector<int> n(dim_);
        for (int d = dim_ - 1; d >= 0; --d) {
            n[d] = static_cast<int>(flat % n_) - n_ / 2;
            flat /= n_;
        }
        return n;
    }

    std::size_t flat_index(std::span<const int> labels) const {
        if (static_cast<int>(labels.size()) != dim_) throw domain_error("label dimension mismatch");
        std::size_t flat = 0;
        for (int d = 0; d < dim_; ++d) {
            int n = labels[d];
            if (n < -n_ / 2 || n >= n_ / 2) throw domain_error("momentum label off grid");
            flat = flat * n_ + static_cast<std::size_t>(n + n_ / 2);
        }
        return flat;
    }

    // Index of -k; -pi maps to itself through periodicity.
    std::size_t negate(std::size_t flat) const {
        auto n = labels(flat);
        for (auto& v : n) v = wrap(-v);
        return flat_index(n);
    }

    // Label wrapped into [-N/2, N/2).
    int wrap(int n) const {
        int m = ((n + n_ / 2) % n_ + n_) % n_;
        return m - n_ / 2;
    }

private:
    int dim_{0};
    int n_{0};
    std::size_t size_{0};
    std::vector<double> axis_;
    std::vector<double> k_;
};

inline KGrid make_kgrid(const ModelParams& p) {
    validate(p);
    return KGrid(p.dimension, p.n_sites);
}

struct CoeffPair {
    cplx a;
    cplx b;
    Flavor flavor{Flavor::bosonic};
};

inline CoeffPair bosonic_coeffs(const ModelParams& p, std::span<const double> k) {
    double s = 0.0;
    for (double kj : k) s += std::cos(kj);
    const double b = 0.5 * p.J * s;
    return {cplx(p.h + b, p.gamma), cplx(b, 0.0), Flavor::bosonic};
}

inline CoeffPair fermionic_coeffs(const ModelParams& p, double k) {
    if (p.dimension != 1)
        throw domain_error("fermionic theory is defined in one dimension only (dimension = " +
                           std::to_string(p.dimension) + ")");
    return {cplx(0.25 * p.J * std::cos(k) + 0.5 * p.h, 0.5 * p.gamma),
            cplx(0.0, -0.25 * p.J * std::sin(k)), Flavor::fermionic};
}

inline CoeffPair coeffs(Flavor f, const ModelParams& p, std::span<const double> k) {
    if (f == Flavor::bosonic) return bosonic_coeffs(p, k);
    if (k.size() != 1)
        throw domain_error("fermionic theory is defined in one dimension only");
    return fermionic_coeffs(p, k[0]);
}

}  // namespace nhsw
