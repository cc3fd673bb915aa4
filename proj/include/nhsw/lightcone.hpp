// lightcone.hpp - correlation-edge and ridge velocities from space-time fields

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "nhsw/observables.hpp"

namespace nhsw {

struct EdgePoint {
    double distance{0.0};
    double time{0.0};
};

struct EdgeFit {
    std::vector<EdgePoint> points;
    double velocity{0.0};
    double intercept{0.0};
    double rms{0.0};
    double threshold{std::numeric_limits<double>::quiet_NaN()};
};

// Ordinary least squares of distance against time.
inline EdgeFit fit_velocity(const std::vector<EdgePoint>& pts) {
    if (pts.size() < 3) throw domain_error("velocity fit needs at least 3 points, got " + std::to_string(pts.size()));
    const double n = static_cast<double>(pts.size());
    double mt = 0.0, mr = 0.0;
    for (const auto& p : pts) {
        mt += p.time;
        mr += p.distance;
    }
    mt /= n;
    mr /= n;
    double stt = 0.0, str = 0.0;
    for (const auto& p : pts) {
        stt += (p.time - mt) * (p.time - mt);
        str += (p.time - mt) * (p.distance - mr);
    }
    if (stt == 0.0) throw domain_error("velocity fit is degenerate: all activation times are equal");
    EdgeFit fit;
    fit.points = pts;
    fit.velocity = str / stt;
    fit.intercept = mr - fit.velocity * mt;
    double ss = 0.0;
    for (const auto& p : pts) {
        const double e = p.distance - (fit.velocity * p.time + fit.intercept);
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

inline void require_line_field(const CorrelationField& f) {
    if (f.dimension != 1) throw domain_error("expected a field on a one-dimensional distance axis");
    if (f.times.size() < 2) throw domain_error("field needs at least two time samples");
}

// Rows of a 1D field with r_min <= R <= r_max, order kept.
inline CorrelationField window(const CorrelationField& f, int r_min, int r_max) {
    require_line_field(f);
    std::vector<std::size_t> rows;
    for (std::size_t j = 0; j < f.distances.size(); ++j)
        if (f.distances[j][0] >= r_min && f.distances[j][0] <= r_max) rows.push_back(j);
    CorrelationField out = f;
    out.distances.clear();
    out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(f.times.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.distances.push_back(f.distances[rows[i]]);
        out.values.row(static_cast<Eigen::Index>(i)) = f.values.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

struct ActivationOptions {
    double threshold_fraction{1e-3};
    bool skip_initial{true};  // rows already above threshold at the first sample carry no arrival time
};

// Earliest time per distance with |Re| >= fraction * max |Re| over the whole field.
inline std::vector<EdgePoint> activation_times(const CorrelationField& f, const ActivationOptions& opt = {}) {
    require_line_field(f);
    if (!(opt.threshold_fraction > 0 && opt.threshold_fraction < 1))
        throw domain_error("threshold fraction must lie in (0, 1)");
    const Eigen::MatrixXd re = f.values.real().cwiseAbs();
    const double level = opt.threshold_fraction * re.maxCoeff();
    std::vector<EdgePoint> pts;
    for (Eigen::Index j = 0; j < re.rows(); ++j)
        for (Eigen::Index t = 0; t < re.cols(); ++t)
            if (re(j, t) >= level && re(j, t) > 0) {
                if (!(t == 0 && opt.skip_initial))
                    pts.push_back({static_cast<double>(f.distances[j][0]), f.times[t]});
                break;
            }
    if (pts.empty()) throw domain_error("no activation found: threshold too high for this field");
    return pts;
}

inline EdgeFit edge_velocity(const CorrelationField& f, const ActivationOptions& opt = {}) {
    EdgeFit fit = fit_velocity(activation_times(f, opt));
    fit.threshold = opt.threshold_fraction;
    return fit;
}

struct RidgeOptions {
    double threshold_fraction{1e-3};  // extrema below this fraction of the field maximum are ignored
    double max_jump{0.3};             // largest time shift between linked extrema of adjacent distances
    std::size_t min_points{3};        // shorter ridges are discarded
    std::size_t dominant_min_points{5};
    std::size_t max_ridges{0};        // 0 keeps every ridge
};

struct RidgeReport {
    std::vector<EdgeFit> ridges;  // sorted by rms, best first
    std::optional<std::size_t> dominant;
};

// Extrema of Re value in time at each distance, linked across neighbouring distances.
inline RidgeReport track_extrema(const CorrelationField& f, const RidgeOptions& opt = {}) {
    require_line_field(f);
    if (f.times.size() < 3) throw domain_error("ridge tracking needs at least three time samples");
    const Eigen::MatrixXd re = f.values.real();
    const double level = opt.threshold_fraction * re.cwiseAbs().maxCoeff();
    const double dt = f.times[1] - f.times[0];
    const Eigen::Index nt = re.cols();

    std::vector<std::vector<EdgePoint>> chains;
    for (double kind : {1.0, -1.0}) {
        std::vector<std::vector<double>> ext(re.rows());
        for (Eigen::Index j = 0; j < re.rows(); ++j)
            for (Eigen::Index t = 1; t + 1 < nt; ++t) {
                const double a = kind * re(j, t - 1), b = kind * re(j, t), c = kind * re(j, t + 1);
                if (b > a && b >= c && std::abs(b) >= level) {
                    const double den = a - 2.0 * b + c;
                    const double shift = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
                    ext[j].push_back(f.times[t] + shift * dt);
                }
            }
        std::vector<std::vector<EdgePoint>> active;
        for (Eigen::Index j = 0; j < re.rows(); ++j) {
            const double r = static_cast<double>(f.distances[j][0]);
            std::vector<bool> used(ext[j].size(), false);
            std::vector<std::vector<EdgePoint>> next;
            for (auto& chain : active) {
                const double last = chain.back().time;
                std::optional<std::size_t> best;
                double best_d = 0.0;
                for (std::size_t i = 0; i < ext[j].size(); ++i) {
                    if (used[i]) continue;
                    const double d = std::abs(ext[j][i] - last);
                    if (d <= opt.max_jump && (!best || d < best_d)) {
                        best = i;
                        best_d = d;
                    }
                }
                if (best) {
                    used[*best] = true;
                    chain.push_back({r, ext[j][*best]});
                    next.push_back(std::move(chain));
                } else {
                    chains.push_back(std::move(chain));
                }
            }
            for (std::size_t i = 0; i < ext[j].size(); ++i)
                if (!used[i]) next.push_back({{r, ext[j][i]}});
            active = std::move(next);
        }
        for (auto& c : active) chains.push_back(std::move(c));
    }

    RidgeReport rep;
    for (const auto& c : chains) {
        if (c.size() < std::max<std::size_t>(3, opt.min_points)) continue;
        const bool flat = std::all_of(c.begin(), c.end(), [&](const EdgePoint& p) { return p.time == c.front().time; });
        if (flat) continue;
        EdgeFit fit = fit_velocity(c);
        fit.threshold = opt.threshold_fraction;
        rep.ridges.push_back(std::move(fit));
    }
    std::stable_sort(rep.ridges.begin(), rep.ridges.end(), [](const EdgeFit& a, const EdgeFit& b) { return a.rms < b.rms; });
    for (std::size_t i = 0; i < rep.ridges.size(); ++i)
        if (rep.ridges[i].points.size() >= opt.dominant_min_points) {
            rep.dominant = i;
            break;
        }
    if (opt.max_ridges > 0 && rep.ridges.size() > opt.max_ridges) {
        if (rep.dominant && *rep.dominant >= opt.max_ridges) {
            std::swap(rep.ridges[opt.max_ridges - 1], rep.ridges[*rep.dominant]);
            rep.dominant = opt.max_ridges - 1;
        }
        rep.ridges.resize(opt.max_ridges);
    }
    return rep;
}

enum class EdgeMode { radial, axis };

struct RadialOptions {
    double threshold_fraction{1e-2};  // relative to each time slice's maximum
    EdgeMode mode{EdgeMode::radial};
};

// Per time slice, the largest |R| (or largest x on the positive x axis) whose |Re| exceeds
// the fraction of that slice's maximum; the first sample is skipped.
inline EdgeFit radial_edge_2d(const CorrelationField& f, const RadialOptions& opt = {}) {
    if (f.dimension != 2) throw domain_error("radial tracking expects a two-dimensional field");
    if (!(opt.threshold_fraction > 0 && opt.threshold_fraction < 1))
        throw domain_error("threshold fraction must lie in (0, 1)");
    std::vector<EdgePoint> pts;
    for (Eigen::Index t = 1; t < f.values.cols(); ++t) {
        double peak = 0.0;
        for (Eigen::Index j = 0; j < f.values.rows(); ++j) peak = std::max(peak, std::abs(f.values(j, t).real()));
        if (peak == 0.0) continue;
        const double level = opt.threshold_fraction * peak;
        double far = -1.0;
        for (Eigen::Index j = 0; j < f.values.rows(); ++j) {
            const auto& r = f.distances[j];
            if (std::abs(f.values(j, t).real()) < level) continue;
            if (opt.mode == EdgeMode::axis) {
                if (r[1] != 0 || r[0] < 0) continue;
                far = std::max(far, static_cast<double>(r[0]));
            } else {
                far = std::max(far, std::hypot(static_cast<double>(r[0]), static_cast<double>(r[1])));
            }
        }
        if (far >= 0) pts.push_back({far, f.times[t]});
    }
    if (pts.empty()) throw domain_error("no activated sites found in the two-dimensional field");
    EdgeFit fit = fit_velocity(pts);
    fit.threshold = opt.threshold_fraction;
    return fit;
}

}  // namespace nhsw
