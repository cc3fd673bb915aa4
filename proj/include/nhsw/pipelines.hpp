// pipelines.hpp - standard quench -> observe -> light-cone chains for the 1D and 2D runs

#pragma once

#include <vector>

#include "nhsw/lightcone.hpp"
#include "nhsw/observables.hpp"
#include "nhsw/quench.hpp"

namespace nhsw {

inline ModelParams chain_params(double gamma, int n_sites = 200) {
    ModelParams p;
    p.J = 1.0;
    p.h = 5.0;
    p.gamma = gamma;
    p.dimension = 1;
    p.n_sites = n_sites;
    return p;
}

struct LightCone1DSettings {
    double t_end{13.0};
    int steps{300};
    int r_max{30};        // field computed for R = 0..r_max
    int window_min{8};    // edge and ridges are tracked on R in [window_min, window_max]
    int window_max{20};
    double threshold{1e-3};
    RidgeOptions ridge{};
    int workers{1};
};

struct LightCone1D {
    CorrelationField eom;
    CorrelationField guess;
    EdgeFit edge_eom;
    EdgeFit edge_guess;
    RidgeReport ridges_eom;
    RidgeReport ridges_guess;
};

inline LightCone1D lightcone_1d(const ModelParams& post, const LightCone1DSettings& s = {}) {
    const Trajectory tr = run_quench(Flavor::bosonic, quench_from(post, s.t_end, s.steps), {s.workers, true});
    if (tr.divergence) throw numerical_error("1D light-cone run diverged before t_end");
    LightCone1D out;
    const auto dist = line_offsets(0, s.r_max);
    out.eom = one_body_correlation(tr, dist, s.workers);
    out.guess = guess_correlation(post, {}, dist, tr.times);
    const CorrelationField we = window(out.eom, s.window_min, s.window_max);
    const CorrelationField wg = window(out.guess, s.window_min, s.window_max);
    out.edge_eom = edge_velocity(we, {s.threshold, true});
    out.edge_guess = edge_velocity(wg, {s.threshold, true});
    out.ridges_eom = track_extrema(we, s.ridge);
    out.ridges_guess = track_extrema(wg, s.ridge);
    return out;
}

struct LightCone2DSettings {
    double t_end{10.0};
    int steps{300};
    int half_width{25};   // field on the square [-half_width, half_width]^2
    double threshold{1e-2};
    int workers{1};
};

struct LightCone2D {
    CorrelationField field;
    EdgeFit axis;
    EdgeFit radial;
};

inline LightCone2D lightcone_2d(const ModelParams& post, const LightCone2DSettings& s = {}) {
    const Trajectory tr = run_quench(Flavor::bosonic, quench_from(post, s.t_end, s.steps), {s.workers, true});
    if (tr.divergence) throw numerical_error("2D light-cone run diverged before t_end");
    LightCone2D out;
    out.field = one_body_correlation(tr, square_offsets(s.half_width), s.workers);
    out.axis = radial_edge_2d(out.field, {s.threshold, EdgeMode::axis});
    out.radial = radial_edge_2d(out.field, {s.threshold, EdgeMode::radial});
    return out;
}

}  // namespace nhsw
