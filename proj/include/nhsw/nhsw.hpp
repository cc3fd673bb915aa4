// nhsw.hpp - umbrella include

#pragma once

#include "nhsw/errors.hpp"
#include "nhsw/io.hpp"
#include "nhsw/lightcone.hpp"
#include "nhsw/model.hpp"
#include "nhsw/observables.hpp"
#include "nhsw/parallel.hpp"
#include "nhsw/pipelines.hpp"
#include "nhsw/quench.hpp"
#include "nhsw/rk4.hpp"
#include "nhsw/single_mode.hpp"
#include "nhsw/spectra.hpp"
#include "nhsw/steady_state.hpp"
