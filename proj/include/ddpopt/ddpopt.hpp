#pragma once

#include "ddpopt/errors.hpp"
#include "ddpopt/special_functions.hpp"
#include "ddpopt/two_state.hpp"
#include "ddpopt/dop853.hpp"
#include "ddpopt/propagator.hpp"
#include "ddpopt/quadrature.hpp"
#include "ddpopt/pulse_families.hpp"
#include "ddpopt/ddp_engine.hpp"
#include "ddpopt/stokes.hpp"
#include "ddpopt/gaussian_analytic.hpp"
#include "ddpopt/experiments.hpp"
#include "ddpopt/checks.hpp"
