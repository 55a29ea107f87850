#pragma once

#include "nhnse/akns.hpp"
#include "nhnse/asymptotics.hpp"
#include "nhnse/config.hpp"
#include "nhnse/datum.hpp"
#include "nhnse/errors.hpp"
#include "nhnse/extension.hpp"
#include "nhnse/fft.hpp"
#include "nhnse/fit.hpp"
#include "nhnse/gamma.hpp"
#include "nhnse/grid.hpp"
#include "nhnse/harness.hpp"
#include "nhnse/interp.hpp"
#include "nhnse/mat2.hpp"
#include "nhnse/parallel.hpp"
#include "nhnse/pde.hpp"
#include "nhnse/phase.hpp"
#include "nhnse/quadrature.hpp"
#include "nhnse/rh_delta.hpp"
#include "nhnse/scattering.hpp"
#include "nhnse/selftest.hpp"
#include "nhnse/svg.hpp"

