#pragma once

#include "fracsurf/cov.hpp"
#include "fracsurf/extrapolation.hpp"
#include "fracsurf/montecarlo.hpp"
#include "fracsurf/pv.hpp"
#include "fracsurf/quadrature_rules.hpp"
#include "fracsurf/surface_pv.hpp"
