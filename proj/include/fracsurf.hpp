#pragma once

#include "fracsurf/core.hpp"
#include "fracsurf/crossing.hpp"
#include "fracsurf/curvature.hpp"
#include "fracsurf/functionals.hpp"
#include "fracsurf/geometry.hpp"
#include "fracsurf/kernel.hpp"
#include "fracsurf/quadrature.hpp"
#include "fracsurf/solid.hpp"
