#pragma once
// Umbrella header for the numerical core. Config parsing and the CLI driver
// (config.hpp, cli.hpp) need yaml-cpp and are included separately.

#include "pgeom/error.hpp"
#include "pgeom/linalg.hpp"
#include "pgeom/ode.hpp"
#include "pgeom/quadrature.hpp"
#include "pgeom/parallel.hpp"
#include "pgeom/fit.hpp"
#include "pgeom/manifold.hpp"
#include "pgeom/jacobi.hpp"
#include "pgeom/curvature.hpp"
#include "pgeom/hypothesis.hpp"
#include "pgeom/oscint.hpp"
#include "pgeom/kuznecov.hpp"
#include "pgeom/verify.hpp"
