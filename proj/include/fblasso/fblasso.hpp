#ifndef FBLASSO_FBLASSO_HPP
#define FBLASSO_FBLASSO_HPP

// Umbrella header for the fused-lasso solver library.

#include "fblasso/core.hpp"
#include "fblasso/data.hpp"
#include "fblasso/linalg.hpp"
#include "fblasso/problem.hpp"
#include "fblasso/prox.hpp"
#include "fblasso/solvers.hpp"
#include "fblasso/verify.hpp"

#endif  // FBLASSO_FBLASSO_HPP
