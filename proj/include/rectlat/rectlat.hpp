#pragma once

// Lattice energies, Landau coefficients and structural transitions of 2D rectangular
// lattices with Laplace-representable pair potentials.

#include "rectlat/critical.hpp"
#include "rectlat/energy.hpp"
#include "rectlat/errors.hpp"
#include "rectlat/expansion.hpp"
#include "rectlat/lattice_theta.hpp"
#include "rectlat/phasescan.hpp"
#include "rectlat/potential.hpp"
#include "rectlat/powerseries.hpp"
#include "rectlat/quadrature.hpp"
#include "rectlat/theta.hpp"
