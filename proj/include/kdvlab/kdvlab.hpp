#pragma once
// Periodic pseudospectral laboratory for filtered low-regularity KdV
// integrators: spectral core, one-step schemes, rough data synthesis,
// convergence studies and discrete Bourgain-space diagnostics.
#include "kdvlab/bourgain.hpp"
#include "kdvlab/config.hpp"
#include "kdvlab/experiments.hpp"
#include "kdvlab/fft.hpp"
#include "kdvlab/field.hpp"
#include "kdvlab/grid.hpp"
#include "kdvlab/initial_data.hpp"
#include "kdvlab/io.hpp"
#include "kdvlab/multiplier.hpp"
#include "kdvlab/pool.hpp"
#include "kdvlab/product.hpp"
#include "kdvlab/quadrature.hpp"
#include "kdvlab/rate_fit.hpp"
#include "kdvlab/rng.hpp"
#include "kdvlab/schemes.hpp"
