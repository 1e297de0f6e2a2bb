#ifndef FEXP_FEXP_HPP
#define FEXP_FEXP_HPP

/// Umbrella header: nonparametric prediction for data on a two-dimensional
/// lattice via cepstral canonical factorization of the spectral density,
/// a rival truncated-autoregression predictor, and a Monte Carlo harness.

#include "fexp/ar.hpp"
#include "fexp/cepstrum.hpp"
#include "fexp/errors.hpp"
#include "fexp/fft.hpp"
#include "fexp/ingest.hpp"
#include "fexp/lattice.hpp"
#include "fexp/mc.hpp"
#include "fexp/predictor.hpp"
#include "fexp/rng.hpp"
#include "fexp/spectral.hpp"

#endif  // FEXP_FEXP_HPP
