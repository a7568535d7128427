#pragma once

// Umbrella header.
#include "lnls/error.hpp"
#include "lnls/fft.hpp"
#include "lnls/lattice.hpp"
#include "lnls/spectral.hpp"
#include "lnls/sampler.hpp"
#include "lnls/dynamics.hpp"
#include "lnls/reference.hpp"
#include "lnls/records.hpp"
#include "lnls/estimates.hpp"
#include "lnls/inequalities.hpp"
#include "lnls/parallel.hpp"
#include "lnls/harness.hpp"
#include "lnls/io.hpp"
#include "lnls/config.hpp"
