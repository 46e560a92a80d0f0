#pragma once

// Umbrella header.

#include "fraclap/errors.hpp"
#include "fraclap/params.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/specfun.hpp"
#include "fraclap/rearrange.hpp"
#include "fraclap/ballgreen.hpp"
#include "fraclap/spectral.hpp"
#include "fraclap/sources.hpp"
#include "fraclap/comparelab.hpp"
#include "fraclap/csv.hpp"
