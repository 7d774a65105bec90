#pragma once

#include "circpc/distributions.hpp"
#include "circpc/divergence.hpp"
#include "circpc/error.hpp"
#include "circpc/harness.hpp"
#include "circpc/inference.hpp"
#include "circpc/pc_priors.hpp"
#include "circpc/reference_priors.hpp"
#include "circpc/rng.hpp"
#include "circpc/special_functions.hpp"
