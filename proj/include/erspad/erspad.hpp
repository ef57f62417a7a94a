// ============================================================================
// erspad.hpp -- umbrella header.
// ============================================================================
#pragma once

#include "erspad/errors.hpp"
#include "erspad/numeric.hpp"
#include "erspad/nhpp.hpp"
#include "erspad/er_model.hpp"
#include "erspad/paralyzing.hpp"
#include "erspad/rng.hpp"
#include "erspad/simulator.hpp"
#include "erspad/histogram.hpp"
#include "erspad/fit.hpp"
#include "erspad/inference.hpp"
#include "erspad/io.hpp"
#include "erspad/version.hpp"
