#pragma once

// Umbrella header.

#include "tscale/conditions.hpp"
#include "tscale/config.hpp"
#include "tscale/expr.hpp"
#include "tscale/phi.hpp"
#include "tscale/solver.hpp"
#include "tscale/timescale.hpp"
