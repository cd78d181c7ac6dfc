#pragma once

#include "error.hpp"
#include "numeric.hpp"
#include "geom_core.hpp"
#include "random.hpp"
#include "gaussian_approx.hpp"
#include "cell_integrator.hpp"
#include "dual_arrangement.hpp"
#include "visibility_engine.hpp"
#include "mc_oracle.hpp"
#include "scene_io.hpp"
#include "svg.hpp"
