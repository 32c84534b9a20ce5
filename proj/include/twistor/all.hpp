#pragma once

#include "twistor/charts.hpp"
#include "twistor/curvature.hpp"
#include "twistor/parallel.hpp"
#include "twistor/rng.hpp"
#include "twistor/spaces.hpp"
#include "twistor/tensor4.hpp"
#include "twistor/twistor.hpp"
#include "twistor/types.hpp"
