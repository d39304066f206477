#pragma once

#include "sop/error.hpp"
#include "sop/specfun.hpp"
#include "sop/philox.hpp"
#include "sop/model.hpp"
#include "sop/analytic.hpp"
#include "sop/montecarlo.hpp"
#include "sop/powerallo.hpp"
#include "sop/experiment.hpp"
