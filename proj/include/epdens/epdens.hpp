#pragma once

#include "epdens/basis.hpp"
#include "epdens/ep_density.hpp"
#include "epdens/errors.hpp"
#include "epdens/nuisance.hpp"
#include "epdens/params.hpp"
#include "epdens/pipeline.hpp"
#include "epdens/simlab.hpp"
#include "epdens/test_functions.hpp"
#include "epdens/theory.hpp"
