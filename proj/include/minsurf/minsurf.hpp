#pragma once

#include "minsurf/core.hpp"
#include "minsurf/wdata.hpp"
#include "minsurf/quadrature.hpp"
#include "minsurf/periods.hpp"
#include "minsurf/solver.hpp"
#include "minsurf/surface.hpp"
#include "minsurf/geometry.hpp"
#include "minsurf/asymptotics.hpp"
#include "minsurf/serialize.hpp"
#include "minsurf/verify.hpp"
