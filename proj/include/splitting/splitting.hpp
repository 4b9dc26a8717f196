#pragma once

#include "splitting/diagnostics.hpp"
#include "splitting/errors.hpp"
#include "splitting/geometry.hpp"
#include "splitting/linesearch.hpp"
#include "splitting/operators.hpp"
#include "splitting/problems.hpp"
#include "splitting/solvers.hpp"
