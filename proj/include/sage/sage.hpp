#pragma once

#include "sage/baseline.hpp"
#include "sage/errors.hpp"
#include "sage/mapping.hpp"
#include "sage/network.hpp"
#include "sage/schedule.hpp"
#include "sage/solver.hpp"
#include "sage/verify.hpp"
