#pragma once
// Umbrella header.

#include "shocklab/core.hpp"
#include "shocklab/profile.hpp"
#include "shocklab/weight.hpp"
#include "shocklab/certifier.hpp"
#include "shocklab/functionals.hpp"
#include "shocklab/solver.hpp"
#include "shocklab/poincare.hpp"
#include "shocklab/cli.hpp"
