#pragma once

#include "wolf/spin_core.hpp"
#include "wolf/hamiltonian.hpp"
#include "wolf/bessel.hpp"
#include "wolf/analytic.hpp"
#include "wolf/propagator.hpp"
#include "wolf/experiments.hpp"
