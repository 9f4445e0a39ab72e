// bosonic.hpp
// Umbrella header for the numerics library (Eigen only; io.hpp adds JSON).

#pragma once

#include "capacity.hpp"
#include "fock.hpp"
#include "gaussian.hpp"
#include "spectral.hpp"
#include "tail.hpp"
#include "tracedist.hpp"
