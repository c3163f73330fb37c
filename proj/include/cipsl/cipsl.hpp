#pragma once

// Convenience include for the whole library.

#include "cipsl/characteristics.hpp"
#include "cipsl/experiment.hpp"
#include "cipsl/grid.hpp"
#include "cipsl/interpolation.hpp"
#include "cipsl/norms.hpp"
#include "cipsl/problems.hpp"
#include "cipsl/quadrature.hpp"
#include "cipsl/reference.hpp"
#include "cipsl/schemes.hpp"
#include "cipsl/spectral.hpp"
