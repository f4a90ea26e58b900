#pragma once

#include "bernshape.hpp"
#include "boundary.hpp"
#include "envmodel.hpp"
#include "expshape.hpp"
#include "lppsim.hpp"
#include "particles.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
