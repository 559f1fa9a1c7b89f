#ifndef VGROF_VGROF_HPP_
#define VGROF_VGROF_HPP_

#include "vgrof/calculus.hpp"
#include "vgrof/certificate.hpp"
#include "vgrof/conditions.hpp"
#include "vgrof/flow.hpp"
#include "vgrof/grid.hpp"
#include "vgrof/io.hpp"
#include "vgrof/phi.hpp"
#include "vgrof/rng.hpp"
#include "vgrof/solver.hpp"

#endif  // VGROF_VGROF_HPP_
