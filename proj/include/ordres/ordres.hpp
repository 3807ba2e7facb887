#pragma once

#include "ordres/errors.hpp"
#include "ordres/experiment.hpp"
#include "ordres/image.hpp"
#include "ordres/lattice_sets.hpp"
#include "ordres/lp.hpp"
#include "ordres/metrics.hpp"
#include "ordres/operators.hpp"
#include "ordres/phantoms.hpp"
#include "ordres/rng.hpp"
#include "ordres/solver.hpp"
#include "ordres/sparse.hpp"
#include "ordres/tightening.hpp"
#include "ordres/toml.hpp"
