#pragma once

#include "fqlin/abelian.hpp"
#include "fqlin/analytic.hpp"
#include "fqlin/bethe.hpp"
#include "fqlin/ensemble.hpp"
#include "fqlin/errors.hpp"
#include "fqlin/experiments.hpp"
#include "fqlin/gf.hpp"
#include "fqlin/linalg.hpp"
#include "fqlin/peel.hpp"
#include "fqlin/plot.hpp"
#include "fqlin/rng.hpp"
#include "fqlin/stats.hpp"
#include "fqlin/system_io.hpp"
