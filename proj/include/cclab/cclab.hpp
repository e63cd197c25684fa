#pragma once

#include "cclab/cocycle_ops.hpp"
#include "cclab/config.hpp"
#include "cclab/conjugacy.hpp"
#include "cclab/errors.hpp"
#include "cclab/generator.hpp"
#include "cclab/holonomy.hpp"
#include "cclab/models.hpp"
#include "cclab/operator.hpp"
#include "cclab/rates.hpp"
#include "cclab/regression.hpp"
#include "cclab/report.hpp"
#include "cclab/sampling.hpp"
#include "cclab/su_path.hpp"
#include "cclab/su_weights.hpp"
#include "cclab/torus.hpp"
#include "cclab/trig.hpp"
