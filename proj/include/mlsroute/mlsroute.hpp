#pragma once

#include "mlsroute/capacity.hpp"
#include "mlsroute/lattice.hpp"
#include "mlsroute/topology.hpp"
#include "mlsroute/topology_io.hpp"
#include "mlsroute/policy.hpp"
#include "mlsroute/policy_io.hpp"
#include "mlsroute/routing.hpp"
#include "mlsroute/routing_io.hpp"
#include "mlsroute/exact.hpp"
#include "mlsroute/constraint_check.hpp"
#include "mlsroute/lp_export.hpp"
#include "mlsroute/flowrules.hpp"
#include "mlsroute/bench.hpp"
