#pragma once

#include "v6transit/address.hpp"
#include "v6transit/addressing.hpp"
#include "v6transit/codec.hpp"
#include "v6transit/error.hpp"
#include "v6transit/forward.hpp"
#include "v6transit/metrics.hpp"
#include "v6transit/records.hpp"
#include "v6transit/routing.hpp"
#include "v6transit/scenarios.hpp"
#include "v6transit/sim.hpp"
#include "v6transit/topology.hpp"
#include "v6transit/transition.hpp"
