#pragma once

#include "railrelay/baselines.hpp"
#include "railrelay/blockage_graph.hpp"
#include "railrelay/channel.hpp"
#include "railrelay/errors.hpp"
#include "railrelay/harness.hpp"
#include "railrelay/mode.hpp"
#include "railrelay/relay_decision.hpp"
#include "railrelay/rng.hpp"
#include "railrelay/scenario.hpp"
#include "railrelay/scheduler.hpp"
