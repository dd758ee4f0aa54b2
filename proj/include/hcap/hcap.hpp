#pragma once

// Capacity tools for state-dependent channels with a rate-limited,
// message-cognizant helper: exact information measures, the assisted-capacity
// optimizer with its time-sharing envelope, closed-form special cases, and a
// Monte-Carlo simulator of the achievability scheme.

#include "hcap/arimoto.hpp"
#include "hcap/capacity.hpp"
#include "hcap/channel.hpp"
#include "hcap/envelope.hpp"
#include "hcap/errors.hpp"
#include "hcap/inner.hpp"
#include "hcap/io.hpp"
#include "hcap/oracles.hpp"
#include "hcap/policy.hpp"
#include "hcap/prob.hpp"
#include "hcap/sim.hpp"
#include "hcap/version.hpp"
