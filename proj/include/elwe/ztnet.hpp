// Umbrella header for the zero-trust networking stack.
#pragma once

#include "elwe/ztnet/agent.hpp"
#include "elwe/ztnet/attack.hpp"
#include "elwe/ztnet/broker.hpp"
#include "elwe/ztnet/cidr.hpp"
#include "elwe/ztnet/clock.hpp"
#include "elwe/ztnet/cpa.hpp"
#include "elwe/ztnet/frame.hpp"
#include "elwe/ztnet/lru.hpp"
#include "elwe/ztnet/mac.hpp"
#include "elwe/ztnet/metrics.hpp"
#include "elwe/ztnet/policy.hpp"
#include "elwe/ztnet/retry.hpp"
#include "elwe/ztnet/tcp.hpp"
