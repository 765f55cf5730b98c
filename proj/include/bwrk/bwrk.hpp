#pragma once

#include "bwrk/baselines.hpp"
#include "bwrk/core.hpp"
#include "bwrk/driver.hpp"
#include "bwrk/environments.hpp"
#include "bwrk/harness.hpp"
#include "bwrk/minimizers.hpp"
#include "bwrk/rng.hpp"
