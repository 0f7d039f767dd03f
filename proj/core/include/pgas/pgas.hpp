// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pgas/amo.hpp"
#include "pgas/bench.hpp"
#include "pgas/collectives.hpp"
#include "pgas/config.hpp"
#include "pgas/cost_model.hpp"
#include "pgas/cutover.hpp"
#include "pgas/error.hpp"
#include "pgas/internode.hpp"
#include "pgas/rma.hpp"
#include "pgas/runtime.hpp"
#include "pgas/tuner.hpp"
#include "pgas/types.hpp"
