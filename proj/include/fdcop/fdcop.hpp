// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// Umbrella header.

#pragma once

#include "fdcop/af_dpop.hpp"
#include "fdcop/bench.hpp"
#include "fdcop/dpop.hpp"
#include "fdcop/ef_dpop.hpp"
#include "fdcop/error.hpp"
#include "fdcop/format.hpp"
#include "fdcop/generators.hpp"
#include "fdcop/hcms.hpp"
#include "fdcop/io.hpp"
#include "fdcop/model.hpp"
#include "fdcop/oracle.hpp"
#include "fdcop/piecewise.hpp"
#include "fdcop/protocol.hpp"
#include "fdcop/pseudotree.hpp"
#include "fdcop/runtime.hpp"
#include "fdcop/solver.hpp"
#include "fdcop/table.hpp"
#include "fdcop/verify.hpp"
