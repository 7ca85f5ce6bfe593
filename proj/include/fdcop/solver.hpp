// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "fdcop/af_dpop.hpp"
#include "fdcop/dpop.hpp"
#include "fdcop/ef_dpop.hpp"
#include "fdcop/hcms.hpp"

namespace fdcop {

/// Every knob of every engine; each engine reads the ones it needs.
struct EngineConfig {
  EngineKind engine = EngineKind::kDpop;
  std::size_t points = 3;
  std::size_t moves = 10;
  double alpha = 0.01;
  std::size_t k_clusters = 10;
  std::size_t iterations = 1;
  Interpolation interpolation = Interpolation::kInverseDistance;
  std::uint64_t seed = 0;
  std::size_t row_cap = kDefaultRowCap;
  std::size_t piece_cap = kDefaultPieceCap;
  std::size_t interpolation_work_cap = kDefaultInterpolationWorkCap;
};

inline AfConfig af_config(const EngineConfig& c) {
  AfConfig a;
  a.points = c.points;
  a.alpha = c.alpha;
  a.moves = c.moves;
  a.k_clusters = c.k_clusters;
  a.clustered = c.engine == EngineKind::kCafDpop;
  a.interpolation = c.interpolation;
  a.seed = c.seed;
  a.row_cap = c.row_cap;
  a.interpolation_work_cap = c.interpolation_work_cap;
  return a;
}

/// Runs one engine on one problem. Capacity failures surface as
/// CapacityExceeded with the statistics gathered so far.
inline RunResult run(const Problem& problem, const EngineConfig& config) {
  switch (config.engine) {
    case EngineKind::kDpop:
      return solve_dpop(problem, DpopConfig{config.points, config.row_cap});
    case EngineKind::kEfDpop:
      return solve_ef_dpop(problem, EfConfig{config.piece_cap});
    case EngineKind::kAfDpop:
    case EngineKind::kCafDpop:
      return solve_af_dpop(problem, af_config(config));
    case EngineKind::kHcms:
      return solve_hcms(problem,
                        HcmsConfig{config.points, config.iterations, config.alpha});
  }
  throw ArgumentError("unknown engine");
}

}  // namespace fdcop
