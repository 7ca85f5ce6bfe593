// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fdcop/model.hpp"

namespace fdcop::testing {

/// Variables x0..x{n-1}, owned by a0..a{n-1}, all on `dom`.
inline Problem make_problem(std::size_t n, std::vector<QuadraticUtility> fs,
                            ContinuousDomain dom = {-100.0, 100.0}) {
  std::vector<std::string> agents;
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < n; ++i) {
    agents.push_back("a" + std::to_string(i));
    vars.push_back(Variable{"x" + std::to_string(i), agents.back(), dom});
  }
  return Problem(std::move(agents), std::move(vars), std::move(fs));
}

/// f(x_i, x_j) with coefficients a, b, c, d, e, f0.
inline QuadraticUtility quad(VarIndex i, VarIndex j, double a, double b,
                             double c, double d, double e, double f0 = 0.0) {
  return QuadraticUtility{i, j, a, b, c, d, e, f0};
}

/// Random quadratic with coefficients in [-5, 5].
inline QuadraticUtility random_quad(std::mt19937_64& rng, VarIndex i,
                                    VarIndex j, bool concave = false) {
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> neg(-5.0, -0.1);
  double a = concave ? neg(rng) : coef(rng);
  double b = coef(rng);
  double c = concave ? neg(rng) : coef(rng);
  double d = coef(rng);
  double e = coef(rng);
  return quad(i, j, a, b, c, d, e);
}

}  // namespace fdcop::testing
