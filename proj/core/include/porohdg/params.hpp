// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "porohdg/check.hpp"

namespace porohdg {

/// Physical coefficients of the consolidation model plus the interior-penalty
/// parameter and the polynomial degree. Lame constants follow the plane-strain
/// relations lambda = E nu / ((1 + nu)(1 - 2 nu)), mu = E / (2 (1 + nu)).
struct ModelParams {
  double c0 = 0.0;      // specific storage coefficient, >= 0
  double alpha = 0.5;   // Biot-Willis constant, in (0, 1)
  double kappa = 1.0;   // permeability, > 0
  double E = 1.0;       // Young's modulus, > 0
  double nu = 0.3;      // Poisson ratio, in (0, 0.5)
  double beta = 0.0;    // interior penalty; 0 means "use default_beta(k)"
  int k = 1;            // polynomial degree, >= 1

  double mu() const { return E / (2.0 * (1.0 + nu)); }
  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }

  // Interior-penalty scaling in the degree; the constant is calibrated so the
  // generalized-eigenvalue coercivity check passes with margin at every
  // degree (4 k^2 sits below the threshold for k = 1 on this form).
  static double default_beta(int k) { return 4.0 * (k + 1) * (k + 1); }
  double penalty() const { return beta > 0.0 ? beta : default_beta(k); }

  void validate() const {
    POROHDG_REQUIRE(c0 >= 0.0, "ModelParams: c0 must be nonnegative, got " << c0);
    POROHDG_REQUIRE(alpha > 0.0 && alpha < 1.0,
                    "ModelParams: alpha must be in (0, 1), got " << alpha);
    POROHDG_REQUIRE(kappa > 0.0, "ModelParams: kappa must be positive, got " << kappa);
    POROHDG_REQUIRE(E > 0.0, "ModelParams: E must be positive, got " << E);
    POROHDG_REQUIRE(nu > 0.0 && nu < 0.5,
                    "ModelParams: nu must be in (0, 0.5), got " << nu);
    POROHDG_REQUIRE(beta >= 0.0, "ModelParams: beta must be nonnegative, got " << beta);
    POROHDG_REQUIRE(k >= 1, "ModelParams: polynomial degree k must be >= 1, got " << k);
  }
};

}  // namespace porohdg
