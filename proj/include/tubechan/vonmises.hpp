// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <vector>

namespace tubechan {

// Deterministic zero-mean Von Mises distribution math used by the equal-area
// angle discretization. The CDF is computed by adaptive quadrature of the
// rescaled density exp(kappa*(cos x - 1)); this stays finite for any kappa,
// unlike the Bessel-series form.
class VonMisesCdf {
  public:
    explicit VonMisesCdf(double kappa);

    double kappa() const { return kappa_; }

    // Unnormalized density exp(kappa*(cos x - 1)).
    double density_raw(double x) const;

    // CDF on [-pi, pi], F(-pi) = 0, F(pi) = 1.
    double cdf(double x) const;

    // Inverse CDF by bisection; |F(result) - p| converges to ~1e-15.
    double quantile(double p) const;

  private:
    double kappa_;
    double normalizer_; // integral of density_raw over [-pi, pi]
};

} // namespace tubechan
