#pragma once

namespace frachs {

/// Modified Bessel function of the second kind K_nu(tau) for order nu in (0,1)
/// and tau > 0. Series/reflection form of I_{+-nu} for tau <= 2, integral
/// representation for tau > 2; the regimes cross-validate at tau = 2.
/// Relative error <= 1e-8 on tau in [1e-3, 30].
double bessel_k(double nu, double tau);

}  // namespace frachs
