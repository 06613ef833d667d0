#pragma once

namespace frachs {

/// Parameter pack for the weighted fractional inequality: dimension n,
/// operator order s, weight order sigma, and the derived constants used
/// throughout. Immutable after construction.
struct FracParams {
    int n = 2;                  // spatial dimension, n >= 2
    double s = 0.5;             // fractional order, s in (0,1)
    double sigma = 0.25;        // weight order, sigma in (0,s)
    double two_star_sigma = 0;  // critical exponent 2n/(n-2 sigma)
    double c_s = 0;             // 4^s Gamma(1+s) / (2s Gamma(1-s))
    double q_frak = 0;          // sigma (n-2s)/(n-2 sigma)
    double y_frak = 0;          // (n-2s)/2

    /// Exponent of |x| inside the weighted Lebesgue norm: (sigma-s) 2*_sigma (< 0).
    double weight_exponent() const { return (sigma - s) * two_star_sigma; }
};

/// Build the parameter pack; rejects sigma outside (0,s), s outside (0,1), n < 2.
FracParams make_params(int n, double s, double sigma);

}  // namespace frachs
