#include "frachs/params.hpp"

#include <cmath>
#include <stdexcept>

#include "frachs/math.hpp"

namespace frachs {

FracParams make_params(int n, double s, double sigma) {
    if (n < 2) throw std::invalid_argument("make_params: dimension n must be >= 2");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("make_params: s must lie in (0,1)");
    if (!(sigma > 0.0 && sigma < s))
        throw std::invalid_argument("make_params: sigma must lie in (0,s)");
    FracParams p;
    p.n = n;
    p.s = s;
    p.sigma = sigma;
    p.two_star_sigma = 2.0 * n / (n - 2.0 * sigma);
    p.c_s = std::pow(4.0, s) * gamma_fn(1.0 + s) / (2.0 * s * gamma_fn(1.0 - s));
    p.q_frak = sigma * (n - 2.0 * s) / (n - 2.0 * sigma);
    p.y_frak = (n - 2.0 * s) / 2.0;
    return p;
}

}  // namespace frachs
