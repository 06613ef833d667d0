#include "frachs/math.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace frachs {

namespace {

// Lanczos coefficients for g = 7 (Godfrey's table).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

double lanczos_gamma_positive(double x) {
    // valid for x >= 0.5
    const double z = x - 1.0;
    double series = kLanczos[0];
    for (int i = 1; i < 9; ++i) series += kLanczos[i] / (z + i);
    const double t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * series;
}

}  // namespace

double gamma_fn(double x) {
    if (std::isnan(x)) throw std::invalid_argument("gamma_fn: NaN argument");
    if (x <= 0.0 && x == std::floor(x))
        throw std::invalid_argument("gamma_fn: nonpositive integer argument");
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma_positive(1.0 - x));
    }
    return lanczos_gamma_positive(x);
}

double beta_fn(double a, double b) { return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b); }

double sphere_area(int k) {
    if (k < 0) throw std::invalid_argument("sphere_area: negative dimension");
    if (k == 0) return 2.0;
    const double kk = static_cast<double>(k + 1);
    return 2.0 * std::pow(std::numbers::pi, kk / 2.0) / gamma_fn(kk / 2.0);
}

double cutoff(double v, double r) {
    if (r <= 0.0) throw std::invalid_argument("cutoff: radius must be positive");
    v = std::abs(v);
    if (v <= 0.5 * r) return 1.0;
    if (v >= r) return 0.0;
    const double theta = (v - 0.5 * r) / (0.5 * r);
    return 1.0 - theta * theta * (3.0 - 2.0 * theta);
}

double cutoff_deriv(double v, double r) {
    if (r <= 0.0) throw std::invalid_argument("cutoff: radius must be positive");
    const double a = std::abs(v);
    if (a <= 0.5 * r || a >= r) return 0.0;
    const double theta = (a - 0.5 * r) / (0.5 * r);
    const double d = -(6.0 * theta - 6.0 * theta * theta) / (0.5 * r);
    return v < 0.0 ? -d : d;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need at least two matched samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    for (size_t i = 0; i < x.size(); ++i)
        f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.slope * x[i] - f.intercept));
    return f;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] == 0.0) continue;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::abs(y[i])));
    }
    return fit_line(lx, ly).slope;
}

std::vector<double> geometric_nodes(double t0, double t_max, double ratio) {
    if (t0 <= 0.0 || t_max <= t0 || ratio <= 1.0)
        throw std::invalid_argument("geometric_nodes: need 0 < t0 < t_max and ratio > 1");
    std::vector<double> nodes;
    for (double t = t0; t <= t_max; t *= ratio) nodes.push_back(t);
    return nodes;
}

}  // namespace frachs
