#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace cuff::num {

/// Phi^-1(0.75): stimulus increment between the 50% and 75% points of a unit probit.
inline constexpr double kProbit75 = 0.674489750196082;

/// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Standard normal density.
inline double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

/// log Phi(z), stable in the deep lower tail.
double log_norm_cdf(double z);

/// Inverse Mills ratio phi(z)/Phi(z), stable for very negative z.
double mills_ratio(double z);

/// Inverse standard normal CDF (Acklam's rational approximation + one Halley step).
double norm_inv(double p);

/// y = c3 x^3 + c2 x^2 + c1 x (the zero-intercept cubic used throughout).
inline double cubic_eval(double c3, double c2, double c1, double x) {
    return ((c3 * x + c2) * x + c1) * x;
}

inline double cubic_deriv(double c3, double c2, double c1, double x) {
    return (3.0 * c3 * x + 2.0 * c2) * x + c1;
}

/// Invert a cubic known to be strictly increasing on [lo, hi].
/// Bisection with a Newton polish; |f(x) - y| <= tol on return.
double cubic_invert(double c3, double c2, double c1, double y, double lo, double hi,
                    double tol = 1e-9);

/// True when 3*c3 x^2 + 2*c2 x + c1 > 0 for all x in [lo, hi].
bool cubic_strictly_increasing(double c3, double c2, double c1, double lo, double hi);

/// Signed shoelace area of a closed polygon given as (x, y) samples.
double polygon_area(const std::vector<std::pair<double, double>>& pts);

/// Gauss-Hermite nodes/weights for weight exp(-t^2) (Golub-Welsch).
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
HermiteRule gauss_hermite(int n);

/// Derivative-free simplex minimizer; good enough for 2-4 parameter likelihoods.
struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    int evaluations = 0;
    bool converged = false;
};
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step = 0.5,
                             double ftol = 1e-10, int max_eval = 4000);

inline double logsumexp(const std::vector<double>& v) {
    double m = -INFINITY;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace cuff::num
