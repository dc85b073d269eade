#include "cuff/math_util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

namespace cuff::num {

double log_norm_cdf(double z) {
    if (z > -8.0) {
        double p = norm_cdf(z);
        if (p > 0.0) return std::log(p);
    }
    // Asymptotic expansion of the lower tail: Phi(z) ~ phi(z)/|z| * (1 - 1/z^2 + 3/z^4)
    double z2 = z * z;
    return -0.5 * z2 - 0.5 * std::log(2.0 * M_PI) - std::log(-z) +
           std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

double mills_ratio(double z) {
    if (z < -30.0) {
        // phi/Phi -> -z * (1 + 1/z^2 - ...)^-1
        return -z / (1.0 - 1.0 / (z * z));
    }
    return std::exp(std::log(norm_pdf(z)) - log_norm_cdf(z));
}

double norm_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_inv: p outside (0, 1)");
    // Acklam's approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley step on Phi(x) - p = 0.
    double e = norm_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

double cubic_invert(double c3, double c2, double c1, double y, double lo, double hi,
                    double tol) {
    double flo = cubic_eval(c3, c2, c1, lo) - y;
    double fhi = cubic_eval(c3, c2, c1, hi) - y;
    if (flo > 0.0) return lo;
    if (fhi < 0.0) return hi;
    double a = lo, b = hi;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        double f = cubic_eval(c3, c2, c1, x) - y;
        if (std::abs(f) <= tol) return x;
        if (f > 0.0) b = x; else a = x;
        double df = cubic_deriv(c3, c2, c1, x);
        double xn = (df > 0.0) ? x - f / df : 0.5 * (a + b);
        x = (xn > a && xn < b) ? xn : 0.5 * (a + b);
    }
    return x;
}

bool cubic_strictly_increasing(double c3, double c2, double c1, double lo, double hi) {
    // Check the derivative at the interval ends and at its interior extremum.
    if (cubic_deriv(c3, c2, c1, lo) <= 0.0) return false;
    if (cubic_deriv(c3, c2, c1, hi) <= 0.0) return false;
    if (c3 != 0.0) {
        double xv = -c2 / (3.0 * c3);
        if (xv > lo && xv < hi && cubic_deriv(c3, c2, c1, xv) <= 0.0) return false;
    }
    return true;
}

double polygon_area(const std::vector<std::pair<double, double>>& pts) {
    double s = 0.0;
    size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& [x0, y0] = pts[i];
        const auto& [x1, y1] = pts[(i + 1) % n];
        s += x0 * y1 - x1 * y0;
    }
    return 0.5 * s;
}

HermiteRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n < 1");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double off = std::sqrt(k / 2.0);
        J(k, k - 1) = off;
        J(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    HermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mu0 = std::sqrt(M_PI);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step, double ftol,
                             int max_eval) {
    const size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    for (size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    for (size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    NelderMeadResult res;
    while (evals < max_eval) {
        // Order the simplex.
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> sx(n + 1);
        std::vector<double> sf(n + 1);
        for (size_t i = 0; i <= n; ++i) {
            sx[i] = simplex[idx[i]];
            sf[i] = fv[idx[i]];
        }
        simplex = std::move(sx);
        fv = std::move(sf);

        if (std::abs(fv[n] - fv[0]) < ftol * (std::abs(fv[0]) + ftol)) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / double(n);

        auto blend = [&](double t) {
            std::vector<double> x(n);
            for (size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
            return x;
        };
        auto xr = blend(-1.0);
        double fr = eval(xr);
        if (fr < fv[0]) {
            auto xe = blend(-2.0);
            double fe = eval(xe);
            if (fe < fr) { simplex[n] = xe; fv[n] = fe; }
            else { simplex[n] = xr; fv[n] = fr; }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            auto xc = blend(fr < fv[n] ? -0.5 : 0.5);
            double fc = eval(xc);
            if (fc < std::min(fr, fv[n])) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = eval(simplex[i]);
                }
            }
        }
    }
    res.x = simplex[0];
    res.fmin = fv[0];
    res.evaluations = evals;
    return res;
}

}  // namespace cuff::num
