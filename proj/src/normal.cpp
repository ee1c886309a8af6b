#include "smoothcert/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace smoothcert {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// Acklam-style rational approximation of the inverse normal CDF.
// Good to ~1e-9 on its own; used only as the Newton starting point.
double quantile_initial_guess(double p) {
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
    const double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
    }
    // Work on the lower half where the erfc kernel is relatively accurate;
    // 1 - p is exact for p >= 1/2.
    if (p > 0.5) return -normal_quantile(1.0 - p);
    double x = quantile_initial_guess(p);
    double lo = -40.0, hi = 40.0;
    for (int iter = 0; iter < 60; ++iter) {
        const double f = normal_cdf(x) - p;
        if (f > 0.0) {
            hi = x;
        } else if (f < 0.0) {
            lo = x;
        } else {
            return x;
        }
        const double deriv = normal_pdf(x);
        double next = x - f / deriv;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);  // Newton left the bracket, bisect instead
        }
        if (std::abs(next - x) < 1e-15 * (1.0 + std::abs(x))) {
            return next;
        }
        x = next;
    }
    return x;
}

}  // namespace smoothcert
