#include "semvox/mathstat.hpp"

#include <cmath>
#include <limits>

#include "semvox/error.hpp"

namespace semvox {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Acklam's rational approximation, |relative error| < 1.2e-9.
double quantile_seed(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

} // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ValidationError("norm_quantile: p must be in (0, 1)");
    }
    double x = quantile_seed(p);
    // Newton on the CDF, with a sign-based bracket so the iteration
    // cannot leave the root interval.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 4; ++iter) {
        double f = norm_cdf(x) - p;
        double g = norm_pdf(x);
        if (f == 0.0 || g == 0.0) break;
        if (f > 0.0) hi = x; else lo = x;
        double step = f / g;
        double next = x - step;
        if (next == x) break; // converged to an ulp
        if (!(next > lo && next < hi)) {
            if (std::isinf(lo) || std::isinf(hi)) break;
            next = 0.5 * (lo + hi);
            if (next == x || next == lo || next == hi) break;
        }
        x = next;
    }
    return x;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw ValidationError("mean of empty range");
    double s = 0.0;
    for (double v : xs) s += v;
    return s / static_cast<double>(xs.size());
}

double population_sd(std::span<const double> xs) {
    double m = mean(xs);
    double s = 0.0;
    for (double v : xs) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

} // namespace semvox
