#include "nomad/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nomad/errors.hpp"

namespace nomad {

namespace {

// W. J. Cody's rational Chebyshev approximations for erf/erfc
// (Math. Comp. 23, 1969; the SPECFUN coefficients). Three regimes:
// |x| <= 0.46875, 0.46875 < |x| <= 4, |x| > 4.
constexpr double kA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                          3.77485237685302021e+02, 3.20937758913846947e+03,
                          1.85777706184603153e-01};
constexpr double kB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                          1.28261652607737228e+03, 2.84423683343917062e+03};
constexpr double kC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                          6.61191906371416295e+01, 2.98635138197400131e+02,
                          8.81952221241769090e+02, 1.71204761263407058e+03,
                          2.05107837782607147e+03, 1.23033935479799725e+03,
                          2.15311535474403846e-08};
constexpr double kD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                          5.37181101862009858e+02, 1.62138957456669019e+03,
                          3.29079923573345963e+03, 4.36261909014324716e+03,
                          3.43936767414372164e+03, 1.23033935480374942e+03};
constexpr double kP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                          1.25781726111229246e-01, 1.60837851487422766e-02,
                          6.58749161529837803e-04, 1.63153871373020978e-02};
constexpr double kQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                          5.27905102951428412e-01, 6.05183413124413191e-02,
                          2.33520497626869185e-03};

constexpr double kInvSqrtPi = 5.6418958354775628695e-01;  // 1/sqrt(pi)

double erf_small(double x) {
    const double y = std::fabs(x);
    const double z = y * y;
    double num = kA[4] * z;
    double den = z;
    for (int i = 0; i < 3; ++i) {
        num = (num + kA[i]) * z;
        den = (den + kB[i]) * z;
    }
    return x * (num + kA[3]) / (den + kB[3]);
}

double erfc_mid(double y) {
    double num = kC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
        num = (num + kC[i]) * y;
        den = (den + kD[i]) * y;
    }
    const double ratio = (num + kC[7]) / (den + kD[7]);
    // exp(-y^2) split to keep precision for large y.
    const double ysq = std::floor(y * 16.0) / 16.0;
    return std::exp(-ysq * ysq) * std::exp(-(y - ysq) * (y + ysq)) * ratio;
}

double erfc_large(double y) {
    const double z = 1.0 / (y * y);
    double num = kP[5] * z;
    double den = z;
    for (int i = 0; i < 4; ++i) {
        num = (num + kP[i]) * z;
        den = (den + kQ[i]) * z;
    }
    double ratio = z * (num + kP[4]) / (den + kQ[4]);
    ratio = (kInvSqrtPi - ratio) / y;
    const double ysq = std::floor(y * 16.0) / 16.0;
    return std::exp(-ysq * ysq) * std::exp(-(y - ysq) * (y + ysq)) * ratio;
}

// erfc for any finite x.
double erfc_impl(double x) {
    const double y = std::fabs(x);
    double result;
    if (y <= 0.46875) {
        return 1.0 - erf_small(x);
    }
    if (y <= 4.0) {
        result = erfc_mid(y);
    } else if (y < 26.5) {
        result = erfc_large(y);
    } else {
        result = 0.0;
    }
    return x < 0.0 ? 2.0 - result : result;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

} // namespace

double normal_cdf(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return 0.5 * erfc_impl(-x * kInvSqrt2);
}

TestResult two_proportion_z(long yes1, long n1, long yes2, long n2) {
    if (n1 < 1 || n2 < 1) {
        throw ConfigError("group sizes must be >= 1");
    }
    if (yes1 < 0 || yes1 > n1 || yes2 < 0 || yes2 > n2) {
        throw ConfigError("success counts must lie in [0, n]");
    }
    const double total_yes = double(yes1 + yes2);
    const double total_n = double(n1 + n2);
    if (total_yes == 0.0 || total_yes == total_n) {
        throw UndefinedStatisticError(
            "pooled proportion is degenerate (" + std::to_string(long(total_yes)) + "/" +
            std::to_string(long(total_n)) + "); the test statistic is undefined");
    }

    const double p1 = double(yes1) / double(n1);
    const double p2 = double(yes2) / double(n2);
    const double diff = p2 - p1;
    const double ss = double(n1) * p1 * (1.0 - p1) + double(n2) * p2 * (1.0 - p2);

    TestResult result;
    if (ss == 0.0) {
        // Complete separation: both groups are constant but differ.
        result.z = diff > 0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
        result.p = 0.0;
        return result;
    }
    const double s2 = ss / double(n1 + n2 - 2);
    const double se = std::sqrt(s2 * (1.0 / double(n1) + 1.0 / double(n2)));
    result.z = diff / se;
    result.p = 2.0 * (1.0 - normal_cdf(std::fabs(result.z)));
    return result;
}

} // namespace nomad
