#ifndef NOMAD_STATS_HPP
#define NOMAD_STATS_HPP

namespace nomad {

// Standard normal CDF built on a rational-approximation erfc (Cody's
// coefficients), dependency-free and accurate to well under 1e-7 over
// [-8, 8]. Tested against a high-precision series oracle.
double normal_cdf(double x);

struct TestResult {
    double z;  // signed statistic, positive when group 2 exceeds group 1
    double p;  // two-tailed, p == 2 * (1 - normal_cdf(|z|))
};

// Two-sample test of equal proportions: z = (p2 - p1) / sqrt(s2 * (1/n1 + 1/n2))
// with s2 the Bessel-corrected pooled variance of the 0/1 outcomes,
// s2 = (n1*p1*(1-p1) + n2*p2*(1-p2)) / (n1 + n2 - 2), and a two-tailed p
// from the normal CDF. Degenerate pooled proportion (0 or 1) is an error;
// zero within-group variance with unequal proportions yields z = ±inf, p = 0.
TestResult two_proportion_z(long yes1, long n1, long yes2, long n2);

} // namespace nomad

#endif
