#pragma once

namespace smoothcert {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, computed through the erfc kernel. Absolute error
/// is below 1e-14 over the whole real line.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1): rational initial guess refined by
/// bracketed Newton iterations on normal_cdf itself, so the pair is
/// self-consistent to ~1e-13. Throws std::invalid_argument outside (0, 1).
double normal_quantile(double p);

}  // namespace smoothcert
