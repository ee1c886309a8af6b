#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "smoothcert/distributions.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/vector.hpp"

namespace smoothcert {

/// Total variation distance with provenance. Exact values collapse the
/// enclosure to a point; brackets and Monte Carlo estimates keep lo <= hi.
struct TVResult {
    enum class Provenance { Exact, Bracket, MonteCarlo };

    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    Provenance provenance = Provenance::Exact;
    std::size_t n = 0;        // MonteCarlo only
    double ci_level = 0.0;    // MonteCarlo only

    static TVResult exact(double v);
    static TVResult bracket(double lo, double hi);
    static TVResult monte_carlo(double v, double halfwidth, std::size_t n,
                                double ci_level);

    bool is_exact() const { return provenance == Provenance::Exact; }
    std::string provenance_string() const;
};

/// TV between N(0, sigma^2 I) and its copy shifted by a vector of l2 norm
/// shift_l2. The exact value comes from the one-dimensional reduction along
/// the shift; a multiplicative bracket around min{1, shift/sigma} (constants
/// 1/200 and 9/2, valid for d > 1) rides along for cross-checks.
struct GaussianShiftTV {
    TVResult tv;          // exact
    double bracket_lo;    // min{1, shift/sigma} / 200
    double bracket_hi;    // (9/2) * min{1, shift/sigma}, may exceed 1
};
GaussianShiftTV tv_gaussian_shift(double sigma, double shift_l2);

/// TV between the uniform law on the box [-r, r]^d and its copy shifted by v:
/// 1 - prod_i max{0, 1 - |v_i| / (2r)}.
TVResult tv_uniform_box_shift(double r, const DenseVector& v);

/// Worst-case box TV over all shifts with sup-norm at most eps; the maximizer
/// is the all-eps corner. For eps in [0, r] the closed form is checked
/// against the enclosing pair 1 - e^{-d eps / 2r} <= tv <= 1 - 4^{-d eps / 2r}.
TVResult tv_uniform_box_worst_shift(double r, std::size_t d, double eps);

/// Monte Carlo TV estimate via E_{x~D} max(0, 1 - q(x)/p(x)), where q is the
/// density of D shifted by v. Requires D to expose densities. The confidence
/// interval is a normal approximation at ci_level.
TVResult tv_monte_carlo(const NoiseDistribution& dist, const DenseVector& v,
                        std::size_t n, Rng& rng, double ci_level = 0.99);

/// Exact shifted TV where a closed form exists (Gaussian, uniform box);
/// nullopt otherwise.
std::optional<TVResult> shifted_tv_exact(const NoiseDistribution& dist,
                                         const DenseVector& v);

/// Largest probability mass any interval of width eps can carry under the
/// law: sup_a cdf(a + eps) - cdf(a), located by a coarse grid followed by
/// golden-section refinement (densities here are unimodal).
double max_interval_mass(const OneDimLaw& law, double eps);

}  // namespace smoothcert
