#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smoothcert/distributions.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/tv.hpp"
#include "smoothcert/vector.hpp"

namespace smoothcert {

/// Parameters shared by the noise-magnitude lower bounds: norm order p >= 2
/// (infinity allowed), dimension d, robust radius eps >= 0, and shift-TV
/// bound delta in (0, 1]. delta = 0 is rejected because the bounds carry
/// 1/delta^2 factors; delta = 1 degrades every bound to zero.
struct BoundConfig {
    NormOrder p;
    std::size_t d;
    double eps;
    double delta;

    BoundConfig(NormOrder p, std::size_t d, double eps, double delta);
};

/// Chebyshev route: eps^2 (1 - delta) / 8 lower-bounds E eta^2 for any scalar
/// law whose eps-shift TV is at most delta.
double onedim_bound_chebyshev(double eps, double delta);

/// Interval-covering route, strongest when delta is small. first_moment
/// bounds E|eta|, second_moment bounds E eta^2, and tau_star is the Markov
/// threshold eps(1-delta)/(4 delta) at which the first bound is attained.
struct MarkovBounds {
    double first_moment;   // eps/8 * (1-delta)^2 / delta
    double second_moment;  // eps^2/64 * (1-delta)^4 / delta^2
    double tau_star;
};
MarkovBounds onedim_bound_markov(double eps, double delta);

/// Combined scalar bound eps^2/200 * (1-delta)/delta^2; never exceeds the
/// better of the Chebyshev and interval-covering routes (checked).
double onedim_bound_combined(double eps, double delta);

/// Combined scalar first-moment bound eps/12 * (1-delta)/delta.
double onedim_first_moment_combined(double eps, double delta);

/// E ||eta||_2^2 >= eps^2 d^(2-2/p) / 800 * (1-delta)/delta^2 for any noise
/// whose lp-ball shifts of radius eps all stay within TV delta.
double l2sq_lower_bound(const BoundConfig& cfg);

/// E ||eta||_2 >= eps d^(1-1/p) / 24 * (1-delta)/delta.
double first_moment_lower_bound(const BoundConfig& cfg);

/// Peeling: entry i (1-based) lower-bounds the i-th largest per-coordinate
/// variance by eps^2 (d-i+1)^(1-2/p) / 800 * (1-delta)/delta^2. Entries are
/// nonincreasing for p >= 2 and constant at p = 2.
std::vector<double> peeling_bounds(const BoundConfig& cfg);

/// The peeling entry at index ceil(top_quantile * d): the variance floor
/// shared by all coordinates above that quantile. The default 0.01 floor is
/// the one that holds for at least 99% of the coordinates and grows like
/// d^(1-2/p).
double peeling_floor(const BoundConfig& cfg, double top_quantile = 0.01);

/// For p > 2, i.i.d. product noise must be heavy-tailed:
/// P(|X| > s) >= (scale / s)^exponent for some s > scale, with
/// exponent = 2p/(p-2) and scale = eps (1-delta)/delta / 24.
struct HeavyTailThreshold {
    double exponent;
    double scale;
};
inline constexpr double kHeavyTailConstant = 1.0 / 24.0;
HeavyTailThreshold heavy_tail_threshold(double eps, double delta, NormOrder p);

/// Per-coordinate Gaussian deviation sigma = (9/2) (eps/delta) d^(1/2-1/p)
/// that keeps every eps-lp shift within TV delta (near-optimal in d).
double gaussian_sizing(const BoundConfig& cfg);

/// Box radius r = (eps/delta) d ln(4) / 2 keeping every sup-norm eps shift of
/// the uniform box within TV delta; the guarantee is re-checked through the
/// closed-form worst-shift TV. Requires p = infinity.
double uniform_box_sizing(const BoundConfig& cfg);

/// Empirical probe of the max-coordinate growth behind the heavy-tail claim.
/// E max_i |X_i| over d i.i.d. draws is estimated from n_batches batches and
/// compared against the d^(1/2-1/p) eps h(delta) growth reference and, when
/// the tail condition G(x) <= (scale/(x))^exponent holds for all x > scale,
/// against the Gamma-ratio upper bound implied by it. Constants in the growth
/// reference are reported as ratios rather than asserted.
struct HeavyTailVerdict {
    std::size_t d = 0;
    std::size_t n_batches = 0;
    double emax_estimate = 0.0;
    double emax_stderr = 0.0;
    double growth_reference = 0.0;   // d^(1/2-1/p) * eps * (1-delta)/delta
    double empirical_ratio = 0.0;    // emax / growth_reference
    double analytic_upper = 0.0;     // Gamma-ratio bound at the 1/24 scale
    bool tail_condition_checked = false;
    bool tail_condition_holds = false;
    bool emax_below_analytic = true;
};
HeavyTailVerdict heavy_tail_test(const OneDimLaw& law, std::size_t d,
                                 const BoundConfig& cfg, std::size_t n_batches,
                                 Rng& rng);

/// Directional second-moment check: estimates E (v . eta)^2 by Monte Carlo,
/// obtains delta = tv(D, D+v) (exact where available), and tests
/// E (v . eta)^2 >= ||v||_2^4 / 200 * (1-delta)/delta^2 with CI slack.
struct DirectionMomentCheck {
    bool skipped = false;           // v = 0: both sides degenerate
    double moment_estimate = 0.0;
    double moment_stderr = 0.0;
    TVResult tv;
    double bound = 0.0;
    double ratio = 0.0;
    bool holds = true;
};
DirectionMomentCheck verify_direction_moment(const NoiseDistribution& dist,
                                             const DenseVector& v,
                                             std::size_t n_mc, Rng& rng);

/// Every closed-form bound for one configuration, keyed by a stable id.
struct BoundReport {
    BoundConfig cfg;
    std::vector<std::pair<std::string, double>> entries;

    double at(std::string_view id) const;  // throws if the id is absent
};
BoundReport bound_report(const BoundConfig& cfg);

/// CSV rows "p,d,eps,delta,bound_id,value" (header optional) and the JSON
/// mirror of the same report.
std::string bound_report_csv(const BoundReport& report, bool with_header);
std::string bound_report_json(const BoundReport& report);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace smoothcert
