#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothcert/distributions.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/tv.hpp"
#include "smoothcert/vector.hpp"

namespace smoothcert {

using ClassId = int;
inline constexpr ClassId kAbstain = -1;

/// A base classifier: any map from inputs to integer class labels.
/// Deterministic rules ignore the Rng; randomized rules draw from it.
/// Evaluation must be re-entrant (the callable is shared across threads,
/// each thread passes its own Rng).
class BaseClassifier {
public:
    static BaseClassifier deterministic(std::function<ClassId(const DenseVector&)> fn);
    static BaseClassifier randomized(std::function<ClassId(const DenseVector&, Rng&)> fn);
    static BaseClassifier constant(ClassId label);
    /// Two-class halfspace rule: 1 when w.x + bias > 0, else 0.
    static BaseClassifier linear(DenseVector w, double bias);
    /// Parses "const:c=1" or "linear:w=0.1;-0.2;0.3,b=0.5" (weights are
    /// semicolon-separated).
    static BaseClassifier parse(std::string_view spec, std::size_t dim);

    ClassId evaluate(const DenseVector& x, Rng& rng) const { return fn_(x, rng); }

private:
    explicit BaseClassifier(std::function<ClassId(const DenseVector&, Rng&)> fn)
        : fn_(std::move(fn)) {}
    std::function<ClassId(const DenseVector&, Rng&)> fn_;
};

/// One-sided Clopper-Pearson bounds on a binomial proportion at level
/// 1 - alpha each.
double binom_lower_bound(std::size_t successes, std::size_t n, double alpha);
double binom_upper_bound(std::size_t successes, std::size_t n, double alpha);

struct ClassScore {
    ClassId label = 0;
    std::size_t count = 0;
    double estimate = 0.0;  // count / n
    double lower = 0.0;     // one-sided CP bounds at 1 - alpha
    double upper = 1.0;
};

/// Monte Carlo class scores of the smoothed classifier at x: counts of
/// f(x + eta) per class, sorted by count (ties by smaller label). gap_lower
/// is a 1 - alpha lower confidence bound on the top-vs-runner-up score gap,
/// via the binary reduction runner-up <= 1 - top.
struct SmoothedScore {
    std::vector<ClassScore> scores;
    std::size_t n = 0;
    double alpha = 0.0;
    ClassId top = kAbstain;
    ClassId runner_up = kAbstain;
    double gap_estimate = 0.0;
    double gap_lower = 0.0;
};
SmoothedScore smoothed_scores(const BaseClassifier& f, const NoiseDistribution& dist,
                              const DenseVector& x, std::size_t n, double alpha,
                              Rng& rng);

struct CertificationResult {
    ClassId predicted = kAbstain;
    double l2_radius = 0.0;
    double linf_radius = 0.0;
    double confidence = 0.0;
    std::size_t n0 = 0;
    std::size_t n = 0;
    double sigma = 0.0;

    bool abstained() const { return predicted == kAbstain; }
};

/// Gaussian-smoothing certificate: the top class is selected from n0
/// samples, its score is lower-bounded from n fresh samples, and the radius
/// is sigma * Phi^{-1}(p_lower) (the two-sided formula with the runner-up
/// bounded by 1 - p_lower). Abstains when the bound does not clear 1/2.
/// The distribution must be an isotropic Gaussian.
CertificationResult certify_l2(const BaseClassifier& f, const NoiseDistribution& dist,
                               const DenseVector& x, std::size_t n0, std::size_t n,
                               double alpha, Rng& rng);

/// Scales an l2 certificate to the sup norm: linf = l2 / sqrt(d).
CertificationResult certify_linf(CertificationResult result, std::size_t d);

/// Radius sigma/2 (Phi^{-1}(p_a) - Phi^{-1}(p_b)) for exactly known score
/// bounds p_a >= p_b.
double cohen_radius(double sigma, double p_a, double p_b);

enum class ShiftVerdictKind { Certified, NotCertified, Unknown };

struct ShiftVerdict {
    std::size_t shift_index = 0;
    std::optional<TVResult> tv;
    ShiftVerdictKind verdict = ShiftVerdictKind::Unknown;
    double margin = 0.0;  // gap_lower - 2 tv
    bool mc_checked = false;
    ClassId mc_class = kAbstain;  // empirical argmax at x + v when checked
};

/// Certifies g(x + v) = g(x) for each probe shift v whenever
/// gap_lower > 2 tv(D, D + v). TV is exact where a closed form exists, and
/// estimated by Monte Carlo (mc_n draws) when the distribution has a
/// density; otherwise the verdict is Unknown. When check_n > 0 each
/// certified shift is cross-checked by re-estimating the smoothed class at
/// x + v with check_n samples.
std::vector<ShiftVerdict> tv_ball_certificate(const NoiseDistribution& dist,
                                              const BaseClassifier& f,
                                              const DenseVector& x, double gap_lower,
                                              std::span<const DenseVector> probe_shifts,
                                              std::size_t check_n, Rng& rng,
                                              std::size_t mc_n = 0);

/// Empirical probe of the gap-versus-TV implication on one shift: estimates
/// the gap and the smoothed classes at x and x + v and flags a violation if
/// the certified precondition held but the classes differ.
struct GapTvCheck {
    double gap_estimate = 0.0;
    double gap_lower = 0.0;
    TVResult tv;
    ClassId class_at_x = kAbstain;
    ClassId class_at_xv = kAbstain;
    bool precondition = false;  // gap_lower > 2 tv
    bool violation = false;
};
GapTvCheck gap_vs_tv_robustness_check(const NoiseDistribution& dist,
                                      const BaseClassifier& f, const DenseVector& x,
                                      const DenseVector& v, std::size_t n, Rng& rng);

}  // namespace smoothcert
