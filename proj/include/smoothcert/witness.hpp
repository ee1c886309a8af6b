#pragma once

#include <functional>
#include <optional>

#include "smoothcert/certify.hpp"
#include "smoothcert/distributions.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/vector.hpp"

namespace smoothcert {

/// The adversarial randomized classifier that defeats smoothing whenever the
/// shift v moves the noise by more than delta in total variation. It answers
/// 1 with probability alpha on the TV-achieving set S and with probability
/// beta elsewhere, where alpha = 1 - D'(S)/2 and beta = 1/2 - D'(S)/2 for
/// the shifted law D' = D + v (so alpha - beta = 1/2). Under any law P,
/// P(f = 1) = 1/2 + (P(S) - D'(S))/2.
struct WitnessClassifier {
    std::function<bool(const DenseVector&)> in_set;
    double alpha = 0.0;
    double beta = 0.0;
    DenseVector shift;
    double set_mass = 0.0;          // D(S), exact
    double shifted_set_mass = 0.0;  // D'(S), exact
    double tv_exact = 0.0;          // tv(D, D + v)
    double gap_level = 0.0;         // the delta the witness was built against

    /// Score gap of the smoothed classifier at the origin: D(S) - D'(S).
    double origin_gap() const { return set_mass - shifted_set_mass; }
    /// Exact smoothed score of class 1 at the origin.
    double origin_score() const { return 0.5 + origin_gap() / 2.0; }

    BaseClassifier classifier() const;
};

/// Builds the witness for Gaussian noise (S is the likelihood-ratio
/// halfspace v.x <= ||v||^2/2, which attains the TV supremum) or the uniform
/// box (S is the support slab left uncovered by the shifted box). Returns
/// nullopt when tv(D, D + v) <= delta, in which case no witness exists at
/// this gap level. Product noise has no exact TV-achieving set here and is
/// rejected.
std::optional<WitnessClassifier> build_witness(const NoiseDistribution& dist,
                                               const DenseVector& v, double delta);

/// Monte Carlo validation of a witness at gap level delta:
///  - the class-1 score at the origin matches 1/2 + (D(S) - D'(S))/2,
///  - its lower confidence bound certifies a gap above delta,
///  - the score at v is 1/2 (CI must cover it), so the lexicographic
///    tie-break sends the smoothed class at v to 0 while the origin is 1.
struct WitnessVerdict {
    std::size_t n = 0;
    double ci_level = 0.0;
    double delta = 0.0;

    double origin_score_estimate = 0.0;
    double origin_score_expected = 0.0;
    double origin_score_stderr = 0.0;
    bool origin_matches = false;

    double gap_lower = 0.0;
    bool gap_exceeds_delta = false;

    double shift_score_estimate = 0.0;
    bool shift_ci_covers_half = false;

    ClassId origin_class = 1;  // exact-score smoothed classes
    ClassId shift_class = 0;
    bool non_robust = false;  // origin_class != shift_class

    bool passed = false;
};
WitnessVerdict verify_witness(const WitnessClassifier& witness,
                              const NoiseDistribution& dist, std::size_t n,
                              double ci_level, Rng& rng);

}  // namespace smoothcert
