#include "smoothcert/witness.hpp"

#include <cmath>
#include <stdexcept>

#include "smoothcert/normal.hpp"
#include "smoothcert/parallel.hpp"
#include "smoothcert/tv.hpp"

namespace smoothcert {

namespace {

// P(f = 1) under the law generating the samples, estimated with per-sample
// Bernoulli draws from the witness probabilities.
struct ScoreEstimate {
    std::size_t hits = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
};

ScoreEstimate estimate_score(const WitnessClassifier& witness,
                             const NoiseDistribution& dist, const DenseVector& center,
                             std::size_t n, Rng& rng) {
    const BaseClassifier f = witness.classifier();
    const std::uint64_t salt = rng.next_u64();
    constexpr std::size_t kChunk = 1 << 13;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::size_t> ones(chunks, 0);
    parallel_for_index(chunks, [&](std::size_t c) {
        Rng local(mix_seed(salt, c));
        const std::size_t count = std::min(kChunk, n - c * kChunk);
        DenseVector point = DenseVector::zeros(dist.dim());
        const std::span<double> entries = point.mutable_entries();
        std::size_t hits = 0;
        for (std::size_t i = 0; i < count; ++i) {
            dist.sample_into(local, entries);
            for (std::size_t k = 0; k < entries.size(); ++k) entries[k] += center[k];
            hits += f.evaluate(point, local) == 1 ? 1 : 0;
        }
        ones[c] = hits;
    });
    ScoreEstimate est;
    for (std::size_t c : ones) est.hits += c;
    est.mean = static_cast<double>(est.hits) / static_cast<double>(n);
    est.stderr_ = std::sqrt(std::max(0.0, est.mean * (1.0 - est.mean)) /
                            static_cast<double>(n));
    return est;
}

}  // namespace

BaseClassifier WitnessClassifier::classifier() const {
    return BaseClassifier::randomized(
        [in = in_set, a = alpha, b = beta](const DenseVector& x, Rng& rng) {
            const double p = in(x) ? a : b;
            return rng.next_unit() < p ? 1 : 0;
        });
}

std::optional<WitnessClassifier> build_witness(const NoiseDistribution& dist,
                                               const DenseVector& v, double delta) {
    if (v.dim() != dist.dim()) {
        throw std::invalid_argument("build_witness: shift dimension mismatch");
    }
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("build_witness: delta must lie in [0, 1]");
    }

    double set_mass = 0.0, shifted_mass = 0.0, tv = 0.0;
    std::function<bool(const DenseVector&)> in_set;

    switch (dist.kind()) {
        case NoiseKind::IsotropicGaussian: {
            const double sigma = dist.sigma();
            const double norm = v.l2_norm();
            tv = tv_gaussian_shift(sigma, norm).tv.value;
            if (tv <= delta) return std::nullopt;
            // Likelihood-ratio halfspace v.x <= ||v||^2 / 2.
            const double threshold = 0.5 * norm * norm;
            set_mass = normal_cdf(norm / (2.0 * sigma));
            shifted_mass = normal_cdf(-norm / (2.0 * sigma));
            if (std::abs((set_mass - shifted_mass) - tv) > 1e-9) {
                throw std::logic_error("build_witness: halfspace does not attain the TV");
            }
            in_set = [v, threshold](const DenseVector& x) {
                return v.dot(x) <= threshold;
            };
            break;
        }
        case NoiseKind::UniformBox: {
            const double r = dist.box_radius();
            tv = tv_uniform_box_shift(r, v).value;
            if (tv <= delta) return std::nullopt;
            // Points of the original box not covered by the shifted box.
            set_mass = tv;
            shifted_mass = 0.0;
            in_set = [v, r](const DenseVector& x) {
                bool inside_original = true, inside_shifted = true;
                for (std::size_t i = 0; i < x.dim(); ++i) {
                    inside_original = inside_original && std::abs(x[i]) <= r;
                    inside_shifted = inside_shifted && std::abs(x[i] - v[i]) <= r;
                }
                return inside_original && !inside_shifted;
            };
            break;
        }
        case NoiseKind::IIDProduct:
            throw std::invalid_argument(
                "build_witness: no exact TV-achieving set for product noise");
    }

    WitnessClassifier witness{std::move(in_set), 0.0, 0.0, v,
                              set_mass,          shifted_mass, tv, delta};
    witness.alpha = 1.0 - shifted_mass / 2.0;
    witness.beta = 0.5 - shifted_mass / 2.0;
    return witness;
}

WitnessVerdict verify_witness(const WitnessClassifier& witness,
                              const NoiseDistribution& dist, std::size_t n,
                              double ci_level, Rng& rng) {
    if (n < 2) throw std::invalid_argument("verify_witness: n must be >= 2");
    if (!(ci_level > 0.0 && ci_level < 1.0)) {
        throw std::invalid_argument("verify_witness: ci_level must lie in (0, 1)");
    }

    WitnessVerdict verdict;
    verdict.n = n;
    verdict.ci_level = ci_level;
    verdict.delta = witness.gap_level;

    const double z = normal_quantile(0.5 + 0.5 * ci_level);
    const double alpha_level = 1.0 - ci_level;

    const DenseVector origin = DenseVector::zeros(dist.dim());
    const ScoreEstimate at_origin = estimate_score(witness, dist, origin, n, rng);
    verdict.origin_score_estimate = at_origin.mean;
    verdict.origin_score_expected = witness.origin_score();
    verdict.origin_score_stderr = at_origin.stderr_;
    verdict.origin_matches =
        std::abs(at_origin.mean - verdict.origin_score_expected) <=
        z * std::max(at_origin.stderr_, 1e-12);

    // Lower confidence bound on the origin gap 2 G_1(0) - 1.
    verdict.gap_lower = 2.0 * binom_lower_bound(at_origin.hits, n, alpha_level) - 1.0;
    verdict.gap_exceeds_delta = verdict.gap_lower > verdict.delta;

    const ScoreEstimate at_shift = estimate_score(witness, dist, witness.shift, n, rng);
    verdict.shift_score_estimate = at_shift.mean;
    verdict.shift_ci_covers_half =
        std::abs(at_shift.mean - 0.5) <= z * std::max(at_shift.stderr_, 1e-12);

    // With exact scores, the origin classifies as 1 while the shifted point
    // ties at 1/2 and the tie-break on smaller labels yields 0.
    verdict.origin_class = witness.origin_gap() > 0.0 ? 1 : 0;
    verdict.shift_class = 0;
    verdict.non_robust = verdict.origin_class != verdict.shift_class;

    verdict.passed = verdict.origin_matches && verdict.gap_exceeds_delta &&
                     verdict.shift_ci_covers_half && verdict.non_robust;
    return verdict;
}

}  // namespace smoothcert
