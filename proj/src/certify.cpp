#include "smoothcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "smoothcert/normal.hpp"
#include "smoothcert/parallel.hpp"

namespace smoothcert {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
}

// Per-class counts of f(x + eta) over n draws, deterministic in the rng seed
// and independent of the worker count (fixed chunking, merge in chunk order).
std::map<ClassId, std::size_t> noisy_counts(const BaseClassifier& f,
                                            const NoiseDistribution& dist,
                                            const DenseVector& x, std::size_t n,
                                            Rng& rng) {
    const std::uint64_t salt = rng.next_u64();
    constexpr std::size_t kChunk = 1 << 13;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::map<ClassId, std::size_t>> partial(chunks);
    parallel_for_index(chunks, [&](std::size_t c) {
        Rng local(mix_seed(salt, c));
        const std::size_t count = std::min(kChunk, n - c * kChunk);
        DenseVector point = DenseVector::zeros(dist.dim());
        const std::span<double> entries = point.mutable_entries();
        auto& bucket = partial[c];
        for (std::size_t i = 0; i < count; ++i) {
            dist.sample_into(local, entries);
            for (std::size_t k = 0; k < entries.size(); ++k) entries[k] += x[k];
            ++bucket[f.evaluate(point, local)];
        }
    });
    std::map<ClassId, std::size_t> merged;
    for (const auto& bucket : partial) {
        for (const auto& [label, count] : bucket) merged[label] += count;
    }
    return merged;
}

}  // namespace

BaseClassifier BaseClassifier::deterministic(
    std::function<ClassId(const DenseVector&)> fn) {
    if (!fn) throw std::invalid_argument("BaseClassifier: empty rule");
    return BaseClassifier(
        [fn = std::move(fn)](const DenseVector& x, Rng&) { return fn(x); });
}

BaseClassifier BaseClassifier::randomized(
    std::function<ClassId(const DenseVector&, Rng&)> fn) {
    if (!fn) throw std::invalid_argument("BaseClassifier: empty rule");
    return BaseClassifier(std::move(fn));
}

BaseClassifier BaseClassifier::constant(ClassId label) {
    return BaseClassifier([label](const DenseVector&, Rng&) { return label; });
}

BaseClassifier BaseClassifier::linear(DenseVector w, double bias) {
    return BaseClassifier([w = std::move(w), bias](const DenseVector& x, Rng&) {
        return w.dot(x) + bias > 0.0 ? 1 : 0;
    });
}

BaseClassifier BaseClassifier::parse(std::string_view spec, std::size_t dim) {
    const std::size_t colon = spec.find(':');
    const std::string_view kind = spec.substr(0, colon);
    if (kind == "const") {
        const std::string_view rest = spec.substr(colon + 1);
        if (rest.substr(0, 2) != "c=") {
            throw std::invalid_argument("classifier spec: expected const:c=<label>");
        }
        return constant(static_cast<ClassId>(std::stol(std::string(rest.substr(2)))));
    }
    if (kind == "linear") {
        std::string_view rest = spec.substr(colon + 1);
        if (rest.substr(0, 2) != "w=") {
            throw std::invalid_argument("classifier spec: expected linear:w=...,b=...");
        }
        rest.remove_prefix(2);
        const std::size_t comma = rest.rfind(",b=");
        if (comma == std::string_view::npos) {
            throw std::invalid_argument("classifier spec: missing ,b=");
        }
        std::string weights(rest.substr(0, comma));
        std::replace(weights.begin(), weights.end(), ';', ',');
        DenseVector w = parse_vector(weights);
        if (w.dim() != dim) {
            throw std::invalid_argument("classifier spec: weight dimension mismatch");
        }
        const double bias = std::stod(std::string(rest.substr(comma + 3)));
        return linear(std::move(w), bias);
    }
    throw std::invalid_argument("classifier spec: unknown kind '" + std::string(kind) + "'");
}

double binom_lower_bound(std::size_t successes, std::size_t n, double alpha) {
    check_alpha(alpha);
    if (n < 1) throw std::invalid_argument("binom_lower_bound: n must be >= 1");
    if (successes > n) throw std::invalid_argument("binom_lower_bound: successes > n");
    if (successes == 0) return 0.0;
    return boost::math::ibeta_inv(static_cast<double>(successes),
                                  static_cast<double>(n - successes + 1), alpha);
}

double binom_upper_bound(std::size_t successes, std::size_t n, double alpha) {
    check_alpha(alpha);
    if (n < 1) throw std::invalid_argument("binom_upper_bound: n must be >= 1");
    if (successes > n) throw std::invalid_argument("binom_upper_bound: successes > n");
    if (successes == n) return 1.0;
    return boost::math::ibeta_inv(static_cast<double>(successes + 1),
                                  static_cast<double>(n - successes), 1.0 - alpha);
}

SmoothedScore smoothed_scores(const BaseClassifier& f, const NoiseDistribution& dist,
                              const DenseVector& x, std::size_t n, double alpha,
                              Rng& rng) {
    if (n < 1) throw std::invalid_argument("smoothed_scores: n must be >= 1");
    check_alpha(alpha);
    if (x.dim() != dist.dim()) {
        throw std::invalid_argument("smoothed_scores: dimension mismatch");
    }

    const auto counts = noisy_counts(f, dist, x, n, rng);

    SmoothedScore out;
    out.n = n;
    out.alpha = alpha;
    out.scores.reserve(counts.size());
    for (const auto& [label, count] : counts) {
        ClassScore s;
        s.label = label;
        s.count = count;
        s.estimate = static_cast<double>(count) / static_cast<double>(n);
        s.lower = binom_lower_bound(count, n, alpha);
        s.upper = binom_upper_bound(count, n, alpha);
        out.scores.push_back(s);
    }
    // Sort by count descending; equal counts resolve to the smaller label.
    std::stable_sort(out.scores.begin(), out.scores.end(),
                     [](const ClassScore& a, const ClassScore& b) {
                         if (a.count != b.count) return a.count > b.count;
                         return a.label < b.label;
                     });
    out.top = out.scores.front().label;
    if (out.scores.size() > 1) {
        out.runner_up = out.scores[1].label;
        out.gap_estimate = out.scores[0].estimate - out.scores[1].estimate;
    } else {
        out.runner_up = kAbstain;
        out.gap_estimate = out.scores[0].estimate;
    }
    // Binary reduction: runner-up score <= 1 - top score, so
    // gap >= 2 * top - 1 with the one-sided lower bound on top.
    out.gap_lower = 2.0 * out.scores.front().lower - 1.0;
    return out;
}

CertificationResult certify_l2(const BaseClassifier& f, const NoiseDistribution& dist,
                               const DenseVector& x, std::size_t n0, std::size_t n,
                               double alpha, Rng& rng) {
    if (dist.kind() != NoiseKind::IsotropicGaussian) {
        throw std::invalid_argument("certify_l2: requires isotropic Gaussian smoothing");
    }
    if (n0 < 1 || n < 1) throw std::invalid_argument("certify_l2: n0 and n must be >= 1");
    check_alpha(alpha);

    CertificationResult result;
    result.n0 = n0;
    result.n = n;
    result.sigma = dist.sigma();
    result.confidence = 1.0 - alpha;

    // Phase one selects the candidate class; phase two re-estimates its
    // score from fresh samples so the selection cannot bias the bound.
    const auto selection = noisy_counts(f, dist, x, n0, rng);
    ClassId candidate = selection.begin()->first;
    std::size_t best = 0;
    for (const auto& [label, count] : selection) {
        if (count > best) {
            best = count;
            candidate = label;
        }
    }

    const auto estimation = noisy_counts(f, dist, x, n, rng);
    std::size_t hits = 0;
    if (const auto it = estimation.find(candidate); it != estimation.end()) {
        hits = it->second;
    }
    const double p_lower = binom_lower_bound(hits, n, alpha);
    if (p_lower <= 0.5) {
        return result;  // abstain: radii stay zero
    }
    result.predicted = candidate;
    result.l2_radius = result.sigma * normal_quantile(p_lower);
    result.linf_radius = result.l2_radius / std::sqrt(static_cast<double>(dist.dim()));
    return result;
}

CertificationResult certify_linf(CertificationResult result, std::size_t d) {
    if (d < 1) throw std::invalid_argument("certify_linf: d must be >= 1");
    result.linf_radius =
        result.abstained() ? 0.0
                           : result.l2_radius / std::sqrt(static_cast<double>(d));
    return result;
}

double cohen_radius(double sigma, double p_a, double p_b) {
    if (!(sigma > 0.0)) throw std::invalid_argument("cohen_radius: sigma must be > 0");
    if (!(p_a > 0.0 && p_a < 1.0 && p_b > 0.0 && p_b < 1.0) || p_a < p_b) {
        throw std::invalid_argument("cohen_radius: need 0 < p_b <= p_a < 1");
    }
    return sigma / 2.0 * (normal_quantile(p_a) - normal_quantile(p_b));
}

std::vector<ShiftVerdict> tv_ball_certificate(const NoiseDistribution& dist,
                                              const BaseClassifier& f,
                                              const DenseVector& x, double gap_lower,
                                              std::span<const DenseVector> probe_shifts,
                                              std::size_t check_n, Rng& rng,
                                              std::size_t mc_n) {
    std::vector<ShiftVerdict> verdicts;
    verdicts.reserve(probe_shifts.size());
    for (std::size_t i = 0; i < probe_shifts.size(); ++i) {
        const DenseVector& v = probe_shifts[i];
        ShiftVerdict verdict;
        verdict.shift_index = i;
        if (auto exact = shifted_tv_exact(dist, v)) {
            verdict.tv = *exact;
        } else if (mc_n > 0 && dist.has_log_density()) {
            verdict.tv = tv_monte_carlo(dist, v, mc_n, rng);
        }
        if (!verdict.tv) {
            verdict.verdict = ShiftVerdictKind::Unknown;
            verdicts.push_back(std::move(verdict));
            continue;
        }
        verdict.margin = gap_lower - 2.0 * verdict.tv->value;
        verdict.verdict = verdict.margin > 0.0 ? ShiftVerdictKind::Certified
                                               : ShiftVerdictKind::NotCertified;
        if (verdict.verdict == ShiftVerdictKind::Certified && check_n > 0) {
            const SmoothedScore probe =
                smoothed_scores(f, dist, x + v, check_n, 0.5, rng);
            verdict.mc_checked = true;
            verdict.mc_class = probe.top;
        }
        verdicts.push_back(std::move(verdict));
    }
    return verdicts;
}

GapTvCheck gap_vs_tv_robustness_check(const NoiseDistribution& dist,
                                      const BaseClassifier& f, const DenseVector& x,
                                      const DenseVector& v, std::size_t n, Rng& rng) {
    GapTvCheck check;
    const auto tv = shifted_tv_exact(dist, v);
    if (tv) {
        check.tv = *tv;
    } else if (dist.has_log_density()) {
        check.tv = tv_monte_carlo(dist, v, std::max<std::size_t>(n, 10000), rng);
    } else {
        throw std::invalid_argument("gap_vs_tv_robustness_check: TV unavailable");
    }

    const SmoothedScore at_x = smoothed_scores(f, dist, x, n, 0.001, rng);
    const SmoothedScore at_xv = smoothed_scores(f, dist, x + v, n, 0.001, rng);
    check.gap_estimate = at_x.gap_estimate;
    check.gap_lower = at_x.gap_lower;
    check.class_at_x = at_x.top;
    check.class_at_xv = at_xv.top;
    check.precondition = check.gap_lower > 2.0 * check.tv.value;
    check.violation = check.precondition && check.class_at_x != check.class_at_xv;
    return check;
}

}  // namespace smoothcert
