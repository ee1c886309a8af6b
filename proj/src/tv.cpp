#include "smoothcert/tv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smoothcert/normal.hpp"
#include "smoothcert/parallel.hpp"

namespace smoothcert {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void check_tv_invariants(const TVResult& r) {
    if (!(0.0 <= r.lo && r.lo <= r.value && r.value <= r.hi && r.hi <= 1.0)) {
        throw std::logic_error("TVResult: enclosure 0 <= lo <= value <= hi <= 1 violated");
    }
}

}  // namespace

TVResult TVResult::exact(double v) {
    TVResult r;
    r.value = r.lo = r.hi = v;
    r.provenance = Provenance::Exact;
    check_tv_invariants(r);
    return r;
}

TVResult TVResult::bracket(double lo, double hi) {
    TVResult r;
    r.lo = clamp01(lo);
    r.hi = clamp01(hi);
    r.value = 0.5 * (r.lo + r.hi);
    r.provenance = Provenance::Bracket;
    check_tv_invariants(r);
    return r;
}

TVResult TVResult::monte_carlo(double v, double halfwidth, std::size_t n,
                               double ci_level) {
    TVResult r;
    r.value = clamp01(v);
    r.lo = clamp01(v - halfwidth);
    r.hi = clamp01(v + halfwidth);
    r.provenance = Provenance::MonteCarlo;
    r.n = n;
    r.ci_level = ci_level;
    check_tv_invariants(r);
    return r;
}

std::string TVResult::provenance_string() const {
    switch (provenance) {
        case Provenance::Exact: return "exact";
        case Provenance::Bracket: return "bracket";
        case Provenance::MonteCarlo: return "monte-carlo";
    }
    return {};
}

GaussianShiftTV tv_gaussian_shift(double sigma, double shift_l2) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("tv_gaussian_shift: sigma must be > 0");
    }
    if (!(shift_l2 >= 0.0) || !std::isfinite(shift_l2)) {
        throw std::invalid_argument("tv_gaussian_shift: shift norm must be >= 0");
    }
    GaussianShiftTV out;
    out.tv = TVResult::exact(2.0 * normal_cdf(shift_l2 / (2.0 * sigma)) - 1.0);
    const double ratio = std::min(1.0, shift_l2 / sigma);
    out.bracket_lo = ratio / 200.0;
    out.bracket_hi = 4.5 * ratio;
    return out;
}

TVResult tv_uniform_box_shift(double r, const DenseVector& v) {
    if (!(r > 0.0)) throw std::invalid_argument("tv_uniform_box_shift: r must be > 0");
    double overlap = 1.0;
    for (double vi : v.entries()) {
        overlap *= std::max(0.0, 1.0 - std::abs(vi) / (2.0 * r));
    }
    return TVResult::exact(1.0 - overlap);
}

TVResult tv_uniform_box_worst_shift(double r, std::size_t d, double eps) {
    if (!(r > 0.0)) throw std::invalid_argument("tv_uniform_box_worst_shift: r must be > 0");
    if (!(eps >= 0.0)) throw std::invalid_argument("tv_uniform_box_worst_shift: eps must be >= 0");
    const double dd = static_cast<double>(d);
    const double factor = std::max(0.0, 1.0 - eps / (2.0 * r));
    const double value = 1.0 - std::pow(factor, dd);
    if (eps <= r) {
        const double lo = 1.0 - std::exp(-dd * eps / (2.0 * r));
        const double hi = 1.0 - std::pow(4.0, -dd * eps / (2.0 * r));
        if (value < lo - 1e-12 || value > hi + 1e-12) {
            throw std::logic_error("tv_uniform_box_worst_shift: exponential enclosure violated");
        }
    }
    return TVResult::exact(value);
}

TVResult tv_monte_carlo(const NoiseDistribution& dist, const DenseVector& v,
                        std::size_t n, Rng& rng, double ci_level) {
    if (!dist.has_log_density()) {
        throw std::invalid_argument(
            "tv_monte_carlo: distribution exposes no density; "
            "density-free TV estimation is out of scope");
    }
    if (v.dim() != dist.dim()) {
        throw std::invalid_argument("tv_monte_carlo: shift dimension mismatch");
    }
    if (n < 1) throw std::invalid_argument("tv_monte_carlo: n must be >= 1");
    if (!(ci_level > 0.0 && ci_level < 1.0)) {
        throw std::invalid_argument("tv_monte_carlo: ci_level must be in (0, 1)");
    }

    // Fixed-size chunks with derived substreams: the estimate is identical
    // for any worker count. One draw from the caller salts this call so
    // repeated estimates on the same rng are fresh.
    const std::uint64_t salt = rng.next_u64();
    constexpr std::size_t kChunk = 1 << 14;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> sums(chunks, 0.0), sq_sums(chunks, 0.0);
    parallel_for_index(chunks, [&](std::size_t c) {
        Rng local(mix_seed(salt, c));
        const std::size_t count = std::min(kChunk, n - c * kChunk);
        std::vector<double> buf(dist.dim());
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            dist.sample_into(local, buf);
            const double lp = dist.log_density(buf);
            const double lq = dist.log_density_shifted(buf, v.entries());
            // E max(0, 1 - q/p) integrates the positive part of p - q,
            // which equals the TV distance even when supports differ.
            const double term = std::isinf(lq) ? 1.0
                                               : std::max(0.0, 1.0 - std::exp(lq - lp));
            s += term;
            s2 += term * term;
        }
        sums[c] = s;
        sq_sums[c] = s2;
    });

    double total = 0.0, total_sq = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        total += sums[c];
        total_sq += sq_sums[c];
    }
    const double nn = static_cast<double>(n);
    const double mean = total / nn;
    const double var = std::max(0.0, total_sq / nn - mean * mean);
    const double z = normal_quantile(0.5 + 0.5 * ci_level);
    const double halfwidth = z * std::sqrt(var / nn);
    return TVResult::monte_carlo(mean, halfwidth, n, ci_level);
}

std::optional<TVResult> shifted_tv_exact(const NoiseDistribution& dist,
                                         const DenseVector& v) {
    if (v.dim() != dist.dim()) {
        throw std::invalid_argument("shifted_tv_exact: shift dimension mismatch");
    }
    switch (dist.kind()) {
        case NoiseKind::IsotropicGaussian:
            return tv_gaussian_shift(dist.sigma(), v.l2_norm()).tv;
        case NoiseKind::UniformBox:
            return tv_uniform_box_shift(dist.box_radius(), v);
        case NoiseKind::IIDProduct:
            return std::nullopt;
    }
    return std::nullopt;
}

double max_interval_mass(const OneDimLaw& law, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("max_interval_mass: eps must be > 0");
    const auto mass = [&](double a) { return law.cdf(a + eps) - law.cdf(a); };

    double lo = 0.0, hi = 0.0;
    law.mass_range(lo, hi);
    lo -= eps;
    if (hi - lo < eps) hi = lo + eps;

    // Coarse scan to localize the peak of the (unimodal) interval mass.
    constexpr int kGrid = 512;
    const double step = (hi - lo) / kGrid;
    double best_a = lo;
    double best = -1.0;
    for (int i = 0; i <= kGrid; ++i) {
        const double a = lo + i * step;
        const double m = mass(a);
        if (m > best) {
            best = m;
            best_a = a;
        }
    }

    // Golden-section refinement on the bracketing cell pair.
    double a = std::max(lo, best_a - step);
    double b = std::min(hi, best_a + step);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = mass(x1), f2 = mass(x2);
    while (b - a > 1e-7) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = mass(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = mass(x1);
        }
    }
    return std::max(best, std::max(f1, f2));
}

}  // namespace smoothcert
