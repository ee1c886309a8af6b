#include "smoothcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "smoothcert/normal.hpp"
#include "smoothcert/parallel.hpp"
#include "smoothcert/text.hpp"

namespace smoothcert {

namespace {

void check_scalar_params(double eps, double delta, bool need_positive_delta_sq) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("bounds: eps must be finite and >= 0");
    }
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw std::invalid_argument(need_positive_delta_sq
                                        ? "bounds: delta must lie in (0, 1]; the bound diverges at 0"
                                        : "bounds: delta must lie in (0, 1]");
    }
}

double h_of(double delta) { return (1.0 - delta) / delta; }

}  // namespace

BoundConfig::BoundConfig(NormOrder p_, std::size_t d_, double eps_, double delta_)
    : p(p_), d(d_), eps(eps_), delta(delta_) {
    if (!p.is_inf() && p.value() < 2.0) {
        throw std::invalid_argument("BoundConfig: order must satisfy p >= 2");
    }
    if (d < 1) throw std::invalid_argument("BoundConfig: d must be >= 1");
    check_scalar_params(eps, delta, true);
}

double onedim_bound_chebyshev(double eps, double delta) {
    check_scalar_params(eps, delta, false);
    return eps * eps / 8.0 * (1.0 - delta);
}

MarkovBounds onedim_bound_markov(double eps, double delta) {
    check_scalar_params(eps, delta, true);
    const double one_minus = 1.0 - delta;
    MarkovBounds out;
    out.first_moment = eps / 8.0 * one_minus * one_minus / delta;
    out.second_moment =
        eps * eps / 64.0 * one_minus * one_minus * one_minus * one_minus / (delta * delta);
    out.tau_star = eps * one_minus / (4.0 * delta);
    // The square of the first-moment bound is the second-moment bound.
    if (std::abs(out.second_moment - out.first_moment * out.first_moment) >
        1e-9 * std::max(1.0, out.second_moment)) {
        throw std::logic_error("onedim_bound_markov: moment consistency violated");
    }
    return out;
}

double onedim_bound_combined(double eps, double delta) {
    check_scalar_params(eps, delta, true);
    const double value = eps * eps / 200.0 * (1.0 - delta) / (delta * delta);
    const double dominating =
        std::max(onedim_bound_chebyshev(eps, delta), onedim_bound_markov(eps, delta).second_moment);
    if (value > dominating * (1.0 + 1e-9) + 1e-300) {
        throw std::logic_error("onedim_bound_combined: exceeds both constituent routes");
    }
    return value;
}

double onedim_first_moment_combined(double eps, double delta) {
    check_scalar_params(eps, delta, true);
    return eps / 12.0 * (1.0 - delta) / delta;
}

double l2sq_lower_bound(const BoundConfig& cfg) {
    const double d = static_cast<double>(cfg.d);
    return cfg.eps * cfg.eps * std::pow(d, 2.0 - 2.0 * cfg.p.reciprocal()) / 800.0 *
           (1.0 - cfg.delta) / (cfg.delta * cfg.delta);
}

double first_moment_lower_bound(const BoundConfig& cfg) {
    const double d = static_cast<double>(cfg.d);
    return cfg.eps * std::pow(d, 1.0 - cfg.p.reciprocal()) / 24.0 * (1.0 - cfg.delta) /
           cfg.delta;
}

std::vector<double> peeling_bounds(const BoundConfig& cfg) {
    const double exponent = 1.0 - 2.0 * cfg.p.reciprocal();
    const double scale =
        cfg.eps * cfg.eps / 800.0 * (1.0 - cfg.delta) / (cfg.delta * cfg.delta);
    std::vector<double> out(cfg.d);
    for (std::size_t i = 1; i <= cfg.d; ++i) {
        out[i - 1] = scale * std::pow(static_cast<double>(cfg.d - i + 1), exponent);
    }
    return out;
}

double peeling_floor(const BoundConfig& cfg, double top_quantile) {
    if (!(top_quantile > 0.0 && top_quantile <= 1.0)) {
        throw std::invalid_argument("peeling_floor: quantile must lie in (0, 1]");
    }
    const auto index = static_cast<std::size_t>(
        std::clamp(std::ceil(top_quantile * static_cast<double>(cfg.d)), 1.0,
                   static_cast<double>(cfg.d)));
    const double exponent = 1.0 - 2.0 * cfg.p.reciprocal();
    const double scale =
        cfg.eps * cfg.eps / 800.0 * (1.0 - cfg.delta) / (cfg.delta * cfg.delta);
    return scale * std::pow(static_cast<double>(cfg.d - index + 1), exponent);
}

HeavyTailThreshold heavy_tail_threshold(double eps, double delta, NormOrder p) {
    check_scalar_params(eps, delta, true);
    if (!p.is_inf() && !(p.value() > 2.0)) {
        throw std::invalid_argument("heavy_tail_threshold: requires p > 2 strictly");
    }
    HeavyTailThreshold out;
    out.exponent = p.is_inf() ? 2.0 : 2.0 * p.value() / (p.value() - 2.0);
    out.scale = kHeavyTailConstant * eps * h_of(delta);
    return out;
}

double gaussian_sizing(const BoundConfig& cfg) {
    const double d = static_cast<double>(cfg.d);
    const double sigma =
        4.5 * cfg.eps / cfg.delta * std::pow(d, 0.5 - cfg.p.reciprocal());
    // Companion identities for the sized noise.
    const double sigma_sq = 4.5 * 4.5 * cfg.eps * cfg.eps / (cfg.delta * cfg.delta) *
                            std::pow(d, 1.0 - 2.0 * cfg.p.reciprocal());
    if (std::abs(sigma * sigma - sigma_sq) > 1e-9 * std::max(1.0, sigma_sq)) {
        throw std::logic_error("gaussian_sizing: variance identity violated");
    }
    return sigma;
}

double uniform_box_sizing(const BoundConfig& cfg) {
    if (!cfg.p.is_inf()) {
        throw std::invalid_argument("uniform_box_sizing: defined for p = infinity only");
    }
    const double d = static_cast<double>(cfg.d);
    const double r = 0.5 * cfg.eps / cfg.delta * d * std::log(4.0);
    if (r > 0.0) {
        const TVResult worst = tv_uniform_box_worst_shift(r, cfg.d, cfg.eps);
        if (worst.value > cfg.delta + 1e-12) {
            throw std::logic_error("uniform_box_sizing: sized box exceeds the TV budget");
        }
    }
    return r;
}

HeavyTailVerdict heavy_tail_test(const OneDimLaw& law, std::size_t d,
                                 const BoundConfig& cfg, std::size_t n_batches,
                                 Rng& rng) {
    if (d < 1) throw std::invalid_argument("heavy_tail_test: d must be >= 1");
    if (n_batches < 2) throw std::invalid_argument("heavy_tail_test: need >= 2 batches");
    const HeavyTailThreshold threshold = heavy_tail_threshold(cfg.eps, cfg.delta, cfg.p);
    const double h = h_of(cfg.delta);

    HeavyTailVerdict verdict;
    verdict.d = d;
    verdict.n_batches = n_batches;

    // Batched maxima, chunk-deterministic regardless of worker count.
    const std::uint64_t salt = rng.next_u64();
    constexpr std::size_t kChunk = 64;
    const std::size_t chunks = (n_batches + kChunk - 1) / kChunk;
    std::vector<double> sums(chunks, 0.0), sq_sums(chunks, 0.0);
    parallel_for_index(chunks, [&](std::size_t c) {
        Rng local(mix_seed(salt, c));
        const std::size_t count = std::min(kChunk, n_batches - c * kChunk);
        double s = 0.0, s2 = 0.0;
        for (std::size_t b = 0; b < count; ++b) {
            double m = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                m = std::max(m, std::abs(law.sample(local)));
            }
            s += m;
            s2 += m * m;
        }
        sums[c] = s;
        sq_sums[c] = s2;
    });
    double total = 0.0, total_sq = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        total += sums[c];
        total_sq += sq_sums[c];
    }
    const double n = static_cast<double>(n_batches);
    verdict.emax_estimate = total / n;
    const double var =
        std::max(0.0, total_sq / n - verdict.emax_estimate * verdict.emax_estimate);
    verdict.emax_stderr = std::sqrt(var / n);

    verdict.growth_reference =
        std::pow(static_cast<double>(d), 0.5 - cfg.p.reciprocal()) * cfg.eps * h;
    verdict.empirical_ratio = verdict.growth_reference > 0.0
                                  ? verdict.emax_estimate / verdict.growth_reference
                                  : 0.0;

    // Under the light-tail condition G(x) <= (scale/x)^q for x > scale, the
    // expected maximum is at most scale * Gamma(1 - 1/q) Gamma(d+1) / Gamma(d+1-1/q).
    const double q = threshold.exponent;
    const double inv_q = 1.0 / q;
    verdict.analytic_upper =
        threshold.scale *
        std::exp(std::lgamma(1.0 - inv_q) + std::lgamma(static_cast<double>(d) + 1.0) -
                 std::lgamma(static_cast<double>(d) + 1.0 - inv_q));

    if (threshold.scale > 0.0) {
        verdict.tail_condition_checked = true;
        verdict.tail_condition_holds = true;
        const double slack = 1e-12 + 4.0 * law.cdf_resolution();
        for (int k = 0; k <= 240; ++k) {
            const double x = threshold.scale * std::pow(10.0, 6.0 * k / 240.0);
            const double tail = 1.0 - law.cdf(x) + law.cdf(-x);
            if (tail > std::pow(threshold.scale / x, q) + slack) {
                verdict.tail_condition_holds = false;
                break;
            }
        }
        if (verdict.tail_condition_holds) {
            verdict.emax_below_analytic =
                verdict.emax_estimate - 3.29 * verdict.emax_stderr <= verdict.analytic_upper;
        }
    }
    return verdict;
}

DirectionMomentCheck verify_direction_moment(const NoiseDistribution& dist,
                                             const DenseVector& v, std::size_t n_mc,
                                             Rng& rng) {
    if (v.dim() != dist.dim()) {
        throw std::invalid_argument("verify_direction_moment: dimension mismatch");
    }
    DirectionMomentCheck check;
    if (v.is_zero()) {
        check.skipped = true;
        check.tv = TVResult::exact(0.0);
        return check;
    }
    if (n_mc < 2) throw std::invalid_argument("verify_direction_moment: need n_mc >= 2");

    if (auto exact = shifted_tv_exact(dist, v)) {
        check.tv = *exact;
    } else if (dist.has_log_density()) {
        check.tv = tv_monte_carlo(dist, v, std::max<std::size_t>(n_mc, 100000), rng);
    } else {
        throw std::invalid_argument(
            "verify_direction_moment: no exact TV and no density for the MC fallback");
    }

    const std::uint64_t salt = rng.next_u64();
    constexpr std::size_t kChunk = 1 << 13;
    const std::size_t chunks = (n_mc + kChunk - 1) / kChunk;
    std::vector<double> sums(chunks, 0.0), sq_sums(chunks, 0.0);
    parallel_for_index(chunks, [&](std::size_t c) {
        Rng local(mix_seed(salt, c));
        const std::size_t count = std::min(kChunk, n_mc - c * kChunk);
        std::vector<double> buf(dist.dim());
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            dist.sample_into(local, buf);
            double proj = 0.0;
            for (std::size_t k = 0; k < buf.size(); ++k) proj += buf[k] * v[k];
            const double sq = proj * proj;
            s += sq;
            s2 += sq * sq;
        }
        sums[c] = s;
        sq_sums[c] = s2;
    });
    double total = 0.0, total_sq = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
        total += sums[c];
        total_sq += sq_sums[c];
    }
    const double n = static_cast<double>(n_mc);
    check.moment_estimate = total / n;
    const double var =
        std::max(0.0, total_sq / n - check.moment_estimate * check.moment_estimate);
    check.moment_stderr = std::sqrt(var / n);

    const double delta = check.tv.value;
    const double norm_sq = v.dot(v);
    if (delta <= 0.0) {
        // Degenerate shift: the moment bound has no content.
        check.skipped = true;
        return check;
    }
    check.bound = norm_sq * norm_sq / 200.0 * (1.0 - delta) / (delta * delta);
    check.ratio = check.bound > 0.0 ? check.moment_estimate / check.bound
                                    : std::numeric_limits<double>::infinity();
    check.holds = check.moment_estimate + 3.29 * check.moment_stderr >= check.bound;
    return check;
}

double BoundReport::at(std::string_view id) const {
    for (const auto& [key, value] : entries) {
        if (key == id) return value;
    }
    throw std::out_of_range("BoundReport: no entry '" + std::string(id) + "'");
}

BoundReport bound_report(const BoundConfig& cfg) {
    BoundReport report{cfg, {}};
    auto put = [&](std::string id, double value) {
        report.entries.emplace_back(std::move(id), value);
    };
    const MarkovBounds markov = onedim_bound_markov(cfg.eps, cfg.delta);
    put("onedim_chebyshev", onedim_bound_chebyshev(cfg.eps, cfg.delta));
    put("onedim_markov_first", markov.first_moment);
    put("onedim_markov_second", markov.second_moment);
    put("onedim_combined", onedim_bound_combined(cfg.eps, cfg.delta));
    put("onedim_first_moment", onedim_first_moment_combined(cfg.eps, cfg.delta));
    put("l2sq_lower_bound", l2sq_lower_bound(cfg));
    put("first_moment_l2", first_moment_lower_bound(cfg));
    put("peeling_top", peeling_floor(cfg, 1.0 / static_cast<double>(cfg.d)));
    put("peeling_floor_1pct", peeling_floor(cfg));
    put("peeling_last", peeling_floor(cfg, 1.0));
    const bool heavy = cfg.p.is_inf() || cfg.p.value() > 2.0;
    if (heavy) {
        const HeavyTailThreshold t = heavy_tail_threshold(cfg.eps, cfg.delta, cfg.p);
        put("heavy_tail_exponent", t.exponent);
        put("heavy_tail_scale", t.scale);
        put("heavy_tail_c", kHeavyTailConstant);
    }
    const double sigma = gaussian_sizing(cfg);
    put("gaussian_sigma", sigma);
    put("gaussian_sigma_sq", sigma * sigma);
    put("gaussian_l2_mean_upper",
        4.5 * cfg.eps / cfg.delta *
            std::pow(static_cast<double>(cfg.d), 1.0 - cfg.p.reciprocal()));
    if (cfg.p.is_inf()) {
        put("uniform_box_r", uniform_box_sizing(cfg));
    }
    return report;
}

std::string bound_report_csv(const BoundReport& report, bool with_header) {
    std::string out;
    if (with_header) out += "p,d,eps,delta,bound_id,value\n";
    const std::string prefix = csv_field(report.cfg.p.to_string()) + "," +
                               std::to_string(report.cfg.d) + "," +
                               format_real(report.cfg.eps) + "," +
                               format_real(report.cfg.delta) + ",";
    for (const auto& [id, value] : report.entries) {
        out += prefix + csv_field(id) + "," + format_real(value) + "\n";
    }
    return out;
}

std::string bound_report_json(const BoundReport& report) {
    nlohmann::ordered_json doc;
    doc["config"] = {{"p", report.cfg.p.to_string()},
                     {"d", report.cfg.d},
                     {"eps", report.cfg.eps},
                     {"delta", report.cfg.delta}};
    nlohmann::ordered_json bounds;
    for (const auto& [id, value] : report.entries) bounds[id] = value;
    doc["bounds"] = std::move(bounds);
    return doc.dump(2);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need matching inputs of size >= 2");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace smoothcert
