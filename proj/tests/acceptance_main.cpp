// Acceptance suite: one check per criterion, one [PASS]/[FAIL] line each,
// nonzero exit on any failure. Every run uses master seed 42.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "smoothcert/bounds.hpp"
#include "smoothcert/certify.hpp"
#include "smoothcert/directions.hpp"
#include "smoothcert/distributions.hpp"
#include "smoothcert/normal.hpp"
#include "smoothcert/parallel.hpp"
#include "smoothcert/rng.hpp"
#include "smoothcert/sweep.hpp"
#include "smoothcert/text.hpp"
#include "smoothcert/tv.hpp"
#include "smoothcert/witness.hpp"

using namespace smoothcert;

namespace {

constexpr std::uint64_t kMasterSeed = 42;

struct Outcome {
    bool pass = true;
    std::string detail;
    double budget_s = 0.0;
};

int g_failures = 0;

void report(int index, const std::string& name, const Outcome& outcome,
            double elapsed_s) {
    const bool in_budget = elapsed_s < outcome.budget_s;
    const bool pass = outcome.pass && in_budget;
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %d: %s (%s) [%.2fs < %.0fs]\n", pass ? "PASS" : "FAIL",
                index, name.c_str(), outcome.detail.c_str(), elapsed_s,
                outcome.budget_s);
    std::fflush(stdout);
}

template <typename Fn>
void run_criterion(int index, const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = fn();
    } catch (const std::exception& e) {
        outcome.pass = false;
        outcome.detail = std::string("exception: ") + e.what();
        if (outcome.budget_s == 0.0) outcome.budget_s = 1.0;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(index, name, outcome, elapsed);
}

// --------------------------------------------------------------------------
// 1. Closed-form box TV against a Monte Carlo symmetric-difference oracle.

Outcome criterion_box_tv() {
    Outcome out;
    out.budget_s = 30.0;
    Rng rng(mix_seed(kMasterSeed, 1));
    double worst = 0.0;
    for (int det = 0; det < 20; ++det) {
        const std::size_t d = 1 + (rng.next_u64() % 8);
        const double r = rng.next_in(0.3, 2.0);
        std::vector<double> vv(d);
        for (auto& e : vv) e = rng.next_in(-1.5 * r, 1.5 * r);
        const DenseVector v(vv);
        const double closed = tv_uniform_box_shift(r, v).value;

        // Oracle: draw from the box, count points the shifted box misses.
        const std::size_t n = 1000000;
        std::size_t misses = 0;
        for (std::size_t i = 0; i < n; ++i) {
            bool covered = true;
            for (std::size_t k = 0; k < d; ++k) {
                const double x = r * rng.next_symmetric();
                covered = covered && std::abs(x - v[k]) <= r;
            }
            misses += covered ? 0 : 1;
        }
        const double mc = static_cast<double>(misses) / static_cast<double>(n);
        worst = std::max(worst, std::abs(closed - mc));
    }
    out.pass = worst <= 0.01;
    out.detail = "20 random cases d<=8, max |closed - mc| = " + format_real(worst);
    return out;
}

// --------------------------------------------------------------------------
// 2. Exact Gaussian shift TV: integration oracle and multiplicative bracket.

double trapezoid_gauss_tv(double sigma, double m) {
    const double lo = -12.0 * sigma;
    const double hi = m + 12.0 * sigma;
    const double step = 1e-4 * sigma;
    const auto f = [&](double x) {
        return std::abs(normal_pdf(x / sigma) - normal_pdf((x - m) / sigma)) / sigma;
    };
    const auto cells = static_cast<long long>((hi - lo) / step);
    double acc = 0.5 * (f(lo) + f(hi));
    for (long long i = 1; i < cells; ++i) acc += f(lo + i * step);
    return 0.5 * acc * step;
}

Outcome criterion_gaussian_tv() {
    Outcome out;
    out.budget_s = 10.0;
    Rng rng(mix_seed(kMasterSeed, 2));
    double worst_err = 0.0;
    bool bracket_ok = true;
    for (int det = 0; det < 100; ++det) {
        const std::size_t d = 2 + (rng.next_u64() % 9);
        const double sigma = rng.next_in(0.2, 3.0);
        std::vector<double> vv(d);
        for (auto& e : vv) e = rng.next_gaussian();
        const double target = rng.next_in(0.05, 4.0 * sigma);
        DenseVector v(vv);
        const double scale = target / v.l2_norm();
        for (std::size_t k = 0; k < d; ++k) v[k] *= scale;

        const auto result = tv_gaussian_shift(sigma, v.l2_norm());
        bracket_ok = bracket_ok && result.tv.value >= result.bracket_lo - 1e-15 &&
                     result.tv.value <= std::min(1.0, result.bracket_hi) + 1e-15;
        worst_err = std::max(
            worst_err, std::abs(result.tv.value - trapezoid_gauss_tv(sigma, target)));
    }
    out.pass = bracket_ok && worst_err <= 1e-6;
    out.detail = "100 configs d>=2, bracket " + std::string(bracket_ok ? "held" : "BROKEN") +
                 ", max |exact - quadrature| = " + format_real(worst_err);
    return out;
}

// --------------------------------------------------------------------------
// 3. Cube-corner families: count, exact orthogonality, shared norms.

Outcome criterion_directions() {
    Outcome out;
    out.budget_s = 5.0;

    // Exact integer Gram of the sign construction for every size used below.
    // Signs pack into bit words; the inner product of two +-1 rows is
    // b - 2 * (number of disagreeing positions), all integer arithmetic.
    for (int n = 0; n <= 10; ++n) {
        const auto rows = hadamard_signs(n);
        const auto b = static_cast<long long>(rows.size());
        const std::size_t words = (rows.size() + 63) / 64;
        std::vector<std::vector<std::uint64_t>> bits(rows.size(),
                                                     std::vector<std::uint64_t>(words, 0));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (rows[i][k] > 0) bits[i][k / 64] |= std::uint64_t{1} << (k % 64);
            }
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = i; j < rows.size(); ++j) {
                long long mismatches = 0;
                for (std::size_t w = 0; w < words; ++w) {
                    mismatches += __builtin_popcountll(bits[i][w] ^ bits[j][w]);
                }
                if (b - 2 * mismatches != (i == j ? b : 0)) {
                    out.pass = false;
                    out.detail = "sign Gram broken at n=" + std::to_string(n);
                    return out;
                }
            }
        }
    }

    const NormOrder orders[] = {NormOrder::two(), NormOrder::finite(4.0),
                                NormOrder::inf()};
    const double eps_choices[] = {0.5, 1.0, 2.0};
    double worst_norm_err = 0.0;
    Rng rng(mix_seed(kMasterSeed, 3));
    for (std::size_t d = 1; d <= 1024; ++d) {
        const NormOrder p = orders[d % 3];
        const double eps = eps_choices[d % 3];
        const auto family = bad_directions(d, p, eps);
        if (2 * family.count() <= d) {
            out.pass = false;
            out.detail = "family too small at d=" + std::to_string(d);
            return out;
        }
        const double target_l2 =
            eps * std::pow(static_cast<double>(family.count()), 0.5 - p.reciprocal());
        for (const auto& v : family.vectors()) {
            worst_norm_err = std::max(worst_norm_err, std::abs(v.lp_norm(p) - eps));
            worst_norm_err = std::max(worst_norm_err, std::abs(v.l2_norm() - target_l2));
        }
        // Spot-check float orthogonality on a few pairs per family.
        for (int probe = 0; probe < 8 && family.count() > 1; ++probe) {
            const std::size_t i = rng.next_u64() % family.count();
            std::size_t j = rng.next_u64() % family.count();
            if (j == i) j = (j + 1) % family.count();
            if (family.sign_dot(i, j) != 0 ||
                std::abs(family.vector(i).dot(family.vector(j))) >
                    1e-12 * target_l2 * target_l2) {
                out.pass = false;
                out.detail = "orthogonality broken at d=" + std::to_string(d);
                return out;
            }
        }
    }
    out.pass = out.pass && worst_norm_err <= 1e-12 * 2.0 * 33.0;  // eps b^(1/2) <= 2*32
    out.detail = "d=1..1024, b > d/2, integer Gram exact, max norm error = " +
                 format_real(worst_norm_err);
    return out;
}

// --------------------------------------------------------------------------
// 4. Scalar moment bounds with delta taken from the exact shift TV.

Outcome criterion_onedim_suite() {
    Outcome out;
    out.budget_s = 10.0;
    double min_ratio = 1e300;
    double worst_gauss_gap = 0.0;
    bool ok = true;

    for (int i = 1; i <= 30; ++i) {
        const double eps = 0.1 * i;

        {  // Standard Gaussian: E eta^2 = 1, E|eta| = sqrt(2/pi).
            const double delta = tv_gaussian_shift(1.0, eps).tv.value;
            const double second = 1.0;
            const double first = 0.7978845608028653559;
            const MarkovBounds markov = onedim_bound_markov(eps, delta);
            const double bounds2[] = {onedim_bound_combined(eps, delta),
                                      onedim_bound_chebyshev(eps, delta),
                                      markov.second_moment};
            for (double b : bounds2) {
                ok = ok && second >= b;
                if (b > 0.0) min_ratio = std::min(min_ratio, second / b);
            }
            ok = ok && first >= markov.first_moment;
            if (markov.first_moment > 0.0) {
                min_ratio = std::min(min_ratio, first / markov.first_moment);
            }
            const double mass = max_interval_mass(OneDimLaw::gaussian(1.0), eps);
            ok = ok && mass <= delta + 1e-6;
            worst_gauss_gap = std::max(worst_gauss_gap, std::abs(mass - delta));
        }

        {  // Uniform on [-1, 1]: E eta^2 = 1/3, E|eta| = 1/2.
            const double delta = tv_uniform_box_shift(1.0, DenseVector({eps})).value;
            const double second = 1.0 / 3.0;
            const double first = 0.5;
            const MarkovBounds markov = onedim_bound_markov(eps, delta);
            const double bounds2[] = {onedim_bound_combined(eps, delta),
                                      onedim_bound_chebyshev(eps, delta),
                                      markov.second_moment};
            for (double b : bounds2) {
                ok = ok && second >= b;
                if (b > 0.0) min_ratio = std::min(min_ratio, second / b);
            }
            ok = ok && first >= markov.first_moment;
            if (markov.first_moment > 0.0) {
                min_ratio = std::min(min_ratio, first / markov.first_moment);
            }
            const double mass = max_interval_mass(OneDimLaw::uniform(1.0), eps);
            ok = ok && mass <= delta + 1e-6;
        }
    }
    ok = ok && worst_gauss_gap <= 1e-6;
    out.pass = ok;
    out.detail = "eps grid 0.1..3.0, min moment/bound ratio = " + format_real(min_ratio) +
                 ", max |interval mass - tv| (Gaussian) = " + format_real(worst_gauss_gap);
    return out;
}

// --------------------------------------------------------------------------
// 5. Sized Gaussians dominate every bound, analytically, on the whole grid.

Outcome criterion_sized_gaussian() {
    Outcome out;
    out.budget_s = 5.0;
    const NormOrder orders[] = {NormOrder::two(), NormOrder::finite(4.0),
                                NormOrder::inf()};
    int cells = 0, violations = 0;
    double min_ratio = 1e300;  // sized sigma^2 d over the matching lower bound
    for (const NormOrder& p : orders) {
        for (std::size_t d = 16; d <= 4096; d *= 2) {
            for (double delta : {0.1, 0.3, 0.5, 0.9}) {
                for (double eps : {0.25, 1.0}) {
                    ++cells;
                    const BoundConfig cfg(p, d, eps, delta);
                    const double sigma = gaussian_sizing(cfg);
                    const double worst_shift =
                        eps * std::pow(static_cast<double>(d), 0.5 - p.reciprocal());
                    const double tv = tv_gaussian_shift(sigma, worst_shift).tv.value;
                    const double second = sigma * sigma * static_cast<double>(d);
                    // E||eta||_2 >= E||eta||_1 / sqrt(d) = sqrt(2 d / pi) sigma.
                    const double l2_mean_lower =
                        std::sqrt(2.0 / 3.14159265358979323846 * static_cast<double>(d)) *
                        sigma;
                    bool cell_ok = tv <= delta;
                    cell_ok = cell_ok && second >= l2sq_lower_bound(cfg);
                    cell_ok = cell_ok &&
                              sigma * sigma >=
                                  peeling_floor(cfg, 1.0 / static_cast<double>(d));
                    cell_ok = cell_ok && l2_mean_lower >= first_moment_lower_bound(cfg);
                    violations += cell_ok ? 0 : 1;
                    min_ratio = std::min(min_ratio, second / l2sq_lower_bound(cfg));
                }
            }
        }
    }
    out.pass = violations == 0;
    out.detail = std::to_string(cells) + " grid cells, " + std::to_string(violations) +
                 " violations, min sized-to-bound ratio = " + format_real(min_ratio);
    return out;
}

// --------------------------------------------------------------------------
// 6. Phase transition: growth exponent of the 1% variance floor.

Outcome criterion_phase_transition() {
    Outcome out;
    out.budget_s = 5.0;
    const struct {
        NormOrder p;
        double expected;
    } cases[] = {{NormOrder::two(), 0.0},
                 {NormOrder::finite(4.0), 0.5},
                 {NormOrder::inf(), 1.0}};
    std::vector<double> dims;
    for (std::size_t d = 64; d <= 16384; d *= 2) dims.push_back(static_cast<double>(d));
    double worst = 0.0;
    for (const auto& c : cases) {
        std::vector<double> floors;
        for (double d : dims) {
            floors.push_back(
                peeling_floor(BoundConfig(c.p, static_cast<std::size_t>(d), 1.0, 0.3)));
        }
        const double slope = loglog_slope(dims, floors);
        worst = std::max(worst, std::abs(slope - c.expected));
    }
    out.pass = worst <= 0.02;
    out.detail = "p in {2,4,inf}, max |slope - (1 - 2/p)| = " + format_real(worst);
    return out;
}

// --------------------------------------------------------------------------
// 7. Witness non-robustness at n = 1e6, and the refusal boundary.

Outcome criterion_witness() {
    Outcome out;
    out.budget_s = 120.0;
    Rng rng(mix_seed(kMasterSeed, 7));
    int failures = 0, refusal_errors = 0;
    int built = 0;
    while (built < 50) {
        const std::size_t d = 1 + (rng.next_u64() % 6);
        const double sigma = rng.next_in(0.4, 2.5);
        std::vector<double> vv(d);
        for (auto& e : vv) e = sigma * rng.next_gaussian();
        const DenseVector v(vv);
        const auto dist = NoiseDistribution::isotropic_gaussian(sigma, d);
        const double tv = tv_gaussian_shift(sigma, v.l2_norm()).tv.value;
        if (tv < 0.06) continue;

        // Refusal side of the boundary: delta at or above the exact TV.
        if (build_witness(dist, v, tv).has_value() ||
            build_witness(dist, v, std::min(1.0, tv + 0.005)).has_value()) {
            ++refusal_errors;
        }

        const double delta = rng.next_in(0.02, tv - 0.012);
        const auto witness = build_witness(dist, v, delta);
        if (!witness) {
            ++refusal_errors;
            continue;
        }
        ++built;
        const auto verdict = verify_witness(*witness, dist, 1000000, 0.999, rng);
        if (!verdict.passed) ++failures;
    }
    out.pass = failures == 0 && refusal_errors == 0;
    out.detail = "50 configs at n=1e6, " + std::to_string(failures) +
                 " verdict failures, " + std::to_string(refusal_errors) +
                 " refusal errors";
    return out;
}

// --------------------------------------------------------------------------
// 8. Certification soundness against the halfspace oracle.

Outcome criterion_certification() {
    Outcome out;
    out.budget_s = 180.0;

    // Exact-score route: radius formula reproduces the geometric margin.
    Rng rng(mix_seed(kMasterSeed, 8));
    double worst_formula = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double sigma = rng.next_in(0.2, 2.0);
        const double margin = rng.next_in(0.0, 5.0 * sigma);
        const double p_a = normal_cdf(margin / sigma);
        const double p_b = normal_cdf(-margin / sigma);
        worst_formula =
            std::max(worst_formula, std::abs(cohen_radius(sigma, p_a, p_b) - margin));
    }

    // Monte Carlo route, parallel over trials with per-trial substreams.
    const int trials = 1000;
    std::vector<int> violation(trials, 0), abstained(trials, 0);
    parallel_for_index(trials, [&](std::size_t t) {
        Rng local(mix_seed(mix_seed(kMasterSeed, 88), t));
        const std::size_t d = 2 + (local.next_u64() % 5);
        std::vector<double> wv(d), xv(d);
        for (auto& e : wv) e = local.next_gaussian();
        for (auto& e : xv) e = 0.5 * local.next_gaussian();
        const DenseVector w(wv), x(xv);
        const double bias = local.next_gaussian();
        const double sigma = local.next_in(0.3, 1.5);
        const auto f = BaseClassifier::linear(w, bias);
        const auto dist = NoiseDistribution::isotropic_gaussian(sigma, d);
        const auto cert = certify_l2(f, dist, x, 100, 20000, 0.001, local);
        if (cert.abstained()) {
            abstained[t] = 1;
            return;
        }
        const double margin = w.dot(x) + bias;
        const ClassId truth = margin > 0.0 ? 1 : 0;
        const double robust_radius = std::abs(margin) / w.l2_norm();
        if (cert.predicted != truth || cert.l2_radius > robust_radius + 1e-9) {
            violation[t] = 1;
        }
    });
    int violations = 0, abstentions = 0;
    for (int t = 0; t < trials; ++t) {
        violations += violation[t];
        abstentions += abstained[t];
    }

    // Exact binomial test at level 0.001 for Bin(1000, 0.001):
    // P(X >= 6) = 5.9e-4 < 0.001 <= P(X >= 5), so 6+ violations reject.
    out.pass = violations < 6 && worst_formula <= 1e-3;
    out.detail = std::to_string(trials) + " trials, " + std::to_string(violations) +
                 " unsound certificates (binomial cutoff 6), " +
                 std::to_string(abstentions) +
                 " abstentions, exact-formula error = " + format_real(worst_formula);
    return out;
}

// --------------------------------------------------------------------------
// 9. Heavy-tail contrapositive: max-coordinate growth exponents.

Outcome criterion_heavy_tails() {
    Outcome out;
    out.budget_s = 120.0;
    const BoundConfig cfg(NormOrder::finite(4.0), 64, 24.0, 0.5);
    const std::vector<double> dims{64.0, 256.0, 1024.0, 4096.0};

    Rng rng(mix_seed(kMasterSeed, 9));
    const auto pareto = OneDimLaw::empirical(
        [](Rng& r) { return std::pow(r.next_unit(), -0.25); }, 1 << 15, 2027);

    std::vector<double> pareto_means, gauss_means;
    for (double d : dims) {
        pareto_means.push_back(
            heavy_tail_test(pareto, static_cast<std::size_t>(d), cfg, 4000, rng)
                .emax_estimate);
        gauss_means.push_back(heavy_tail_test(OneDimLaw::gaussian(1.0),
                                              static_cast<std::size_t>(d), cfg, 4000, rng)
                                  .emax_estimate);
    }
    const double pareto_slope = loglog_slope(dims, pareto_means);
    const double gauss_slope = loglog_slope(dims, gauss_means);
    out.pass = std::abs(pareto_slope - 0.25) <= 0.05 && gauss_slope <= 0.1;
    out.detail = "Pareto(4) slope = " + format_real(pareto_slope) +
                 " (target 0.25 +- 0.05), Gaussian slope = " + format_real(gauss_slope) +
                 " (<= 0.1)";
    return out;
}

// --------------------------------------------------------------------------
// 10. Determinism of the sweep artifacts across runs and worker counts.

Outcome criterion_determinism() {
    Outcome out;
    out.budget_s = 60.0;
    SweepSpec spec;
    spec.p_grid = {NormOrder::two(), NormOrder::finite(4.0), NormOrder::inf()};
    spec.d_grid = {64, 128, 256, 512};
    spec.eps_grid = {1.0};
    spec.delta_grid = {0.1, 0.5};
    spec.mc_budget = 1000;
    spec.master_seed = kMasterSeed;

    setenv("SMOOTHCERT_THREADS", "1", 1);
    const SweepResult serial = run_sweep(spec);
    setenv("SMOOTHCERT_THREADS", "2", 1);
    const SweepResult pooled = run_sweep(spec);
    unsetenv("SMOOTHCERT_THREADS");
    const SweepResult free_run = run_sweep(spec);

    // The file artifacts must carry the same bytes.
    const auto dir = std::filesystem::temp_directory_path() / "smoothcert_acceptance";
    std::filesystem::create_directories(dir);
    SweepSpec writing = spec;
    writing.out_path = (dir / "run").string();
    run_sweep(writing);
    std::ifstream csv_file(writing.out_path + ".csv", std::ios::binary);
    std::stringstream csv_bytes;
    csv_bytes << csv_file.rdbuf();
    std::ifstream json_file(writing.out_path + ".json", std::ios::binary);
    std::stringstream json_bytes;
    json_bytes << json_file.rdbuf();
    std::filesystem::remove_all(dir);

    const bool identical = serial.csv == pooled.csv && serial.json == pooled.json &&
                           serial.csv == free_run.csv && serial.json == free_run.json &&
                           csv_bytes.str() == serial.csv && json_bytes.str() == serial.json;
    out.pass = identical;
    out.detail = std::string("three in-memory runs + file artifacts ") +
                 (identical ? "byte-identical" : "DIFFER") + ", " +
                 std::to_string(serial.csv.size()) + " csv bytes";
    return out;
}

}  // namespace

int main() {
    std::printf("acceptance suite, master seed %llu\n",
                static_cast<unsigned long long>(kMasterSeed));
    run_criterion(1, "uniform-box TV closed form vs MC symmetric difference",
                  criterion_box_tv);
    run_criterion(2, "Gaussian shift TV: quadrature oracle and bracket",
                  criterion_gaussian_tv);
    run_criterion(3, "cube-corner direction families", criterion_directions);
    run_criterion(4, "scalar moment bounds at exact shift TV", criterion_onedim_suite);
    run_criterion(5, "sized Gaussians dominate all lower bounds",
                  criterion_sized_gaussian);
    run_criterion(6, "variance-floor phase transition slopes",
                  criterion_phase_transition);
    run_criterion(7, "witness non-robustness and refusal boundary", criterion_witness);
    run_criterion(8, "certification soundness vs halfspace oracle",
                  criterion_certification);
    run_criterion(9, "heavy-tail contrapositive growth exponents",
                  criterion_heavy_tails);
    run_criterion(10, "sweep artifact determinism", criterion_determinism);

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
