#include "smoothcert/cli.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "smoothcert/bounds.hpp"
#include "smoothcert/certify.hpp"
#include "smoothcert/distributions.hpp"
#include "smoothcert/sweep.hpp"
#include "smoothcert/tv.hpp"
#include "smoothcert/witness.hpp"

namespace smoothcert {

namespace {

nlohmann::ordered_json tv_to_json(const TVResult& tv) {
    nlohmann::ordered_json doc;
    doc["value"] = tv.value;
    doc["lo"] = tv.lo;
    doc["hi"] = tv.hi;
    doc["provenance"] = tv.provenance_string();
    if (tv.provenance == TVResult::Provenance::MonteCarlo) {
        doc["n"] = tv.n;
        doc["ci_level"] = tv.ci_level;
    }
    return doc;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    const DenseVector v = parse_vector(text);
    out.assign(v.entries().begin(), v.entries().end());
    return out;
}

// Comma-separated dimensions; "a..b" expands to the powers of two in [a, b].
std::vector<std::size_t> parse_dim_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const std::string token = text.substr(start, comma - start);
        const std::size_t dots = token.find("..");
        if (dots != std::string::npos) {
            const auto lo = static_cast<std::size_t>(std::stoull(token.substr(0, dots)));
            const auto hi = static_cast<std::size_t>(std::stoull(token.substr(dots + 2)));
            if (lo < 1 || hi < lo) throw CLI::ValidationError("--d", "bad range " + token);
            for (std::size_t d = lo; d <= hi; d *= 2) out.push_back(d);
        } else {
            out.push_back(static_cast<std::size_t>(std::stoull(token)));
        }
        if (comma == text.size()) break;
        start = comma + 1;
    }
    return out;
}

std::vector<NormOrder> parse_order_list(const std::string& text) {
    std::vector<NormOrder> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(NormOrder::parse(text.substr(start, comma - start)));
        if (comma == text.size()) break;
        start = comma + 1;
    }
    return out;
}

int run_tv(const std::string& dist_spec, const std::optional<std::string>& shift,
           const std::optional<double>& worst_eps, std::size_t mc_n,
           std::uint64_t seed) {
    const NoiseDistribution dist = NoiseDistribution::parse(dist_spec);
    TVResult tv = TVResult::exact(0.0);
    if (shift) {
        const DenseVector v = parse_vector(*shift);
        if (auto exact = shifted_tv_exact(dist, v)) {
            tv = *exact;
        } else {
            Rng rng(seed);
            tv = tv_monte_carlo(dist, v, mc_n, rng);
        }
    } else if (worst_eps) {
        if (dist.kind() != NoiseKind::UniformBox) {
            throw CLI::ValidationError("--worst-eps",
                                       "worst-shift mode is defined for box noise");
        }
        tv = tv_uniform_box_worst_shift(dist.box_radius(), dist.dim(), *worst_eps);
    } else {
        throw CLI::ValidationError("tv", "provide --v or --worst-eps");
    }
    std::cout << tv_to_json(tv).dump(2) << "\n";
    return 0;
}

int run_bounds(const std::string& p_text, std::size_t d, double eps, double delta,
               const std::string& format) {
    const BoundConfig cfg(NormOrder::parse(p_text), d, eps, delta);
    const BoundReport report = bound_report(cfg);
    if (format == "csv") {
        std::cout << bound_report_csv(report, true);
    } else {
        std::cout << bound_report_json(report) << "\n";
    }
    return 0;
}

int run_certify(const std::string& dist_spec, const std::string& classifier_spec,
                const std::string& x_text, std::size_t n0, std::size_t n, double alpha,
                std::uint64_t seed) {
    const NoiseDistribution dist = NoiseDistribution::parse(dist_spec);
    const BaseClassifier f = BaseClassifier::parse(classifier_spec, dist.dim());
    const DenseVector x = parse_vector(x_text);
    Rng rng(seed);
    const CertificationResult result = certify_l2(f, dist, x, n0, n, alpha, rng);
    nlohmann::ordered_json doc;
    doc["predicted"] = result.abstained() ? "ABSTAIN" : std::to_string(result.predicted);
    doc["abstained"] = result.abstained();
    doc["l2_radius"] = result.l2_radius;
    doc["linf_radius"] = result.linf_radius;
    doc["confidence"] = result.confidence;
    doc["n0"] = result.n0;
    doc["n"] = result.n;
    doc["sigma"] = result.sigma;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int run_witness(const std::string& dist_spec, const std::string& v_text, double delta,
                std::size_t n, double ci, std::uint64_t seed) {
    const NoiseDistribution dist = NoiseDistribution::parse(dist_spec);
    const DenseVector v = parse_vector(v_text);
    nlohmann::ordered_json doc;
    const auto witness = build_witness(dist, v, delta);
    if (!witness) {
        doc["built"] = false;
        doc["reason"] = "tv(D, D+v) <= delta, no witness exists at this gap level";
        doc["delta"] = delta;
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    Rng rng(seed);
    const WitnessVerdict verdict = verify_witness(*witness, dist, n, ci, rng);
    doc["built"] = true;
    doc["delta"] = delta;
    doc["tv_exact"] = witness->tv_exact;
    doc["alpha"] = witness->alpha;
    doc["beta"] = witness->beta;
    doc["set_mass"] = witness->set_mass;
    doc["shifted_set_mass"] = witness->shifted_set_mass;
    doc["origin_score_estimate"] = verdict.origin_score_estimate;
    doc["origin_score_expected"] = verdict.origin_score_expected;
    doc["gap_lower"] = verdict.gap_lower;
    doc["shift_score_estimate"] = verdict.shift_score_estimate;
    doc["origin_class"] = verdict.origin_class;
    doc["shift_class"] = verdict.shift_class;
    doc["passed"] = verdict.passed;
    std::cout << doc.dump(2) << "\n";
    return verdict.passed ? 0 : 3;
}

int run_sweep_cmd(const std::string& p_text, const std::string& d_text,
                  const std::string& eps_text, const std::string& delta_text,
                  const std::string& family, std::size_t budget, std::uint64_t seed,
                  const std::string& out, const std::string& format) {
    SweepSpec spec;
    spec.p_grid = parse_order_list(p_text);
    spec.d_grid = parse_dim_list(d_text);
    spec.eps_grid = parse_real_list(eps_text);
    spec.delta_grid = parse_real_list(delta_text);
    spec.family = family;
    spec.mc_budget = budget;
    spec.master_seed = seed;
    spec.out_path = out;
    const SweepResult result = run_sweep(spec);
    if (format == "json") {
        std::cout << result.json;
    } else {
        std::cout << result.csv;
    }
    return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
    CLI::App app{"Randomized-smoothing robustness numerics"};
    app.require_subcommand(1);

    // tv
    auto* tv_cmd = app.add_subcommand("tv", "Total variation of a shifted distribution");
    std::string tv_dist;
    std::optional<std::string> tv_shift;
    std::optional<double> tv_worst_eps;
    std::size_t tv_mc = 1000000;
    std::uint64_t tv_seed = 42;
    tv_cmd->add_option("--dist", tv_dist, "Distribution spec, e.g. gauss:sigma=1,d=8")
        ->required();
    tv_cmd->add_option("--v", tv_shift, "Shift vector, comma-separated");
    tv_cmd->add_option("--worst-eps", tv_worst_eps, "Worst shift with sup norm <= eps");
    tv_cmd->add_option("--mc", tv_mc, "Samples for the Monte Carlo fallback");
    tv_cmd->add_option("--seed", tv_seed, "Master seed");

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "Noise-magnitude lower bounds");
    std::string bounds_p, bounds_format = "json";
    std::size_t bounds_d = 1;
    double bounds_eps = 0.0, bounds_delta = 0.0;
    bounds_cmd->add_option("--p", bounds_p, "Norm order (>= 2 or inf)")->required();
    bounds_cmd->add_option("--d", bounds_d, "Dimension")->required();
    bounds_cmd->add_option("--eps", bounds_eps, "Robust radius")->required();
    bounds_cmd->add_option("--delta", bounds_delta, "Shift-TV bound in (0, 1]")->required();
    bounds_cmd->add_option("--format", bounds_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    // certify
    auto* certify_cmd = app.add_subcommand("certify", "Gaussian smoothing certificate");
    std::string certify_dist, certify_classifier, certify_x;
    std::size_t certify_n0 = 100, certify_n = 100000;
    double certify_alpha = 0.001;
    std::uint64_t certify_seed = 42;
    certify_cmd->add_option("--dist", certify_dist, "gauss:sigma=...,d=...")->required();
    certify_cmd
        ->add_option("--classifier", certify_classifier,
                     "const:c=<label> or linear:w=a;b;c,b=<bias>")
        ->required();
    certify_cmd->add_option("--x", certify_x, "Input point, comma-separated")->required();
    certify_cmd->add_option("--n0", certify_n0, "Selection samples");
    certify_cmd->add_option("--n", certify_n, "Estimation samples");
    certify_cmd->add_option("--alpha", certify_alpha, "Failure probability");
    certify_cmd->add_option("--seed", certify_seed, "Master seed");

    // witness
    auto* witness_cmd =
        app.add_subcommand("witness", "Adversarial witness construction and validation");
    std::string witness_dist, witness_v;
    double witness_delta = 0.0, witness_ci = 0.999;
    std::size_t witness_n = 1000000;
    std::uint64_t witness_seed = 42;
    witness_cmd->add_option("--dist", witness_dist, "gauss:... or box:...")->required();
    witness_cmd->add_option("--v", witness_v, "Attacking shift, comma-separated")
        ->required();
    witness_cmd->add_option("--delta", witness_delta, "Gap level in [0, 1]")->required();
    witness_cmd->add_option("--n", witness_n, "Monte Carlo samples per score");
    witness_cmd->add_option("--ci", witness_ci, "Confidence level");
    witness_cmd->add_option("--seed", witness_seed, "Master seed");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid experiment with CSV/JSON output");
    std::string sweep_p = "2,4,inf", sweep_d = "64..4096", sweep_eps = "1";
    std::string sweep_delta = "0.1,0.3,0.5,0.9", sweep_family = "gauss";
    std::string sweep_out, sweep_format = "csv";
    std::size_t sweep_budget = 1000;
    std::uint64_t sweep_seed = 42;
    sweep_cmd->add_option("--p", sweep_p, "Norm orders, comma-separated");
    sweep_cmd->add_option("--d", sweep_d, "Dimensions; a..b expands powers of two");
    sweep_cmd->add_option("--eps", sweep_eps, "Radii, comma-separated");
    sweep_cmd->add_option("--delta", sweep_delta, "TV bounds, comma-separated");
    sweep_cmd->add_option("--family", sweep_family, "gauss or box");
    sweep_cmd->add_option("--budget", sweep_budget, "Per-cell MC draws (>= 1000)");
    sweep_cmd->add_option("--seed", sweep_seed, "Master seed");
    sweep_cmd->add_option("--out", sweep_out, "Base path for .csv/.json artifacts");
    sweep_cmd->add_option("--format", sweep_format, "stdout format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
        if (tv_cmd->parsed()) {
            return run_tv(tv_dist, tv_shift, tv_worst_eps, tv_mc, tv_seed);
        }
        if (bounds_cmd->parsed()) {
            return run_bounds(bounds_p, bounds_d, bounds_eps, bounds_delta, bounds_format);
        }
        if (certify_cmd->parsed()) {
            return run_certify(certify_dist, certify_classifier, certify_x, certify_n0,
                               certify_n, certify_alpha, certify_seed);
        }
        if (witness_cmd->parsed()) {
            return run_witness(witness_dist, witness_v, witness_delta, witness_n,
                               witness_ci, witness_seed);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep_cmd(sweep_p, sweep_d, sweep_eps, sweep_delta, sweep_family,
                                 sweep_budget, sweep_seed, sweep_out, sweep_format);
        }
        std::cerr << "error: no subcommand given\n";
        return 2;
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "consistency failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace smoothcert
