#include "smoothcert/sweep.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "smoothcert/bounds.hpp"
#include "smoothcert/parallel.hpp"
#include "smoothcert/text.hpp"
#include "smoothcert/tv.hpp"

namespace smoothcert {

namespace {

struct CellOutput {
    std::vector<std::pair<std::string, double>> values;
};

// One cube-corner direction with lp norm eps: the all-ones sign pattern on
// the leading b coordinates, b the largest power of two <= d.
DenseVector leading_bad_direction(std::size_t d, NormOrder p, double eps) {
    std::size_t b = 1;
    while (2 * b <= d) b *= 2;
    const double scale = eps * std::pow(static_cast<double>(b), -p.reciprocal());
    std::vector<double> entries(d, 0.0);
    for (std::size_t i = 0; i < b; ++i) entries[i] = scale;
    return DenseVector(std::move(entries));
}

CellOutput evaluate_cell(const SweepSpec& spec, NormOrder p, std::size_t d, double eps,
                         double delta, std::uint64_t cell_seed) {
    const BoundConfig cfg(p, d, eps, delta);
    CellOutput out;
    auto put = [&](std::string id, double value) {
        out.values.emplace_back(std::move(id), value);
    };

    put("l2sq_lower_bound", l2sq_lower_bound(cfg));
    put("peeling_floor_1pct", peeling_floor(cfg));
    put("first_moment_l2", first_moment_lower_bound(cfg));

    const DenseVector v = leading_bad_direction(d, p, eps);
    const double worst_l2 = eps * std::pow(static_cast<double>(d), 0.5 - p.reciprocal());

    double scale_param = 0.0;
    double worst_tv = 0.0;
    if (spec.family == "gauss") {
        scale_param = gaussian_sizing(cfg);
        put("gaussian_sigma", scale_param);
        if (scale_param > 0.0) {
            worst_tv = tv_gaussian_shift(scale_param, worst_l2).tv.value;
        }
    } else {  // box
        scale_param = uniform_box_sizing(cfg);
        put("uniform_box_r", scale_param);
        if (scale_param > 0.0) {
            worst_tv = tv_uniform_box_worst_shift(scale_param, d, eps).value;
        }
    }
    put("worst_shift_tv", worst_tv);
    put("tv_within_delta", worst_tv <= delta + 1e-12 ? 1.0 : 0.0);
    // A translation witness exists at gap level delta exactly when the
    // worst-case shift moves the noise by more than delta in TV.
    put("witness_exists_at_delta", worst_tv > delta ? 1.0 : 0.0);

    if (eps > 0.0 && scale_param > 0.0) {
        const NoiseDistribution dist =
            spec.family == "gauss" ? NoiseDistribution::isotropic_gaussian(scale_param, d)
                                   : NoiseDistribution::uniform_box(scale_param, d);
        Rng rng(cell_seed);
        const DirectionMomentCheck check =
            verify_direction_moment(dist, v, spec.mc_budget, rng);
        put("dirmoment_mc_ratio", check.skipped ? 0.0 : check.ratio);
        put("dirmoment_holds", check.skipped || check.holds ? 1.0 : 0.0);
    }
    return out;
}

// Smallest d at which the 1% per-coordinate deviation floor exceeds the
// 8-bit pixel range, for shifts of 16 intensity levels at delta = 0.1.
double pixel_domination_min_d(NormOrder p) {
    const double eps = 16.0 / 255.0;
    const double delta = 0.1;
    const auto floor_at = [&](std::size_t d) {
        return std::sqrt(peeling_floor(BoundConfig(p, d, eps, delta)));
    };
    if (!p.is_inf() && p.value() <= 2.0) return 0.0;  // floor is flat in d
    std::size_t hi = 1;
    while (floor_at(hi) <= 255.0) {
        if (hi > (std::size_t{1} << 60)) return 0.0;
        hi *= 2;
    }
    std::size_t lo = hi / 2;
    while (lo + 1 < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (floor_at(mid) > 255.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return static_cast<double>(hi);
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.p_grid.empty() || spec.d_grid.empty() || spec.eps_grid.empty() ||
        spec.delta_grid.empty()) {
        throw std::invalid_argument("run_sweep: all grids must be nonempty");
    }
    if (spec.mc_budget < 1000) {
        throw std::invalid_argument("run_sweep: per-cell budget must be >= 1000");
    }
    if (spec.family != "gauss" && spec.family != "box") {
        throw std::invalid_argument("run_sweep: family must be gauss or box");
    }
    if (spec.family == "box") {
        for (const NormOrder& p : spec.p_grid) {
            if (!p.is_inf()) {
                throw std::invalid_argument("run_sweep: box sizing requires p = inf");
            }
        }
    }

    struct Cell {
        NormOrder p;
        std::size_t d;
        double eps;
        double delta;
    };
    std::vector<Cell> cells;
    for (const NormOrder& p : spec.p_grid) {
        for (std::size_t d : spec.d_grid) {
            for (double eps : spec.eps_grid) {
                for (double delta : spec.delta_grid) {
                    cells.push_back({p, d, eps, delta});
                }
            }
        }
    }

    std::vector<CellOutput> outputs(cells.size());
    parallel_for_index(cells.size(), [&](std::size_t i) {
        const Cell& c = cells[i];
        outputs[i] =
            evaluate_cell(spec, c.p, c.d, c.eps, c.delta, mix_seed(spec.master_seed, i));
    });

    SweepResult result;
    result.csv = "p,d,eps,delta,bound_id,value\n";
    nlohmann::ordered_json doc;
    doc["spec"] = {{"family", spec.family},
                   {"mc_budget", spec.mc_budget},
                   {"master_seed", spec.master_seed}};
    nlohmann::ordered_json cell_docs = nlohmann::ordered_json::array();

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        const std::string prefix = csv_field(c.p.to_string()) + "," + std::to_string(c.d) +
                                   "," + format_real(c.eps) + "," + format_real(c.delta) +
                                   ",";
        nlohmann::ordered_json values;
        for (const auto& [id, value] : outputs[i].values) {
            result.csv += prefix + csv_field(id) + "," + format_real(value) + "\n";
            values[id] = value;
        }
        cell_docs.push_back({{"p", c.p.to_string()},
                             {"d", c.d},
                             {"eps", c.eps},
                             {"delta", c.delta},
                             {"values", std::move(values)}});
    }
    doc["cells"] = std::move(cell_docs);

    // Growth of the 1% variance floor against d, one fit per (p, eps, delta).
    nlohmann::ordered_json slope_docs = nlohmann::ordered_json::array();
    if (spec.d_grid.size() >= 2) {
        std::vector<double> dvals(spec.d_grid.begin(), spec.d_grid.end());
        for (const NormOrder& p : spec.p_grid) {
            for (double eps : spec.eps_grid) {
                for (double delta : spec.delta_grid) {
                    std::vector<double> floors;
                    floors.reserve(dvals.size());
                    for (std::size_t d : spec.d_grid) {
                        floors.push_back(peeling_floor(BoundConfig(p, d, eps, delta)));
                    }
                    const double slope = loglog_slope(dvals, floors);
                    result.slopes.push_back({p, eps, delta, slope});
                    result.csv += csv_field(p.to_string()) + ",0," + format_real(eps) +
                                  "," + format_real(delta) +
                                  ",slope_peeling_floor_vs_d," + format_real(slope) +
                                  "\n";
                    slope_docs.push_back({{"p", p.to_string()},
                                          {"eps", eps},
                                          {"delta", delta},
                                          {"slope", slope}});
                }
            }
        }
    }
    doc["slopes"] = std::move(slope_docs);

    nlohmann::ordered_json domination_docs = nlohmann::ordered_json::array();
    for (const NormOrder& p : spec.p_grid) {
        const double min_d = pixel_domination_min_d(p);
        result.csv += csv_field(p.to_string()) + ",0," + format_real(16.0 / 255.0) +
                      ",0.1,pixel_domination_min_d," + format_real(min_d) + "\n";
        domination_docs.push_back({{"p", p.to_string()}, {"min_d", min_d}});
    }
    doc["pixel_domination"] = std::move(domination_docs);

    result.json = doc.dump(2);
    result.json += "\n";

    if (!spec.out_path.empty()) {
        std::ofstream csv_file(spec.out_path + ".csv", std::ios::binary);
        std::ofstream json_file(spec.out_path + ".json", std::ios::binary);
        if (!csv_file || !json_file) {
            throw std::runtime_error("run_sweep: cannot open output files at '" +
                                     spec.out_path + "'");
        }
        csv_file << result.csv;
        json_file << result.json;
    }
    return result;
}

}  // namespace smoothcert
