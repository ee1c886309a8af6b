#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothcert/vector.hpp"

namespace smoothcert {

/// Grid experiment: for every (p, d, eps, delta) cell, size the noise, emit
/// the closed-form bounds, the exact worst-shift TV with its budget check,
/// the witness existence flag, and a Monte Carlo directional-moment ratio
/// using the per-cell budget. Cells derive their RNG from (master_seed, cell
/// index) and rows are emitted in cell order, so the artifacts are identical
/// for any worker count.
struct SweepSpec {
    std::vector<NormOrder> p_grid;
    std::vector<std::size_t> d_grid;
    std::vector<double> eps_grid;
    std::vector<double> delta_grid;
    std::string family = "gauss";  // gauss | box (box requires p = inf)
    std::size_t mc_budget = 1000;  // per-cell draws, >= 1000
    std::uint64_t master_seed = 42;
    std::string out_path;  // when nonempty, writes <out_path>.csv and .json
};

struct SweepResult {
    std::string csv;
    std::string json;

    struct SlopeFit {
        NormOrder p;
        double eps;
        double delta;
        double slope;  // log-log slope of the 1% variance floor against d
    };
    std::vector<SlopeFit> slopes;
};

SweepResult run_sweep(const SweepSpec& spec);

}  // namespace smoothcert
