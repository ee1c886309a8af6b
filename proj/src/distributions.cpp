#include "smoothcert/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "smoothcert/normal.hpp"

namespace smoothcert {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be a positive real");
    }
    return v;
}

std::size_t require_dim(std::size_t d) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    return d;
}

// Splits "key=value,key=value" and returns the value for `key`.
std::string_view kv_lookup(std::string_view params, std::string_view key) {
    std::size_t start = 0;
    while (start < params.size()) {
        std::size_t comma = params.find(',', start);
        if (comma == std::string_view::npos) comma = params.size();
        std::string_view item = params.substr(start, comma - start);
        std::size_t eq = item.find('=');
        if (eq != std::string_view::npos && item.substr(0, eq) == key) {
            return item.substr(eq + 1);
        }
        start = comma + 1;
    }
    throw std::invalid_argument("distribution spec: missing parameter '" +
                                std::string(key) + "'");
}

double parse_real(std::string_view token) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw std::invalid_argument("distribution spec: bad number '" +
                                    std::string(token) + "'");
    }
    return v;
}

std::size_t parse_count(std::string_view token) {
    const double v = parse_real(token);
    if (!(v >= 1.0) || v != std::floor(v)) {
        throw std::invalid_argument("distribution spec: bad count '" +
                                    std::string(token) + "'");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// OneDimLaw

OneDimLaw OneDimLaw::gaussian(double sigma) {
    return OneDimLaw(OneDimKind::Gaussian, require_positive(sigma, "sigma"));
}

OneDimLaw OneDimLaw::uniform(double r) {
    return OneDimLaw(OneDimKind::Uniform, require_positive(r, "r"));
}

OneDimLaw OneDimLaw::laplace(double b) {
    return OneDimLaw(OneDimKind::Laplace, require_positive(b, "b"));
}

OneDimLaw OneDimLaw::empirical(std::function<double(Rng&)> sampler,
                               std::size_t cache_size, std::uint64_t cache_seed) {
    if (!sampler) throw std::invalid_argument("empirical law needs a sampler");
    if (cache_size < 2) throw std::invalid_argument("empirical cache too small");

    auto data = std::make_shared<EmpiricalData>();
    data->sampler = std::move(sampler);
    Rng rng(cache_seed);
    data->sorted_cache.resize(cache_size);
    double sum = 0.0, sum_sq = 0.0, sum_abs = 0.0, sum_abs_sq = 0.0;
    for (double& x : data->sorted_cache) {
        x = data->sampler(rng);
        sum += x;
        sum_sq += x * x;
        sum_abs += std::abs(x);
        sum_abs_sq += x * x;
    }
    const double n = static_cast<double>(cache_size);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    const double mean_abs = sum_abs / n;
    const double var_abs = std::max(0.0, sum_abs_sq / n - mean_abs * mean_abs);
    // 99% normal CI halfwidths for the cached estimates.
    const double z = 2.5758293035489004;
    // Crude spread for the variance estimate itself (fourth moments omitted;
    // the flag matters more than the width here).
    const double var_hw = z * var * std::sqrt(2.0 / n);
    data->variance = MomentEstimate::monte_carlo(var, var_hw, cache_size);
    data->mean_abs =
        MomentEstimate::monte_carlo(mean_abs, z * std::sqrt(var_abs / n), cache_size);
    std::sort(data->sorted_cache.begin(), data->sorted_cache.end());

    OneDimLaw law(OneDimKind::Empirical, 0.0);
    law.empirical_ = std::move(data);
    return law;
}

double OneDimLaw::sample(Rng& rng) const {
    switch (kind_) {
        case OneDimKind::Gaussian:
            return param_ * rng.next_gaussian();
        case OneDimKind::Uniform:
            return param_ * rng.next_symmetric();
        case OneDimKind::Laplace: {
            const double u = rng.next_unit() - 0.5;
            const double mag = -param_ * std::log(1.0 - 2.0 * std::abs(u));
            return u < 0.0 ? -mag : mag;
        }
        case OneDimKind::Empirical:
            return empirical_->sampler(rng);
    }
    return 0.0;  // unreachable
}

double OneDimLaw::cdf(double x) const {
    switch (kind_) {
        case OneDimKind::Gaussian:
            return normal_cdf(x / param_);
        case OneDimKind::Uniform: {
            if (x <= -param_) return 0.0;
            if (x >= param_) return 1.0;
            return (x + param_) / (2.0 * param_);
        }
        case OneDimKind::Laplace:
            return x < 0.0 ? 0.5 * std::exp(x / param_)
                           : 1.0 - 0.5 * std::exp(-x / param_);
        case OneDimKind::Empirical: {
            const auto& cache = empirical_->sorted_cache;
            const auto it = std::upper_bound(cache.begin(), cache.end(), x);
            return static_cast<double>(it - cache.begin()) /
                   static_cast<double>(cache.size());
        }
    }
    return 0.0;  // unreachable
}

double OneDimLaw::cdf_resolution() const {
    if (kind_ != OneDimKind::Empirical) return 0.0;
    return 1.0 / static_cast<double>(empirical_->sorted_cache.size());
}

double OneDimLaw::density(double x) const {
    switch (kind_) {
        case OneDimKind::Gaussian:
            return normal_pdf(x / param_) / param_;
        case OneDimKind::Uniform:
            return std::abs(x) <= param_ ? 1.0 / (2.0 * param_) : 0.0;
        case OneDimKind::Laplace:
            return 0.5 / param_ * std::exp(-std::abs(x) / param_);
        case OneDimKind::Empirical:
            throw std::logic_error("empirical law has no density");
    }
    return 0.0;  // unreachable
}

double OneDimLaw::log_density(double x) const {
    switch (kind_) {
        case OneDimKind::Gaussian: {
            const double z = x / param_;
            return -0.5 * (z * z + kLog2Pi) - std::log(param_);
        }
        case OneDimKind::Uniform:
            return std::abs(x) <= param_
                       ? -std::log(2.0 * param_)
                       : -std::numeric_limits<double>::infinity();
        case OneDimKind::Laplace:
            return -std::abs(x) / param_ - std::log(2.0 * param_);
        case OneDimKind::Empirical:
            throw std::logic_error("empirical law has no density");
    }
    return 0.0;  // unreachable
}

MomentEstimate OneDimLaw::variance() const {
    switch (kind_) {
        case OneDimKind::Gaussian:
            return MomentEstimate::exact_value(param_ * param_);
        case OneDimKind::Uniform:
            return MomentEstimate::exact_value(param_ * param_ / 3.0);
        case OneDimKind::Laplace:
            return MomentEstimate::exact_value(2.0 * param_ * param_);
        case OneDimKind::Empirical:
            return empirical_->variance;
    }
    return {};  // unreachable
}

MomentEstimate OneDimLaw::mean_abs() const {
    switch (kind_) {
        case OneDimKind::Gaussian:
            return MomentEstimate::exact_value(param_ * 0.7978845608028653559);
        case OneDimKind::Uniform:
            return MomentEstimate::exact_value(param_ / 2.0);
        case OneDimKind::Laplace:
            return MomentEstimate::exact_value(param_);
        case OneDimKind::Empirical:
            return empirical_->mean_abs;
    }
    return {};  // unreachable
}

void OneDimLaw::mass_range(double& lo, double& hi) const {
    switch (kind_) {
        case OneDimKind::Gaussian:
            lo = -6.5 * param_;
            hi = 6.5 * param_;
            return;
        case OneDimKind::Uniform:
            lo = -param_;
            hi = param_;
            return;
        case OneDimKind::Laplace:
            lo = -21.0 * param_;
            hi = 21.0 * param_;
            return;
        case OneDimKind::Empirical:
            lo = empirical_->sorted_cache.front();
            hi = empirical_->sorted_cache.back();
            return;
    }
}

// ---------------------------------------------------------------------------
// NoiseDistribution

NoiseDistribution NoiseDistribution::isotropic_gaussian(double sigma, std::size_t dim) {
    return NoiseDistribution(NoiseKind::IsotropicGaussian, require_dim(dim),
                             require_positive(sigma, "sigma"));
}

NoiseDistribution NoiseDistribution::uniform_box(double r, std::size_t dim) {
    return NoiseDistribution(NoiseKind::UniformBox, require_dim(dim),
                             require_positive(r, "r"));
}

NoiseDistribution NoiseDistribution::iid_product(OneDimLaw marginal, std::size_t dim) {
    NoiseDistribution d(NoiseKind::IIDProduct, require_dim(dim), 0.0);
    d.marginal_ = std::move(marginal);
    return d;
}

NoiseDistribution NoiseDistribution::parse(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("distribution spec: expected family:params");
    }
    const std::string_view family = spec.substr(0, colon);
    std::string_view rest = spec.substr(colon + 1);
    if (family == "gauss") {
        return isotropic_gaussian(parse_real(kv_lookup(rest, "sigma")),
                                  parse_count(kv_lookup(rest, "d")));
    }
    if (family == "box") {
        return uniform_box(parse_real(kv_lookup(rest, "r")),
                           parse_count(kv_lookup(rest, "d")));
    }
    if (family == "iid") {
        const std::size_t colon2 = rest.find(':');
        if (colon2 == std::string_view::npos) {
            throw std::invalid_argument("distribution spec: iid needs a marginal law");
        }
        const std::string_view law = rest.substr(0, colon2);
        const std::string_view params = rest.substr(colon2 + 1);
        const std::size_t d = parse_count(kv_lookup(params, "d"));
        if (law == "gauss") {
            return iid_product(OneDimLaw::gaussian(parse_real(kv_lookup(params, "sigma"))), d);
        }
        if (law == "uniform") {
            return iid_product(OneDimLaw::uniform(parse_real(kv_lookup(params, "r"))), d);
        }
        if (law == "laplace") {
            return iid_product(OneDimLaw::laplace(parse_real(kv_lookup(params, "b"))), d);
        }
        throw std::invalid_argument("distribution spec: unknown marginal '" +
                                    std::string(law) + "'");
    }
    throw std::invalid_argument("distribution spec: unknown family '" +
                                std::string(family) + "'");
}

double NoiseDistribution::sigma() const {
    if (kind_ != NoiseKind::IsotropicGaussian) {
        throw std::logic_error("sigma() requires an isotropic Gaussian");
    }
    return param_;
}

double NoiseDistribution::box_radius() const {
    if (kind_ != NoiseKind::UniformBox) {
        throw std::logic_error("box_radius() requires a uniform box");
    }
    return param_;
}

const OneDimLaw& NoiseDistribution::marginal() const {
    if (kind_ != NoiseKind::IIDProduct) {
        throw std::logic_error("marginal() requires an i.i.d. product");
    }
    return *marginal_;
}

void NoiseDistribution::sample_into(Rng& rng, std::span<double> out) const {
    switch (kind_) {
        case NoiseKind::IsotropicGaussian:
            for (double& x : out) x = param_ * rng.next_gaussian();
            return;
        case NoiseKind::UniformBox:
            for (double& x : out) x = param_ * rng.next_symmetric();
            return;
        case NoiseKind::IIDProduct:
            for (double& x : out) x = marginal_->sample(rng);
            return;
    }
}

DenseVector NoiseDistribution::sample_one(Rng& rng) const {
    std::vector<double> entries(dim_);
    sample_into(rng, entries);
    return DenseVector(std::move(entries));
}

std::vector<DenseVector> NoiseDistribution::sample(Rng& rng, std::size_t n) const {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    std::vector<DenseVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(rng));
    return out;
}

MomentEstimate NoiseDistribution::second_moment() const {
    const double d = static_cast<double>(dim_);
    switch (kind_) {
        case NoiseKind::IsotropicGaussian:
            return MomentEstimate::exact_value(param_ * param_ * d);
        case NoiseKind::UniformBox:
            return MomentEstimate::exact_value(d * param_ * param_ / 3.0);
        case NoiseKind::IIDProduct: {
            MomentEstimate var = marginal_->variance();
            var.value *= d;
            var.ci_halfwidth *= d;
            return var;
        }
    }
    return {};  // unreachable
}

bool NoiseDistribution::has_log_density() const {
    if (kind_ == NoiseKind::IIDProduct) return marginal_->has_density();
    return true;
}

double NoiseDistribution::log_density(std::span<const double> x) const {
    if (x.size() != dim_) throw std::invalid_argument("log_density: dimension mismatch");
    const double d = static_cast<double>(dim_);
    switch (kind_) {
        case NoiseKind::IsotropicGaussian: {
            double q = 0.0;
            for (double e : x) q += e * e;
            return -0.5 * (q / (param_ * param_) + d * kLog2Pi) - d * std::log(param_);
        }
        case NoiseKind::UniformBox: {
            for (double e : x) {
                if (std::abs(e) > param_) return -std::numeric_limits<double>::infinity();
            }
            return -d * std::log(2.0 * param_);
        }
        case NoiseKind::IIDProduct: {
            double s = 0.0;
            for (double e : x) s += marginal_->log_density(e);
            return s;
        }
    }
    return 0.0;  // unreachable
}

double NoiseDistribution::log_density_shifted(std::span<const double> x,
                                              std::span<const double> v) const {
    if (x.size() != dim_ || v.size() != dim_) {
        throw std::invalid_argument("log_density_shifted: dimension mismatch");
    }
    const double d = static_cast<double>(dim_);
    switch (kind_) {
        case NoiseKind::IsotropicGaussian: {
            double q = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                const double e = x[i] - v[i];
                q += e * e;
            }
            return -0.5 * (q / (param_ * param_) + d * kLog2Pi) - d * std::log(param_);
        }
        case NoiseKind::UniformBox: {
            for (std::size_t i = 0; i < dim_; ++i) {
                if (std::abs(x[i] - v[i]) > param_) {
                    return -std::numeric_limits<double>::infinity();
                }
            }
            return -d * std::log(2.0 * param_);
        }
        case NoiseKind::IIDProduct: {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                s += marginal_->log_density(x[i] - v[i]);
            }
            return s;
        }
    }
    return 0.0;  // unreachable
}

std::string NoiseDistribution::to_string() const {
    switch (kind_) {
        case NoiseKind::IsotropicGaussian:
            return "gauss:sigma=" + std::to_string(param_) + ",d=" + std::to_string(dim_);
        case NoiseKind::UniformBox:
            return "box:r=" + std::to_string(param_) + ",d=" + std::to_string(dim_);
        case NoiseKind::IIDProduct: {
            const char* law = nullptr;
            switch (marginal_->kind()) {
                case OneDimKind::Gaussian: law = "gauss:sigma="; break;
                case OneDimKind::Uniform: law = "uniform:r="; break;
                case OneDimKind::Laplace: law = "laplace:b="; break;
                case OneDimKind::Empirical: law = "empirical:p="; break;
            }
            return std::string("iid:") + law + std::to_string(marginal_->param()) +
                   ",d=" + std::to_string(dim_);
        }
    }
    return {};  // unreachable
}

}  // namespace smoothcert
