#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smoothcert/rng.hpp"
#include "smoothcert/vector.hpp"

namespace smoothcert {

/// A scalar moment together with how it was obtained. Exact values carry no
/// uncertainty; Monte Carlo values carry a confidence halfwidth and sample
/// count, and the inexactness propagates to downstream consumers.
struct MomentEstimate {
    double value = 0.0;
    bool exact = true;
    double ci_halfwidth = 0.0;
    std::size_t n_samples = 0;

    static MomentEstimate exact_value(double v) { return {v, true, 0.0, 0}; }
    static MomentEstimate monte_carlo(double v, double half, std::size_t n) {
        return {v, false, half, n};
    }
};

enum class OneDimKind { Gaussian, Uniform, Laplace, Empirical };

/// A one-dimensional law used as the marginal of i.i.d. product noise.
/// Gaussian(sigma), Uniform on [-r, r], Laplace(b) have exact cdfs and
/// densities. Empirical laws are defined by a sampler closure; their cdf and
/// moments come from a cached sample and are never flagged exact.
class OneDimLaw {
public:
    static OneDimLaw gaussian(double sigma);
    static OneDimLaw uniform(double r);
    static OneDimLaw laplace(double b);
    static OneDimLaw empirical(std::function<double(Rng&)> sampler,
                               std::size_t cache_size = 1 << 16,
                               std::uint64_t cache_seed = 0x5eedULL);

    OneDimKind kind() const { return kind_; }
    double param() const { return param_; }

    double sample(Rng& rng) const;

    bool has_exact_cdf() const { return kind_ != OneDimKind::Empirical; }
    double cdf(double x) const;
    /// Granularity of the cdf: 0 for exact laws, 1/cache_size for empirical.
    double cdf_resolution() const;

    bool has_density() const { return kind_ != OneDimKind::Empirical; }
    double density(double x) const;
    double log_density(double x) const;

    MomentEstimate variance() const;
    MomentEstimate mean_abs() const;

    /// Interval [lo, hi] containing all but ~1e-9 of the mass.
    void mass_range(double& lo, double& hi) const;

private:
    OneDimLaw(OneDimKind kind, double param) : kind_(kind), param_(param) {}

    OneDimKind kind_;
    double param_ = 0.0;

    struct EmpiricalData {
        std::function<double(Rng&)> sampler;
        std::vector<double> sorted_cache;
        MomentEstimate variance;
        MomentEstimate mean_abs;
    };
    std::shared_ptr<const EmpiricalData> empirical_;
};

enum class NoiseKind { IsotropicGaussian, UniformBox, IIDProduct };

/// Smoothing distribution over R^d. Values are immutable after construction
/// and safe to share across threads; all randomness flows through
/// caller-supplied Rng states.
class NoiseDistribution {
public:
    static NoiseDistribution isotropic_gaussian(double sigma, std::size_t dim);
    static NoiseDistribution uniform_box(double r, std::size_t dim);
    static NoiseDistribution iid_product(OneDimLaw marginal, std::size_t dim);

    /// Builds a distribution from a plain-text spec:
    ///   gauss:sigma=0.12,d=3072
    ///   box:r=1.5,d=64
    ///   iid:laplace:b=1,d=100   (also iid:gauss:sigma=..., iid:uniform:r=...)
    static NoiseDistribution parse(std::string_view spec);

    NoiseKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double sigma() const;       // IsotropicGaussian only
    double box_radius() const;  // UniformBox only
    const OneDimLaw& marginal() const;  // IIDProduct only

    void sample_into(Rng& rng, std::span<double> out) const;
    DenseVector sample_one(Rng& rng) const;
    std::vector<DenseVector> sample(Rng& rng, std::size_t n) const;

    /// E ||eta||_2^2. Closed form for Gaussian, box, and product laws with
    /// exact marginal variance; cached Monte Carlo otherwise.
    MomentEstimate second_moment() const;

    bool has_log_density() const;
    /// Natural log of the density at x; -inf outside the support.
    double log_density(std::span<const double> x) const;
    double log_density(const DenseVector& x) const { return log_density(x.entries()); }
    /// Density of the copy shifted by v, i.e. log p(x - v), without
    /// materializing the difference.
    double log_density_shifted(std::span<const double> x,
                               std::span<const double> v) const;
    double log_density_shifted(const DenseVector& x, const DenseVector& v) const {
        return log_density_shifted(x.entries(), v.entries());
    }

    std::string to_string() const;

private:
    NoiseDistribution(NoiseKind kind, std::size_t dim, double param)
        : kind_(kind), dim_(dim), param_(param) {}

    NoiseKind kind_;
    std::size_t dim_;
    double param_ = 0.0;                  // sigma or r
    std::optional<OneDimLaw> marginal_;   // IIDProduct only
};

/// n i.i.d. draws; identical (distribution, rng seed, n) give identical bits.
inline std::vector<DenseVector> sample(const NoiseDistribution& dist, Rng& rng,
                                       std::size_t n) {
    return dist.sample(rng, n);
}

}  // namespace smoothcert
