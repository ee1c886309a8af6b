#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "smoothcert/vector.hpp"

namespace smoothcert {

/// Largest supported doubling depth for sign-vector construction
/// (2^13 vectors of 2^13 entries is 64 MiB of signs).
inline constexpr int kMaxHadamardLog2 = 13;

/// 2^n pairwise orthogonal sign vectors in {+-1}^(2^n), built by the doubling
/// recursion (v, v) / (v, -v). Signs are kept in integer form so orthogonality
/// is exact, not approximate.
std::vector<std::vector<std::int8_t>> hadamard_signs(int n);

/// A family of b pairwise orthogonal vectors in R^d that share one lp norm
/// and one l2 norm: sign patterns on b coordinates scaled by eps * b^(-1/p),
/// zero elsewhere. These are the cube-corner directions with small lp norm
/// but large l2 norm.
class DirectionFamily {
public:
    std::size_t count() const { return vectors_.size(); }  // b
    std::size_t dim() const { return d_; }
    NormOrder order() const { return p_; }
    double target_lp() const { return target_lp_; }
    double target_l2() const { return target_l2_; }
    const std::vector<DenseVector>& vectors() const { return vectors_; }
    const DenseVector& vector(std::size_t i) const { return vectors_[i]; }

    /// Integer inner product of the underlying sign patterns; exact.
    long long sign_dot(std::size_t i, std::size_t j) const;

private:
    friend DirectionFamily bad_directions(std::size_t d, NormOrder p, double eps,
                                          const std::optional<std::vector<std::size_t>>&);
    std::vector<DenseVector> vectors_;
    // b rows of length b, shared with an internal per-size cache.
    std::shared_ptr<const std::vector<std::vector<std::int8_t>>> signs_;
    std::vector<std::size_t> coords_;  // where the b signs land in R^d
    std::size_t d_ = 0;
    NormOrder p_ = NormOrder::two();
    double target_lp_ = 0.0;
    double target_l2_ = 0.0;
};

/// Builds the family for dimension d, order p >= 2, and common lp norm eps.
/// b is the largest power of two <= d (so b > d/2). By default the sign
/// block occupies the leading b coordinates; `coords` redirects it onto an
/// arbitrary set of b distinct coordinates for peeling-style experiments.
DirectionFamily bad_directions(
    std::size_t d, NormOrder p, double eps,
    const std::optional<std::vector<std::size_t>>& coords = std::nullopt);

/// Coefficients (v_i . x) / ||v_i||_2 of x against the normalized family.
/// The projection is non-expansive: the coefficient square sum never exceeds
/// ||x||_2^2.
std::vector<double> project_coefficients(const DirectionFamily& family,
                                         const DenseVector& x);

}  // namespace smoothcert
