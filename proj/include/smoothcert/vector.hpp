#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smoothcert {

/// Order of an lp norm. Infinity is a distinguished value, not a large
/// float, so exponents of the form 1/2 - 1/p degrade exactly to 1/2.
class NormOrder {
public:
    static NormOrder finite(double p);
    static NormOrder inf() { return NormOrder(true, 0.0); }
    static NormOrder two() { return finite(2.0); }

    /// Accepts "inf" (case-insensitive) or a decimal value >= 1.
    static NormOrder parse(std::string_view text);

    bool is_inf() const { return inf_; }
    double value() const;  // throws for the infinite order
    /// 1/p, exactly 0 for the infinite order.
    double reciprocal() const { return inf_ ? 0.0 : 1.0 / p_; }

    std::string to_string() const;
    bool operator==(const NormOrder& o) const {
        return inf_ == o.inf_ && (inf_ || p_ == o.p_);
    }

private:
    NormOrder(bool inf, double p) : inf_(inf), p_(p) {}
    bool inf_;
    double p_;
};

/// Dense real vector with a fixed dimension (>= 1).
class DenseVector {
public:
    explicit DenseVector(std::vector<double> entries);
    static DenseVector zeros(std::size_t dim);
    static DenseVector constant(std::size_t dim, double value);

    std::size_t dim() const { return entries_.size(); }
    std::span<const double> entries() const { return entries_; }
    std::span<double> mutable_entries() { return entries_; }
    double operator[](std::size_t i) const { return entries_[i]; }
    double& operator[](std::size_t i) { return entries_[i]; }

    double lp_norm(NormOrder p) const;
    double l2_norm() const { return lp_norm(NormOrder::two()); }
    double linf_norm() const { return lp_norm(NormOrder::inf()); }
    double dot(const DenseVector& other) const;
    bool is_zero() const;

private:
    std::vector<double> entries_;
};

DenseVector operator+(const DenseVector& a, const DenseVector& b);
DenseVector operator-(const DenseVector& a, const DenseVector& b);
DenseVector operator*(double s, const DenseVector& v);

/// Parses a comma-separated list of reals, e.g. "0.1,-2,3e-4".
DenseVector parse_vector(std::string_view text);

}  // namespace smoothcert
