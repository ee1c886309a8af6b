#include "smoothcert/directions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace smoothcert {

namespace {

// Families of the same size share one immutable sign matrix.
std::shared_ptr<const std::vector<std::vector<std::int8_t>>> cached_signs(int n) {
    static std::mutex mu;
    static std::array<std::shared_ptr<const std::vector<std::vector<std::int8_t>>>,
                      kMaxHadamardLog2 + 1>
        cache;
    const std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[static_cast<std::size_t>(n)];
    if (!slot) {
        slot = std::make_shared<const std::vector<std::vector<std::int8_t>>>(
            hadamard_signs(n));
    }
    return slot;
}

}  // namespace

std::vector<std::vector<std::int8_t>> hadamard_signs(int n) {
    if (n < 0) throw std::invalid_argument("hadamard_signs: n must be >= 0");
    if (n > kMaxHadamardLog2) {
        throw std::invalid_argument("hadamard_signs: 2^" + std::to_string(n) +
                                    " sign vectors exceed the capacity limit 2^" +
                                    std::to_string(kMaxHadamardLog2));
    }
    std::vector<std::vector<std::int8_t>> rows{{1}};
    for (int level = 0; level < n; ++level) {
        const std::size_t half = rows.size();
        std::vector<std::vector<std::int8_t>> next(2 * half);
        for (std::size_t i = 0; i < half; ++i) {
            auto& a = next[i];            // (v, v)
            auto& b = next[half + i];     // (v, -v)
            a.reserve(2 * half);
            b.reserve(2 * half);
            a.insert(a.end(), rows[i].begin(), rows[i].end());
            a.insert(a.end(), rows[i].begin(), rows[i].end());
            b.insert(b.end(), rows[i].begin(), rows[i].end());
            for (std::int8_t s : rows[i]) b.push_back(static_cast<std::int8_t>(-s));
        }
        rows = std::move(next);
    }
    return rows;
}

long long DirectionFamily::sign_dot(std::size_t i, std::size_t j) const {
    const auto& a = (*signs_)[i];
    const auto& b = (*signs_)[j];
    long long acc = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        acc += static_cast<long long>(a[k]) * static_cast<long long>(b[k]);
    }
    return acc;
}

DirectionFamily bad_directions(std::size_t d, NormOrder p, double eps,
                               const std::optional<std::vector<std::size_t>>& coords) {
    if (d < 1) throw std::invalid_argument("bad_directions: d must be >= 1");
    if (!p.is_inf() && p.value() < 2.0) {
        throw std::invalid_argument("bad_directions: order must satisfy p >= 2");
    }
    if (!(eps > 0.0)) throw std::invalid_argument("bad_directions: eps must be > 0");

    int n = 0;
    while ((std::size_t{2} << n) <= d) ++n;  // b = 2^n is the largest power of two <= d
    const std::size_t b = std::size_t{1} << n;

    std::vector<std::size_t> targets;
    if (coords) {
        targets = *coords;
        if (targets.size() != b) {
            throw std::invalid_argument("bad_directions: coordinate set must have size b");
        }
        std::vector<std::size_t> sorted = targets;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
            sorted.back() >= d) {
            throw std::invalid_argument("bad_directions: coordinates must be distinct and < d");
        }
    } else {
        targets.resize(b);
        for (std::size_t i = 0; i < b; ++i) targets[i] = i;
    }

    DirectionFamily family;
    family.signs_ = cached_signs(n);
    family.coords_ = targets;
    family.d_ = d;
    family.p_ = p;
    family.target_lp_ = eps;
    // ||v||_2 = eps * b^(1/2 - 1/p); the exponent collapses to 1/2 at p = inf.
    family.target_l2_ = eps * std::pow(static_cast<double>(b), 0.5 - p.reciprocal());

    const double scale = eps * std::pow(static_cast<double>(b), -p.reciprocal());
    family.vectors_.reserve(b);
    for (std::size_t i = 0; i < b; ++i) {
        std::vector<double> entries(d, 0.0);
        for (std::size_t k = 0; k < b; ++k) {
            entries[targets[k]] = scale * static_cast<double>((*family.signs_)[i][k]);
        }
        family.vectors_.emplace_back(std::move(entries));
    }
    return family;
}

std::vector<double> project_coefficients(const DirectionFamily& family,
                                         const DenseVector& x) {
    if (x.dim() != family.dim()) {
        throw std::invalid_argument("project_coefficients: dimension mismatch");
    }
    std::vector<double> coeffs;
    coeffs.reserve(family.count());
    const double norm = family.target_l2();
    for (const DenseVector& v : family.vectors()) {
        coeffs.push_back(v.dot(x) / norm);
    }
    return coeffs;
}

}  // namespace smoothcert
