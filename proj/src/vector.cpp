#include "smoothcert/vector.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <stdexcept>

namespace smoothcert {

NormOrder NormOrder::finite(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw std::invalid_argument("NormOrder: finite order must satisfy p >= 1");
    }
    return NormOrder(false, p);
}

NormOrder NormOrder::parse(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "inf" || lower == "infinity" || lower == "oo") {
        return inf();
    }
    double p = 0.0;
    const auto* begin = lower.data();
    const auto* end = begin + lower.size();
    auto [ptr, ec] = std::from_chars(begin, end, p);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("NormOrder: cannot parse '" + std::string(text) + "'");
    }
    return finite(p);
}

double NormOrder::value() const {
    if (inf_) {
        throw std::logic_error("NormOrder: infinite order has no finite value");
    }
    return p_;
}

std::string NormOrder::to_string() const {
    if (inf_) return "inf";
    if (p_ == static_cast<double>(static_cast<long long>(p_))) {
        return std::to_string(static_cast<long long>(p_));
    }
    return std::to_string(p_);
}

DenseVector::DenseVector(std::vector<double> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw std::invalid_argument("DenseVector: dimension must be >= 1");
    }
}

DenseVector DenseVector::zeros(std::size_t dim) {
    return DenseVector(std::vector<double>(dim, 0.0));
}

DenseVector DenseVector::constant(std::size_t dim, double value) {
    return DenseVector(std::vector<double>(dim, value));
}

double DenseVector::lp_norm(NormOrder p) const {
    if (p.is_inf()) {
        double m = 0.0;
        for (double e : entries_) m = std::max(m, std::abs(e));
        return m;
    }
    const double order = p.value();
    if (order == 2.0) {
        double s = 0.0;
        for (double e : entries_) s += e * e;
        return std::sqrt(s);
    }
    if (order == 1.0) {
        double s = 0.0;
        for (double e : entries_) s += std::abs(e);
        return s;
    }
    // Scale by the max entry to avoid overflow/underflow for large orders.
    double m = 0.0;
    for (double e : entries_) m = std::max(m, std::abs(e));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    if (order == std::floor(order) && order <= 16.0) {
        const int k = static_cast<int>(order);
        for (double e : entries_) {
            const double t = std::abs(e) / m;
            double acc = 1.0;
            for (int j = 0; j < k; ++j) acc *= t;
            s += acc;
        }
    } else {
        for (double e : entries_) s += std::pow(std::abs(e) / m, order);
    }
    return m * std::pow(s, 1.0 / order);
}

double DenseVector::dot(const DenseVector& other) const {
    if (other.dim() != dim()) {
        throw std::invalid_argument("DenseVector: dimension mismatch in dot product");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) s += entries_[i] * other.entries_[i];
    return s;
}

bool DenseVector::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](double e) { return e == 0.0; });
}

DenseVector operator+(const DenseVector& a, const DenseVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("DenseVector: dimension mismatch");
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return DenseVector(std::move(out));
}

DenseVector operator-(const DenseVector& a, const DenseVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("DenseVector: dimension mismatch");
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
    return DenseVector(std::move(out));
}

DenseVector operator*(double s, const DenseVector& v) {
    std::vector<double> out(v.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * v[i];
    return DenseVector(std::move(out));
}

DenseVector parse_vector(std::string_view text) {
    std::vector<double> entries;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view token = text.substr(start, comma - start);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            throw std::invalid_argument("parse_vector: bad entry '" + std::string(token) + "'");
        }
        entries.push_back(value);
        if (comma == text.size()) break;
        start = comma + 1;
    }
    return DenseVector(std::move(entries));
}

}  // namespace smoothcert
