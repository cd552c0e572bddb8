#pragma once

#include <lrwell/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace lrwell {

/// Square complex band matrix with equal lower and upper bandwidth.
class BandedMatrix {
public:
    using value_type = std::complex<double>;

    BandedMatrix(std::size_t size, int bandwidth)
        : size_(size), bandwidth_(bandwidth), data_(size * static_cast<std::size_t>(2 * bandwidth + 1)) {
        if (bandwidth < 0) throw domain_error("negative bandwidth");
    }

    std::size_t size() const { return size_; }
    int bandwidth() const { return bandwidth_; }

    bool in_band(std::size_t i, std::size_t j) const {
        const auto d = static_cast<long>(j) - static_cast<long>(i);
        return d >= -bandwidth_ && d <= bandwidth_;
    }

    value_type operator()(std::size_t i, std::size_t j) const { return in_band(i, j) ? data_[index(i, j)] : value_type{}; }

    value_type& at(std::size_t i, std::size_t j) {
        if (i >= size_ || j >= size_ || !in_band(i, j))
            throw range_error("band entry (" + std::to_string(i) + ", " + std::to_string(j) + ") outside storage");
        return data_[index(i, j)];
    }

    std::vector<value_type> apply(const std::vector<value_type>& v) const {
        check_size(v.size());
        std::vector<value_type> out(size_);
        for (std::size_t i = 0; i < size_; ++i) {
            const auto [lo, hi] = row_range(i);
            value_type acc{};
            for (std::size_t j = lo; j <= hi; ++j) acc += data_[index(i, j)] * v[j];
            out[i] = acc;
        }
        return out;
    }

    BandedMatrix& operator+=(const BandedMatrix& o) { return combine(o, 1.0); }
    BandedMatrix& operator-=(const BandedMatrix& o) { return combine(o, -1.0); }
    BandedMatrix& operator*=(value_type s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend BandedMatrix operator+(BandedMatrix a, const BandedMatrix& b) { return a.widened(b.bandwidth_) += b; }
    friend BandedMatrix operator-(BandedMatrix a, const BandedMatrix& b) { return a.widened(b.bandwidth_) -= b; }
    friend BandedMatrix operator*(value_type s, BandedMatrix a) { return a *= s; }

    friend BandedMatrix product(const BandedMatrix& a, const BandedMatrix& b) {
        a.check_size(b.size_);
        BandedMatrix out(a.size_, a.bandwidth_ + b.bandwidth_);
        for (std::size_t i = 0; i < a.size_; ++i) {
            const auto [lo, hi] = a.row_range(i);
            for (std::size_t m = lo; m <= hi; ++m) {
                const value_type aim = a.data_[a.index(i, m)];
                const auto [blo, bhi] = b.row_range(m);
                for (std::size_t j = blo; j <= bhi; ++j) out.data_[out.index(i, j)] += aim * b.data_[b.index(m, j)];
            }
        }
        return out;
    }

    /// Infinity norm (max absolute row sum), optionally over rows [first, last).
    double row_sum_norm(std::size_t first = 0, std::size_t last = static_cast<std::size_t>(-1)) const {
        last = std::min(last, size_);
        double best = 0.0;
        for (std::size_t i = first; i < last; ++i) {
            const auto [lo, hi] = row_range(i);
            double row = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) row += std::abs(data_[index(i, j)]);
            best = std::max(best, row);
        }
        return best;
    }

    BandedMatrix widened(int bandwidth) const {
        if (bandwidth <= bandwidth_) return *this;
        BandedMatrix out(size_, bandwidth);
        for (std::size_t i = 0; i < size_; ++i) {
            const auto [lo, hi] = row_range(i);
            for (std::size_t j = lo; j <= hi; ++j) out.data_[out.index(i, j)] = data_[index(i, j)];
        }
        return out;
    }

private:
    std::size_t index(std::size_t i, std::size_t j) const {
        return i * static_cast<std::size_t>(2 * bandwidth_ + 1) + (j + static_cast<std::size_t>(bandwidth_) - i);
    }

    std::pair<std::size_t, std::size_t> row_range(std::size_t i) const {
        const auto b = static_cast<std::size_t>(bandwidth_);
        return {i >= b ? i - b : 0, std::min(i + b, size_ - 1)};
    }

    void check_size(std::size_t n) const {
        if (n != size_) throw domain_error("dimension mismatch: " + std::to_string(n) + " vs " + std::to_string(size_));
    }

    BandedMatrix& combine(const BandedMatrix& o, double sign) {
        check_size(o.size_);
        if (o.bandwidth_ > bandwidth_) *this = widened(o.bandwidth_);
        for (std::size_t i = 0; i < size_; ++i) {
            const auto [lo, hi] = o.row_range(i);
            for (std::size_t j = lo; j <= hi; ++j) data_[index(i, j)] += sign * o.data_[o.index(i, j)];
        }
        return *this;
    }

    std::size_t size_;
    int bandwidth_;
    std::vector<value_type> data_;
};

/// Solve a tridiagonal system in place (Thomas elimination, no pivoting).
/// Throws numeric_error on a vanishing pivot.
inline std::vector<std::complex<double>> solve_tridiagonal(const BandedMatrix& a, std::vector<std::complex<double>> rhs) {
    if (a.bandwidth() != 1) throw domain_error("solve_tridiagonal needs bandwidth 1");
    const std::size_t n = a.size();
    if (rhs.size() != n) throw domain_error("solve_tridiagonal: right-hand side size mismatch");
    std::vector<std::complex<double>> upper(n);
    auto pivot_check = [](std::complex<double> p, std::size_t row) {
        if (std::abs(p) == 0.0 || !std::isfinite(std::abs(p)))
            throw numeric_error("tridiagonal solve: zero pivot at row " + std::to_string(row));
    };
    std::complex<double> pivot = a(0, 0);
    pivot_check(pivot, 0);
    upper[0] = n > 1 ? a(0, 1) / pivot : 0.0;
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        const auto lower = a(i, i - 1);
        pivot = a(i, i) - lower * upper[i - 1];
        pivot_check(pivot, i);
        upper[i] = i + 1 < n ? a(i, i + 1) / pivot : 0.0;
        rhs[i] = (rhs[i] - lower * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper[i] * rhs[i + 1];
    return rhs;
}

}  // namespace lrwell
