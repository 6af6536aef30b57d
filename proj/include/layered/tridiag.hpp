#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "layered/error.hpp"

namespace layered {

/// Real tridiagonal matrix, factored once (Thomas), applied to real or complex
/// right-hand sides. lower[0] and upper[n-1] are ignored.
class Tridiagonal {
public:
    Tridiagonal() = default;
    Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
        : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
        factor();
    }

    std::size_t size() const { return diag_.size(); }

    template <typename T>
    void solve_in_place(std::span<T> rhs) const {
        const std::size_t n = diag_.size();
        rhs[0] *= inv_pivot_[0];
        for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
        for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cprime_[i] * rhs[i + 1];
    }

    template <typename T>
    void apply(std::span<const T> x, std::span<T> out) const {
        const std::size_t n = diag_.size();
        for (std::size_t i = 0; i < n; ++i) {
            T v = diag_[i] * x[i];
            if (i > 0) v += lower_[i] * x[i - 1];
            if (i + 1 < n) v += upper_[i] * x[i + 1];
            out[i] = v;
        }
    }

private:
    void factor() {
        const std::size_t n = diag_.size();
        if (n == 0 || lower_.size() != n || upper_.size() != n)
            throw Error("tridiagonal: inconsistent band sizes");
        cprime_.assign(n, 0.0);
        inv_pivot_.assign(n, 0.0);
        double pivot = diag_[0];
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) pivot = diag_[i] - lower_[i] * cprime_[i - 1];
            if (!(std::abs(pivot) > 0) || !std::isfinite(pivot))
                throw Error("tridiagonal: singular or non-finite pivot");
            inv_pivot_[i] = 1.0 / pivot;
            if (i + 1 < n) cprime_[i] = upper_[i] * inv_pivot_[i];
        }
    }

    std::vector<double> lower_, diag_, upper_;
    std::vector<double> cprime_, inv_pivot_;
};

}  // namespace layered
