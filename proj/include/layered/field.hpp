#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "layered/error.hpp"
#include "layered/grid.hpp"

namespace layered {

/// Vertical staggering of a grid function: cell centers (nz rows) or z-faces
/// (nz + 1 rows, walls included).
enum class Staggering : std::uint8_t { Center = 0, Face = 1 };

/// Real 2D grid function, x-periodic, stored z-fastest: value(ix, iz) at
/// data[ix * rows + iz].
class Field {
public:
    Field() = default;
    Field(std::size_t nx, std::size_t rows, Staggering stag, double fill = 0.0)
        : nx_(nx), rows_(rows), stag_(stag), data_(nx * rows, fill) {}

    static Field centers(const Grid& g, double fill = 0.0) {
        return Field(g.nx(), g.nz(), Staggering::Center, fill);
    }
    static Field faces(const Grid& g, double fill = 0.0) {
        return Field(g.nx(), g.nz() + 1, Staggering::Face, fill);
    }

    std::size_t nx() const { return nx_; }
    std::size_t rows() const { return rows_; }
    Staggering staggering() const { return stag_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t ix, std::size_t iz) { return data_[ix * rows_ + iz]; }
    double operator()(std::size_t ix, std::size_t iz) const { return data_[ix * rows_ + iz]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    bool matches(const Field& o) const {
        return nx_ == o.nx_ && rows_ == o.rows_ && stag_ == o.stag_;
    }
    bool fits(const Grid& g) const {
        return nx_ == g.nx() && rows_ == (stag_ == Staggering::Center ? g.nz() : g.nz() + 1);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }
    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    Field& operator+=(const Field& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator*(Field a, double s) { return a *= s; }

    bool operator==(const Field&) const = default;

private:
    void check_same(const Field& o) const {
        if (!matches(o)) throw Error("field staggering/shape mismatch");
    }

    std::size_t nx_ = 0;
    std::size_t rows_ = 0;
    Staggering stag_ = Staggering::Center;
    std::vector<double> data_;
};

}  // namespace layered
