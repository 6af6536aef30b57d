#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <tuple>
#include <vector>

#include "layered/error.hpp"
#include "layered/field.hpp"

namespace layered {

using cplx = std::complex<double>;

/// Horizontal Fourier coefficients of a real field: modes n = 0..nx/2, each a
/// complex column over the field's rows. Negative modes are the conjugates.
/// Normalised so that a constant field c has coefficient c at n = 0.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(std::size_t nx, std::size_t rows, Staggering stag)
        : nx_(nx), rows_(rows), stag_(stag), data_((nx / 2 + 1) * rows) {}

    std::size_t nx() const { return nx_; }
    std::size_t modes() const { return nx_ / 2 + 1; }
    std::size_t rows() const { return rows_; }
    Staggering staggering() const { return stag_; }

    cplx& operator()(std::size_t n, std::size_t iz) { return data_[n * rows_ + iz]; }
    cplx operator()(std::size_t n, std::size_t iz) const { return data_[n * rows_ + iz]; }

    std::span<cplx> column(std::size_t n) { return {data_.data() + n * rows_, rows_}; }
    std::span<const cplx> column(std::size_t n) const { return {data_.data() + n * rows_, rows_}; }

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    bool matches(const SpectralField& o) const {
        return nx_ == o.nx_ && rows_ == o.rows_ && stag_ == o.stag_;
    }

private:
    std::size_t nx_ = 0;
    std::size_t rows_ = 0;
    Staggering stag_ = Staggering::Center;
    std::vector<cplx> data_;
};

namespace detail {

enum class PlanKind { R2C, C2R, DCT2, DCT3 };

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per shape and live for the process lifetime.
inline fftw_plan cached_plan(PlanKind kind, std::size_t n, std::size_t howmany) {
    static std::mutex mtx;
    static std::map<std::tuple<int, std::size_t, std::size_t>, fftw_plan> plans;
    std::lock_guard lock(mtx);
    const auto key = std::make_tuple(static_cast<int>(kind), n, howmany);
    if (auto it = plans.find(key); it != plans.end()) return it->second;

    const int len = static_cast<int>(n);
    const int hm = static_cast<int>(howmany);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    if (kind == PlanKind::DCT2 || kind == PlanKind::DCT3) {
        std::vector<double> buf(n * howmany);
        const fftw_r2r_kind k = kind == PlanKind::DCT2 ? FFTW_REDFT10 : FFTW_REDFT01;
        p = fftw_plan_many_r2r(1, &len, hm, buf.data(), nullptr, 1, len, buf.data(), nullptr, 1,
                               len, &k, flags);
    } else {
        std::vector<double> re(n * howmany);
        std::vector<cplx> sp((n / 2 + 1) * howmany);
        auto* c = reinterpret_cast<fftw_complex*>(sp.data());
        if (kind == PlanKind::R2C)
            p = fftw_plan_many_dft_r2c(1, &len, hm, re.data(), nullptr, hm, 1, c, nullptr, hm, 1,
                                       flags);
        else
            p = fftw_plan_many_dft_c2r(1, &len, hm, c, nullptr, hm, 1, re.data(), nullptr, hm, 1,
                                       flags);
    }
    if (p == nullptr) throw Error("FFTW planning failed");
    plans.emplace(key, p);
    return p;
}

}  // namespace detail

inline double wavenumber(std::size_t n, double L) {
    return 2.0 * std::numbers::pi * static_cast<double>(n) / L;
}

inline SpectralField forward_x(const Field& f) {
    if (f.nx() < 2) throw Error("forward_x: field has no x extent");
    SpectralField s(f.nx(), f.rows(), f.staggering());
    auto plan = detail::cached_plan(detail::PlanKind::R2C, f.nx(), f.rows());
    std::vector<double> in(f.raw());
    fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(s.raw().data()));
    const double scale = 1.0 / static_cast<double>(f.nx());
    for (auto& c : s.raw()) c *= scale;
    return s;
}

inline Field inverse_x(const SpectralField& s) {
    Field f(s.nx(), s.rows(), s.staggering());
    auto plan = detail::cached_plan(detail::PlanKind::C2R, s.nx(), s.rows());
    std::vector<cplx> in(s.raw());
    // The imaginary parts of n = 0 and the Nyquist mode carry no information
    // for a real field; drop them so the result is exactly real-consistent.
    for (std::size_t iz = 0; iz < s.rows(); ++iz) {
        in[iz].imag(0.0);
        in[(s.nx() / 2) * s.rows() + iz].imag(0.0);
    }
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in.data()), f.raw().data());
    return f;
}

/// Applies (i k)^order to every mode; the Nyquist mode is zeroed for odd order.
inline SpectralField ddx(SpectralField s, double L, int order = 1) {
    const std::size_t nyq = s.nx() / 2;
    for (std::size_t n = 0; n < s.modes(); ++n) {
        cplx factor = 1.0;
        const cplx ik(0.0, wavenumber(n, L));
        for (int o = 0; o < order; ++o) factor *= ik;
        if (n == nyq && (order % 2 == 1)) factor = 0.0;
        for (auto& c : s.column(n)) c *= factor;
    }
    return s;
}

inline Field ddx(const Field& f, double L, int order = 1) {
    return inverse_x(ddx(forward_x(f), L, order));
}

/// Sum of |f|^2 over x nodes, row by row, computed from coefficients.
inline double parseval_sum(const SpectralField& s) {
    const std::size_t nyq = s.nx() / 2;
    double acc = 0.0;
    for (std::size_t n = 0; n < s.modes(); ++n) {
        const double w = (n == 0 || n == nyq) ? 1.0 : 2.0;
        for (const auto& c : s.column(n)) acc += w * std::norm(c);
    }
    return acc * static_cast<double>(s.nx());
}

/// Orthonormal DCT-II along each column of `cols` (ncols x n, contiguous).
inline void dct2_orthonormal(std::vector<double>& cols, std::size_t n, std::size_t ncols) {
    auto plan = detail::cached_plan(detail::PlanKind::DCT2, n, ncols);
    fftw_execute_r2r(plan, cols.data(), cols.data());
    const double s0 = std::sqrt(1.0 / (4.0 * static_cast<double>(n)));
    const double s1 = std::sqrt(1.0 / (2.0 * static_cast<double>(n)));
    for (std::size_t c = 0; c < ncols; ++c) {
        cols[c * n] *= s0;
        for (std::size_t m = 1; m < n; ++m) cols[c * n + m] *= s1;
    }
}

/// Inverse of dct2_orthonormal.
inline void dct3_orthonormal(std::vector<double>& cols, std::size_t n, std::size_t ncols) {
    const double s0 = std::sqrt(1.0 / static_cast<double>(n));
    const double s1 = std::sqrt(1.0 / (2.0 * static_cast<double>(n)));
    for (std::size_t c = 0; c < ncols; ++c) {
        cols[c * n] *= s0;
        for (std::size_t m = 1; m < n; ++m) cols[c * n + m] *= s1;
    }
    auto plan = detail::cached_plan(detail::PlanKind::DCT3, n, ncols);
    fftw_execute_r2r(plan, cols.data(), cols.data());
}

}  // namespace layered
