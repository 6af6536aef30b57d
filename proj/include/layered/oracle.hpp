#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace layered {

/// Closed-form per-mode pressure for two constant-K layers with
/// phi_hat(z) = sin(pi z / H): on each layer P = c cos(pi z/H) + A e^{kz} + B e^{-kz},
/// glued by continuity of P and of K (P' + phi) at the interface, zero flux at walls.
class TwoLayerMode {
public:
    TwoLayerMode(double k, double H, double zi, double K_top, double K_bot)
        : k_(k), H_(H), zi_(zi), Kt_(K_top), Kb_(K_bot) {
        const double a = std::numbers::pi / H;
        c_ = a / (k * k + a * a);
        // Unknowns x = (A_t, B_t, A_b, B_b).
        std::array<std::array<double, 5>, 4> m{};
        auto flux_row = [&](double z, double K, int off, double sign) {
            std::array<double, 5> r{};
            r[off] = sign * K * k * std::exp(k * z);
            r[off + 1] = -sign * K * k * std::exp(-k * z);
            r[4] = -sign * K * (1.0 - c_ * a) * std::sin(a * z);
            return r;
        };
        m[0] = flux_row(0.0, Kt_, 0, 1.0);
        m[1] = flux_row(-H, Kb_, 2, 1.0);
        // P_t(zi) - P_b(zi) = 0 (particular parts cancel).
        m[2] = {std::exp(k * zi), std::exp(-k * zi), -std::exp(k * zi), -std::exp(-k * zi), 0.0};
        // q_t(zi) - q_b(zi) = 0.
        auto qt = flux_row(zi, Kt_, 0, 1.0);
        auto qb = flux_row(zi, Kb_, 2, 1.0);
        m[3] = {qt[0], qt[1], -qb[2], -qb[3], qt[4] - qb[4]};
        // Gaussian elimination with partial pivoting.
        for (int col = 0; col < 4; ++col) {
            int piv = col;
            for (int r = col + 1; r < 4; ++r)
                if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
            std::swap(m[col], m[piv]);
            for (int r = 0; r < 4; ++r) {
                if (r == col) continue;
                const double f = m[r][col] / m[col][col];
                for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
            }
        }
        for (int i = 0; i < 4; ++i) x_[i] = m[i][4] / m[i][i];
    }

    bool top(double z) const { return z > zi_; }

    double P(double z) const {
        const double a = std::numbers::pi / H_;
        const int o = top(z) ? 0 : 2;
        return c_ * std::cos(a * z) + x_[o] * std::exp(k_ * z) + x_[o + 1] * std::exp(-k_ * z);
    }

    double dPdz(double z) const {
        const double a = std::numbers::pi / H_;
        const int o = top(z) ? 0 : 2;
        return -c_ * a * std::sin(a * z) + k_ * (x_[o] * std::exp(k_ * z) - x_[o + 1] * std::exp(-k_ * z));
    }

    double phi(double z) const { return std::sin(std::numbers::pi * z / H_); }

    double K(double z) const { return top(z) ? Kt_ : Kb_; }

    // Vertical flux w_hat = -K (P' + phi).
    double w(double z) const { return -K(z) * (dPdz(z) + phi(z)); }

private:
    double k_, H_, zi_, Kt_, Kb_;
    double c_ = 0.0;
    std::array<double, 4> x_{};
};

}  // namespace layered
