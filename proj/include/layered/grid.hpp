#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "layered/error.hpp"

namespace layered {

/// Channel (0, L) x (-H, 0), x-periodic, with horizontal material interfaces.
struct DomainSpec {
    double L = 1.0;
    double H = 1.0;
    std::vector<double> interfaces;  // strictly decreasing, inside (-H, 0)

    std::size_t layers() const { return interfaces.size() + 1; }

    double layer_top(std::size_t j) const { return j == 0 ? 0.0 : interfaces[j - 1]; }
    double layer_bottom(std::size_t j) const {
        return j + 1 == layers() ? -H : interfaces[j];
    }

    double min_layer_thickness() const {
        double m = H;
        for (std::size_t j = 0; j < layers(); ++j) m = std::min(m, layer_top(j) - layer_bottom(j));
        return m;
    }

    double min_interface_gap() const {
        // Gaps between consecutive interfaces only; walls are not interfaces.
        double m = H;
        for (std::size_t j = 1; j < interfaces.size(); ++j)
            m = std::min(m, interfaces[j - 1] - interfaces[j]);
        return m;
    }

    void validate() const {
        require(L > 0 && std::isfinite(L), "domain.L must be positive");
        require(H > 0 && std::isfinite(H), "domain.H must be positive");
        double prev = 0.0;
        for (double z : interfaces) {
            require(std::isfinite(z) && z < prev && z > -H,
                    "domain.interfaces must be strictly decreasing inside (-H, 0)");
            prev = z;
        }
    }
};

/// Tensor grid: nx equispaced x nodes on [0, L), z cells bounded by faces.
/// Faces run from 0 (index 0) down to -H (index nz). Cell i spans
/// [faces[i+1], faces[i]].
class Grid {
public:
    Grid() = default;

    Grid(DomainSpec domain, std::size_t nx, std::vector<double> faces)
        : domain_(std::move(domain)), nx_(nx), faces_(std::move(faces)) {
        const std::size_t nz = faces_.size() - 1;
        centers_.resize(nz);
        dz_.resize(nz);
        for (std::size_t i = 0; i < nz; ++i) {
            dz_[i] = faces_[i] - faces_[i + 1];
            centers_[i] = 0.5 * (faces_[i] + faces_[i + 1]);
        }
        center_gap_.assign(nz + 1, 0.0);
        center_gap_[0] = 0.5 * dz_[0];
        center_gap_[nz] = 0.5 * dz_[nz - 1];
        for (std::size_t f = 1; f < nz; ++f) center_gap_[f] = centers_[f - 1] - centers_[f];

        layer_of_cell_.resize(nz);
        for (std::size_t i = 0; i < nz; ++i) {
            std::size_t j = 0;
            while (j < domain_.interfaces.size() && centers_[i] < domain_.interfaces[j]) ++j;
            layer_of_cell_[i] = j;
        }
        for (double zj : domain_.interfaces) interface_face_.push_back(nearest_face(zj));
    }

    const DomainSpec& domain() const { return domain_; }
    std::size_t nx() const { return nx_; }
    std::size_t nz() const { return centers_.size(); }
    double L() const { return domain_.L; }
    double H() const { return domain_.H; }
    double dx() const { return domain_.L / static_cast<double>(nx_); }
    double x(std::size_t i) const { return static_cast<double>(i) * dx(); }

    std::span<const double> faces() const { return faces_; }
    std::span<const double> centers() const { return centers_; }
    std::span<const double> dz() const { return dz_; }
    /// Distance between the centers adjacent to face f; half a cell at walls.
    std::span<const double> center_gap() const { return center_gap_; }

    std::size_t layer_of_cell(std::size_t i) const { return layer_of_cell_[i]; }
    /// Face index sitting exactly on interface j.
    std::size_t interface_face(std::size_t j) const { return interface_face_[j]; }

    std::size_t nearest_face(double z) const {
        auto it = std::min_element(faces_.begin(), faces_.end(), [z](double a, double b) {
            return std::abs(a - z) < std::abs(b - z);
        });
        return static_cast<std::size_t>(it - faces_.begin());
    }

    bool has_face_at(double z, double tol = 1e-12) const {
        return std::abs(faces_[nearest_face(z)] - z) <= tol * domain_.H;
    }

    double min_dz() const { return *std::min_element(dz_.begin(), dz_.end()); }

    bool uniform_z(double rtol = 1e-9) const {
        const auto [lo, hi] = std::minmax_element(dz_.begin(), dz_.end());
        return (*hi - *lo) <= rtol * *hi;
    }

    bool same_shape(const Grid& o) const {
        return nx_ == o.nx_ && faces_ == o.faces_ && domain_.L == o.domain_.L;
    }

private:
    DomainSpec domain_;
    std::size_t nx_ = 0;
    std::vector<double> faces_;
    std::vector<double> centers_;
    std::vector<double> dz_;
    std::vector<double> center_gap_;
    std::vector<std::size_t> layer_of_cell_;
    std::vector<std::size_t> interface_face_;
};

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

/// Builds a grid whose faces hit every interface and every band edge z_j +- eps
/// for each eps in `eps_list`. Each segment between consecutive alignment
/// points is uniform with spacing no larger than layer_thickness / nz_per_layer;
/// the innermost half-band gets at least 4 cells so every band holds >= 8.
inline Grid build_grid(const DomainSpec& domain, std::size_t nx, std::size_t nz_per_layer,
                       std::span<const double> eps_list = {}) {
    domain.validate();
    require(is_power_of_two(nx), "grid.nx must be a power of two");
    require(nz_per_layer >= 8, "grid.nz_per_layer must be at least 8");
    require(domain.min_layer_thickness() > 0, "layers must have non-zero thickness");

    for (double eps : eps_list) {
        require(eps > 0 && std::isfinite(eps), "eps must be positive");
        // Bands must not overlap each other and must stay inside the channel.
        bool ok = 2.0 * eps < domain.min_layer_thickness();
        if (domain.interfaces.size() > 1) ok = ok && 2.0 * eps < domain.min_interface_gap();
        if (!ok) {
            throw ConfigError("eps = " + std::to_string(eps) +
                              " too large: 2*eps must be below the minimum interface gap " +
                              std::to_string(domain.interfaces.size() > 1
                                                 ? std::min(domain.min_interface_gap(),
                                                            domain.min_layer_thickness())
                                                 : domain.min_layer_thickness()));
        }
    }
    const double eps_min =
        eps_list.empty() ? 0.0 : *std::min_element(eps_list.begin(), eps_list.end());

    std::vector<double> faces{0.0};
    for (std::size_t j = 0; j < domain.layers(); ++j) {
        const double top = domain.layer_top(j);
        const double bot = domain.layer_bottom(j);
        const double h = (top - bot) / static_cast<double>(nz_per_layer);

        std::vector<double> pts{top, bot};
        for (double eps : eps_list) {
            if (j > 0) pts.push_back(top - eps);
            if (j + 1 < domain.layers()) pts.push_back(bot + eps);
        }
        std::sort(pts.begin(), pts.end(), std::greater<>());
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [&](double a, double b) { return std::abs(a - b) < 1e-14 * domain.H; }),
                  pts.end());

        for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
            const double a = pts[s];
            const double b = pts[s + 1];
            auto n = static_cast<std::size_t>(std::ceil((a - b) / h - 1e-9));
            n = std::max<std::size_t>(n, 1);
            const bool inner_half_band =
                eps_min > 0 && ((j > 0 && std::abs(a - top) < 1e-14 && std::abs(b - (top - eps_min)) < 1e-14) ||
                                (j + 1 < domain.layers() && std::abs(b - bot) < 1e-14 &&
                                 std::abs(a - (bot + eps_min)) < 1e-14));
            if (inner_half_band) n = std::max<std::size_t>(n, 4);
            for (std::size_t c = 1; c < n; ++c)
                faces.push_back(a - (a - b) * static_cast<double>(c) / static_cast<double>(n));
            faces.push_back(b);
        }
    }
    faces.back() = -domain.H;
    return Grid(domain, nx, std::move(faces));
}

inline Grid build_grid(const DomainSpec& domain, std::size_t nx, std::size_t nz_per_layer,
                       double eps) {
    const double e[1] = {eps};
    return build_grid(domain, nx, nz_per_layer, std::span<const double>(e, 1));
}

}  // namespace layered
