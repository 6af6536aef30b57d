#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "layered/error.hpp"
#include "layered/grid.hpp"

namespace layered {

/// Per-layer permeability and diffusivity, top layer first. Porosity is 1.
struct LayerStack {
    std::vector<double> K;
    std::vector<double> D;

    std::size_t layers() const { return K.size(); }

    void validate() const {
        require(K.size() >= 2, "layers: need at least two layers");
        require(D.size() == K.size(), "layers: K and D must have the same number of entries");
        for (std::size_t j = 0; j < K.size(); ++j) {
            if (!(K[j] > 0) || !std::isfinite(K[j]))
                throw ConfigError("layers.K[" + std::to_string(j) + "] must be positive and finite");
            if (!(D[j] > 0) || !std::isfinite(D[j]))
                throw ConfigError("layers.D[" + std::to_string(j) + "] must be positive and finite");
        }
    }

    void validate(const DomainSpec& d) const {
        validate();
        require(layers() == d.layers(), "layers: count must equal number of interfaces + 1");
    }
};

inline double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

enum class ProfileKind { Sharp, Diffuse };

/// Coefficient samples on a grid: K and D at centers and faces, dK/dz at centers.
struct CoefficientProfile {
    ProfileKind kind = ProfileKind::Sharp;
    double eps = 0.0;
    std::vector<double> K_center, K_face;
    std::vector<double> D_center, D_face;
    std::vector<double> dKdz_center;

    std::size_t nz() const { return K_center.size(); }
    bool fits(const Grid& g) const {
        return K_center.size() == g.nz() && K_face.size() == g.nz() + 1;
    }
};

namespace detail {

inline void check_aligned(const Grid& g, double z, const char* what) {
    if (!g.has_face_at(z))
        throw ConfigError(std::string("grid has no face at ") + what + " z = " + std::to_string(z));
}

/// Piecewise-linear ramp value at z for one coefficient family.
inline double ramp_value(const DomainSpec& d, const std::vector<double>& vals, double eps, double z) {
    for (std::size_t j = 0; j < d.interfaces.size(); ++j) {
        const double zj = d.interfaces[j];
        if (z > zj - eps && z < zj + eps) {
            const double above = vals[j];
            const double below = vals[j + 1];
            return below + (z - (zj - eps)) * (above - below) / (2.0 * eps);
        }
    }
    std::size_t j = 0;
    while (j < d.interfaces.size() && z < d.interfaces[j]) ++j;
    return vals[j];
}

inline double ramp_slope(const DomainSpec& d, const std::vector<double>& vals, double eps, double z) {
    for (std::size_t j = 0; j < d.interfaces.size(); ++j) {
        const double zj = d.interfaces[j];
        if (z > zj - eps && z < zj + eps) return (vals[j] - vals[j + 1]) / (2.0 * eps);
    }
    return 0.0;
}

}  // namespace detail

/// Pointwise mollified coefficient K^eps(z) (or D^eps with the D values).
inline double diffuse_value(const DomainSpec& d, const std::vector<double>& vals, double eps,
                            double z) {
    return detail::ramp_value(d, vals, eps, z);
}

inline CoefficientProfile sharp_profile(const LayerStack& stack, const Grid& grid) {
    stack.validate(grid.domain());
    for (double zj : grid.domain().interfaces) detail::check_aligned(grid, zj, "interface");

    const std::size_t nz = grid.nz();
    CoefficientProfile p;
    p.kind = ProfileKind::Sharp;
    p.K_center.resize(nz);
    p.D_center.resize(nz);
    p.dKdz_center.assign(nz, 0.0);
    for (std::size_t i = 0; i < nz; ++i) {
        p.K_center[i] = stack.K[grid.layer_of_cell(i)];
        p.D_center[i] = stack.D[grid.layer_of_cell(i)];
    }
    p.K_face.resize(nz + 1);
    p.D_face.resize(nz + 1);
    p.K_face[0] = p.K_center[0];
    p.D_face[0] = p.D_center[0];
    p.K_face[nz] = p.K_center[nz - 1];
    p.D_face[nz] = p.D_center[nz - 1];
    for (std::size_t f = 1; f < nz; ++f) {
        const std::size_t a = grid.layer_of_cell(f - 1);
        const std::size_t b = grid.layer_of_cell(f);
        p.K_face[f] = a == b ? stack.K[a] : harmonic_mean(stack.K[a], stack.K[b]);
        p.D_face[f] = a == b ? stack.D[a] : harmonic_mean(stack.D[a], stack.D[b]);
    }
    return p;
}

inline CoefficientProfile diffuse_profile(const LayerStack& stack, const Grid& grid, double eps) {
    stack.validate(grid.domain());
    const DomainSpec& d = grid.domain();
    require(eps > 0, "diffuse profile needs eps > 0");
    if (2.0 * eps >= d.min_layer_thickness() ||
        (d.interfaces.size() > 1 && 2.0 * eps >= d.min_interface_gap()))
        throw ConfigError("eps = " + std::to_string(eps) + " too large for the interface spacing");
    for (double zj : d.interfaces) {
        detail::check_aligned(grid, zj + eps, "band edge");
        detail::check_aligned(grid, zj - eps, "band edge");
    }

    const std::size_t nz = grid.nz();
    CoefficientProfile p;
    p.kind = ProfileKind::Diffuse;
    p.eps = eps;
    p.K_center.resize(nz);
    p.D_center.resize(nz);
    p.dKdz_center.resize(nz);
    for (std::size_t i = 0; i < nz; ++i) {
        const double z = grid.centers()[i];
        p.K_center[i] = detail::ramp_value(d, stack.K, eps, z);
        p.D_center[i] = detail::ramp_value(d, stack.D, eps, z);
        p.dKdz_center[i] = detail::ramp_slope(d, stack.K, eps, z);
    }
    p.K_face.resize(nz + 1);
    p.D_face.resize(nz + 1);
    for (std::size_t f = 0; f <= nz; ++f) {
        const double z = grid.faces()[f];
        p.K_face[f] = detail::ramp_value(d, stack.K, eps, z);
        p.D_face[f] = detail::ramp_value(d, stack.D, eps, z);
    }
    return p;
}

}  // namespace layered
