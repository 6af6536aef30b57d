#pragma once

#include <optional>

#include "layered/field.hpp"

namespace layered {

/// Snapshot of one model run. P, u and w are the quasi-static Darcy fields
/// for the stored phi.
struct State {
    double t = 0.0;
    Field phi;  // centers
    Field P;    // centers
    Field u;    // centers
    Field w;    // faces
    std::optional<Field> psi;  // faces, filled on demand
};

}  // namespace layered
