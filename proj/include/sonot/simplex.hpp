#ifndef SONOT_SIMPLEX_HPP
#define SONOT_SIMPLEX_HPP

#include "sonot/types.hpp"

namespace sonot {

/// One cylinder-simplex constraint: row l (or column k) of the plan lies on
/// the mass-scaled simplex.
struct WeightedSimplex {
    TermKind axis = TermKind::row_simplex;  // row_simplex or col_simplex
    Index index = 0;
    double mass = 1.0;
};

/// Euclidean projection onto { x >= 0, sum x = mass }. Deterministic
/// sort-and-threshold (ties by index).
Vector project_simplex(const Vector& v, double mass);

/// Coordinates changed by project_cylinder: the slice that was replaced.
struct CylinderUpdate {
    TermKind axis;
    Index index;
    Vector before;
    Vector after;
};

/// Replaces exactly row l (or column k) of X with its simplex projection at
/// the constraint's mass; everything else untouched.
CylinderUpdate project_cylinder(Matrix& X, const WeightedSimplex& c);

}  // namespace sonot

#endif
