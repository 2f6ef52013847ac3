#include "sonot/simplex.hpp"

#include <algorithm>
#include <numeric>

namespace sonot {

Vector project_simplex(const Vector& v, double mass) {
    if (mass <= 0.0) throw std::invalid_argument("project_simplex: mass must be > 0");
    if (!v.allFinite()) throw std::invalid_argument("project_simplex: non-finite input");
    const Index d = v.size();

    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b;
    });

    // largest k with u_k - (prefix_k - mass)/k > 0; k = 1 always qualifies
    double prefix = 0.0;
    double tau = 0.0;
    for (Index k = 0; k < d; ++k) {
        prefix += v[order[static_cast<std::size_t>(k)]];
        const double t = (prefix - mass) / double(k + 1);
        if (v[order[static_cast<std::size_t>(k)]] - t <= 0.0) break;
        tau = t;
    }
    return (v.array() - tau).cwiseMax(0.0);
}

CylinderUpdate project_cylinder(Matrix& X, const WeightedSimplex& c) {
    CylinderUpdate u;
    u.axis = c.axis;
    u.index = c.index;
    if (c.axis == TermKind::row_simplex) {
        if (c.index < 0 || c.index >= X.rows())
            throw std::invalid_argument("project_cylinder: row index out of range");
        u.before = X.row(c.index).transpose();
        u.after = project_simplex(u.before, c.mass);
        X.row(c.index) = u.after.transpose();
    } else if (c.axis == TermKind::col_simplex) {
        if (c.index < 0 || c.index >= X.cols())
            throw std::invalid_argument("project_cylinder: column index out of range");
        u.before = X.col(c.index);
        u.after = project_simplex(u.before, c.mass);
        X.col(c.index) = u.after;
    } else {
        throw std::invalid_argument("project_cylinder: axis must be a simplex constraint");
    }
    return u;
}

}  // namespace sonot
