#ifndef SONOT_PROX_HPP
#define SONOT_PROX_HPP

#include "sonot/types.hpp"

namespace sonot {

struct PairPoint {
    Vector p;
    Vector q;
};

/// <p,zeta> + <q,eta> + rho ||p - q||.
double template_value(double rho, const Vector& zeta, const Vector& eta,
                      const PairPoint& pt);

/// Block soft-thresholding: radially shrinks c by lambda, zero below it.
/// This is the prox of lambda ||.||_2 (0 at the origin).
Vector shrink(double lambda, const Vector& c);

/// ((a+b)/2 + shrink(lambda,(a-b)/2), (a+b)/2 - shrink(lambda,(a-b)/2)).
/// Components sum to a + b exactly.
PairPoint pair_prox(double lambda, const Vector& a, const Vector& b);

/// Closed-form prox of step * phi_{rho,zeta,eta} at pt:
/// pair_prox(step*rho, p - step*zeta, q - step*eta).
PairPoint template_prox(double step, double rho, const Vector& zeta,
                        const Vector& eta, const PairPoint& pt);

}  // namespace sonot

#endif
