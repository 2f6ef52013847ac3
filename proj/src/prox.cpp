#include "sonot/prox.hpp"

namespace sonot {

namespace {

void check_lengths(const Vector& a, const Vector& b, const char* who) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": length mismatch");
}

}  // namespace

double template_value(double rho, const Vector& zeta, const Vector& eta,
                      const PairPoint& pt) {
    check_lengths(pt.p, pt.q, "template_value");
    check_lengths(pt.p, zeta, "template_value");
    check_lengths(pt.q, eta, "template_value");
    return pt.p.dot(zeta) + pt.q.dot(eta) + rho * (pt.p - pt.q).norm();
}

Vector shrink(double lambda, const Vector& c) {
    const double norm = c.norm();
    if (norm <= lambda || norm == 0.0) return Vector::Zero(c.size());
    return ((norm - lambda) / norm) * c;
}

PairPoint pair_prox(double lambda, const Vector& a, const Vector& b) {
    check_lengths(a, b, "pair_prox");
    const Vector mid = 0.5 * (a + b);
    const Vector s = shrink(lambda, 0.5 * (a - b));
    return {mid + s, mid - s};
}

PairPoint template_prox(double step, double rho, const Vector& zeta,
                        const Vector& eta, const PairPoint& pt) {
    if (step <= 0.0) throw std::invalid_argument("template_prox: step must be > 0");
    check_lengths(pt.p, zeta, "template_prox");
    check_lengths(pt.q, eta, "template_prox");
    return pair_prox(step * rho, pt.p - step * zeta, pt.q - step * eta);
}

}  // namespace sonot
