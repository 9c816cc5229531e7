#pragma once

#include <cmath>

namespace fsiwave {

/// Hyper-dual number carrying two first derivatives and the mixed second
/// derivative. Seeding d1/d2 with unit directions turns any templated
/// closure into an exact (to roundoff) second-derivative evaluator.
struct HyperDual {
    double f = 0, d1 = 0, d2 = 0, d12 = 0;

    HyperDual() = default;
    HyperDual(double value) : f(value) {}
    HyperDual(double value, double g1, double g2, double g12)
        : f(value), d1(g1), d2(g2), d12(g12) {}

    friend HyperDual operator+(const HyperDual& a, const HyperDual& b) {
        return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
    }
    friend HyperDual operator-(const HyperDual& a, const HyperDual& b) {
        return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
    }
    friend HyperDual operator-(const HyperDual& a) {
        return {-a.f, -a.d1, -a.d2, -a.d12};
    }
    friend HyperDual operator*(const HyperDual& a, const HyperDual& b) {
        return {a.f * b.f, a.d1 * b.f + a.f * b.d1, a.d2 * b.f + a.f * b.d2,
                a.d12 * b.f + a.d1 * b.d2 + a.d2 * b.d1 + a.f * b.d12};
    }
    friend HyperDual operator/(const HyperDual& a, const HyperDual& b) {
        const double inv = 1.0 / b.f;
        const double q = a.f * inv;
        const double q1 = (a.d1 - q * b.d1) * inv;
        const double q2 = (a.d2 - q * b.d2) * inv;
        return {q, q1, q2,
                (a.d12 - q1 * b.d2 - q2 * b.d1 - q * b.d12) * inv};
    }
};

inline HyperDual chain(const HyperDual& x, double v, double dv, double ddv) {
    return {v, dv * x.d1, dv * x.d2, dv * x.d12 + ddv * x.d1 * x.d2};
}

inline HyperDual sin(const HyperDual& x) {
    return chain(x, std::sin(x.f), std::cos(x.f), -std::sin(x.f));
}
inline HyperDual cos(const HyperDual& x) {
    return chain(x, std::cos(x.f), -std::sin(x.f), -std::cos(x.f));
}
inline HyperDual sqrt(const HyperDual& x) {
    const double s = std::sqrt(x.f);
    return chain(x, s, 0.5 / s, -0.25 / (s * x.f));
}

inline double value(const HyperDual& x) { return x.f; }
inline double value(double x) { return x; }

}  // namespace fsiwave
