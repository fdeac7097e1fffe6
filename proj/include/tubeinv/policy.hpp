#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "tubeinv/cyclotomic.hpp"

namespace tubeinv {

/// Exact arithmetic backend: scalars live in Q(zeta_{4h}).
struct ExactPolicy {
    using Scalar = Cyc;
    static constexpr bool exact = true;

    int h;

    unsigned order() const { return cyc_order(h); }
    Scalar zero() const { return Cyc::zero(order()); }
    Scalar one() const { return Cyc::one(order()); }
    Scalar from_int(long v) const { return Cyc::from_int(order(), v); }
    Scalar A(long power = 1) const { return skein_A(h, power); }
    Scalar qint(int n) const { return quantum_integer(n, h); }
    Scalar beta() const { return loop_value(h); }
    Scalar convert(const Cyc& c) const { return c; }
    bool is_zero(const Scalar& s) const { return s.is_zero(); }
    static std::string name() { return "exact"; }
};

/// Floating-point backend with the same surface; rank decisions elsewhere use
/// a relative singular-value threshold carried in `tol`.
struct FloatPolicy {
    using Scalar = std::complex<double>;
    static constexpr bool exact = false;

    int h;
    double tol = 1e-6;

    unsigned order() const { return cyc_order(h); }
    Scalar zero() const { return {0.0, 0.0}; }
    Scalar one() const { return {1.0, 0.0}; }
    Scalar from_int(long v) const { return {static_cast<double>(v), 0.0}; }
    Scalar A(long power = 1) const {
        const double two_pi = 6.283185307179586476925286766559;
        return std::polar(1.0, two_pi * static_cast<double>(power) / order());
    }
    Scalar qint(int n) const { return quantum_integer(n, h).embed(); }
    Scalar beta() const { return loop_value(h).embed(); }
    Scalar convert(const Cyc& c) const { return c.embed(); }
    // Drop test for sparse containers only; never used to decide a rank.
    bool is_zero(const Scalar& s) const { return std::abs(s) < 1e-14; }
    static std::string name() { return "float"; }
};

}  // namespace tubeinv
