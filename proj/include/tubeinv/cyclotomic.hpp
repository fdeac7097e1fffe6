#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "tubeinv/rational.hpp"

namespace tubeinv {

namespace detail {

// Quotient of integer polynomials, divisor monic. Remainder must vanish.
inline std::vector<Integer> poly_divide_exact(std::vector<Integer> num,
                                              const std::vector<Integer>& den) {
    const size_t dd = den.size() - 1;
    if (num.size() < den.size()) throw std::logic_error("poly_divide_exact: degree underflow");
    std::vector<Integer> quot(num.size() - dd, 0);
    for (size_t k = num.size(); k-- > dd;) {
        Integer c = num[k];
        if (c == 0) continue;
        quot[k - dd] = c;
        for (size_t j = 0; j <= dd; ++j) num[k - dd + j] -= c * den[j];
    }
    for (const auto& c : num)
        if (c != 0) throw std::logic_error("poly_divide_exact: nonzero remainder");
    return quot;
}

inline std::vector<Integer> cyclotomic_polynomial(unsigned n) {
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d, built bottom-up.
    std::map<unsigned, std::vector<Integer>> phi;
    for (unsigned m = 1; m <= n; ++m) {
        if (n % m != 0) continue;
        std::vector<Integer> p(m + 1, 0);
        p[0] = -1;
        p[m] = 1;
        for (unsigned d = 1; d < m; ++d)
            if (m % d == 0) p = poly_divide_exact(std::move(p), phi.at(d));
        phi.emplace(m, std::move(p));
    }
    return phi.at(n);
}

}  // namespace detail

/// Immutable per-order data for arithmetic in Q(zeta_N): the minimal polynomial
/// Phi_N and reduction rows for all powers zeta^k, k < N.
class CycCtx {
public:
    explicit CycCtx(unsigned n) : n_(n), phi_(detail::cyclotomic_polynomial(n)) {
        const size_t d = degree();
        // x^(d+j) mod Phi for j = 0 .. d-2, used to fold products back below degree d.
        red_.resize(d > 1 ? d - 1 : 0);
        std::vector<Integer> cur(d, 0);  // x^d mod Phi = -(low part of Phi)
        for (size_t i = 0; i < d; ++i) cur[i] = -phi_[i];
        for (size_t j = 0; j + 1 < d; ++j) {
            red_[j] = cur;
            // multiply by x, reduce the overflow coefficient
            Integer top = cur[d - 1];
            for (size_t i = d; i-- > 1;) cur[i] = cur[i - 1];
            cur[0] = 0;
            if (top != 0)
                for (size_t i = 0; i < d; ++i) cur[i] -= top * phi_[i];
        }
        // zeta^k in reduced form for every k < N
        pow_.resize(n_);
        std::vector<Integer> acc(d, 0);
        acc[0] = 1;
        for (unsigned k = 0; k < n_; ++k) {
            pow_[k] = acc;
            Integer top = acc[d - 1];
            for (size_t i = d; i-- > 1;) acc[i] = acc[i - 1];
            acc[0] = 0;
            if (top != 0)
                for (size_t i = 0; i < d; ++i) acc[i] -= top * phi_[i];
        }
    }

    unsigned order() const { return n_; }
    size_t degree() const { return phi_.size() - 1; }
    const std::vector<Integer>& phi() const { return phi_; }
    const std::vector<Integer>& zeta_power(long k) const {
        long r = k % static_cast<long>(n_);
        if (r < 0) r += n_;
        return pow_[static_cast<size_t>(r)];
    }
    const std::vector<std::vector<Integer>>& reduction_rows() const { return red_; }

    static const CycCtx* get(unsigned n) {
        static std::mutex mu;
        static std::map<unsigned, std::unique_ptr<CycCtx>> registry;
        std::lock_guard<std::mutex> lock(mu);
        auto it = registry.find(n);
        if (it == registry.end()) it = registry.emplace(n, std::make_unique<CycCtx>(n)).first;
        return it->second.get();
    }

private:
    unsigned n_;
    std::vector<Integer> phi_;
    std::vector<std::vector<Integer>> red_;
    std::vector<std::vector<Integer>> pow_;
};

/// Exact element of Q(zeta_N), stored as an integer coefficient vector over a
/// single positive denominator. The pair is reduced lazily; zero tests and
/// comparisons are exact either way.
class Cyc {
public:
    Cyc() : ctx_(nullptr), den_(1) {}

    static Cyc zero(unsigned n) { return Cyc(CycCtx::get(n)); }
    static Cyc one(unsigned n) {
        Cyc c(CycCtx::get(n));
        c.num_[0] = 1;
        return c;
    }
    static Cyc from_rational(unsigned n, const Rational& r) {
        Cyc c(CycCtx::get(n));
        c.num_[0] = r.get_num();
        c.den_ = r.get_den();
        return c;
    }
    static Cyc from_int(unsigned n, long v) {
        Cyc c(CycCtx::get(n));
        c.num_[0] = v;
        return c;
    }
    /// zeta_N^k, any integer k.
    static Cyc zeta(unsigned n, long k = 1) {
        Cyc c(CycCtx::get(n));
        c.num_ = c.ctx_->zeta_power(k);
        return c;
    }
    /// Builds a value from explicit coefficients (length <= deg Phi_N).
    static Cyc from_coeffs(unsigned n, const std::vector<Rational>& coeffs) {
        Cyc c(CycCtx::get(n));
        if (coeffs.size() > c.num_.size()) throw std::invalid_argument("coefficient vector too long");
        Integer den = 1;
        for (const auto& r : coeffs) den = lcm(den, Integer(r.get_den()));
        for (size_t i = 0; i < coeffs.size(); ++i)
            c.num_[i] = Integer(coeffs[i].get_num()) * (den / coeffs[i].get_den());
        c.den_ = den;
        return c;
    }

    bool valid() const { return ctx_ != nullptr; }
    unsigned order() const { return ctx_->order(); }
    const CycCtx* ctx() const { return ctx_; }

    bool is_zero() const {
        for (const auto& c : num_)
            if (c != 0) return false;
        return true;
    }
    bool is_one() const { return *this == one(order()); }

    friend Cyc operator-(const Cyc& a) {
        Cyc r = a;
        for (auto& c : r.num_) c = -c;
        return r;
    }

    friend Cyc operator+(const Cyc& a, const Cyc& b) {
        a.check_same(b);
        Cyc r(a.ctx_);
        if (a.den_ == b.den_) {
            r.den_ = a.den_;
            for (size_t i = 0; i < r.num_.size(); ++i) r.num_[i] = a.num_[i] + b.num_[i];
        } else {
            r.den_ = a.den_ * b.den_;
            for (size_t i = 0; i < r.num_.size(); ++i)
                r.num_[i] = a.num_[i] * b.den_ + b.num_[i] * a.den_;
        }
        return r;
    }
    friend Cyc operator-(const Cyc& a, const Cyc& b) { return a + (-b); }

    friend Cyc operator*(const Cyc& a, const Cyc& b) {
        a.check_same(b);
        const size_t d = a.num_.size();
        // monomial fast path: skein coefficients are powers of zeta
        int mono_a = a.monomial_index(), mono_b = b.monomial_index();
        if (mono_b >= 0 && mono_a < 0) return mono_shift(b, mono_b, a);
        if (mono_a >= 0) return mono_shift(a, mono_a, b);
        std::vector<Integer> t(2 * d - 1, 0);
        for (size_t i = 0; i < d; ++i) {
            if (a.num_[i] == 0) continue;
            for (size_t j = 0; j < d; ++j) {
                if (b.num_[j] == 0) continue;
                t[i + j] += a.num_[i] * b.num_[j];
            }
        }
        Cyc r(a.ctx_);
        const auto& rows = a.ctx_->reduction_rows();
        for (size_t i = 0; i < d; ++i) r.num_[i] = std::move(t[i]);
        for (size_t j = 0; j + 1 < d; ++j) {
            if (t[d + j] == 0) continue;
            for (size_t i = 0; i < d; ++i) r.num_[i] += t[d + j] * rows[j][i];
        }
        r.den_ = a.den_ * b.den_;
        if (mpz_size(r.den_.get_mpz_t()) > 24) r.normalize();
        return r;
    }

    Cyc inverse() const {
        if (is_zero()) throw std::domain_error("division by zero in Q(zeta)");
        // Extended Euclid over Q[x] against Phi_N: find u with u*this = gcd = const.
        using Poly = std::vector<Rational>;
        const auto& phi = ctx_->phi();
        Poly r0(phi.size());
        for (size_t i = 0; i < phi.size(); ++i) r0[i] = Rational(phi[i]);
        Poly r1(num_.size());
        for (size_t i = 0; i < num_.size(); ++i) r1[i] = Rational(num_[i], den_);
        trim(r1);
        Poly u0 = {}, u1 = {Rational(1)};  // coefficients of `this` in r0, r1
        while (r1.size() > 1) {
            Poly q = poly_quot_rem(r0, r1);  // r0 <- r0 mod r1 in place
            std::swap(r0, r1);
            // u0 <- u0 - q*u1, then swap
            Poly qu = poly_mul(q, u1);
            if (u0.size() < qu.size()) u0.resize(qu.size(), Rational(0));
            for (size_t i = 0; i < qu.size(); ++i) u0[i] -= qu[i];
            trim(u0);
            std::swap(u0, u1);
        }
        if (r1.empty() || r1[0] == 0) throw std::domain_error("not invertible modulo Phi_N");
        Rational c = Rational(1) / r1[0];
        std::vector<Rational> coeffs(u1.size());
        for (size_t i = 0; i < u1.size(); ++i) {
            coeffs[i] = u1[i] * c;
            coeffs[i].canonicalize();
        }
        return from_coeffs(order(), coeffs);
    }

    friend Cyc operator/(const Cyc& a, const Cyc& b) { return a * b.inverse(); }

    Cyc& operator+=(const Cyc& b) { return *this = *this + b; }
    Cyc& operator-=(const Cyc& b) { return *this = *this - b; }
    Cyc& operator*=(const Cyc& b) { return *this = *this * b; }
    Cyc& operator/=(const Cyc& b) { return *this = *this / b; }

    friend bool operator==(const Cyc& a, const Cyc& b) { return (a - b).is_zero(); }
    friend bool operator!=(const Cyc& a, const Cyc& b) { return !(a == b); }

    Cyc& scale(const Rational& r) {
        for (auto& c : num_) c *= r.get_num();
        den_ *= r.get_den();
        return *this;
    }
    Cyc& scale(long v) {
        for (auto& c : num_) c *= v;
        return *this;
    }

    /// Strips the common content of numerator and denominator.
    void normalize() {
        Integer g = den_;
        for (const auto& c : num_) {
            if (c != 0) g = gcd(g, c);
            if (g == 1) break;
        }
        if (g != 1 && g != 0) {
            for (auto& c : num_) c /= g;
            den_ /= g;
        }
        if (den_ < 0) {
            den_ = -den_;
            for (auto& c : num_) c = -c;
        }
    }

    /// Canonical coefficient vector (length deg Phi_N) as reduced rationals.
    std::vector<Rational> coefficients() const {
        std::vector<Rational> out(num_.size());
        for (size_t i = 0; i < num_.size(); ++i) {
            out[i] = Rational(num_[i], den_);
            out[i].canonicalize();
        }
        return out;
    }

    /// Evaluation at zeta_N = exp(2*pi*i/N).
    std::complex<double> embed() const {
        const long double two_pi = 6.283185307179586476925286766559L;
        std::complex<long double> z = std::polar<long double>(1.0L, two_pi / order());
        std::complex<long double> acc(0.0L, 0.0L);
        for (size_t i = num_.size(); i-- > 0;) acc = acc * z + std::complex<long double>(num_[i].get_d(), 0.0L);
        acc /= den_.get_d();
        return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
    }

    std::string str() const {
        auto cs = coefficients();
        std::string s;
        for (size_t i = 0; i < cs.size(); ++i) {
            if (cs[i] == 0) continue;
            if (!s.empty()) s += " + ";
            s += cs[i].get_str();
            if (i > 0) s += "*z^" + std::to_string(i);
        }
        return s.empty() ? "0" : s;
    }

private:
    explicit Cyc(const CycCtx* ctx) : ctx_(ctx), num_(ctx->degree(), 0), den_(1) {}

    // index of the single nonzero coefficient, or -1 if not a monomial
    int monomial_index() const {
        int idx = -1;
        for (size_t i = 0; i < num_.size(); ++i) {
            if (num_[i] == 0) continue;
            if (idx >= 0) return -1;
            idx = static_cast<int>(i);
        }
        return idx;
    }

    // (c x^k) * b computed as a shift-and-reduce
    static Cyc mono_shift(const Cyc& mono, int k, const Cyc& b) {
        const size_t d = b.num_.size();
        const Integer& c = mono.num_[static_cast<size_t>(k)];
        Cyc r(b.ctx_);
        const auto& rows = b.ctx_->reduction_rows();
        for (size_t j = 0; j < d; ++j) {
            if (b.num_[j] == 0) continue;
            size_t deg = j + static_cast<size_t>(k);
            Integer v = c * b.num_[j];
            if (deg < d) {
                r.num_[deg] += v;
            } else {
                const auto& row = rows[deg - d];
                for (size_t i = 0; i < d; ++i)
                    if (row[i] != 0) r.num_[i] += v * row[i];
            }
        }
        r.den_ = mono.den_ * b.den_;
        if (mpz_size(r.den_.get_mpz_t()) > 24) r.normalize();
        return r;
    }

    void check_same(const Cyc& b) const {
        if (ctx_ != b.ctx_) throw std::invalid_argument("cyclotomic order mismatch");
    }

    using Poly = std::vector<Rational>;
    static void trim(Poly& p) {
        while (!p.empty() && p.back() == 0) p.pop_back();
    }
    static Poly poly_mul(const Poly& a, const Poly& b) {
        if (a.empty() || b.empty()) return {};
        Poly r(a.size() + b.size() - 1, Rational(0));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        trim(r);
        return r;
    }
    // Divides a by b in place (a becomes the remainder), returns the quotient.
    static Poly poly_quot_rem(Poly& a, const Poly& b) {
        Poly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rational(0));
        while (a.size() >= b.size() && !a.empty()) {
            Rational c = a.back() / b.back();
            size_t shift = a.size() - b.size();
            q[shift] = c;
            for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
            trim(a);
            if (a.size() >= b.size() && !a.empty() && a.back() == 0) trim(a);
        }
        trim(q);
        return q;
    }

    const CycCtx* ctx_;
    std::vector<Integer> num_;
    Integer den_;
};

// ---- quantum data at Coxeter number h: q = zeta_{2h}, A = zeta_{4h}, A^2 = q ----

inline unsigned cyc_order(int h) { return 4u * static_cast<unsigned>(h); }

/// Skein parameter A = zeta_{4h} raised to an arbitrary power.
inline Cyc skein_A(int h, long power = 1) { return Cyc::zeta(cyc_order(h), power); }

/// q^k with q = zeta_{2h} = A^2.
inline Cyc q_power(int h, long k) { return Cyc::zeta(cyc_order(h), 2 * k); }

/// [n]_q = (q^n - q^-n)/(q - q^-1) = q^(n-1) + q^(n-3) + ... + q^(1-n), exact.
inline Cyc quantum_integer(int n, int h) {
    if (h < 3) throw std::invalid_argument("Coxeter number must be >= 3");
    Cyc r = Cyc::zero(cyc_order(h));
    for (int j = 0; j < n; ++j) r += q_power(h, n - 1 - 2 * j);
    return r;
}

/// Loop value beta = -[2]_q.
inline Cyc loop_value(int h) { return -quantum_integer(2, h); }

}  // namespace tubeinv
