#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tubeinv/cyclotomic.hpp"
#include "tubeinv/planar.hpp"

namespace tubeinv {

/// Formal linear combination of planar (m,n)-tangles over Q(zeta_{4h}),
/// i.e. a morphism in TL(beta) with beta = -[2]_q.
class TLMorphism {
public:
    TLMorphism(int m, int n, int h) : m_(m), n_(n), h_(h) {}

    static TLMorphism identity(int n, int h) {
        TLMorphism f(n, n, h);
        f.add(PlanarDiagram::identity(n), Cyc::one(cyc_order(h)));
        return f;
    }
    static TLMorphism generator(int k, int n, int h) {
        TLMorphism f(n, n, h);
        f.add(PlanarDiagram::cap_cup(k, n), Cyc::one(cyc_order(h)));
        return f;
    }
    static TLMorphism from_diagram(PlanarDiagram d, int h) {
        TLMorphism f(d.bottom_points(), d.top_points(), h);
        f.add(std::move(d), Cyc::one(cyc_order(h)));
        return f;
    }

    int bottom() const { return m_; }
    int top() const { return n_; }
    int coxeter() const { return h_; }
    const std::map<PlanarDiagram, Cyc>& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    void add(PlanarDiagram d, const Cyc& c) {
        if (d.bottom_points() != m_ || d.top_points() != n_)
            throw std::invalid_argument("term arity mismatch");
        if (c.is_zero()) return;
        auto it = terms_.find(d);
        if (it == terms_.end()) {
            terms_.emplace(std::move(d), c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend TLMorphism operator+(const TLMorphism& a, const TLMorphism& b) {
        if (a.m_ != b.m_ || a.n_ != b.n_ || a.h_ != b.h_)
            throw std::invalid_argument("morphism shape mismatch");
        TLMorphism r = a;
        for (const auto& [d, c] : b.terms_) r.add(d, c);
        return r;
    }
    friend TLMorphism operator-(const TLMorphism& a, const TLMorphism& b) { return a + (b * Cyc::from_int(cyc_order(a.h_), -1)); }
    friend TLMorphism operator*(const TLMorphism& a, const Cyc& s) {
        TLMorphism r(a.m_, a.n_, a.h_);
        for (const auto& [d, c] : a.terms_) r.add(d, c * s);
        return r;
    }
    friend bool operator==(const TLMorphism& a, const TLMorphism& b) {
        return a.m_ == b.m_ && a.n_ == b.n_ && (a - b).is_zero();
    }

    TLMorphism tensor(const TLMorphism& other) const {
        TLMorphism r(m_ + other.m_, n_ + other.n_, h_);
        for (const auto& [d1, c1] : terms_)
            for (const auto& [d2, c2] : other.terms_) r.add(d1.tensor(d2), c1 * c2);
        return r;
    }

    Cyc beta() const { return loop_value(h_); }

private:
    int m_, n_, h_;
    std::map<PlanarDiagram, Cyc> terms_;
};

/// Tangle composition f then g, each closed loop contributing beta.
inline TLMorphism tl_compose(const TLMorphism& f, const TLMorphism& g) {
    if (f.top() != g.bottom()) throw std::invalid_argument("composition arity mismatch");
    if (f.coxeter() != g.coxeter()) throw std::invalid_argument("Coxeter number mismatch");
    const Cyc beta = f.beta();
    TLMorphism r(f.bottom(), g.top(), f.coxeter());
    for (const auto& [df, cf] : f.terms()) {
        for (const auto& [dg, cg] : g.terms()) {
            auto [glued, loops] = df.compose(dg);
            Cyc c = cf * cg;
            for (int i = 0; i < loops; ++i) c *= beta;
            r.add(std::move(glued), c);
        }
    }
    return r;
}

/// f with the TL generator at strand position k applied on top.
inline TLMorphism compose_generator(const TLMorphism& f, int k) {
    return tl_compose(f, TLMorphism::generator(k, f.top(), f.coxeter()));
}

/// Kauffman crossing sigma^{+-} = A^{+-1} id + A^{-+1} e_1 on two strands.
inline TLMorphism crossing(int sign, int h) {
    TLMorphism r = TLMorphism::identity(2, h) * skein_A(h, sign > 0 ? 1 : -1);
    return r + TLMorphism::generator(1, 2, h) * skein_A(h, sign > 0 ? -1 : 1);
}

/// f composed with a crossing at position k (sign +1 or -1).
inline TLMorphism compose_crossing(const TLMorphism& f, int k, int sign) {
    const int h = f.coxeter(), n = f.top();
    TLMorphism r = f * skein_A(h, sign > 0 ? 1 : -1);
    return r + compose_generator(f, k) * skein_A(h, sign > 0 ? -1 : 1);
}

/// Jones-Wenzl projector p_n, cached per (n, h). Requires 0 <= n <= h-1.
inline const TLMorphism& jones_wenzl(int n, int h) {
    if (n < 0 || n >= h) throw std::invalid_argument("no Jones-Wenzl projector for n >= h");
    static std::mutex mu;
    static std::map<std::pair<int, int>, TLMorphism> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, h);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    // Wenzl recursion with the signed loop beta = -[2]: the trace weights are
    // (-1)^k [k+1], so p_k = ext + ([k-1]/[k]) ext e_{k-1} ext with ext = p_{k-1} (x) id.
    TLMorphism p = TLMorphism::identity(0, h);
    for (int k = 1; k <= n; ++k) {
        TLMorphism ext = p.tensor(TLMorphism::identity(1, h));
        if (k == 1) {
            p = ext;
            continue;
        }
        Cyc ratio = quantum_integer(k - 1, h) / quantum_integer(k, h);
        TLMorphism mid = tl_compose(tl_compose(ext, TLMorphism::generator(k - 1, k, h)), ext);
        p = ext + mid * ratio;
        cache.emplace(std::make_pair(k, h), p);
    }
    if (n <= 1) cache.emplace(key, p);
    return cache.at(key);
}

/// Closes all strands to the right; each loop contributes beta.
inline Cyc markov_trace(const TLMorphism& f) {
    if (f.bottom() != f.top()) throw std::invalid_argument("trace needs an endomorphism");
    const Cyc beta = f.beta();
    Cyc total = Cyc::zero(cyc_order(f.coxeter()));
    for (const auto& [d, c] : f.terms()) {
        auto [rest, loops] = d.close_right(f.top());
        (void)rest;
        Cyc v = c;
        for (int i = 0; i < loops; ++i) v *= beta;
        total += v;
    }
    return total;
}

/// Braid word swapping a left bundle of m strands past a right bundle of n
/// strands (the right bundle ends up in front), all crossings of one sign.
inline TLMorphism bundle_swap(int m, int n, int h, int sign = 1) {
    TLMorphism w = TLMorphism::identity(m + n, h);
    for (int t = 1; t <= n; ++t)
        for (int k = m + t - 1; k >= t; --k) w = compose_crossing(w, k, sign);
    return w;
}

/// Diagrammatic evaluation of the Hopf link colored by simple labels a, b
/// (label a = image of p_{a-1}); kept exact, intended for h <= 8.
inline Cyc hopf_link(int a, int b, int h) {
    if (a < 1 || a > h - 1 || b < 1 || b > h - 1) throw std::invalid_argument("label out of range");
    if (h > 8) throw std::invalid_argument("diagrammatic evaluation restricted to h <= 8");
    const int m = a - 1, n = b - 1;
    if (m == 0) return markov_trace(jones_wenzl(n, h));
    if (n == 0) return markov_trace(jones_wenzl(m, h));
    TLMorphism w = tl_compose(bundle_swap(m, n, h, +1), bundle_swap(n, m, h, +1));
    TLMorphism colored = tl_compose(jones_wenzl(m, h).tensor(jones_wenzl(n, h)), w);
    return markov_trace(colored);
}

/// Scalar of a single positive curl on the strand colored by label a.
inline Cyc curl_scalar(int a, int h, int sign = 1) {
    if (a < 1 || a > h - 1) throw std::invalid_argument("label out of range");
    if (h > 8) throw std::invalid_argument("diagrammatic evaluation restricted to h <= 8");
    const int m = a - 1;
    if (m == 0) return Cyc::one(cyc_order(h));
    TLMorphism swap = bundle_swap(m, m, h, sign);
    TLMorphism curled(m, m, h);
    {
        const Cyc beta = swap.beta();
        for (const auto& [d, c] : swap.terms()) {
            auto [closed, loops] = d.close_right(m);
            Cyc v = c;
            for (int i = 0; i < loops; ++i) v *= beta;
            curled.add(std::move(closed), v);
        }
    }
    const TLMorphism& jw = jones_wenzl(m, h);
    return markov_trace(tl_compose(jw, curled)) / markov_trace(jw);
}

}  // namespace tubeinv
