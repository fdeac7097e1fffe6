#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "tubeinv/cyclotomic.hpp"
#include "tubeinv/linalg.hpp"

namespace tubeinv {

/// Truncated Clebsch-Gordan fusion rule for the TL quotient at Coxeter h,
/// 1-based labels: N_{ab}^c = 1 iff a+b+c odd and |a-b| < c < min(a+b, 2h-a-b).
inline int fusion_mult(int a, int b, int c, int h) {
    if (a < 1 || a > h - 1 || b < 1 || b > h - 1 || c < 1 || c > h - 1)
        throw std::invalid_argument("fusion label out of range");
    if ((a + b + c) % 2 == 0) return 0;
    int lo = std::abs(a - b), hi = std::min(a + b, 2 * h - a - b);
    return (lo < c && c < hi) ? 1 : 0;
}

struct InvarianceReport {
    bool commutes_with_t = false;
    bool commutes_with_s = false;
    bool haploid = false;
    bool dim_condition = false;
    std::optional<Cyc> s_defect;  // (S Z S^-1)_{11} when S-commutation fails

    bool all_pass() const { return commutes_with_t && commutes_with_s && haploid && dim_condition; }
};

/// Exact modular data of the Temperley-Lieb quotient at Coxeter number h.
/// Engine convention: d(a) = (-1)^(a-1) [a]_q, S_ab = (-1)^(a+b) [ab]_q and
/// T_aa = (-1)^(a-1) A^(a^2-1); only ratios of T entries are ever consumed.
class ModularData {
public:
    explicit ModularData(int h) : h_(h) {
        if (h < 3) throw std::invalid_argument("Coxeter number must be >= 3");
        const int n = h - 1;
        d_.reserve(n);
        t_.reserve(n);
        s_.assign(n, std::vector<Cyc>(n, Cyc::zero(cyc_order(h))));
        for (int a = 1; a <= n; ++a) {
            Cyc qa = quantum_integer(a, h);
            d_.push_back((a % 2 == 1) ? qa : -qa);
            Cyc curl = skein_A(h, static_cast<long>(a) * a - 1);
            t_.push_back((a % 2 == 1) ? curl : -curl);
        }
        for (int a = 1; a <= n; ++a)
            for (int b = a; b <= n; ++b) {
                Cyc v = quantum_integer(a * b, h);
                if ((a + b) % 2 == 1) v = -v;
                s_[a - 1][b - 1] = v;
                s_[b - 1][a - 1] = v;
            }
        global_dim_ = Cyc::zero(cyc_order(h));
        for (const auto& d : d_) global_dim_ += d * d;
    }

    int coxeter() const { return h_; }
    int label_count() const { return h_ - 1; }
    const Cyc& dim(int a) const { return d_.at(a - 1); }
    const Cyc& t_entry(int a) const { return t_.at(a - 1); }
    const Cyc& s_entry(int a, int b) const { return s_.at(a - 1).at(b - 1); }
    const Mat<Cyc>& s_matrix() const { return s_; }
    const Cyc& global_dim() const { return global_dim_; }

    int fusion(int a, int b, int c) const { return fusion_mult(a, b, c, h_); }

    /// Verlinde character chi_m(a) = S_am / S_1m, the weight of [a] on the
    /// m-th primitive idempotent of End(1) = K(C). With this S convention
    /// chi_m(2) = -2 cos(pi m / h) (recorded sign: negative).
    Cyc verlinde_character(int m, int a) const {
        const Cyc& denom = s_entry(1, m);
        if (denom.is_zero()) throw std::domain_error("vanishing S_{1m}");
        return s_entry(a, m) / denom;
    }

    /// Independent Verlinde route to the fusion rules:
    /// N_ab^c = (1/d(C)) sum_m S_am S_bm S_cm / S_1m.
    Cyc verlinde_fusion(int a, int b, int c) const {
        Cyc acc = Cyc::zero(cyc_order(h_));
        for (int m = 1; m <= label_count(); ++m)
            acc += s_entry(a, m) * s_entry(b, m) * s_entry(c, m) / s_entry(1, m);
        return acc / global_dim_;
    }

    InvarianceReport invariance_report(const IntMatrix& z) const {
        const int n = label_count();
        if (static_cast<int>(z.size()) != n) throw std::invalid_argument("Z has wrong shape");
        for (const auto& row : z) {
            if (static_cast<int>(row.size()) != n) throw std::invalid_argument("Z has wrong shape");
            for (long v : row)
                if (v < 0) throw std::invalid_argument("Z has a negative entry");
        }
        InvarianceReport rep;
        rep.haploid = (z[0][0] == 1);

        rep.commutes_with_t = true;
        for (int a = 0; a < n && rep.commutes_with_t; ++a)
            for (int b = 0; b < n; ++b)
                if (z[a][b] != 0 && t_[a] != t_[b]) {
                    rep.commutes_with_t = false;
                    break;
                }

        auto mul_sz = [&](bool s_left) {
            Mat<Cyc> r(n, std::vector<Cyc>(n, Cyc::zero(cyc_order(h_))));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        if (s_left) {
                            if (z[k][j] != 0) r[i][j] += s_[i][k] * Cyc::from_int(cyc_order(h_), z[k][j]);
                        } else {
                            if (z[i][k] != 0) r[i][j] += Cyc::from_int(cyc_order(h_), z[i][k]) * s_[k][j];
                        }
                    }
            return r;
        };
        Mat<Cyc> sz = mul_sz(true), zs = mul_sz(false);
        rep.commutes_with_s = true;
        for (int i = 0; i < n && rep.commutes_with_s; ++i)
            for (int j = 0; j < n; ++j)
                if (sz[i][j] != zs[i][j]) {
                    rep.commutes_with_s = false;
                    break;
                }
        if (!rep.commutes_with_s) {
            // S^2 = d(C) I (self-dual labels), so S^-1 = S / d(C)
            Cyc defect = Cyc::zero(cyc_order(h_));
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    if (z[a][b] != 0)
                        defect += s_[0][a] * Cyc::from_int(cyc_order(h_), z[a][b]) * s_[b][0];
            rep.s_defect = defect / global_dim_;
        }

        Cyc total = Cyc::zero(cyc_order(h_));
        for (int a = 1; a <= n; ++a)
            for (int b = 1; b <= n; ++b)
                if (z[a - 1][b - 1] != 0)
                    total += Cyc::from_int(cyc_order(h_), z[a - 1][b - 1]) * dim(a) * dim(b);
        rep.dim_condition = (total == global_dim_);
        return rep;
    }

private:
    int h_;
    std::vector<Cyc> d_, t_;
    Mat<Cyc> s_;
    Cyc global_dim_;
};

}  // namespace tubeinv
