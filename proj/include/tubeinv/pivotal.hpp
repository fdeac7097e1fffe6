#pragma once

#include <vector>

#include "tubeinv/essential.hpp"
#include "tubeinv/functor.hpp"

namespace tubeinv {

struct PivotalityReport {
    bool pairing_symmetry = true;   // phi^n_{ji}(w (x) v) = (x_i/x_j) phi^n_{ij}(v (x) w)
    bool creation_symmetry = true;  // varphi^n_{ji} = (x_i/x_j) T^n_{ij} varphi^n_{ij}
    bool dual_naturality = true;    // left dual = right dual on essential block maps
    bool ok() const { return pairing_symmetry && creation_symmetry && dual_naturality; }
};

namespace detail {

template <class P>
typename P::Scalar graded_scalar(const MFunctor<P>& f, const GradedVec<typename P::Scalar>& v, int vertex) {
    auto it = v.find(MFunctor<P>::empty_path(vertex));
    return it == v.end() ? f.policy().zero() : it->second;
}

template <class P>
bool scalars_equal(const P& pol, const typename P::Scalar& a, const typename P::Scalar& b) {
    if constexpr (P::exact) {
        return a == b;
    } else {
        return std::abs(a - b) < 1e-8;
    }
}

}  // namespace detail

/// Checks the two bookkeeping identities of the duality morphisms and, on
/// essential block maps for small lengths, that the two duals agree (the
/// condition under which the quiver functor induces a pivotal structure).
template <class P>
PivotalityReport pivotality_check(const MFunctor<P>& f, const EssentialTower<P>& tower, int n_max) {
    using S = typename P::Scalar;
    using Vec = GradedVec<S>;
    const P& pol = f.policy();
    const int nv = f.quiver().vertex_count();
    PivotalityReport rep;

    for (int n = 1; n <= n_max; ++n) {
        f.ensure_paths(2 * n);
        // pairing symmetry over all path pairs v: i->j, w: j->i
        for (int i = 0; i < nv && rep.pairing_symmetry; ++i)
            for (int j = 0; j < nv && rep.pairing_symmetry; ++j) {
                const auto& cij = f.cell(i, j, n);
                const auto& cji = f.cell(j, i, n);
                const S ratio = f.x(i) * f.x_inv(j);
                for (const PathKey& v : cij.paths)
                    for (const PathKey& w : cji.paths) {
                        Vec vw, wv;
                        vw.emplace(f.concat(v, w), pol.one());
                        wv.emplace(f.concat(w, v), pol.one());
                        S lhs = detail::graded_scalar(f, f.apply_cap_bundle(n, 0, std::move(wv)), j);
                        S rhs = detail::graded_scalar(f, f.apply_cap_bundle(n, 0, std::move(vw)), i) * ratio;
                        if (!detail::scalars_equal(pol, lhs, rhs)) {
                            rep.pairing_symmetry = false;
                            break;
                        }
                    }
            }
        // creation symmetry: coefficients of M(cre_n) at the two orderings
        for (int j = 0; j < nv && rep.creation_symmetry; ++j) {
            Vec unit;
            unit.emplace(MFunctor<P>::empty_path(j), pol.one());
            Vec created = f.apply_cup_bundle(n, 0, std::move(unit));
            for (const auto& [p, c] : created) {
                auto [front, back] = f.split(p, n);
                const int i = f.path_end(front);
                // coefficient of (back (x) front) in M(cre_n)(1_i), times x_i/x_j
                Vec unit_i;
                unit_i.emplace(MFunctor<P>::empty_path(i), pol.one());
                Vec created_i = f.apply_cup_bundle(n, 0, std::move(unit_i));
                auto it = created_i.find(f.concat(back, front));
                S other = it == created_i.end() ? pol.zero() : it->second;
                if (!detail::scalars_equal(pol, c, other * f.x(i) * f.x_inv(j))) {
                    rep.creation_symmetry = false;
                    break;
                }
            }
        }
    }

    // dual naturality on essential block maps alpha: E_m -> E_n for small m, n
    const int h = f.quiver().coxeter();
    const int len_cap = std::min(h <= 6 ? 3 : 2, h - 2);
    for (int m = 0; m <= len_cap && rep.dual_naturality; ++m)
        for (int n = 0; n <= len_cap && rep.dual_naturality; ++n) {
            f.ensure_paths(m + 2 * std::max(m, n));
            for (int i = 0; i < nv && rep.dual_naturality; ++i)
                for (int j = 0; j < nv && rep.dual_naturality; ++j) {
                    const size_t na = tower.dim(i, j, m), nb = tower.dim(i, j, n);
                    if (na == 0 || nb == 0) continue;
                    for (size_t s = 0; s < na && rep.dual_naturality; ++s)
                        for (size_t t = 0; t < nb && rep.dual_naturality; ++t) {
                            // alpha = |E_n vec t><E_m coord s| as a block map at (i,j)
                            auto alpha = [&](const Vec& w) -> Vec {
                                Vec img = f.apply_jw(m, 0, w);
                                // restrict to the (i,j) block
                                Vec blk;
                                for (const auto& [p, c] : img)
                                    if (MFunctor<P>::path_start(p) == i && f.path_end(p) == j) blk.emplace(p, c);
                                if (blk.empty()) return {};
                                auto coords = tower.coordinates(i, j, m, blk);
                                Vec out = tower.vec(i, j, n, t);
                                for (auto& [p, c] : out) c = c * coords[s];
                                return out;
                            };
                            auto apply_middle = [&](int off, int mid_len, const Vec& w) {
                                // applies alpha to the factor at positions off+1..off+mid_len
                                Vec out;
                                for (const auto& [p, c] : w) {
                                    auto [pre, rest] = f.split(p, off);
                                    auto [mid, post] = f.split(rest, mid_len);
                                    Vec one;
                                    one.emplace(mid, c);
                                    for (const auto& [q, d] : alpha(one))
                                        f.add_term(out, f.concat(f.concat(pre, q), post), d);
                                }
                                return out;
                            };
                            // alpha^vee = (id_m (x) ann_n) (id_m (x) alpha (x) id_n) (cre_m (x) id_n)
                            // vee-alpha = (ann_n (x) id_m) (id_n (x) alpha (x) id_m) (id_n (x) cre_m)
                            for (int u = 0; u < nv && rep.dual_naturality; ++u)
                                for (int w2 = 0; w2 < nv && rep.dual_naturality; ++w2) {
                                    const auto& cell = f.cell(u, w2, n);
                                    for (const PathKey& z : cell.paths) {
                                        Vec in;
                                        in.emplace(z, pol.one());
                                        Vec right = f.apply_cup_bundle(m, 0, in);
                                        right = apply_middle(m, m, right);
                                        right = f.apply_cap_bundle(n, m, right);
                                        Vec left = f.apply_cup_bundle(m, n, in);
                                        left = apply_middle(n, m, left);
                                        left = f.apply_cap_bundle(n, 0, left);
                                        Vec diff = right;
                                        for (const auto& [p, c] : left) f.add_term(diff, p, -c);
                                        bool zero = true;
                                        for (const auto& [p, c] : diff) {
                                            if constexpr (P::exact) {
                                                zero = zero && c.is_zero();
                                            } else {
                                                zero = zero && std::abs(c) < 1e-8;
                                            }
                                        }
                                        if (!zero) rep.dual_naturality = false;
                                    }
                                }
                        }
                }
        }
    return rep;
}

}  // namespace tubeinv
