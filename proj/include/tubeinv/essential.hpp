#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tubeinv/functor.hpp"
#include "tubeinv/linalg.hpp"

namespace tubeinv {

/// Integer dimension matrices n_{l+1} = G n_l - n_{l-1} with n_1 = I, n_2 = G
/// (the fused adjacency recursion); entry [l][i][j] = dim E_l(i,j) with the
/// label convention label = l + 1.
inline std::vector<IntMatrix> chebyshev_dims(const std::vector<std::vector<int>>& adj, int max_len) {
    const int n = static_cast<int>(adj.size());
    std::vector<IntMatrix> v;
    v.push_back(int_identity(n));
    if (max_len >= 1) {
        IntMatrix g(n, std::vector<long>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g[i][j] = adj[i][j];
        v.push_back(g);
    }
    for (int l = 2; l <= max_len; ++l) {
        IntMatrix next(n, std::vector<long>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                long acc = -v[l - 2][i][j];
                for (int k = 0; k < n; ++k)
                    if (adj[i][k]) acc += v[l - 1][k][j];
                next[i][j] = acc;
            }
        v.push_back(std::move(next));
    }
    return v;
}

/// Bases of the essential subspaces E_l(i,j) = image of M(p_l) on length-l
/// paths, built by the length recursion E_{l+1} = (E_l (x) B) cap ker M(e_l)
/// rather than by expanding Jones-Wenzl diagrams.
template <class P>
class EssentialTower {
public:
    using S = typename P::Scalar;
    using F = MFunctor<P>;

    struct CellBasis {
        std::vector<std::vector<S>> vecs;  // dense columns in cell path coordinates
        // exact extraction data: invert the pivot-row submatrix
        std::vector<int> pivot_rows;
        Mat<S> pivot_inv;
        size_t dim() const { return vecs.size(); }
    };

    EssentialTower(const F& functor, int max_len) : f_(functor), max_len_(max_len) {
        const P& pol = f_.policy();
        const int nv = f_.quiver().vertex_count();
        layers_.resize(max_len + 1);
        // l = 0: the empty path at each vertex
        for (int i = 0; i < nv; ++i) {
            CellBasis cb;
            cb.vecs.push_back({pol.one()});
            layers_[0].emplace(std::make_pair(i, i), std::move(cb));
        }
        if (max_len >= 1) {
            for (int a = 0; a < f_.arrow_count(); ++a) {
                auto key = std::make_pair(f_.arrow_src(a), f_.arrow_dst(a));
                auto& cb = layers_[1][key];
                const auto& cell = f_.cell(key.first, key.second, 1);
                std::vector<S> col(cell.size(), pol.zero());
                PathKey pk = f_.append_arrow(F::empty_path(key.first), a);
                col[static_cast<size_t>(cell.at(pk))] = pol.one();
                cb.vecs.push_back(std::move(col));
            }
        }
        for (int l = 2; l <= max_len; ++l) build_layer(l);
        for (auto& layer : layers_)
            for (auto& [key, cb] : layer) prepare_extraction(&cb);
    }

    int max_len() const { return max_len_; }

    const CellBasis* basis(int i, int j, int len) const {
        auto it = layers_[len].find({i, j});
        return it == layers_[len].end() ? nullptr : &it->second;
    }
    size_t dim(int i, int j, int len) const {
        const CellBasis* cb = basis(i, j, len);
        return cb ? cb->dim() : 0;
    }
    IntMatrix dims(int len) const {
        const int nv = f_.quiver().vertex_count();
        IntMatrix m(nv, std::vector<long>(nv, 0));
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) m[i][j] = static_cast<long>(dim(i, j, len));
        return m;
    }

    GradedVec<S> vec(int i, int j, int len, size_t which) const {
        const CellBasis* cb = basis(i, j, len);
        if (!cb || which >= cb->dim()) throw std::out_of_range("essential vector index");
        return f_.dense_to_vec(i, j, len, cb->vecs[which]);
    }

    /// Coordinates of a vector (dense, cell path coordinates) in the essential
    /// basis; the input must lie in the span, which is verified.
    std::vector<S> coordinates(int i, int j, int len, const std::vector<S>& w) const {
        const CellBasis* cb = basis(i, j, len);
        const P& pol = f_.policy();
        if (!cb || cb->dim() == 0) {
            for (const S& c : w)
                if (!negligible(c, w)) throw std::domain_error("vector outside essential span");
            return {};
        }
        std::vector<S> coords(cb->dim(), pol.zero());
        if constexpr (P::exact) {
            for (size_t r = 0; r < cb->dim(); ++r)
                for (size_t c = 0; c < cb->dim(); ++c)
                    coords[r] += cb->pivot_inv[r][c] * w[static_cast<size_t>(cb->pivot_rows[c])];
            for (size_t row = 0; row < w.size(); ++row) {
                S acc = w[row];
                for (size_t t = 0; t < cb->dim(); ++t) acc -= coords[t] * cb->vecs[t][row];
                if (!pol.is_zero(acc)) throw std::domain_error("vector outside essential span");
            }
        } else {
            for (size_t t = 0; t < cb->dim(); ++t)
                for (size_t row = 0; row < w.size(); ++row)
                    coords[t] += std::conj(cb->vecs[t][row]) * w[row];
            double err = 0.0, norm = 0.0;
            for (size_t row = 0; row < w.size(); ++row) {
                S acc = w[row];
                for (size_t t = 0; t < cb->dim(); ++t) acc -= coords[t] * cb->vecs[t][row];
                err += std::norm(acc);
                norm += std::norm(w[row]);
            }
            if (err > 1e-14 * (norm + 1e-30)) throw std::domain_error("vector outside essential span");
        }
        return coords;
    }

    /// Coordinates of a graded vector restricted to one cell.
    std::vector<S> coordinates(int i, int j, int len, const GradedVec<S>& w) const {
        const auto& cell = f_.cell(i, j, len);
        std::vector<S> dense(cell.size(), f_.policy().zero());
        for (const auto& [p, c] : w) dense[static_cast<size_t>(cell.at(p))] = c;
        return coordinates(i, j, len, dense);
    }

private:
    bool negligible(const S& c, const std::vector<S>& context) const {
        if constexpr (P::exact) {
            (void)context;
            return c.is_zero();
        } else {
            double scale = 0.0;
            for (const S& v : context) scale = std::max(scale, std::abs(v));
            return std::abs(c) <= 1e-9 * (scale + 1e-30);
        }
    }

    void build_layer(int l) {
        const P& pol = f_.policy();
        // candidates grouped by target cell (i,k): essential vec at (i,j) extended by arrow j->k
        struct Cand {
            int j;
            size_t s;
            int arrow;
        };
        std::map<std::pair<int, int>, std::vector<Cand>> cands;
        for (const auto& [ij, cb] : layers_[l - 1]) {
            for (size_t s = 0; s < cb.dim(); ++s)
                for (int a : f_.arrows_from(ij.second))
                    cands[{ij.first, f_.arrow_dst(a)}].push_back({ij.second, s, a});
        }
        for (const auto& [ik, list] : cands) {
            auto [i, k] = ik;
            // expanded candidate columns and the M(e_{l-1}) constraint rows
            std::vector<GradedVec<S>> expanded(list.size());
            std::map<PathKey, std::vector<S>> rows;
            for (size_t c = 0; c < list.size(); ++c) {
                const auto& cd = list[c];
                GradedVec<S> base = vec(i, cd.j, l - 1, cd.s);
                GradedVec<S> ext;
                for (const auto& [p, coeff] : base) ext.emplace(f_.append_arrow(p, cd.arrow), coeff);
                GradedVec<S> img = f_.apply_e(l - 1, ext);
                for (const auto& [p, coeff] : img) {
                    auto it = rows.find(p);
                    if (it == rows.end())
                        it = rows.emplace(p, std::vector<S>(list.size(), pol.zero())).first;
                    it->second[c] = coeff;
                }
                expanded[c] = std::move(ext);
            }
            Mat<S> m;
            m.reserve(rows.size());
            for (auto& [p, row] : rows) m.push_back(std::move(row));
            auto ns = linalg::nullspace(pol, std::move(m), list.size());
            if (ns.diag.ambiguous)
                throw std::domain_error("essential basis rank ambiguous near the float threshold");
            if (ns.basis.empty()) continue;
            CellBasis cb;
            const auto& cell = f_.cell(i, k, l);
            for (const auto& combo : ns.basis) {
                std::vector<S> col(cell.size(), pol.zero());
                for (size_t c = 0; c < list.size(); ++c) {
                    if (pol.is_zero(combo[c])) continue;
                    for (const auto& [p, coeff] : expanded[c])
                        col[static_cast<size_t>(cell.at(p))] += combo[c] * coeff;
                }
                cb.vecs.push_back(std::move(col));
            }
            layers_[l].emplace(ik, std::move(cb));
        }
    }

    void prepare_extraction(CellBasis* cb) {
        if constexpr (P::exact) {
            const P& pol = f_.policy();
            const size_t n = cb->dim();
            if (n == 0) return;
            const size_t rows = cb->vecs[0].size();
            // greedy pivot-row selection by elimination on a working copy
            Mat<S> work(n, std::vector<S>(rows, pol.zero()));
            for (size_t t = 0; t < n; ++t) work[t] = cb->vecs[t];
            std::vector<int> piv;
            for (size_t t = 0; t < n; ++t) {
                size_t r = 0;
                while (r < rows && pol.is_zero(work[t][r])) ++r;
                if (r == rows) throw std::logic_error("essential basis is linearly dependent");
                piv.push_back(static_cast<int>(r));
                Cyc inv = work[t][r].inverse();
                for (size_t u = t + 1; u < n; ++u) {
                    if (pol.is_zero(work[u][r])) continue;
                    Cyc fac = work[u][r] * inv;
                    for (size_t c = 0; c < rows; ++c) {
                        work[u][c] -= fac * work[t][c];
                        work[u][c].normalize();
                    }
                }
            }
            Mat<S> sub(n, std::vector<S>(n, pol.zero()));
            for (size_t r = 0; r < n; ++r)
                for (size_t t = 0; t < n; ++t) sub[r][t] = cb->vecs[t][static_cast<size_t>(piv[r])];
            // coords = sub^-1 * w[piv]; note sub[r][t] = basis_t at pivot row r
            cb->pivot_rows = std::move(piv);
            cb->pivot_inv = linalg::invert(pol, std::move(sub));
        }
    }

    const F& f_;
    int max_len_;
    std::vector<std::map<std::pair<int, int>, CellBasis>> layers_;
};

}  // namespace tubeinv
