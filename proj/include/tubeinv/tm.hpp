#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tubeinv/essential.hpp"
#include "tubeinv/functor.hpp"
#include "tubeinv/linalg.hpp"

namespace tubeinv {

/// Unknown layout for one Z-matrix cell (a,b): one coefficient per
/// (vertex pair (i,j), source essential vector s, target essential vector t).
struct TMLayout {
    struct CellInfo {
        int i, j;
        size_t na, nb;
        size_t offset;
    };
    std::vector<CellInfo> cells;
    std::map<std::pair<int, int>, size_t> cell_index;
    size_t total = 0;

    size_t pos(size_t cell, size_t s, size_t t) const {
        return cells[cell].offset + s * cells[cell].nb + t;
    }
};

/// A basis of TM_a^b = Hom^alpha(a, b) solved from the braiding-intertwiner
/// square on the tensor generator: elements are block-graded maps
/// E_{a-1} -> E_{b-1} in essential coordinates.
template <class P>
struct TMBasis {
    int a = 0, b = 0;
    TMLayout layout;
    std::vector<std::vector<typename P::Scalar>> elements;
    RankDiagnostics diag;

    size_t dimension() const { return elements.size(); }
};

template <class P>
class TMSolver {
public:
    using S = typename P::Scalar;

    TMSolver(const MFunctor<P>& f, const EssentialTower<P>& tower) : f_(f), tower_(tower) {}

    /// Solves (id_B (x) f) M(sigma-bar_{Z,a}) = M(sigma_{Z,b}) (f (x) id_B) on
    /// E_{a-1} (x) B for f = M(p_{b-1}) f M(p_{a-1}); with `deep` the same
    /// square is imposed for Z = 2 (the label-3 object) as well.
    TMBasis<P> solve(int a, int b, bool deep = false) const {
        const int h = f_.quiver().coxeter();
        if (a < 1 || a > h - 1 || b < 1 || b > h - 1) throw std::invalid_argument("label out of range");
        const P& pol = f_.policy();
        TMBasis<P> out;
        out.a = a;
        out.b = b;

        const int ma = a - 1, mb = b - 1;
        const int nv = f_.quiver().vertex_count();
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) {
                size_t na = tower_.dim(i, j, ma), nb = tower_.dim(i, j, mb);
                if (na == 0 || nb == 0) continue;
                out.layout.cell_index[{i, j}] = out.layout.cells.size();
                out.layout.cells.push_back({i, j, na, nb, out.layout.total});
                out.layout.total += na * nb;
            }
        if (out.layout.total == 0) return out;

        typename RowAccumulatorFor<P>::type acc(pol, out.layout.total);
        accumulate_rows(out.layout, a, b, 1, &acc);
        if (deep) accumulate_rows(out.layout, a, b, 2, &acc);
        auto ns = acc.nullspace();
        out.elements = std::move(ns.basis);
        out.diag = ns.diag;
        if (out.diag.ambiguous)
            throw std::domain_error("tm_basis rank ambiguous: singular values within 10x of the float threshold");
        return out;
    }

private:
    // One pass of constraints for bundle size z (z = 1: Z = B; z = 2: essential 2-paths).
    void accumulate_rows(const TMLayout& layout, int a, int b, int z, typename RowAccumulatorFor<P>::type* acc) const {
        const P& pol = f_.policy();
        const int ma = a - 1, mb = b - 1;
        const int nv = f_.quiver().vertex_count();

        for (int i = 0; i < nv; ++i) {
            for (int j = 0; j < nv; ++j) {
                const size_t na = tower_.dim(i, j, ma);
                if (na == 0) continue;
                auto cell_it = layout.cell_index.find({i, j});
                const bool has_unknowns = cell_it != layout.cell_index.end();

                // bundle vectors starting at j
                std::vector<GradedVec<S>> bundles;
                if (z == 1) {
                    for (int arr : f_.arrows_from(j)) {
                        GradedVec<S> w;
                        w.emplace(f_.append_arrow(MFunctor<P>::empty_path(j), arr), pol.one());
                        bundles.push_back(std::move(w));
                    }
                } else {
                    for (int k2 = 0; k2 < nv; ++k2)
                        for (size_t s2 = 0; s2 < tower_.dim(j, k2, z); ++s2)
                            bundles.push_back(tower_.vec(j, k2, z, s2));
                }

                for (const auto& zvec : bundles) {
                    // RHS braids, shared across all source vectors s of this cell
                    std::vector<GradedVec<S>> rhs;
                    if (has_unknowns) {
                        const size_t nb = layout.cells[cell_it->second].nb;
                        rhs.reserve(nb);
                        for (size_t t = 0; t < nb; ++t) {
                            GradedVec<S> wt = tower_.vec(i, j, mb, t);
                            GradedVec<S> prod = tensor_concat(wt, zvec);
                            rhs.push_back(f_.braid_to_front(std::move(prod), mb, z, +1));
                        }
                    }
                    for (size_t s = 0; s < na; ++s) {
                        GradedVec<S> v = tower_.vec(i, j, ma, s);
                        GradedVec<S> lhs_in = tensor_concat(v, zvec);
                        GradedVec<S> braided = f_.braid_to_front(std::move(lhs_in), ma, z, -1);
                        emit_rows(layout, a, b, z, i, j, s, braided, has_unknowns ? &rhs : nullptr,
                                  has_unknowns ? cell_it->second : 0, acc);
                    }
                }
            }
        }
    }

    GradedVec<S> tensor_concat(const GradedVec<S>& left, const GradedVec<S>& right) const {
        GradedVec<S> out;
        for (const auto& [p, c] : left)
            for (const auto& [q, d] : right) {
                if (f_.path_end(p) != MFunctor<P>::path_start(q)) continue;
                f_.add_term(out, f_.concat(p, q), c * d);
            }
        return out;
    }

    void emit_rows(const TMLayout& layout, int a, int b, int z, int i, int j, size_t s,
                   const GradedVec<S>& braided, const std::vector<GradedVec<S>>* rhs, size_t rhs_cell,
                   typename RowAccumulatorFor<P>::type* acc) const {
        const P& pol = f_.policy();
        const int ma = a - 1, mb = b - 1;
        (void)mb;

        // group the braided left side by its z-arrow prefix
        std::map<PathKey, GradedVec<S>> tails;
        for (const auto& [p, c] : braided) {
            auto [prefix, tail] = f_.split(p, z);
            tails[prefix].emplace(tail, c);
        }

        std::map<PathKey, std::vector<std::pair<size_t, S>>> rows;  // final path -> sparse row
        for (const auto& [prefix, tail_vec] : tails) {
            const int u = f_.path_end(prefix);
            const int k2 = path_terminus(tail_vec);
            const size_t n_src = tower_.dim(u, k2, ma);
            auto coords = tower_.coordinates(u, k2, ma, tail_vec);  // throws if outside the span
            if (n_src == 0) continue;
            auto it = layout.cell_index.find({u, k2});
            if (it == layout.cell_index.end()) continue;  // f vanishes on this block
            const auto& info = layout.cells[it->second];
            for (size_t sp = 0; sp < info.na; ++sp) {
                if (pol.is_zero(coords[sp])) continue;
                for (size_t t = 0; t < info.nb; ++t) {
                    GradedVec<S> wt = tower_.vec(u, k2, b - 1, t);
                    const size_t col = layout.pos(it->second, sp, t);
                    for (const auto& [q, mu] : wt) {
                        PathKey full = f_.concat(prefix, q);
                        rows[full].emplace_back(col, coords[sp] * mu);
                    }
                }
            }
        }
        if (rhs) {
            const auto& info = layout.cells[rhs_cell];
            for (size_t t = 0; t < info.nb; ++t) {
                const size_t col = layout.pos(rhs_cell, s, t);
                for (const auto& [p, c] : (*rhs)[t]) rows[p].emplace_back(col, -c);
            }
        }
        for (const auto& [p, sparse] : rows) {
            std::vector<S> row(layout.total, pol.zero());
            bool nonzero = false;
            for (const auto& [col, val] : sparse) {
                row[col] += val;
                nonzero = true;
            }
            if (nonzero) acc->add_row(std::move(row));
        }
    }

    int path_terminus(const GradedVec<S>& v) const {
        if (v.empty()) return -1;
        return f_.path_end(v.begin()->first);
    }

    const MFunctor<P>& f_;
    const EssentialTower<P>& tower_;
};

}  // namespace tubeinv
