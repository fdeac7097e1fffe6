#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tubeinv/policy.hpp"

namespace tubeinv {

template <class S>
using Vec = std::vector<S>;
template <class S>
using Mat = std::vector<std::vector<S>>;

using IntMatrix = std::vector<std::vector<long>>;

inline IntMatrix int_identity(int n) {
    IntMatrix z(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i) z[i][i] = 1;
    return z;
}

/// Outcome of a rank decision. For the float backend the singular-value
/// window around the threshold is reported; `ambiguous` means a value fell
/// within a factor 10 of the cut and the caller must not trust the rank.
struct RankDiagnostics {
    int rank = 0;
    double sigma_max = 0.0;
    double sigma_kept_min = 0.0;     // smallest kept singular value
    double sigma_dropped_max = 0.0;  // largest discarded singular value
    bool ambiguous = false;
};

template <class S>
struct NullspaceResult {
    Mat<S> basis;  // each row is one nullspace vector
    RankDiagnostics diag;
};

namespace linalg {

// ---------- exact kernels ----------

inline Integer cyc_row_to_integer_form(std::vector<Cyc>& row) {
    // scales the row so every entry has denominator 1, then strips content
    Integer l = 1;
    for (auto& e : row) e.normalize();
    for (const auto& e : row) {
        auto cs = e.coefficients();
        for (const auto& c : cs) l = lcm(l, Integer(c.get_den()));
    }
    (void)l;
    return l;
}

/// Reduced row echelon form in place; returns pivot column indices.
inline std::vector<size_t> rref(Mat<Cyc>& m) {
    std::vector<size_t> pivots;
    if (m.empty()) return pivots;
    const size_t ncols = m[0].size();
    size_t row = 0;
    for (size_t col = 0; col < ncols && row < m.size(); ++col) {
        size_t sel = row;
        while (sel < m.size() && m[sel][col].is_zero()) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        Cyc inv = m[row][col].inverse();
        for (size_t c = col; c < ncols; ++c) {
            m[row][c] *= inv;
            m[row][c].normalize();
        }
        for (size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col].is_zero()) continue;
            Cyc f = m[r][col];
            for (size_t c = col; c < ncols; ++c) {
                m[r][c] -= f * m[row][c];
                m[r][c].normalize();
            }
        }
        pivots.push_back(col);
        ++row;
    }
    m.resize(pivots.size(), std::vector<Cyc>());
    return pivots;
}

inline int rank(const ExactPolicy&, Mat<Cyc> m) { return static_cast<int>(rref(m).size()); }

/// Nullspace basis in reduced form: vector k has a 1 in its own free column.
inline NullspaceResult<Cyc> nullspace(const ExactPolicy& p, Mat<Cyc> m, size_t ncols) {
    auto pivots = rref(m);
    NullspaceResult<Cyc> out;
    out.diag.rank = static_cast<int>(pivots.size());
    std::vector<bool> is_pivot(ncols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    for (size_t fc = 0; fc < ncols; ++fc) {
        if (is_pivot[fc]) continue;
        std::vector<Cyc> v(ncols, p.zero());
        v[fc] = p.one();
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][fc];
        out.basis.push_back(std::move(v));
    }
    return out;
}

/// Exact inverse of a square matrix.
inline Mat<Cyc> invert(const ExactPolicy& p, Mat<Cyc> m) {
    const size_t n = m.size();
    for (size_t r = 0; r < n; ++r) {
        if (m[r].size() != n) throw std::invalid_argument("invert: matrix not square");
        m[r].resize(2 * n, p.zero());
        m[r][n + r] = p.one();
    }
    auto pivots = rref(m);
    if (pivots.size() != n) throw std::domain_error("invert: singular matrix");
    Mat<Cyc> inv(n);
    for (size_t r = 0; r < n; ++r)
        inv[r] = std::vector<Cyc>(m[r].begin() + static_cast<long>(n), m[r].end());
    return inv;
}

// ---------- float kernels (SVD-based rank decisions) ----------

inline Eigen::MatrixXcd to_eigen(const Mat<std::complex<double>>& m, size_t ncols) {
    Eigen::MatrixXcd a(static_cast<long>(m.size()), static_cast<long>(ncols));
    for (size_t r = 0; r < m.size(); ++r)
        for (size_t c = 0; c < ncols; ++c) a(static_cast<long>(r), static_cast<long>(c)) = m[r][c];
    return a;
}

inline RankDiagnostics svd_rank(const Eigen::VectorXd& sv, double tol) {
    RankDiagnostics d;
    d.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    if (d.sigma_max <= 0.0) return d;
    const double cut = tol * d.sigma_max;
    for (long i = 0; i < sv.size(); ++i) {
        if (sv(i) > cut) {
            ++d.rank;
            d.sigma_kept_min = sv(i);
        } else {
            d.sigma_dropped_max = std::max(d.sigma_dropped_max, sv(i));
        }
        if (sv(i) > cut / 10.0 && sv(i) < cut * 10.0) d.ambiguous = true;
    }
    return d;
}

inline int rank(const FloatPolicy& p, const Mat<std::complex<double>>& m) {
    if (m.empty()) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m, m[0].size()));
    return svd_rank(svd.singularValues(), p.tol).rank;
}

inline NullspaceResult<std::complex<double>> nullspace(const FloatPolicy& p,
                                                       const Mat<std::complex<double>>& m,
                                                       size_t ncols) {
    NullspaceResult<std::complex<double>> out;
    if (m.empty()) {
        out.basis.resize(ncols, std::vector<std::complex<double>>(ncols, {0, 0}));
        for (size_t i = 0; i < ncols; ++i) out.basis[i][i] = {1, 0};
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m, ncols), Eigen::ComputeFullV);
    out.diag = svd_rank(svd.singularValues(), p.tol);
    const auto& v = svd.matrixV();
    for (long c = out.diag.rank; c < v.cols(); ++c) {
        std::vector<std::complex<double>> vec(ncols);
        for (size_t i = 0; i < ncols; ++i) vec[i] = v(static_cast<long>(i), c);
        out.basis.push_back(std::move(vec));
    }
    return out;
}

}  // namespace linalg

/// Streams constraint rows and keeps an echelonised row basis; rows are
/// combined fraction-free and content-stripped so coefficients stay integral.
class ExactRowAccumulator {
public:
    ExactRowAccumulator(const ExactPolicy& p, size_t ncols) : p_(p), ncols_(ncols) {}

    void add_row(std::vector<Cyc> row) {
        if (row.size() != ncols_) throw std::invalid_argument("row width mismatch");
        strip(row);
        for (const auto& er : rows_) {
            size_t lead = er.first;
            if (row[lead].is_zero()) continue;
            Cyc a = er.second[lead], b = row[lead];
            // scale the whole row, not just the tail: columns before `lead`
            // may be populated when stored leads have gaps
            for (size_t c = 0; c < ncols_; ++c) {
                row[c] = (c < lead) ? row[c] * a : row[c] * a - er.second[c] * b;
                row[c].normalize();
            }
            strip(row);
        }
        size_t lead = 0;
        while (lead < ncols_ && row[lead].is_zero()) ++lead;
        if (lead == ncols_) return;
        rows_.emplace_back(lead, std::move(row));
        std::sort(rows_.begin(), rows_.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
    }

    int rank() const { return static_cast<int>(rows_.size()); }

    NullspaceResult<Cyc> nullspace() const {
        Mat<Cyc> m;
        m.reserve(rows_.size());
        for (const auto& er : rows_) m.push_back(er.second);
        return linalg::nullspace(p_, std::move(m), ncols_);
    }

private:
    void strip(std::vector<Cyc>& row) const {
        // put every entry over denominator 1, then remove the common content
        std::vector<std::vector<Rational>> cs(row.size());
        Integer l = 1;
        for (size_t i = 0; i < row.size(); ++i) {
            row[i].normalize();
            cs[i] = row[i].coefficients();
            for (const auto& c : cs[i]) l = lcm(l, Integer(c.get_den()));
        }
        Integer g = 0;
        for (auto& v : cs)
            for (auto& c : v) {
                c *= Rational(l);
                c.canonicalize();
                if (c != 0) g = gcd(g, Integer(c.get_num()));
            }
        if (g == 0) return;
        for (size_t i = 0; i < row.size(); ++i) {
            for (auto& c : cs[i]) {
                c /= Rational(g);
                c.canonicalize();
            }
            row[i] = Cyc::from_coeffs(p_.order(), cs[i]);
        }
    }

    ExactPolicy p_;
    size_t ncols_;
    std::vector<std::pair<size_t, std::vector<Cyc>>> rows_;
};

/// Float counterpart: buffered rows are compacted through Householder QR so
/// only an ncols x ncols triangular factor is retained; the final rank call
/// takes singular values of that factor.
class FloatRowAccumulator {
public:
    FloatRowAccumulator(const FloatPolicy& p, size_t ncols)
        : p_(p), ncols_(ncols), r_(0, static_cast<long>(ncols)) {}

    void add_row(std::vector<std::complex<double>> row) {
        if (row.size() != ncols_) throw std::invalid_argument("row width mismatch");
        buf_.push_back(std::move(row));
        if (buf_.size() >= 4 * ncols_ + 16) compact();
    }

    NullspaceResult<std::complex<double>> nullspace() {
        compact();
        NullspaceResult<std::complex<double>> out;
        if (r_.rows() == 0) {
            out.basis.resize(ncols_, std::vector<std::complex<double>>(ncols_, {0, 0}));
            for (size_t i = 0; i < ncols_; ++i) out.basis[i][i] = {1, 0};
            return out;
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r_, Eigen::ComputeFullV);
        out.diag = linalg::svd_rank(svd.singularValues(), p_.tol);
        const auto& v = svd.matrixV();
        for (long c = out.diag.rank; c < v.cols(); ++c) {
            std::vector<std::complex<double>> vec(ncols_);
            for (size_t i = 0; i < ncols_; ++i) vec[i] = v(static_cast<long>(i), c);
            out.basis.push_back(std::move(vec));
        }
        return out;
    }

private:
    void compact() {
        if (buf_.empty()) return;
        Eigen::MatrixXcd a(r_.rows() + static_cast<long>(buf_.size()), static_cast<long>(ncols_));
        if (r_.rows() > 0) a.topRows(r_.rows()) = r_;
        for (size_t i = 0; i < buf_.size(); ++i)
            for (size_t c = 0; c < ncols_; ++c)
                a(r_.rows() + static_cast<long>(i), static_cast<long>(c)) = buf_[i][c];
        buf_.clear();
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
        long keep = std::min<long>(a.rows(), static_cast<long>(ncols_));
        r_ = Eigen::MatrixXcd(qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>());
    }

    FloatPolicy p_;
    size_t ncols_;
    Eigen::MatrixXcd r_;
    std::vector<std::vector<std::complex<double>>> buf_;
};

template <class P>
struct RowAccumulatorFor;
template <>
struct RowAccumulatorFor<ExactPolicy> {
    using type = ExactRowAccumulator;
};
template <>
struct RowAccumulatorFor<FloatPolicy> {
    using type = FloatRowAccumulator;
};

}  // namespace tubeinv
