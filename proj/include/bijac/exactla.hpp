#pragma once

// Exact dense linear algebra over a field policy K: reduced row echelon
// form, rank, kernels, canonical subspaces and quotient coordinates.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "field.hpp"

namespace bijac {

template <class V>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const V& fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<V>>& rows, std::size_t cols) {
        Matrix m;
        m.rows_ = rows.size();
        m.cols_ = cols;
        m.data_.reserve(rows.size() * cols);
        for (const auto& r : rows) {
            if (r.size() != cols) throw std::invalid_argument("row length does not match column count");
            m.data_.insert(m.data_.end(), r.begin(), r.end());
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    V& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const V& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<V> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const V> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::vector<V> row_vector(std::size_t r) const { return {data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_}; }

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        std::swap_ranges(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_, data_.begin() + j * cols_);
    }

    Matrix transposed() const {
        Matrix t;
        t.rows_ = cols_;
        t.cols_ = rows_;
        t.data_.reserve(data_.size());
        for (std::size_t c = 0; c < cols_; ++c)
            for (std::size_t r = 0; r < rows_; ++r) t.data_.push_back((*this)(r, c));
        return t;
    }

    /// Keeps the first n rows.
    void truncate_rows(std::size_t n) {
        rows_ = std::min(rows_, n);
        data_.resize(rows_ * cols_);
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<V> data_;
};

template <Field K>
using MatrixOf = Matrix<typename K::value_type>;

template <Field K>
struct RrefResult {
    MatrixOf<K> matrix;  // zero rows removed
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
};

/// Gauss-Jordan elimination. The result drops zero rows.
template <Field K>
RrefResult<K> rref(const K& k, MatrixOf<K> m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && k.is_zero(m(piv, c))) ++piv;
        if (piv == rows) continue;
        m.swap_rows(r, piv);
        const auto inv = k.inv(m(r, c));
        for (std::size_t j = c; j < cols; ++j) m(r, j) = k.mul(m(r, j), inv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || k.is_zero(m(i, c))) continue;
            const auto f = m(i, c);
            for (std::size_t j = c; j < cols; ++j) m(i, j) = k.sub(m(i, j), k.mul(f, m(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    m.truncate_rows(r);
    return {std::move(m), std::move(pivots), r};
}

/// Over Q: rows are cleared of denominators, reduced to echelon form with
/// fraction-free (Bareiss) updates, and only then normalized.
inline RrefResult<RationalField> rref(const RationalField&, const Matrix<mpq_class>& q) {
    const std::size_t rows = q.rows(), cols = q.cols();
    Matrix<mpz_class> m(rows, cols, mpz_class(0));
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class l = 1;
        for (std::size_t j = 0; j < cols; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q(i, j).get_den_mpz_t());
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = q(i, j).get_num() * (l / q(i, j).get_den());
    }

    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    mpz_class prev = 1, t;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && sgn(m(piv, c)) == 0) ++piv;
        if (piv == rows) continue;
        m.swap_rows(r, piv);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                t = m(r, c) * m(i, j) - m(i, c) * m(r, j);
                mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            m(i, c) = 0;
        }
        prev = m(r, c);
        pivots.push_back(c);
        ++r;
    }

    Matrix<mpq_class> out(r, cols, mpq_class(0));
    for (std::size_t i = 0; i < r; ++i) {
        const mpz_class& p = m(i, pivots[i]);
        for (std::size_t j = pivots[i]; j < cols; ++j) {
            out(i, j) = mpq_class(m(i, j), p);
            out(i, j).canonicalize();
        }
    }
    for (std::size_t i = r; i-- > 0;) {
        const std::size_t pc = pivots[i];
        for (std::size_t h = 0; h < i; ++h) {
            if (sgn(out(h, pc)) == 0) continue;
            const mpq_class f = out(h, pc);
            for (std::size_t j = pc; j < cols; ++j) out(h, j) -= f * out(i, j);
        }
    }
    return {std::move(out), std::move(pivots), r};
}

template <Field K>
std::size_t rank(const K& k, const MatrixOf<K>& m) {
    return rref(k, m).rank;
}

/// A subspace of K^n stored by its canonical (reduced row echelon) basis.
template <Field K>
struct Subspace {
    std::size_t ambient_dim = 0;
    MatrixOf<K> basis;
    std::vector<std::size_t> pivots;

    std::size_t dim() const { return basis.rows(); }
};

template <Field K>
Subspace<K> span(const K& k, const std::vector<std::vector<typename K::value_type>>& rows, std::size_t ambient_dim) {
    for (const auto& r : rows)
        if (r.size() != ambient_dim)
            throw std::invalid_argument("vector of length " + std::to_string(r.size()) +
                                        " in ambient space of dimension " + std::to_string(ambient_dim));
    if (rows.empty()) return {ambient_dim, MatrixOf<K>(0, ambient_dim, k.zero()), {}};
    auto red = rref(k, MatrixOf<K>::from_rows(rows, ambient_dim));
    return {ambient_dim, std::move(red.matrix), std::move(red.pivots)};
}

template <Field K>
Subspace<K> span_of_matrix(const K& k, const MatrixOf<K>& m) {
    auto red = rref(k, m);
    return {m.cols(), std::move(red.matrix), std::move(red.pivots)};
}

/// Right null space {v : m v = 0}.
template <Field K>
Subspace<K> kernel_basis(const K& k, const MatrixOf<K>& m) {
    const std::size_t n = m.cols();
    auto red = rref(k, m);
    std::vector<bool> is_pivot(n, false);
    for (auto p : red.pivots) is_pivot[p] = true;
    std::vector<std::vector<typename K::value_type>> vecs;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<typename K::value_type> v(n, k.zero());
        v[f] = k.one();
        for (std::size_t i = 0; i < red.rank; ++i) v[red.pivots[i]] = k.neg(red.matrix(i, f));
        vecs.push_back(std::move(v));
    }
    return span(k, vecs, n);
}

template <Field K>
bool subspace_equal(const K& k, const Subspace<K>& u, const Subspace<K>& v) {
    if (u.ambient_dim != v.ambient_dim) throw std::invalid_argument("subspaces live in different ambient spaces");
    if (u.dim() != v.dim() || u.pivots != v.pivots) return false;
    for (std::size_t i = 0; i < u.dim(); ++i)
        for (std::size_t j = 0; j < u.ambient_dim; ++j)
            if (!k.equal(u.basis(i, j), v.basis(i, j))) return false;
    return true;
}

/// Reduces x modulo u; the result is zero exactly when x lies in u.
template <Field K>
std::vector<typename K::value_type> reduce(const K& k, const Subspace<K>& u, std::vector<typename K::value_type> x) {
    for (std::size_t i = 0; i < u.dim(); ++i) {
        const auto f = x[u.pivots[i]];
        if (k.is_zero(f)) continue;
        for (std::size_t j = u.pivots[i]; j < u.ambient_dim; ++j) x[j] = k.sub(x[j], k.mul(f, u.basis(i, j)));
    }
    return x;
}

template <Field K>
bool contains(const K& k, const Subspace<K>& u, const std::vector<typename K::value_type>& x) {
    auto r = reduce(k, u, x);
    return std::all_of(r.begin(), r.end(), [&](const auto& c) { return k.is_zero(c); });
}

/// Quotient coordinates for ambient/u. The representatives are the standard
/// basis vectors at the non-pivot positions of u.
template <Field K>
struct Complement {
    std::vector<std::size_t> coords;

    std::size_t dim() const { return coords.size(); }

    std::vector<typename K::value_type> project(const K& k, const Subspace<K>& u,
                                                const std::vector<typename K::value_type>& x) const {
        auto r = reduce(k, u, x);
        std::vector<typename K::value_type> out;
        out.reserve(coords.size());
        for (auto c : coords) out.push_back(r[c]);
        return out;
    }
};

template <Field K>
Complement<K> complement_coords(const Subspace<K>& u) {
    Complement<K> c;
    std::size_t p = 0;
    for (std::size_t j = 0; j < u.ambient_dim; ++j) {
        if (p < u.pivots.size() && u.pivots[p] == j) {
            ++p;
            continue;
        }
        c.coords.push_back(j);
    }
    return c;
}

template <Field K>
std::vector<typename K::value_type> mat_vec(const K& k, const MatrixOf<K>& m, std::span<const typename K::value_type> v) {
    if (v.size() != m.cols()) throw std::invalid_argument("mat_vec: dimension mismatch");
    std::vector<typename K::value_type> out(m.rows(), k.zero());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i] = k.add(out[i], k.mul(m(i, j), v[j]));
    return out;
}

template <Field K>
MatrixOf<K> reduce_matrix(const K& k, const Matrix<mpq_class>& q) {
    MatrixOf<K> m(q.rows(), q.cols(), k.zero());
    for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t j = 0; j < q.cols(); ++j) m(i, j) = k.from_rational(q(i, j));
    return m;
}

// ---------------------------------------------------------------------------
// Rank certification. The rank of a rational matrix modulo p never exceeds
// its rank over Q, so a full-rank result mod p is a certificate. A deficient
// result is escalated to a second prime or to an exact recomputation.

enum class Escalation { none, second_prime, rational };

struct CertifyPolicy {
    std::uint32_t prime = kDefaultPrime;
    std::uint32_t second_prime = kSecondPrime;
    Escalation escalation = Escalation::rational;
};

struct CertifiedRank {
    std::size_t rank = 0;
    std::size_t max_possible = 0;
    bool exact = false;  // rank is known to equal the rank over Q
    std::string method;
};

inline CertifiedRank certify_rank(const Matrix<mpq_class>& q, const CertifyPolicy& policy = {}) {
    CertifiedRank out;
    out.max_possible = std::min(q.rows(), q.cols());
    PrimeField fp(policy.prime);
    out.rank = rank(fp, reduce_matrix(fp, q));
    out.method = fp.name();
    if (out.rank == out.max_possible) {
        out.exact = true;
        return out;
    }
    switch (policy.escalation) {
        case Escalation::none:
            break;
        case Escalation::second_prime: {
            PrimeField fq(policy.second_prime);
            out.rank = std::max(out.rank, rank(fq, reduce_matrix(fq, q)));
            out.method += "," + fq.name();
            out.exact = out.rank == out.max_possible;
            break;
        }
        case Escalation::rational:
            out.rank = rank(RationalField{}, q);
            out.method += ",Q";
            out.exact = true;
            break;
    }
    return out;
}

}  // namespace bijac
