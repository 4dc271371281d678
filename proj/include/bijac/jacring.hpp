#pragma once

// Bigraded pieces of the Jacobian ideal J = (F_x0, F_x1, F_y0, F_y1) of a
// curve F in S_{d,e} and of the Jacobian ring R = S/J, plus smoothness
// certification and lengths of finite base schemes.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bipoly.hpp"
#include "exactla.hpp"
#include "field.hpp"

namespace bijac {

template <Field K>
struct QuotientPiece {
    BiDegree degree;
    std::size_t dim_S = 0;
    Subspace<K> J;
    Complement<K> R;

    std::size_t dim_J() const { return J.dim(); }
    std::size_t dim_R() const { return R.dim(); }
};

struct HilbertValues {
    std::size_t dim_S = 0;
    std::size_t dim_J = 0;
    std::size_t dim_R = 0;
    friend bool operator==(const HilbertValues&, const HilbertValues&) = default;
};

enum class SmoothStatus { certified_smooth, singular_witnessed, undecided };

inline const char* to_string(SmoothStatus s) {
    switch (s) {
        case SmoothStatus::certified_smooth: return "certified-smooth";
        case SmoothStatus::singular_witnessed: return "singular-witnessed";
        case SmoothStatus::undecided: return "undecided";
    }
    return "?";
}

struct SmoothnessStep {
    BiDegree degree;
    std::size_t dim_S = 0;
    std::size_t dim_J = 0;
};

struct SmoothnessVerdict {
    SmoothStatus status = SmoothStatus::undecided;
    std::optional<BiDegree> certifying_degree;
    /// Common zero of all four partials, as strings "x0,x1,y0,y1" in the working field.
    std::optional<std::array<std::string, 4>> witness;
    std::vector<SmoothnessStep> trace;
};

/// A fixed curve F of bidegree (d,e) over the working field K. Quotient
/// pieces are memoized; copies share the memo table.
template <Field K>
class CurveContext {
public:
    using value_type = typename K::value_type;
    using SparseTerms = std::vector<std::pair<Monomial, value_type>>;

    explicit CurveContext(BiPoly f, K field = K{}) : f_(std::move(f)), field_(std::move(field)) {
        const BiDegree deg = f_.degree();
        if (deg.a < 1 || deg.b < 1) throw std::invalid_argument("curve bidegree must satisfy d,e >= 1");
        if (f_.is_zero()) throw std::invalid_argument("curve polynomial is zero");
        bool nonzero = false;
        for (const auto& [m, c] : f_.terms()) nonzero |= !field_.is_zero(field_.from_rational(c));
        if (!nonzero) throw std::domain_error("curve polynomial vanishes in " + field_.name());
        for (Var v : kAllVars) {
            partials_[static_cast<int>(v)] = bijac::partial(f_, v);
            sparse_partials_[static_cast<int>(v)] = to_sparse(partials_[static_cast<int>(v)]);
        }
        sparse_f_ = to_sparse(f_);
    }

    const BiPoly& F() const { return f_; }
    const K& field() const { return field_; }
    BiDegree degree() const { return f_.degree(); }
    int d() const { return f_.degree().a; }
    int e() const { return f_.degree().b; }
    /// (d-1)(e-1); q(S) = p_g(P1xP1) = 0.
    int genus() const { return (d() - 1) * (e() - 1); }

    const BiPoly& partial(Var v) const { return partials_[static_cast<int>(v)]; }
    const SparseTerms& sparse_partial(Var v) const { return sparse_partials_[static_cast<int>(v)]; }
    const SparseTerms& sparse_F() const { return sparse_f_; }

    /// Coordinates of m * p in S_{target}, p given by its sparse terms.
    std::vector<value_type> shifted(const Monomial& m, const SparseTerms& p, BiDegree target) const {
        std::vector<value_type> out(target.dim(), field_.zero());
        for (const auto& [n, c] : p) out[monomial_index(m * n, target)] = c;
        return out;
    }

    SparseTerms to_sparse(const BiPoly& p) const {
        SparseTerms out;
        for (const auto& [m, c] : p.terms()) {
            auto v = field_.from_rational(c);
            if (!field_.is_zero(v)) out.emplace_back(m, v);
        }
        return out;
    }

    std::shared_ptr<const QuotientPiece<K>> cached_piece(BiDegree deg) const {
        std::lock_guard lock(memo_->mu);
        auto it = memo_->pieces.find(deg);
        return it == memo_->pieces.end() ? nullptr : it->second;
    }

    /// First write wins; racing writers compute identical canonical pieces.
    std::shared_ptr<const QuotientPiece<K>> store_piece(BiDegree deg, std::shared_ptr<const QuotientPiece<K>> p) const {
        std::lock_guard lock(memo_->mu);
        return memo_->pieces.try_emplace(deg, std::move(p)).first->second;
    }

private:
    struct Memo {
        std::mutex mu;
        std::map<BiDegree, std::shared_ptr<const QuotientPiece<K>>> pieces;
    };

    BiPoly f_;
    K field_;
    std::array<BiPoly, 4> partials_;
    std::array<SparseTerms, 4> sparse_partials_;
    SparseTerms sparse_f_;
    std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

/// Multiplier bidegree for the generator family of the partial in v.
inline BiDegree multiplier_degree(BiDegree curve, BiDegree target, Var v) {
    const bool x = v == Var::x0 || v == Var::x1;
    return x ? BiDegree{target.a - curve.a + 1, target.b - curve.b} : BiDegree{target.a - curve.a, target.b - curve.b + 1};
}

/// Coefficient vectors of m * dF/dv over all v and all multipliers m of the
/// right bidegree, in the order x0, x1, y0, y1 and canonical multiplier order.
template <Field K>
std::vector<std::vector<typename K::value_type>> jacobian_generators(const CurveContext<K>& ctx, BiDegree deg) {
    std::vector<std::vector<typename K::value_type>> out;
    if (!deg.nonnegative()) return out;
    for (Var v : kAllVars)
        for (const auto& m : monomial_basis(multiplier_degree(ctx.degree(), deg, v)))
            out.push_back(ctx.shifted(m, ctx.sparse_partial(v), deg));
    return out;
}

template <Field K>
std::shared_ptr<const QuotientPiece<K>> jacobian_piece(const CurveContext<K>& ctx, BiDegree deg) {
    if (auto hit = ctx.cached_piece(deg)) return hit;
    auto piece = std::make_shared<QuotientPiece<K>>();
    piece->degree = deg;
    piece->dim_S = deg.dim();
    piece->J = span(ctx.field(), jacobian_generators(ctx, deg), deg.dim());
    piece->R = complement_coords(piece->J);
    return ctx.store_piece(deg, std::move(piece));
}

template <Field K>
HilbertValues hilbert(const CurveContext<K>& ctx, BiDegree deg) {
    if (!deg.nonnegative()) return {};
    auto p = jacobian_piece(ctx, deg);
    return {p->dim_S, p->dim_J(), p->dim_R()};
}

namespace detail {

// Small rational points of P1: [1:t] for |t| <= 3 and [0:1].
inline std::vector<std::pair<int, int>> probe_points() {
    std::vector<std::pair<int, int>> pts;
    for (int t = -3; t <= 3; ++t) pts.emplace_back(1, t);
    pts.emplace_back(0, 1);
    return pts;
}

template <Field K>
std::optional<std::array<std::string, 4>> find_singular_point(const CurveContext<K>& ctx) {
    const K& k = ctx.field();
    for (auto [x0, x1] : probe_points()) {
        for (auto [y0, y1] : probe_points()) {
            std::array<typename K::value_type, 4> pt{k.from_int(x0), k.from_int(x1), k.from_int(y0), k.from_int(y1)};
            bool all_zero = true;
            for (Var v : kAllVars)
                if (!k.is_zero(evaluate(k, ctx.partial(v), pt))) {
                    all_zero = false;
                    break;
                }
            if (all_zero)
                return std::array<std::string, 4>{std::to_string(x0), std::to_string(x1), std::to_string(y0),
                                                  std::to_string(y1)};
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Tests J_{kd,ke} = S_{kd,ke} for k = 1, 2, ... while (kd,ke) <= cap. A full
/// piece rules out a common zero of the partials over the algebraic closure,
/// because evaluation at such a point would be a nonzero functional killing J.
/// Without a certificate, small rational points are probed for a witness.
template <Field K>
SmoothnessVerdict certify_smooth(const CurveContext<K>& ctx, BiDegree cap) {
    if (cap.a < ctx.d() || cap.b < ctx.e()) throw std::invalid_argument("smoothness cap must be at least (d,e)");
    SmoothnessVerdict v;
    for (int k = 1; k * ctx.d() <= cap.a && k * ctx.e() <= cap.b; ++k) {
        const BiDegree deg{k * ctx.d(), k * ctx.e()};
        auto h = hilbert(ctx, deg);
        v.trace.push_back({deg, h.dim_S, h.dim_J});
        if (h.dim_R == 0) {
            v.status = SmoothStatus::certified_smooth;
            v.certifying_degree = deg;
            return v;
        }
    }
    if (auto w = detail::find_singular_point(ctx)) {
        v.status = SmoothStatus::singular_witnessed;
        v.witness = std::move(w);
    }
    return v;
}

template <Field K>
SmoothnessVerdict certify_smooth(const CurveContext<K>& ctx) {
    return certify_smooth(ctx, BiDegree{4 * ctx.d(), 4 * ctx.e()});
}

struct SchemeLength {
    std::size_t length = 0;
    bool stabilized = false;
    std::vector<std::pair<BiDegree, std::size_t>> trace;  // (bidegree, codimension)
};

/// Hilbert-function length of the base scheme of `generators`: the
/// codimension of the generated ideal in S_{a,b}, stepping (a,b) diagonally
/// from the largest generator bidegree. A step counts as stable when the
/// codimensions at (a,b), (a+1,b), (a,b+1) and (a+1,b+1) agree; comparing
/// only diagonal neighbours can stop on a false plateau of the unsaturated ideal.
template <Field K>
SchemeLength scheme_length(const K& k, const std::vector<BiPoly>& generators, BiDegree cap) {
    if (generators.empty()) throw std::invalid_argument("scheme_length needs at least one generator");
    BiDegree start{0, 0};
    for (const auto& g : generators) {
        start.a = std::max(start.a, g.degree().a);
        start.b = std::max(start.b, g.degree().b);
    }
    std::vector<std::vector<std::pair<Monomial, typename K::value_type>>> sparse;
    for (const auto& g : generators) {
        std::vector<std::pair<Monomial, typename K::value_type>> terms;
        for (const auto& [m, c] : g.terms()) terms.emplace_back(m, k.from_rational(c));
        sparse.push_back(std::move(terms));
    }
    std::map<BiDegree, std::size_t> memo;
    auto codim = [&](BiDegree deg) {
        if (auto it = memo.find(deg); it != memo.end()) return it->second;
        std::vector<std::vector<typename K::value_type>> rows;
        for (std::size_t g = 0; g < generators.size(); ++g) {
            for (const auto& m : monomial_basis(deg - generators[g].degree())) {
                std::vector<typename K::value_type> r(deg.dim(), k.zero());
                for (const auto& [n, c] : sparse[g]) r[monomial_index(m * n, deg)] = c;
                rows.push_back(std::move(r));
            }
        }
        return memo[deg] = deg.dim() - span(k, rows, deg.dim()).dim();
    };
    SchemeLength out;
    for (BiDegree deg = start; deg.a + 1 <= cap.a && deg.b + 1 <= cap.b; deg = deg + BiDegree{1, 1}) {
        const std::size_t c0 = codim(deg);
        out.trace.emplace_back(deg, c0);
        out.length = c0;
        if (codim(deg + BiDegree{1, 0}) == c0 && codim(deg + BiDegree{0, 1}) == c0 && codim(deg + BiDegree{1, 1}) == c0) {
            out.stabilized = true;
            return out;
        }
    }
    return out;
}

}  // namespace bijac
