#pragma once

// Trace functional on the top piece R_{3d-4,3e-4}, the multiply-then-trace
// pairings, the symmetric IVHS forms B_tau(alpha, beta) = tr(tau alpha beta)
// on S_{d-2,e-2}, and the rank certificates built from them.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bipoly.hpp"
#include "exactla.hpp"
#include "jacring.hpp"
#include "sigma.hpp"

namespace bijac {

template <Field K>
BiDegree top_degree(const CurveContext<K>& ctx) {
    return {3 * ctx.d() - 4, 3 * ctx.e() - 4};
}

struct TopPieceCheck {
    BiDegree degree;
    std::size_t dim_S = 0;
    std::size_t dim_R = 0;
    bool pass = false;
};

template <Field K>
TopPieceCheck top_piece_check(const CurveContext<K>& ctx) {
    if (ctx.d() < 2 || ctx.e() < 2) throw std::invalid_argument("top piece check needs d,e >= 2");
    const BiDegree top = top_degree(ctx);
    auto h = hilbert(ctx, top);
    return {top, h.dim_S, h.dim_R, h.dim_R == 1};
}

/// Functionals on S_top vanishing on J_top, i.e. the dual of R_top.
template <Field K>
Subspace<K> top_annihilator(const CurveContext<K>& ctx) {
    const BiDegree top = top_degree(ctx);
    return kernel_basis(ctx.field(), jacobian_piece(ctx, top)->J.basis);
}

template <Field K>
struct TraceFunctional {
    using value_type = typename K::value_type;

    BiDegree degree;
    std::vector<value_type> coeffs;  // first nonzero coordinate is 1

    const value_type& on_monomial(const Monomial& m) const { return coeffs[monomial_index(m, degree)]; }

    value_type apply(const K& k, std::span<const value_type> v) const {
        auto acc = k.zero();
        for (std::size_t i = 0; i < coeffs.size(); ++i) acc = k.add(acc, k.mul(coeffs[i], v[i]));
        return acc;
    }
};

/// Unique up to scalar when R_top is one-dimensional; throws otherwise.
template <Field K>
TraceFunctional<K> trace_functional(const CurveContext<K>& ctx) {
    auto ann = top_annihilator(ctx);
    if (ann.dim() != 1)
        throw std::domain_error("top piece R" + top_degree(ctx).str() + " has dimension " + std::to_string(ann.dim()) +
                                ", not 1");
    return {top_degree(ctx), ann.basis.row_vector(0)};
}

/// Matrix of (u, v) -> tr(u v) on R_{deg} x R_{top - deg}, in quotient representatives.
template <Field K>
MatrixOf<K> pairing_matrix(const CurveContext<K>& ctx, const TraceFunctional<K>& tr, BiDegree deg) {
    const BiDegree comp = tr.degree - deg;
    if (!deg.nonnegative() || !comp.nonnegative())
        throw std::out_of_range("pairing degree " + deg.str() + " has no nonnegative complement in " + tr.degree.str());
    const auto rows = jacobian_piece(ctx, deg);
    const auto cols = jacobian_piece(ctx, comp);
    const auto row_basis = monomial_basis(deg);
    const auto col_basis = monomial_basis(comp);
    MatrixOf<K> m(rows->dim_R(), cols->dim_R(), ctx.field().zero());
    for (std::size_t i = 0; i < rows->dim_R(); ++i)
        for (std::size_t j = 0; j < cols->dim_R(); ++j)
            m(i, j) = tr.on_monomial(row_basis[rows->R.coords[i]] * col_basis[cols->R.coords[j]]);
    return m;
}

template <Field K>
struct IVHSForm {
    BiPoly tau;
    MatrixOf<K> matrix;  // g x g, basis: monomials of S_{d-2,e-2}
};

template <Field K>
IVHSForm<K> btau_matrix(const CurveContext<K>& ctx, const TraceFunctional<K>& tr, const BiPoly& tau) {
    if (tau.degree() != ctx.degree()) throw BidegreeError("tau must have the bidegree of the curve");
    const K& k = ctx.field();
    const auto basis = monomial_basis(ctx.degree() - BiDegree{2, 2});
    const auto terms = ctx.to_sparse(tau);
    MatrixOf<K> m(basis.size(), basis.size(), k.zero());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i; j < basis.size(); ++j) {
            auto acc = k.zero();
            const Monomial mij = basis[i] * basis[j];
            for (const auto& [t, c] : terms) acc = k.add(acc, k.mul(c, tr.on_monomial(t * mij)));
            m(i, j) = acc;
            m(j, i) = acc;
        }
    return {tau, std::move(m)};
}

/// tau for trial t: reproducible from (seed, t, height) alone.
inline BiPoly sample_tau(BiDegree deg, std::uint64_t seed, std::size_t trial, std::int64_t height) {
    return random_bipoly(deg, derive_seed(seed, trial), height);
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& t : pool) t.join();
}

/// True when the classes of `vectors` modulo J_top span all of R_top.
template <Field K>
bool spans_top(const CurveContext<K>& ctx, const std::vector<std::vector<typename K::value_type>>& vectors) {
    const BiDegree top = top_degree(ctx);
    auto piece = jacobian_piece(ctx, top);
    std::vector<std::vector<typename K::value_type>> proj;
    for (const auto& v : vectors) proj.push_back(piece->R.project(ctx.field(), piece->J, v));
    return span(ctx.field(), proj, piece->dim_R()).dim() == piece->dim_R();
}

}  // namespace detail

/// Injectivity of the duality map R_{2d-4,2e-4} -> R_{d,e}^* when one of
/// d, e equals 2. Then J_{2d-4,2e-4} = 0, so alpha^2 = 0 in R forces alpha = 0.
struct SquaringRoute {
    BiDegree source_degree;
    std::size_t dim_source = 0;
    std::size_t dim_J_source = 0;
    std::size_t pairing_rank = 0;
    bool trace_independent = false;  // certified for every nonzero functional on R_top
    bool decided = false;
    bool injective = false;
};

template <Field K>
SquaringRoute squaring_route(const CurveContext<K>& ctx) {
    SquaringRoute r;
    r.source_degree = {2 * ctx.d() - 4, 2 * ctx.e() - 4};
    auto src = jacobian_piece(ctx, r.source_degree);
    r.dim_source = src->dim_R();
    r.dim_J_source = src->dim_J();
    auto ann = top_annihilator(ctx);
    if (ann.dim() == 1) {
        auto tr = TraceFunctional<K>{top_degree(ctx), ann.basis.row_vector(0)};
        r.pairing_rank = rank(ctx.field(), pairing_matrix(ctx, tr, r.source_degree));
        r.decided = true;
        r.injective = r.dim_J_source == 0 && r.pairing_rank == r.dim_source;
    } else if (ann.dim() > 1 && r.dim_source == 1) {
        // lambda(alpha) != 0 for every nonzero trace iff alpha * R_{d,e} covers R_top.
        const auto src_basis = monomial_basis(r.source_degree);
        const Monomial alpha = src_basis[src->R.coords[0]];
        auto target = jacobian_piece(ctx, ctx.degree());
        const auto tb = monomial_basis(ctx.degree());
        std::vector<std::vector<typename K::value_type>> prods;
        for (auto c : target->R.coords)
            prods.push_back(BiPoly::monomial(alpha * tb[c]).coords(ctx.field()));
        r.trace_independent = true;
        r.decided = true;
        r.injective = r.dim_J_source == 0 && detail::spans_top(ctx, prods);
        r.pairing_rank = r.injective ? 1 : 0;
    }
    return r;
}

enum class IvhsVerdict { success, undecided_generic };

inline const char* to_string(IvhsVerdict v) { return v == IvhsVerdict::success ? "SUCCESS" : "UNDECIDED-GENERIC"; }

template <Field K>
struct IvhsCertificate {
    int genus = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::int64_t height = 0;
    std::size_t top_dim = 0;
    std::string route;                 // "trace" or "trace-independent"
    std::vector<std::size_t> ranks;    // per trial
    std::map<std::size_t, std::size_t> histogram;
    std::size_t max_rank = 0;
    std::optional<std::size_t> witness_trial;
    std::optional<std::uint64_t> witness_seed;
    std::optional<SquaringRoute> squaring;  // when min(d,e) == 2
    IvhsVerdict verdict = IvhsVerdict::undecided_generic;
};

/// Samples tau_1..tau_trials in S_{d,e} and looks for rank B_tau = g. One
/// full-rank witness certifies the generic statement (rank is lower
/// semicontinuous). For d or e equal to 2 the squaring route is run as well.
template <Field K>
IvhsCertificate<K> certify_max_ivhs(const CurveContext<K>& ctx, std::size_t trials, std::uint64_t seed,
                                    std::int64_t height = 100, unsigned threads = 1) {
    if (ctx.d() < 2 || ctx.e() < 2) throw std::invalid_argument("IVHS certification needs d,e >= 2");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (certify_smooth(ctx).status != SmoothStatus::certified_smooth)
        throw std::domain_error("curve is not certified smooth");

    IvhsCertificate<K> cert;
    cert.genus = ctx.genus();
    cert.trials = trials;
    cert.seed = seed;
    cert.height = height;
    cert.ranks.assign(trials, 0);

    auto ann = top_annihilator(ctx);
    cert.top_dim = ann.dim();
    if (cert.top_dim == 1) {
        cert.route = "trace";
        const TraceFunctional<K> tr{top_degree(ctx), ann.basis.row_vector(0)};
        detail::parallel_for(trials, threads, [&](std::size_t t) {
            auto form = btau_matrix(ctx, tr, sample_tau(ctx.degree(), seed, t, height));
            cert.ranks[t] = rank(ctx.field(), form.matrix);
        });
    } else if (cert.top_dim > 1 && cert.genus == 1) {
        // B_tau is the 1x1 matrix (tr(tau)). For every nonzero functional on
        // R_top some sampled tau has tr(tau) != 0 iff the taus span R_top.
        cert.route = "trace-independent";
        const BiDegree top = top_degree(ctx);
        auto piece = jacobian_piece(ctx, top);
        std::vector<std::vector<typename K::value_type>> proj;
        for (std::size_t t = 0; t < trials; ++t) {
            auto p = piece->R.project(ctx.field(), piece->J, sample_tau(ctx.degree(), seed, t, height).coords(ctx.field()));
            const bool nonzero = std::any_of(p.begin(), p.end(), [&](const auto& c) { return !ctx.field().is_zero(c); });
            cert.ranks[t] = nonzero ? 1 : 0;
            proj.push_back(std::move(p));
            if (span(ctx.field(), proj, piece->dim_R()).dim() == piece->dim_R() && !cert.witness_trial) {
                cert.witness_trial = t;
                cert.witness_seed = derive_seed(seed, t);
            }
        }
    } else {
        cert.route = "none";
    }

    for (auto r : cert.ranks) {
        ++cert.histogram[r];
        cert.max_rank = std::max(cert.max_rank, r);
    }
    if (cert.route == "trace") {
        for (std::size_t t = 0; t < trials; ++t)
            if (cert.ranks[t] == static_cast<std::size_t>(cert.genus)) {
                cert.witness_trial = t;
                cert.witness_seed = derive_seed(seed, t);
                break;
            }
    }
    if (ctx.d() == 2 || ctx.e() == 2) cert.squaring = squaring_route(ctx);
    const bool squaring_ok = cert.squaring && cert.squaring->decided && cert.squaring->injective;
    cert.verdict = cert.witness_trial || squaring_ok ? IvhsVerdict::success : IvhsVerdict::undecided_generic;
    return cert;
}

/// Random element of J_{d,e}: integer combination of x_i F_xj and y_i F_yj.
template <Field K>
BiPoly sample_jacobian_element(const CurveContext<K>& ctx, std::uint64_t seed, std::int64_t height = 100) {
    Rng rng(seed);
    BiPoly g = BiPoly::zero(ctx.degree());
    for (Var v : kAllVars) {
        const bool x = v == Var::x0 || v == Var::x1;
        for (int i = 0; i < 2; ++i) {
            Monomial m;
            m.e[(x ? 0 : 2) + i] = 1;
            g += multiply(m, ctx.partial(v)) * BiPoly::Coeff(static_cast<long>(rng.uniform(-height, height)));
        }
    }
    return g;
}

/// dim ker of (A, B) -> A F + B G on S_{d-4,e-4}^2 -> S_{2d-4,2e-4}.
template <Field K>
std::size_t mu_kernel_dim(const CurveContext<K>& ctx, const BiPoly& g) {
    if (ctx.d() < 3 || ctx.e() < 3) throw std::invalid_argument("mu_G needs d,e >= 3");
    if (g.degree() != ctx.degree()) throw BidegreeError("G must have the bidegree of the curve");
    const K& k = ctx.field();
    if (span(k, {ctx.F().coords(k), g.coords(k)}, ctx.degree().dim()).dim() < 2)
        throw std::invalid_argument("G is proportional to F");
    const BiDegree dom = ctx.degree() - BiDegree{4, 4};
    const BiDegree target = ctx.degree() + dom;
    const auto sg = ctx.to_sparse(g);
    std::vector<std::vector<typename K::value_type>> rows;
    for (const auto& m : monomial_basis(dom)) rows.push_back(ctx.shifted(m, ctx.sparse_F(), target));
    for (const auto& m : monomial_basis(dom)) rows.push_back(ctx.shifted(m, sg, target));
    return rows.size() - span(k, rows, target.dim()).dim();
}

template <Field K>
struct KernelSquareRecord {
    std::size_t kernel_dim = 0;
    /// evaluations[i][j] = tr(alpha_i^2 r_j) over kernel basis alpha_i and R_{d,e} representatives r_j
    std::vector<std::vector<typename K::value_type>> evaluations;
    bool all_vanish = true;
    bool vacuous = false;
};

/// Pairs alpha^2 against R_{d,e} for every alpha in a basis of ker B_tau.
template <Field K>
KernelSquareRecord<K> kernel_square_check(const CurveContext<K>& ctx, const TraceFunctional<K>& tr, const BiPoly& tau) {
    const K& k = ctx.field();
    const auto form = btau_matrix(ctx, tr, tau);
    const auto ker = kernel_basis(k, form.matrix);
    KernelSquareRecord<K> rec;
    rec.kernel_dim = ker.dim();
    rec.vacuous = ker.dim() == 0;
    const BiDegree src = ctx.degree() - BiDegree{2, 2};
    const BiDegree sq = src + src;
    const auto sq_basis = monomial_basis(sq);
    const auto l_basis = monomial_basis(ctx.degree());
    auto rl = jacobian_piece(ctx, ctx.degree());
    for (std::size_t i = 0; i < ker.dim(); ++i) {
        const auto alpha = ker.basis.row_vector(i);
        const auto alpha2 = multiply_coords<K>(k, src, alpha, src, alpha);
        std::vector<typename K::value_type> row;
        for (auto c : rl->R.coords) {
            auto acc = k.zero();
            for (std::size_t s = 0; s < sq_basis.size(); ++s)
                if (!k.is_zero(alpha2[s])) acc = k.add(acc, k.mul(alpha2[s], tr.on_monomial(sq_basis[s] * l_basis[c])));
            rec.all_vanish = rec.all_vanish && k.is_zero(acc);
            row.push_back(acc);
        }
        rec.evaluations.push_back(std::move(row));
    }
    return rec;
}

struct BoundsArithmetic {
    long lower = 0;  // h^0(K+L) + p_g - 1 = de - d - e
    long upper = 0;  // de - d - e - 4
    bool contradiction = false;
};

inline BoundsArithmetic bounds_report(int d, int e) {
    if (d < 3 || e < 3) throw std::invalid_argument("dimension bounds need d,e >= 3");
    const long base = static_cast<long>(d) * e - d - e;
    return {base, base - 4, base > base - 4};
}

struct BoundsReport {
    BoundsArithmetic bounds;
    std::size_t dim_J_K2L2 = 0;     // J_{2d-4,2e-4}
    std::size_t dim_R_K2L2 = 0;
    std::size_t dim_R_L = 0;
    std::size_t dim_J_L = 0;
    std::size_t mu_image_dim = 0;   // 2 dim S_{d-4,e-4}, using ker mu_G = 0
    long strict_bound = 0;          // dim D < dim J_{2d-4,2e-4} - dim im mu_G
    long chain_value = 0;           // de - d - e - 10 + dim J_{d,e}
    long h0_sigma = 0;              // h^0(Sigma_L)
    long chain_bound = 0;           // de - d - e - 10 + h^0(Sigma_L)
    bool r_dims_equal = false;
    bool chain_consistent = false;
    bool pass = false;
};

template <Field K>
BoundsReport bounds_report(const CurveContext<K>& ctx) {
    const int d = ctx.d(), e = ctx.e();
    BoundsReport r;
    r.bounds = bounds_report(d, e);
    auto k2l2 = hilbert(ctx, {2 * d - 4, 2 * e - 4});
    auto l = hilbert(ctx, ctx.degree());
    r.dim_J_K2L2 = k2l2.dim_J;
    r.dim_R_K2L2 = k2l2.dim_R;
    r.dim_R_L = l.dim_R;
    r.dim_J_L = l.dim_J;
    r.mu_image_dim = 2 * BiDegree{d - 4, e - 4}.dim();
    r.strict_bound = static_cast<long>(r.dim_J_K2L2) - static_cast<long>(r.mu_image_dim);
    const long base = static_cast<long>(d) * e - d - e;
    r.chain_value = base - 10 + static_cast<long>(r.dim_J_L);
    r.h0_sigma = sigma_dim(0, 0);
    r.chain_bound = base - 10 + r.h0_sigma;
    r.r_dims_equal = r.dim_R_K2L2 == r.dim_R_L;
    r.chain_consistent = r.strict_bound == r.chain_value && r.chain_value <= r.chain_bound &&
                         r.chain_bound - 1 == r.bounds.upper;
    r.pass = r.bounds.contradiction && r.r_dims_equal && r.chain_consistent;
    return r;
}

struct DualityItem {
    bool applicable = false;
    bool decided = false;
    std::size_t rows = 0;  // dim of the source piece
    std::size_t cols = 0;  // dim of the dual target
    std::size_t rank = 0;
    std::size_t kernel_dim = 0;
    bool pass = false;
};

struct DualityReport {
    std::size_t top_dim = 0;
    DualityItem iso_K2L2;        // d,e >= 3: R_{2d-4,2e-4} -> R_{d,e}^* is an isomorphism
    DualityItem injective_K2L2;  // d or e = 2: the same map is injective
    DualityItem kernel_KL2;      // R_{2d-2,2e-2} -> R_{d-2,e-2}^* onto, one-dimensional kernel
};

template <Field K>
DualityReport duality_report(const CurveContext<K>& ctx) {
    if (ctx.d() < 2 || ctx.e() < 2) throw std::invalid_argument("duality report needs d,e >= 2");
    const int d = ctx.d(), e = ctx.e();
    DualityReport rep;
    auto ann = top_annihilator(ctx);
    rep.top_dim = ann.dim();
    const bool unique_trace = rep.top_dim == 1;
    std::optional<TraceFunctional<K>> tr;
    if (unique_trace) tr = TraceFunctional<K>{top_degree(ctx), ann.basis.row_vector(0)};

    auto fill = [&](DualityItem& item, BiDegree deg) {
        auto m = pairing_matrix(ctx, *tr, deg);
        item.rows = m.rows();
        item.cols = m.cols();
        item.rank = rank(ctx.field(), m);
        item.kernel_dim = item.rows - item.rank;
        item.decided = true;
    };

    const BiDegree k2l2{2 * d - 4, 2 * e - 4};
    if (d >= 3 && e >= 3) {
        rep.iso_K2L2.applicable = true;
        if (unique_trace) {
            fill(rep.iso_K2L2, k2l2);
            rep.iso_K2L2.pass = rep.iso_K2L2.rows == rep.iso_K2L2.cols && rep.iso_K2L2.rank == rep.iso_K2L2.rows;
        }
    } else {
        rep.injective_K2L2.applicable = true;
        auto route = squaring_route(ctx);
        rep.injective_K2L2.decided = route.decided;
        rep.injective_K2L2.rows = route.dim_source;
        rep.injective_K2L2.cols = jacobian_piece(ctx, ctx.degree())->dim_R();
        rep.injective_K2L2.rank = route.pairing_rank;
        rep.injective_K2L2.kernel_dim = route.dim_source - std::min(route.dim_source, route.pairing_rank);
        rep.injective_K2L2.pass = route.injective;
    }

    rep.kernel_KL2.applicable = unique_trace;
    if (unique_trace) {
        fill(rep.kernel_KL2, {2 * d - 2, 2 * e - 2});
        rep.kernel_KL2.pass = rep.kernel_KL2.rank == rep.kernel_KL2.cols && rep.kernel_KL2.kernel_dim == 1;
    }
    return rep;
}

}  // namespace bijac
