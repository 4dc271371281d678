#pragma once

// Global sections of Sigma_L(a,b), the twisted bundle of first-order
// differential operators on L = O(d,e) over P1xP1, and the differential
// dF : H^0(Sigma_L(a,b)) -> S_{a+d,b+e}. Its image is the generalized
// Jacobian ideal, which must coincide with the ideal of partials.
//
// Sections are kept symbolic as (family, parameters); on the chart
// x1*y1 != 0, with z0 = x0/x1, w0 = y0/y1, the five families are
//   1: z0^t w0^u . 1                                  0<=t<=a, 0<=u<=b
//   2: z0^r w0^s . Dz                                 0<=r<=a+1, 0<=s<=b
//   3: -d z0^(a+1) w0^s . 1 + z0^(a+2) w0^s . Dz      0<=s<=b
//   4: z0^n w0^m . Dw                                 0<=n<=a, 0<=m<=b+1
//   5: -e z0^n w0^(b+1) . 1 + z0^n w0^(b+2) . Dw      0<=n<=a
// all tensored with x1^a y1^b, where dF(1) = F, dF(Dz) = x1 F_x0,
// dF(Dw) = y1 F_y0.

#include <stdexcept>
#include <string>
#include <vector>

#include "bipoly.hpp"
#include "exactla.hpp"
#include "jacring.hpp"

namespace bijac {

struct SigmaSection {
    int family = 1;  // 1..5
    int p = 0;       // t, r, s (family 3) or n
    int q = 0;       // u, s, m; unused for families 3 and 5
    BiDegree twist;

    friend bool operator==(const SigmaSection&, const SigmaSection&) = default;
};

inline bool in_range(const SigmaSection& s) {
    const int a = s.twist.a, b = s.twist.b;
    auto between = [](int v, int lo, int hi) { return lo <= v && v <= hi; };
    switch (s.family) {
        case 1: return between(s.p, 0, a) && between(s.q, 0, b);
        case 2: return between(s.p, 0, a + 1) && between(s.q, 0, b);
        // z0^(a+1) must be a monomial, so a >= -1
        case 3: return a >= -1 && between(s.p, 0, b) && s.q == 0;
        case 4: return between(s.p, 0, a) && between(s.q, 0, b + 1);
        case 5: return b >= -1 && between(s.p, 0, a) && s.q == 0;
        default: return false;
    }
}

/// Enumerates the basis of H^0(Sigma_L(a,b)); empty when a or b is <= -2.
inline std::vector<SigmaSection> sigma_basis(BiDegree twist) {
    std::vector<SigmaSection> out;
    const int a = twist.a, b = twist.b;
    if (a <= -2 || b <= -2) return out;
    for (int t = 0; t <= a; ++t)
        for (int u = 0; u <= b; ++u) out.push_back({1, t, u, twist});
    for (int r = 0; r <= a + 1; ++r)
        for (int s = 0; s <= b; ++s) out.push_back({2, r, s, twist});
    for (int s = 0; s <= b; ++s) out.push_back({3, s, 0, twist});
    for (int n = 0; n <= a; ++n)
        for (int m = 0; m <= b + 1; ++m) out.push_back({4, n, m, twist});
    for (int n = 0; n <= a; ++n) out.push_back({5, n, 0, twist});
    return out;
}

/// h^0(Sigma_L(a,b)) = (b+1)(2a+4) + (a+1)(b+3) for a,b >= -1, else 0.
inline long sigma_dim(int a, int b) {
    if (a <= -2 || b <= -2) return 0;
    return static_cast<long>(b + 1) * (2 * a + 4) + static_cast<long>(a + 1) * (b + 3);
}

/// Image of a section under dF, a polynomial of bidegree (a+d, b+e).
inline BiPoly apply_dF(const BiPoly& f, const SigmaSection& s) {
    if (!in_range(s))
        throw std::out_of_range("sigma section family " + std::to_string(s.family) + " parameters (" +
                                std::to_string(s.p) + "," + std::to_string(s.q) + ") out of range for twist " +
                                s.twist.str());
    const int a = s.twist.a, b = s.twist.b;
    auto mono = [](int i, int j, int k, int l) { return Monomial{{i, j, k, l}}; };
    switch (s.family) {
        case 1: return multiply(mono(s.p, a - s.p, s.q, b - s.q), f);
        case 2: return multiply(mono(s.p, a - s.p + 1, s.q, b - s.q), partial(f, Var::x0));
        case 3: return -multiply(mono(a + 1, 0, s.p, b - s.p), partial(f, Var::x1));
        case 4: return multiply(mono(s.p, a - s.p, s.q, b - s.q + 1), partial(f, Var::y0));
        case 5: return -multiply(mono(s.p, a - s.p, b + 1, 0), partial(f, Var::y1));
    }
    throw std::logic_error("unreachable");
}

template <Field K>
Subspace<K> image_dF(const CurveContext<K>& ctx, BiDegree twist) {
    const BiDegree target = twist + ctx.degree();
    std::vector<std::vector<typename K::value_type>> rows;
    for (const auto& s : sigma_basis(twist)) rows.push_back(apply_dF(ctx.F(), s).coords(ctx.field()));
    return span(ctx.field(), rows, target.dim());
}

/// image(dF) at this twist equals the Jacobian piece J_{a+d,b+e}.
template <Field K>
bool oracle_equiv(const CurveContext<K>& ctx, BiDegree twist) {
    const BiDegree target = twist + ctx.degree();
    const auto img = image_dF(ctx, twist);
    if (!target.nonnegative()) return img.dim() == 0 && jacobian_generators(ctx, target).empty();
    return subspace_equal(ctx.field(), img, jacobian_piece(ctx, target)->J);
}

}  // namespace bijac
