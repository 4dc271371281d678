#include <gtest/gtest.h>

#include <algorithm>

#include <bijac/sigma.hpp>

using namespace bijac;

namespace {

long count_families(int a, int b) {
    auto n = [](int hi) { return std::max(0, hi + 1); };  // size of 0..hi
    if (a <= -2 || b <= -2) return 0;
    long c = 0;
    c += static_cast<long>(n(a)) * n(b);          // t, u
    c += static_cast<long>(n(a + 1)) * n(b);      // r, s
    c += n(b);                                    // s
    c += static_cast<long>(n(a)) * n(b + 1);      // n, m
    c += n(a);                                    // n
    return c;
}

CurveContext<PrimeField> curve(int d, int e, std::uint64_t seed) {
    return CurveContext<PrimeField>(random_bipoly({d, e}, seed, 100));
}

}  // namespace

TEST(SigmaDim, KnownValues) {
    EXPECT_EQ(sigma_dim(0, 0), 7);
    EXPECT_EQ(sigma_dim(-2, 5), 0);
    EXPECT_EQ(sigma_dim(3, -2), 0);
    EXPECT_EQ(sigma_dim(1, 1), 20);
}

TEST(SigmaDim, EnumerationMatchesCount) {
    for (int a = -2; a <= 4; ++a)
        for (int b = -2; b <= 4; ++b) {
            auto basis = sigma_basis({a, b});
            EXPECT_EQ(static_cast<long>(basis.size()), sigma_dim(a, b)) << a << "," << b;
            EXPECT_EQ(static_cast<long>(basis.size()), count_families(a, b)) << a << "," << b;
            for (const auto& s : basis) EXPECT_TRUE(in_range(s));
        }
}

TEST(ApplyDF, ImagesAtTrivialTwist) {
    BiPoly f = random_bipoly({3, 2}, 5, 20);
    const BiDegree t{0, 0};
    auto x = [](int i) { Monomial m; m.e[i] = 1; return m; };
    EXPECT_EQ(apply_dF(f, {1, 0, 0, t}), f);
    EXPECT_EQ(apply_dF(f, {2, 0, 0, t}), multiply(x(1), partial(f, Var::x0)));
    EXPECT_EQ(apply_dF(f, {2, 1, 0, t}), multiply(x(0), partial(f, Var::x0)));
    EXPECT_EQ(apply_dF(f, {3, 0, 0, t}), -multiply(x(0), partial(f, Var::x1)));
    EXPECT_EQ(apply_dF(f, {4, 0, 0, t}), multiply(x(3), partial(f, Var::y0)));
    EXPECT_EQ(apply_dF(f, {4, 0, 1, t}), multiply(x(2), partial(f, Var::y0)));
    EXPECT_EQ(apply_dF(f, {5, 0, 0, t}), -multiply(x(2), partial(f, Var::y1)));
    for (const auto& s : sigma_basis({1, 2})) EXPECT_EQ(apply_dF(f, s).degree(), (BiDegree{4, 4}));
}

TEST(ApplyDF, RejectsOutOfRange) {
    BiPoly f = random_bipoly({2, 2}, 1, 5);
    EXPECT_THROW(apply_dF(f, {1, 2, 0, {1, 1}}), std::out_of_range);
    EXPECT_THROW(apply_dF(f, {3, 0, 1, {1, 1}}), std::out_of_range);
    EXPECT_THROW(apply_dF(f, {5, 0, 0, {1, -2}}), std::out_of_range);
    EXPECT_THROW(apply_dF(f, {6, 0, 0, {1, 1}}), std::out_of_range);
}

TEST(ApplyDF, FamiliesThreeAndFiveUseOnePartial) {
    BiPoly f = random_bipoly({3, 3}, 2, 50);
    for (const auto& s : sigma_basis({1, 2})) {
        if (s.family != 3 && s.family != 5) continue;
        const Var v = s.family == 3 ? Var::x1 : Var::y1;
        BiPoly img = apply_dF(f, s);
        const BiDegree md = img.degree() - partial(f, v).degree();
        bool found = false;
        for (const auto& m : monomial_basis(md))
            if (img == -multiply(m, partial(f, v))) found = true;
        EXPECT_TRUE(found);
    }
}

TEST(OracleEquiv, SweepThreeThree) {
    auto c = curve(3, 3, 1);
    for (int a = -2; a <= 3; ++a)
        for (int b = -2; b <= 3; ++b) EXPECT_TRUE(oracle_equiv(c, {a, b})) << a << "," << b;
}

TEST(OracleEquiv, SweepTwoThreeOverRationals) {
    CurveContext<RationalField> c(random_bipoly({2, 3}, 3, 100));
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) EXPECT_TRUE(oracle_equiv(c, {a, b})) << a << "," << b;
}

TEST(OracleEquiv, VacuousAtMinusTwo) {
    auto c = curve(3, 3, 1);
    EXPECT_EQ(image_dF(c, {-2, 0}).dim(), 0u);
    EXPECT_EQ(hilbert(c, {1, 3}).dim_J, 0u);
    EXPECT_TRUE(oracle_equiv(c, {-2, 0}));
}

// With y1^(b+1) in place of y0^(b+1) the fifth family misses part of J.
TEST(OracleEquiv, FifthFamilyNeedsYZero) {
    auto c = curve(3, 3, 1);
    const auto& k = c.field();
    const BiDegree tw{0, 0};
    std::vector<std::vector<std::uint32_t>> rows;
    for (const auto& s : sigma_basis(tw)) {
        BiPoly img = s.family == 5 ? -multiply(Monomial{{s.p, tw.a - s.p, 0, tw.b + 1}}, c.partial(Var::y1))
                                   : apply_dF(c.F(), s);
        rows.push_back(img.coords(k));
    }
    auto variant = span(k, rows, BiDegree{3, 3}.dim());
    EXPECT_FALSE(subspace_equal(k, variant, jacobian_piece(c, {3, 3})->J));
    EXPECT_TRUE(oracle_equiv(c, tw));
}
