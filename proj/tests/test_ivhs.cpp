#include <gtest/gtest.h>

#include <bijac/ivhs.hpp>

using namespace bijac;

namespace {

CurveContext<PrimeField> curve(int d, int e, std::uint64_t seed) {
    return CurveContext<PrimeField>(random_bipoly({d, e}, seed, 100));
}

template <Field K>
bool is_zero_matrix(const K& k, const MatrixOf<K>& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!k.is_zero(m(i, j))) return false;
    return true;
}

}  // namespace

TEST(TopPiece, OneDimensionalForLargeDegrees) {
    for (auto [d, e] : {std::pair{3, 3}, {3, 4}, {4, 4}}) {
        auto t = top_piece_check(curve(d, e, 1));
        EXPECT_EQ(t.dim_R, 1u);
        EXPECT_TRUE(t.pass);
        EXPECT_EQ(t.degree, (BiDegree{3 * d - 4, 3 * e - 4}));
    }
    EXPECT_THROW(top_piece_check(curve(1, 3, 1)), std::invalid_argument);
}

TEST(Trace, AnnihilatesJacobianAndIsNormalized) {
    auto c = curve(3, 3, 2);
    auto tr = trace_functional(c);
    const auto& k = c.field();
    for (const auto& g : jacobian_generators(c, {5, 5})) EXPECT_TRUE(k.is_zero(tr.apply(k, g)));
    auto first = std::find_if(tr.coeffs.begin(), tr.coeffs.end(), [](auto v) { return v != 0; });
    ASSERT_NE(first, tr.coeffs.end());
    EXPECT_EQ(*first, 1u);
}

TEST(Trace, NotUniqueAtTwoTwo) {
    auto c = curve(2, 2, 1);
    EXPECT_EQ(top_piece_check(c).dim_R, 2u);
    EXPECT_THROW(trace_functional(c), std::domain_error);
}

TEST(Pairing, RanksAtThreeThree) {
    auto c = curve(3, 3, 1);
    auto tr = trace_functional(c);
    auto k2l2 = pairing_matrix(c, tr, {2, 2});
    EXPECT_EQ(k2l2.rows(), 9u);
    EXPECT_EQ(k2l2.cols(), 9u);
    EXPECT_EQ(rank(c.field(), k2l2), 9u);
    auto kl2 = pairing_matrix(c, tr, {4, 4});
    EXPECT_EQ(kl2.rows(), 5u);
    EXPECT_EQ(kl2.cols(), 4u);
    EXPECT_EQ(rank(c.field(), kl2), 4u);
    auto top = pairing_matrix(c, tr, {5, 5});
    ASSERT_EQ(top.rows(), 1u);
    EXPECT_NE(top(0, 0), 0u);
    EXPECT_THROW(pairing_matrix(c, tr, {6, 0}), std::out_of_range);
    EXPECT_THROW(pairing_matrix(c, tr, {-1, 2}), std::out_of_range);
}

TEST(Pairing, ComplementaryDegreesAreTransposes) {
    auto c = curve(3, 4, 3);
    auto tr = trace_functional(c);
    for (BiDegree deg : {BiDegree{1, 2}, BiDegree{2, 5}, BiDegree{4, 3}}) {
        auto m = pairing_matrix(c, tr, deg);
        EXPECT_EQ(m.transposed(), pairing_matrix(c, tr, tr.degree - deg));
    }
}

TEST(BTau, SymmetricOnRandomData) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const int d = 2 + static_cast<int>(s % 3), e = 3 + static_cast<int>((s / 3) % 2);
        auto c = curve(d, e, s);
        auto tr = trace_functional(c);
        auto form = btau_matrix(c, tr, random_bipoly({d, e}, 1000 + s, 100));
        ASSERT_EQ(form.matrix.rows(), static_cast<std::size_t>(c.genus()));
        EXPECT_EQ(form.matrix, form.matrix.transposed());
    }
}

TEST(BTau, DegenerateTaus) {
    auto c = curve(3, 3, 1);
    auto tr = trace_functional(c);
    EXPECT_TRUE(is_zero_matrix(c.field(), btau_matrix(c, tr, BiPoly::zero({3, 3})).matrix));
    // F lies in J, so tau = F pairs to zero against everything
    EXPECT_TRUE(is_zero_matrix(c.field(), btau_matrix(c, tr, c.F()).matrix));
    EXPECT_THROW(btau_matrix(c, tr, BiPoly::zero({2, 3})), BidegreeError);
}

TEST(BTau, RankInvariantUnderScaling) {
    auto c = curve(3, 4, 5);
    const auto& k = c.field();
    auto tr = trace_functional(c);
    auto scaled = tr;
    for (auto& v : scaled.coeffs) v = k.mul(v, k.from_int(12345));
    BiPoly tau = random_bipoly({3, 4}, 9, 100);
    const auto r = rank(k, btau_matrix(c, tr, tau).matrix);
    EXPECT_EQ(rank(k, btau_matrix(c, scaled, tau).matrix), r);
    EXPECT_EQ(rank(k, btau_matrix(c, tr, tau * mpq_class(-7, 3)).matrix), r);
}

TEST(CertifyIvhs, FullRankWitness) {
    auto cert = certify_max_ivhs(curve(3, 3, 1), 20, 42);
    EXPECT_EQ(cert.verdict, IvhsVerdict::success);
    EXPECT_EQ(cert.max_rank, 4u);
    ASSERT_TRUE(cert.witness_trial);
    EXPECT_EQ(*cert.witness_seed, derive_seed(42, *cert.witness_trial));
    std::size_t total = 0;
    for (const auto& [r, n] : cert.histogram) total += n;
    EXPECT_EQ(total, 20u);
}

TEST(CertifyIvhs, TwoTwoUsesEveryTrace) {
    auto cert = certify_max_ivhs(curve(2, 2, 3), 20, 42);
    EXPECT_EQ(cert.route, "trace-independent");
    EXPECT_EQ(cert.verdict, IvhsVerdict::success);
    EXPECT_EQ(cert.max_rank, 1u);
    ASSERT_TRUE(cert.squaring);
    EXPECT_TRUE(cert.squaring->injective);
}

TEST(CertifyIvhs, SquaringRouteForDTwo) {
    auto cert = certify_max_ivhs(curve(2, 4, 1), 5, 1);
    ASSERT_TRUE(cert.squaring);
    EXPECT_TRUE(cert.squaring->decided);
    EXPECT_TRUE(cert.squaring->injective);
    EXPECT_EQ(cert.squaring->dim_J_source, 0u);
    EXPECT_EQ(cert.max_rank, 3u);
}

TEST(CertifyIvhs, DeterministicAcrossThreads) {
    auto c = curve(3, 4, 2);
    auto a = certify_max_ivhs(c, 12, 77, 100, 1);
    auto b = certify_max_ivhs(c, 12, 77, 100, 4);
    auto again = certify_max_ivhs(curve(3, 4, 2), 12, 77, 100, 3);
    EXPECT_EQ(a.ranks, b.ranks);
    EXPECT_EQ(a.ranks, again.ranks);
    EXPECT_EQ(a.witness_trial, b.witness_trial);
}

TEST(CertifyIvhs, Preconditions) {
    EXPECT_THROW(certify_max_ivhs(curve(3, 3, 1), 0, 1), std::invalid_argument);
    CurveContext<PrimeField> sing(parse_bipoly("x0^3*y0^3", {3, 3}));
    EXPECT_THROW(certify_max_ivhs(sing, 3, 1), std::domain_error);
}

TEST(Mu, KernelIsZero) {
    EXPECT_EQ(mu_kernel_dim(curve(3, 3, 1), random_bipoly({3, 3}, 5, 10)), 0u);
    for (auto [d, e] : {std::pair{4, 4}, {4, 5}}) {
        auto c = curve(d, e, 1);
        for (std::uint64_t s = 0; s < 3; ++s) EXPECT_EQ(mu_kernel_dim(c, sample_jacobian_element(c, s)), 0u);
    }
}

TEST(Mu, Preconditions) {
    auto c = curve(4, 4, 1);
    EXPECT_THROW(mu_kernel_dim(c, c.F()), std::invalid_argument);
    EXPECT_THROW(mu_kernel_dim(c, c.F() * mpq_class(3)), std::invalid_argument);
    EXPECT_THROW(mu_kernel_dim(curve(2, 4, 1), random_bipoly({2, 4}, 1, 5)), std::invalid_argument);
    EXPECT_THROW(mu_kernel_dim(c, random_bipoly({4, 3}, 1, 5)), BidegreeError);
}

// A G sharing a factor with F gives (A,B) = (G', -F') in the kernel.
TEST(Mu, DetectsCommonFactor) {
    BiPoly h = random_bipoly({4, 4}, 1, 10);
    BiPoly f = multiply(h, random_bipoly({1, 1}, 2, 10));
    BiPoly g = multiply(h, random_bipoly({1, 1}, 3, 10));
    CurveContext<PrimeField> c(f);
    EXPECT_EQ(mu_kernel_dim(c, g), 1u);
}

TEST(Mu, SampledGLiesInJ) {
    auto c = curve(4, 4, 1);
    auto g = sample_jacobian_element(c, 9);
    EXPECT_TRUE(contains(c.field(), jacobian_piece(c, {4, 4})->J, g.coords(c.field())));
}

TEST(KernelSquare, VacuousAtFullRank) {
    auto c = curve(3, 3, 1);
    auto cert = certify_max_ivhs(c, 5, 42);
    ASSERT_TRUE(cert.witness_trial);
    auto rec = kernel_square_check(c, trace_functional(c), sample_tau({3, 3}, 42, *cert.witness_trial, 100));
    EXPECT_TRUE(rec.vacuous);
    EXPECT_EQ(rec.kernel_dim, 0u);
}

TEST(KernelSquare, ZeroTauReportsEvaluations) {
    auto c = curve(3, 3, 1);
    auto rec = kernel_square_check(c, trace_functional(c), BiPoly::zero({3, 3}));
    EXPECT_EQ(rec.kernel_dim, 4u);
    EXPECT_EQ(rec.evaluations.size(), 4u);
    EXPECT_EQ(rec.evaluations[0].size(), 9u);
    EXPECT_FALSE(rec.vacuous);
}

TEST(Bounds, Arithmetic) {
    auto b33 = bounds_report(3, 3);
    EXPECT_EQ(b33.lower, 3);
    EXPECT_EQ(b33.upper, -1);
    EXPECT_TRUE(b33.contradiction);
    auto b45 = bounds_report(4, 5);
    EXPECT_EQ(b45.lower, 11);
    EXPECT_EQ(b45.upper, 7);
    EXPECT_THROW(bounds_report(2, 5), std::invalid_argument);
}

TEST(Bounds, IntermediatesAtThreeThree) {
    auto r = bounds_report(curve(3, 3, 1));
    EXPECT_EQ(r.dim_R_K2L2, 9u);
    EXPECT_EQ(r.dim_R_L, 9u);
    EXPECT_EQ(r.dim_J_K2L2, 0u);
    EXPECT_EQ(r.h0_sigma, 7);
    EXPECT_TRUE(r.chain_consistent);
    EXPECT_TRUE(r.pass);
}

TEST(Duality, ThreeThreeAndTwoThree) {
    auto r = duality_report(curve(3, 3, 1));
    EXPECT_TRUE(r.iso_K2L2.pass);
    EXPECT_EQ(r.iso_K2L2.rank, 9u);
    EXPECT_FALSE(r.injective_K2L2.applicable);
    EXPECT_EQ(r.kernel_KL2.rows, 5u);
    EXPECT_EQ(r.kernel_KL2.cols, 4u);
    EXPECT_EQ(r.kernel_KL2.kernel_dim, 1u);
    EXPECT_TRUE(r.kernel_KL2.pass);

    auto s = duality_report(curve(2, 3, 1));
    EXPECT_FALSE(s.iso_K2L2.applicable);
    EXPECT_TRUE(s.injective_K2L2.applicable);
    EXPECT_TRUE(s.injective_K2L2.pass);
}
