#include "l1rates/l1rates.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace l1rates;

namespace {

Matrix orthogonal(Index n, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(n, n, seed));
  return qr.householderQ() * Matrix::Identity(n, n);
}

Matrix diag_inverse(Index n) {
  Matrix a = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) a(k, k) = 1.0 / static_cast<double>(k + 1);
  return a;
}

}  // namespace

TEST(FindCertificate, OrthogonalOperator) {
  const Matrix q = orthogonal(5, 1);
  const auto op = ForwardOperator::dense(q);
  const CertificateReport r = find_certificate(op, SignPattern({0}, {1}), 0.0);
  EXPECT_LE((r.eta - q.col(0)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(r.eta_norm, 1.0, 1e-12);
  EXPECT_LE(r.off_support_sup, 1e-12);
  EXPECT_TRUE(find_certificate(op, SignPattern({0}, {1}), 1e-10).passed);
}

TEST(FindCertificate, Identity) {
  const auto op = ForwardOperator::dense(Matrix::Identity(3, 3));
  const CertificateReport r = find_certificate(op, SignPattern({0, 1}, {1, -1}), 0.5);
  EXPECT_EQ(r.eta, (Vector(3) << 1, -1, 0).finished());
  EXPECT_DOUBLE_EQ(r.eta_norm, std::sqrt(2.0));
  EXPECT_TRUE(r.passed);
}

TEST(FindCertificate, RandomMatchesPseudoinverseOracle) {
  const Matrix a = oracle::random_matrix(8, 5, 21);
  const auto op = ForwardOperator::dense(a);
  const SignPattern xi({1, 3}, {-1, 1});
  const CertificateReport r = find_certificate(op, xi, 0.99);
  const Vector eta = oracle::min_norm_eta(a, {1, 3}, xi.compressed());
  Vector image = a.transpose() * eta;
  image[1] = image[3] = 0.0;
  EXPECT_LE(r.on_support_residual, 1e-10);
  EXPECT_NEAR(r.off_support_sup, image.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(r.eta_norm, eta.norm(), 1e-10);
  EXPECT_EQ(r.passed, r.on_support_residual <= r.tol_eq && r.off_support_sup <= 0.99);
}

TEST(FindCertificate, SingularSupportAndNonEuclidean) {
  Matrix a = oracle::random_matrix(6, 4, 2);
  a.col(2) = a.col(0);
  const auto op = ForwardOperator::dense_any_rank(a);
  EXPECT_THROW(find_certificate(op, SignPattern({0, 2}, {1, 1}), 0.5), SingularSupport);
  EXPECT_THROW(find_certificate(ForwardOperator::lq_embedding(3, 3.0), SignPattern({0}, {1}), 0.5),
               std::invalid_argument);
  EXPECT_THROW(find_certificate(ForwardOperator::dense(Matrix::Identity(2, 2)), SignPattern({0}, {1}), 1.0),
               std::invalid_argument);
}

TEST(BruteForceGamma, EmbeddingAndIdentity) {
  const auto emb = ForwardOperator::lq_embedding(12, 2.0);
  EXPECT_NEAR(brute_force_gamma(emb, 4, IndexSetFamily::all_subsets).gamma.value(), 2.0, 1e-12);
  const auto id = ForwardOperator::dense(Matrix::Identity(6, 6));
  EXPECT_NEAR(brute_force_gamma(id, 1, IndexSetFamily::all_subsets).gamma.value(), 1.0, 1e-14);
}

TEST(BruteForceGamma, MatchesSvdOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix a = oracle::random_matrix(10, 6, 100 + seed);
    const auto op = ForwardOperator::dense(a);
    for (int n = 1; n <= 3; ++n) {
      const double g = brute_force_gamma(op, n, IndexSetFamily::all_subsets).gamma.value();
      EXPECT_NEAR(g, oracle::gamma_svd(a, n), 1e-9 * g);
    }
  }
}

TEST(BruteForceGamma, SamplingNeverBeatsItAndRefinementReachesIt) {
  const Matrix a = oracle::random_matrix(10, 6, 77);
  const auto op = ForwardOperator::dense(a);
  const BruteForceGamma bf = brute_force_gamma(op, 2, IndexSetFamily::all_subsets);
  const double gamma = bf.gamma.value();
  const InjectivityReport rep = check_restricted_injectivity(op, 2, gamma, 100000, 3);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_GE(rep.worst_ratio, (1.0 - 1e-12) / gamma);

  // Refine on the maximizing support: minimize ||A_M x||_2 / ||x||_1 over the sign orthant of
  // the maximizing xi, where the minimizer is x = G^{-1} xi (up to scale).
  const auto& m = bf.argmax.support();
  const Matrix am = oracle::columns(a, m);
  const Vector x = (am.transpose() * am).ldlt().solve(bf.argmax.compressed());
  const double ratio = (am * x).norm() / x.lpNorm<1>();
  EXPECT_LE(ratio, (1.0 + 1e-3) / gamma);
  EXPECT_GE(ratio, (1.0 - 1e-9) / gamma);
}

TEST(BruteForceGamma, SingularSupportGivesInfiniteSentinel) {
  Matrix a = oracle::random_matrix(6, 4, 9);
  a.col(3) = 2.0 * a.col(1);
  const auto op = ForwardOperator::dense_any_rank(a);
  const BruteForceGamma r = brute_force_gamma(op, 2, IndexSetFamily::all_subsets);
  EXPECT_TRUE(r.gamma.is_infinite());
  EXPECT_EQ(r.gamma.singular_support(), (std::vector<Index>{1, 3}));
  EXPECT_THROW(r.gamma.value(), SingularSupport);
}

TEST(BruteForceGamma, BudgetGuard) {
  const auto op = ForwardOperator::lq_embedding(40, 2.0);
  EXPECT_THROW(brute_force_gamma(op, 10, IndexSetFamily::all_subsets), BudgetExceeded);
  EXPECT_NO_THROW(brute_force_gamma(op, 10, IndexSetFamily::prefix));
}

TEST(BruteForceGamma, TieBreakIsLexicographicallySmallest) {
  const auto op = ForwardOperator::dense(Matrix::Identity(4, 4));
  const BruteForceGamma r = brute_force_gamma(op, 2, IndexSetFamily::all_subsets);
  EXPECT_EQ(r.argmax.support(), (std::vector<Index>{0, 1}));
  EXPECT_EQ(r.argmax.signs(), (std::vector<int>{-1, -1}));
  EXPECT_EQ(r.patterns, 6u * 4u);
}

TEST(BruteForceGamma, ScalingCovariance) {
  const auto op = ForwardOperator::dense(oracle::random_matrix(9, 5, 31));
  for (double s : {0.1, 3.0}) {
    const auto sop = op.scaled(s);
    for (Index n = 1; n <= 3; ++n) {
      const double g = brute_force_gamma(op, n, IndexSetFamily::all_subsets).gamma.value();
      EXPECT_NEAR(brute_force_gamma(sop, n, IndexSetFamily::all_subsets).gamma.value(), g / s, 1e-10 * g / s);
    }
  }
}

TEST(BruteForceGamma, MonotoneInN) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto op = ForwardOperator::dense(oracle::random_matrix(9, 6, 500 + seed));
    for (auto fam : {IndexSetFamily::prefix, IndexSetFamily::all_subsets}) {
      double prev = 0.0;
      for (Index n = 1; n <= 6; ++n) {
        const double g = brute_force_gamma(op, n, fam).gamma.value();
        EXPECT_GE(g, prev);
        prev = g;
      }
    }
  }
}

TEST(BruteForceGamma, DiagonalDecayForcesLargeGammaOne) {
  for (Index n : {5, 10, 20}) {
    const auto op = ForwardOperator::dense(diag_inverse(n));
    const double g1 = brute_force_gamma(op, 1, IndexSetFamily::all_subsets).gamma.value();
    EXPECT_GE(g1, 0.9 / op.min_column_norm());
    EXPECT_GE(g1, 0.9 * static_cast<double>(n));
  }
}

TEST(Injectivity, ExhaustiveMatchesCertificateRoute) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto op = ForwardOperator::dense(oracle::random_matrix(8, 5, 900 + seed));
    for (Index n = 1; n <= 3; ++n) {
      const double a = brute_force_gamma(op, n, IndexSetFamily::all_subsets).gamma.value();
      const double b = injectivity_gamma_exhaustive(op, n).value();
      EXPECT_NEAR(a, b, 1e-9 * a);
    }
  }
}

TEST(Injectivity, EmbeddingNoViolations) {
  const auto op = ForwardOperator::lq_embedding(12, 2.0);
  const InjectivityReport r = check_restricted_injectivity(op, 4, 2.0, 10000, 1);
  EXPECT_EQ(r.samples, 10000);
  EXPECT_EQ(r.violations, 0);
}

TEST(Injectivity, WienerRestrictionNazarovConstant) {
  const auto op = ForwardOperator::wiener_restriction({{0.0, 0.5}}, 4096, -20, 20);
  const InjectivityReport r = check_restricted_injectivity(op, 3, 784.0, 1000, 2);
  EXPECT_EQ(r.violations, 0);
}

TEST(Injectivity, LevelOneUsesSmallestColumn) {
  for (const auto& op : {ForwardOperator::dense(oracle::random_matrix(7, 4, 12)),
                         ForwardOperator::dense(oracle::random_matrix(7, 4, 13), YNorm::lq, 4.0)}) {
    const double gamma = 1.0 / op.min_column_norm();
    const InjectivityReport r = check_restricted_injectivity(op, 1, gamma, 2000, 5);
    EXPECT_EQ(r.violations, 0);
    // A smaller gamma must be caught on the weakest column.
    EXPECT_GT(check_restricted_injectivity(op, 1, gamma * 0.99, 2000, 5).violations, 0);
  }
}

TEST(SmoothBasis, IdentityAndDiagonal) {
  const auto id = smooth_basis_check(ForwardOperator::dense(Matrix::Identity(6, 6)), 6);
  ASSERT_TRUE(id.ok);
  for (Index n = 1; n <= 6; ++n) EXPECT_NEAR(id.table.gamma(n), static_cast<double>(n), 1e-12);

  const auto dg = smooth_basis_check(ForwardOperator::dense(diag_inverse(7)), 7);
  ASSERT_TRUE(dg.ok);
  for (Index k = 0; k < 7; ++k)
    EXPECT_LE((dg.f[static_cast<std::size_t>(k)] - static_cast<double>(k + 1) * Vector::Unit(7, k)).norm(), 1e-12);
  for (Index n = 1; n <= 7; ++n) EXPECT_NEAR(dg.table.gamma(n), n * (n + 1) / 2.0, 1e-11);
}

TEST(SmoothBasis, RankObstruction) {
  Matrix a(2, 3);
  a << 1, 0, 1, 0, 1, 1;
  const auto r = smooth_basis_check(ForwardOperator::dense_any_rank(a), 3);
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.failing_position.has_value());
  EXPECT_LE(*r.failing_position, 2);
}

TEST(SmoothBasis, RangeCertificateEquivalence) {
  // c = 0 certificates (up to rounding) exist for every xi exactly when every e^(k) is in the range of A*.
  const auto square = ForwardOperator::dense(oracle::random_matrix(5, 5, 41));
  Matrix wide_a = oracle::random_matrix(3, 5, 42);
  const auto wide = ForwardOperator::dense_any_rank(wide_a);
  for (const auto* op : {&square, &wide}) {
    const bool smooth = smooth_basis_check(*op, 5).ok;
    bool all = true;
    for (Index k = 0; k < 5; ++k)
      for (int s : {-1, 1}) all = all && find_range_certificate(*op, SignPattern({k}, {s}), 1e-12).passed;
    for (std::uint64_t code = 0; code < 32; ++code) {
      const Vector xi = detail::sign_vector(5, code);
      all = all && find_range_certificate(*op, SignPattern::of(xi), 1e-12).passed;
    }
    EXPECT_EQ(smooth, all);
  }
}

TEST(NonsmoothBasis, IdentityAndOrthogonal) {
  const auto id = nonsmooth_basis_check(ForwardOperator::dense(Matrix::Identity(6, 6)), 3);
  ASSERT_TRUE(id.ok);
  EXPECT_NEAR(id.c_est, 0.0, 1e-14);
  EXPECT_NEAR(id.gamma, 3.0, 1e-12);
  const auto orth = nonsmooth_basis_check(ForwardOperator::dense(orthogonal(6, 3)), 4);
  ASSERT_TRUE(orth.ok);
  EXPECT_LE(orth.c_est, 1e-12);
}

TEST(NonsmoothBasis, CorrelatedColumnsMatchDirectEvaluation) {
  Matrix a = oracle::random_matrix(8, 12, 55);
  for (Index k = 1; k < 12; ++k) a.col(k) = 0.6 * a.col(k - 1) + 0.4 * a.col(k);
  const auto op = ForwardOperator::dense_any_rank(a);
  for (Index n = 1; n <= 4; ++n) {
    const auto r = nonsmooth_basis_check(op, n);
    double c = 0.0;
    for (Index l = n; l < 12; ++l) {
      double s = 0.0;
      for (Index k = 0; k < n; ++k) s += std::abs(a.col(l).dot(r.f[static_cast<std::size_t>(k)]));
      c = std::max(c, s);
    }
    EXPECT_NEAR(r.c_est, c, 1e-10);
    EXPECT_EQ(r.ok, c < 1.0);
    // Interpolation holds on the first n positions.
    for (Index k = 0; k < n; ++k)
      for (Index l = 0; l < n; ++l)
        EXPECT_NEAR(a.col(l).dot(r.f[static_cast<std::size_t>(k)]), k == l ? 1.0 : 0.0, 1e-9);
  }
}

TEST(Assemble, MethodDispatch) {
  const GammaTable emb = assemble_assumption(ForwardOperator::lq_embedding(10, 4.0), IndexSetFamily::all_subsets, 5, 0.5);
  EXPECT_EQ(emb.method, GammaMethod::analytic);
  EXPECT_EQ(emb.c_used, 0.0);
  for (Index n = 1; n <= 5; ++n) EXPECT_NEAR(emb.gamma(n), std::pow(n, 0.75), 1e-12);

  const GammaTable id = assemble_assumption(ForwardOperator::dense(Matrix::Identity(5, 5)), IndexSetFamily::prefix, 5, 0.5);
  EXPECT_EQ(id.method, GammaMethod::smooth_basis);

  const auto op = ForwardOperator::dense(oracle::random_matrix(40, 5, 8));
  const GammaTable bf = assemble_assumption(op, IndexSetFamily::all_subsets, 3, 0.95);
  EXPECT_EQ(bf.method, GammaMethod::brute_force);
  for (Index n = 1; n <= 3; ++n)
    EXPECT_NEAR(bf.gamma(n), injectivity_gamma_exhaustive(op, n).value(), 1e-9 * bf.gamma(n));
  EXPECT_NEAR(bf.c_used, off_support_bound(op, 3, IndexSetFamily::all_subsets).c, 1e-15);
}

TEST(Assemble, FailuresAreReported) {
  EXPECT_THROW(assemble_assumption(ForwardOperator::wiener_restriction({{0, 0.5}}, 256, -5, 5),
                                   IndexSetFamily::all_subsets, 2, 0.5),
               CertificationError);
  AssembleOptions forced;
  forced.method = GammaMethod::analytic;
  EXPECT_THROW(assemble_assumption(ForwardOperator::dense(Matrix::Identity(3, 3)), IndexSetFamily::prefix, 2, 0.5, forced),
               CertificationError);
  EXPECT_THROW(assemble_assumption(ForwardOperator::lq_embedding(3, 2.0), IndexSetFamily::prefix, 4, 0.5),
               std::invalid_argument);
}

TEST(Analytic, EmbeddingAndNazarovFormulas) {
  EXPECT_DOUBLE_EQ(embedding_gamma(2.0, 9), 3.0);
  EXPECT_DOUBLE_EQ(embedding_gamma(kInfinity, 7), 7.0);
  EXPECT_DOUBLE_EQ(nazarov_gamma(0.5, 3), 784.0);
  EXPECT_DOUBLE_EQ(nazarov_gamma(0.25, 1), 1.0);
}
