#include <gtest/gtest.h>

#include "oracle.hpp"
#include "schottky/numlin.hpp"
#include "schottky/parallel.hpp"
#include "schottky/rng.hpp"

using namespace schottky;

namespace {

ComplexMatrix e(int n, int i, int j) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

ComplexMatrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

SubspaceBasis span_e(int n, std::initializer_list<int> idx) {
  ComplexMatrix b = ComplexMatrix::Zero(n, static_cast<Eigen::Index>(idx.size()));
  int c = 0;
  for (int i : idx) b(i, c++) = 1.0;
  return span_of(b);
}

}  // namespace

TEST(Rank, IdentityZeroAndTinySingularValue) {
  EXPECT_EQ(rank_with_tol(ComplexMatrix::Identity(3, 3)), 3);
  EXPECT_EQ(rank_with_tol(ComplexMatrix::Zero(2, 4)), 0);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-15;
  EXPECT_EQ(rank_with_tol(d), 1);
}

TEST(Rank, AmbiguousBandThrows) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2e-9;  // within a factor 10 of the 1e-9 cutoff
  try {
    rank_with_tol(d);
    FAIL() << "expected RankAmbiguous";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::RankAmbiguous);
  }
}

TEST(Rank, RejectsNonFinite) {
  ComplexMatrix d = ComplexMatrix::Identity(2, 2);
  d(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(rank_with_tol(d), Error);
}

TEST(IntersectDim, SpotValues) {
  EXPECT_EQ(intersect_dim(span_e(4, {0, 1}), span_e(4, {2, 3})), 0);
  EXPECT_EQ(intersect_dim(span_e(4, {0, 1}), span_e(4, {1, 2})), 1);
  ComplexMatrix v = ComplexMatrix::Zero(2, 1);
  v(0, 0) = 1.0;
  v(1, 0) = 1.0;
  EXPECT_EQ(intersect_dim(span_e(2, {0}), span_of(v)), 0);
}

TEST(IntersectDim, SymmetricAndBounded) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_matrix(6, rng).leftCols(3);
    ComplexMatrix b = random_matrix(6, rng).leftCols(3);
    b.col(0) = a.col(0) + a.col(1);  // forces a common line
    const auto sa = span_of(a), sb = span_of(b);
    const int d = intersect_dim(sa, sb);
    EXPECT_EQ(d, intersect_dim(sb, sa));
    EXPECT_EQ(d, 1);
  }
}

TEST(SpanOf, OrthonormalOutput) {
  std::mt19937_64 rng(1);
  const ComplexMatrix a = random_matrix(5, rng).leftCols(3);
  const auto s = span_of(a);
  EXPECT_EQ(s.dim(), 3);
  EXPECT_LT(orthonormality_residual(s), 1e-12);
}

TEST(LieClosure, Sl2FromRaisingAndLowering) {
  const auto b = lie_closure({e(2, 0, 1), e(2, 1, 0)});
  EXPECT_EQ(b.size(), 3u);
  // [E12, E21] = E11 - E22 is in the span
  ComplexMatrix h = e(2, 0, 0) - e(2, 1, 1);
  EXPECT_LT(span_residual(b, h), 1e-12);
}

TEST(LieClosure, AbelianSingleton) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  EXPECT_EQ(lie_closure({d}).size(), 1u);
}

// Two tori with eigenspaces of dimension two. The two pairs of 2-planes
// split C^4 into two invariant 2-planes (generic position), so the closure
// lies in sl2 + sl2; with a third conjugate it fills sl4.
TEST(LieClosure, ConjugateToriMatchQuadOracle) {
  std::mt19937_64 rng(17);
  ComplexMatrix xi = ComplexMatrix::Zero(4, 4);
  xi.diagonal() << -1.0, -1.0, 1.0, 1.0;
  for (int t = 0; t < 5; ++t) {
    const ComplexMatrix f = random_matrix(4, rng), f2 = random_matrix(4, rng);
    const ComplexMatrix a = f * xi * f.inverse(), b = f2 * xi * f2.inverse();
    const auto two = lie_closure({xi, a});
    const auto three = lie_closure({xi, a, b});
    // the oracle conjugates in quad precision so its inputs are exact tori
    const auto qx = oracle::from(xi);
    auto conj = [&](const ComplexMatrix& m) {
      const auto q = oracle::from(m);
      return oracle::mul(oracle::mul(q, qx), oracle::inverse(q));
    };
    EXPECT_EQ(static_cast<int>(two.size()), oracle::lie_span_dim({qx, conj(f)}, 7));
    EXPECT_EQ(two.size(), 6u);
    EXPECT_EQ(static_cast<int>(three.size()), oracle::lie_span_dim({qx, conj(f), conj(f2)}, 5));
    EXPECT_EQ(three.size(), 15u);
  }
}

TEST(LieClosure, BracketClosed) {
  std::mt19937_64 rng(3);
  ComplexMatrix xi = ComplexMatrix::Zero(4, 4);
  xi.diagonal() << -1.0, -1.0, 1.0, 1.0;
  const ComplexMatrix f = random_matrix(4, rng);
  const auto b = lie_closure({xi, f * xi * f.inverse()});
  for (const auto& x : b)
    for (const auto& y : b) EXPECT_LT(span_residual(b, bracket(x, y)), 1e-8);
}

TEST(MatrixLog, SpotValues) {
  EXPECT_LT(matrix_log_semisimple(ComplexMatrix::Identity(3, 3)).norm(), 1e-14);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.5;
  const ComplexMatrix l = matrix_log_semisimple(d);
  EXPECT_NEAR(l(0, 0).real(), std::log(2.0), 1e-14);
  EXPECT_NEAR(l(1, 1).real(), -std::log(2.0), 1e-14);
  ComplexMatrix j = ComplexMatrix::Identity(2, 2);
  j(0, 1) = 1.0;
  try {
    matrix_log_semisimple(j);
    FAIL() << "Jordan block accepted";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NotDiagonalizable);
  }
}

TEST(MatrixLog, BranchCut) {
  ComplexMatrix d = ComplexMatrix::Identity(2, 2);
  d(0, 0) = -2.0;
  try {
    matrix_log_semisimple(d);
    FAIL() << "negative eigenvalue accepted";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::BranchCut);
  }
}

TEST(MatrixJson, RoundTripIsExact) {
  std::mt19937_64 rng(9);
  const ComplexMatrix m = random_matrix(3, rng);
  const ComplexMatrix back = matrix_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ((m - back).norm(), 0.0);
}

TEST(Tolerances, Validation) {
  Tolerances t;
  t.rank_rel = 1e-20;
  EXPECT_THROW(t.validate(), Error);
}

TEST(Parallel, DeterministicAcrossThreadCounts) {
  auto f = [](std::size_t i) {
    auto rng = stream_for(42, i, 7);
    return std::uniform_real_distribution<double>(0, 1)(rng);
  };
  const auto a = parallel_map<double>(1000, f);
  setenv("SCHOTTKY_THREADS", "3", 1);
  const auto b = parallel_map<double>(1000, f);
  unsetenv("SCHOTTKY_THREADS");
  EXPECT_EQ(a, b);
}

TEST(Parallel, RethrowsLowestIndex) {
  try {
    parallel_map<int>(50, [](std::size_t i) -> int {
      if (i == 7 || i == 30) fail(ErrorCode::Io, "item " + std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const Error& err) {
    EXPECT_STREQ(err.what(), "item 7");
  }
}
