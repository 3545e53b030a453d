#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "flipchain/fourier.hpp"

using namespace flipchain;
using cd = std::complex<double>;

namespace {
cvec random_vec(int len, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  cvec v(len);
  for (auto& x : v) x = cd(nd(rng), nd(rng));
  return v;
}
}  // namespace

TEST(Dft, ConstantIsDelta) {
  const int n = 9;
  const cvec f(n + 1, 1.0);
  const cvec fh = dft_forward(f, n);
  EXPECT_NEAR(std::abs(fh[0] - cd(n + 1)), 0.0, 1e-12);
  for (int j = 1; j <= n; ++j) EXPECT_NEAR(std::abs(fh[j]), 0.0, 1e-12);
}

TEST(Dft, MatchesDirectSum) {
  std::mt19937_64 rng(1);
  const int N = 13;
  const cvec f = random_vec(N, rng);
  const cvec fh = dft_forward(f);
  for (int j = 0; j < N; ++j) {
    cd s = 0;
    for (int x = 0; x < N; ++x) s += f[x] * std::exp(cd(0, -2 * std::numbers::pi * x * j / N));
    EXPECT_NEAR(std::abs(s - fh[j]), 0.0, 1e-11);
  }
}

TEST(Dft, RoundTripAndParseval) {
  std::mt19937_64 rng(2);
  for (int n : {2, 3, 7, 16, 100, 255, 1023, 1024}) {
    const cvec f = random_vec(n + 1, rng), g = random_vec(n + 1, rng);
    const cvec fh = dft_forward(f, n), gh = dft_forward(g, n);
    const cvec back = dft_inverse(fh, n);
    double err = 0, scale = 0;
    for (int x = 0; x <= n; ++x) {
      err = std::max(err, std::abs(back[x] - f[x]));
      scale = std::max(scale, std::abs(f[x]));
    }
    EXPECT_LE(err, 1e-12 * scale * std::log2(n + 2));
    cd lhs = 0, rhs = 0;
    for (int k = 0; k <= n; ++k) lhs += fh[k] * std::conj(gh[k]);
    lhs /= double(n + 1);
    for (int x = 0; x <= n; ++x) rhs += f[x] * std::conj(g[x]);
    double nf = 0, ng = 0;
    for (int x = 0; x <= n; ++x) {
      nf += std::norm(f[x]);
      ng += std::norm(g[x]);
    }
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::sqrt(nf * ng)) << "n = " << n;
  }
}

TEST(Dft, RealInputIsHermitian) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  const int n = 10;
  cvec f(n + 1);
  for (auto& v : f) v = nd(rng);
  const cvec fh = dft_forward(f, n);
  for (int j = 0; j <= n; ++j) EXPECT_NEAR(std::abs(fh[(n + 1 - j) % (n + 1)] - std::conj(fh[j])), 0.0, 1e-12);
}

TEST(Dft, LengthMismatchThrows) {
  EXPECT_THROW(dft_forward(cvec(5), 5), std::invalid_argument);
  EXPECT_THROW(dft_inverse(cvec(7), 5), std::invalid_argument);
}

TEST(Dft2, MatchesDirectSum) {
  std::mt19937_64 rng(4);
  const int N = 5;
  const cvec f = random_vec(N * N, rng);
  const cvec F = dft2_forward(f, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      cd s = 0;
      for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) s += f[x * N + y] * std::exp(cd(0, -2 * std::numbers::pi * (x * a + y * b) / N));
      EXPECT_NEAR(std::abs(s - F[a * N + b]), 0.0, 1e-11);
    }
}
