#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <packetlab/errors.hpp>
#include <packetlab/lattice.hpp>

#include "corpus.hpp"

using namespace packetlab;

namespace {

// Leibniz expansion, exponential but independent of the elimination code.
std::int64_t leibniz(const IntMatrix& m) {
  const int n = m.dim();
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::int64_t total = 0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    std::int64_t term = inversions % 2 ? -1 : 1;
    for (int i = 0; i < n; ++i) term *= m(i, perm[static_cast<std::size_t>(i)]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// v ∈ MZ^d by a floating solve and rounding test.
bool in_lattice_float(const IntMatrix& m, const IntVec& v) {
  const Eigen::MatrixXd mr = m.to_real();
  Eigen::VectorXd vr(m.dim());
  for (int i = 0; i < m.dim(); ++i) vr[i] = static_cast<double>(v[static_cast<std::size_t>(i)]);
  const Eigen::VectorXd x = mr.fullPivLu().solve(vr);
  for (int i = 0; i < m.dim(); ++i)
    if (std::abs(x[i] - std::round(x[i])) > 1e-9) return false;
  return true;
}

IntVec sub(const IntVec& x, const IntVec& y) {
  IntVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

IntMatrix power(const IntMatrix& m, int j) {
  IntMatrix out = IntMatrix::identity(m.dim());
  for (int i = 0; i < j; ++i) out = out * m;
  return out;
}

const std::vector<std::vector<std::vector<std::int64_t>>> kMatrices = {
    {{2}}, {{3}}, {{-2}}, {{1, 1}, {1, -1}}, {{1, -1}, {1, 1}}, {{2, 0}, {0, 2}},
    {{1, -1}, {1, 2}}, {{0, 1}, {2, 0}}, {{2, 1}, {0, 2}}, {{0, 0, 2}, {1, 0, 0}, {0, 1, 0}},
};

}  // namespace

TEST_CASE("determinant and adjugate agree with the Leibniz expansion") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-9, 9);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 4;
    IntMatrix m(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = entry(rng);
    const std::int64_t det = determinant(m);
    CHECK(det == leibniz(m));
    const IntMatrix prod = adjugate(m) * m;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(prod(i, j) == (i == j ? det : 0));
  }
}

TEST_CASE("validate_dilation rejects bad matrices with the right code") {
  auto code_of = [](const std::vector<std::vector<std::int64_t>>& rows) {
    try {
      validate_dilation(rows);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Usage;
  };
  CHECK(code_of({{1, 2}}) == ErrorCode::NonSquare);
  CHECK(code_of({}) == ErrorCode::NonSquare);
  CHECK(code_of({{1, 0}, {0, 1}}) == ErrorCode::SingularOrUnit);
  CHECK(code_of({{1, 2}, {2, 4}}) == ErrorCode::SingularOrUnit);
  CHECK(code_of({{2, 0}, {0, 1}}) == ErrorCode::NotExpanding);
  CHECK(code_of({{1, 1}, {0, 2}}) == ErrorCode::NotExpanding);
  CHECK(code_of({{0, 3}, {1, 0}}) == ErrorCode::Usage);  // eigenvalues ±√3
  CHECK(validate_dilation({{1, 1}, {1, -1}}).det() == -2);
}

TEST_CASE("digit sets have one element per coset and start at zero") {
  for (const auto& rows : kMatrices) {
    const DilationMatrix m = validate_dilation(rows);
    for (bool transpose : {false, true}) {
      const DigitSet ds = digit_set(m, transpose);
      const IntMatrix& mm = transpose ? m.b() : m.a();
      REQUIRE(ds.size() == static_cast<std::size_t>(m.det_abs()));
      CHECK(std::all_of(ds[0].begin(), ds[0].end(), [](std::int64_t x) { return x == 0; }));
      for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = i + 1; j < ds.size(); ++j) CHECK_FALSE(in_lattice_float(mm, sub(ds[i], ds[j])));
      CHECK(is_digit_set(m, transpose, ds.digits));
    }
  }
}

TEST_CASE("documented digit sets") {
  CHECK(digit_set(validate_dilation({{1, 1}, {1, -1}}), false).digits == std::vector<IntVec>{{0, 0}, {1, 0}});
  CHECK(digit_set(validate_dilation({{2}}), false).digits == std::vector<IntVec>{{0}, {1}});
  CHECK(digit_set(validate_dilation({{3}}), true).digits == std::vector<IntVec>{{0}, {1}, {2}});
  CHECK(digit_set(validate_dilation({{2, 0}, {0, 2}}), false).digits ==
        std::vector<IntVec>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
}

TEST_CASE("make_digit_set validation") {
  const DilationMatrix m = validate_dilation({{2}});
  CHECK(make_digit_set(m, false, {{0}, {3}}).digits == std::vector<IntVec>{{0}, {3}});
  CHECK_THROWS_AS(make_digit_set(m, false, {{0}, {2}}), Error);
  CHECK_THROWS_AS(make_digit_set(m, false, {{1}, {0}}), Error);
  CHECK_THROWS_AS(make_digit_set(m, false, {{0}}), Error);
  CHECK_FALSE(is_digit_set(m, false, {{0}, {1}, {3}}));
}

TEST_CASE("in_image and digit_of match the floating oracle") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coord(-40, 40);
  for (const auto& rows : kMatrices) {
    const DilationMatrix m = validate_dilation(rows);
    const DigitSet ds = digit_set(m, false);
    for (int trial = 0; trial < 200; ++trial) {
      IntVec k(static_cast<std::size_t>(m.dim()));
      for (auto& x : k) x = coord(rng);
      CHECK(m.in_image(k) == in_lattice_float(m.a(), k));
      CHECK(m.in_image(k, true) == in_lattice_float(m.b(), k));
      const DigitDecomposition dec = digit_of(k, ds);
      const IntVec back = m.apply(dec.quotient);
      for (std::size_t i = 0; i < k.size(); ++i) CHECK(back[i] + ds[dec.index][i] == k[i]);
    }
  }
}

TEST_CASE("representatives enumerate Z^d/A^jZ^d and reduce_mod inverts them") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> coord(-60, 60);
  for (const auto& rows : kMatrices) {
    const DilationMatrix m = validate_dilation(rows);
    const DigitSet ds = digit_set(m, false);
    for (int j = 0; j <= 3; ++j) {
      const auto reps = enumerate_representatives(ds, j);
      const IntMatrix aj = power(m.a(), j);
      std::size_t expected = 1;
      for (int i = 0; i < j; ++i) expected *= static_cast<std::size_t>(m.det_abs());
      REQUIRE(reps.size() == expected);
      CHECK(quotient_size(ds, j) == expected);
      for (std::size_t t = 0; t < reps.size(); ++t) {
        CHECK(reduce_mod(reps[t], j, ds) == t);
        for (std::size_t u = t + 1; u < reps.size() && u < t + 8; ++u) CHECK_FALSE(in_lattice_float(aj, sub(reps[t], reps[u])));
      }
      for (int trial = 0; trial < 50; ++trial) {
        IntVec k(static_cast<std::size_t>(m.dim()));
        for (auto& x : k) x = coord(rng);
        CHECK(in_lattice_float(aj, sub(k, reps[reduce_mod(k, j, ds)])));
      }
    }
  }
}

TEST_CASE("one-dimensional dyadic representatives are the integers in order") {
  const DigitSet ds = digit_set(validate_dilation({{2}}), false);
  const auto reps = enumerate_representatives(ds, 4);
  for (std::size_t t = 0; t < reps.size(); ++t) CHECK(reps[t] == IntVec{static_cast<std::int64_t>(t)});
}

TEST_CASE("size limit") {
  const DigitSet ds = digit_set(validate_dilation({{2}}), false);
  CHECK_THROWS_AS(quotient_size(ds, 11, 1024), Error);
  CHECK(quotient_size(ds, 10, 1024) == 1024);
}

TEST_CASE("character sums give a on the zero coset and vanish elsewhere") {
  for (const auto& rows : kMatrices) {
    const DilationMatrix m = validate_dilation(rows);
    const DigitSet ka = digit_set(m, false);
    const DigitSet kb = digit_set(m, true);
    for (std::size_t i = 0; i < ka.size(); ++i) {
      const auto s = character_sum(ka[i], kb);
      CHECK(std::abs(s - Complex(i == 0 ? static_cast<double>(m.det_abs()) : 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("dual pairing numerator matches the rational value") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coord(-7, 7);
  for (const auto& rows : kMatrices) {
    const DilationMatrix m = validate_dilation(rows);
    const Eigen::MatrixXd binv = m.b().to_real().inverse();
    for (int trial = 0; trial < 50; ++trial) {
      IntVec mu(static_cast<std::size_t>(m.dim())), nu(mu.size());
      for (auto& x : mu) x = coord(rng);
      for (auto& x : nu) x = coord(rng);
      Eigen::VectorXd mr(m.dim()), nr(m.dim());
      for (int i = 0; i < m.dim(); ++i) {
        mr[i] = static_cast<double>(mu[static_cast<std::size_t>(i)]);
        nr[i] = static_cast<double>(nu[static_cast<std::size_t>(i)]);
      }
      const double value = (binv * mr).dot(nr) * static_cast<double>(m.det_abs());
      const double frac = value - std::floor(value / static_cast<double>(m.det_abs())) * static_cast<double>(m.det_abs());
      const auto num = m.dual_pairing_numerator(mu, nu);
      CHECK(num >= 0);
      CHECK(num < m.det_abs());
      const double diff = std::abs(frac - static_cast<double>(num));
      CHECK(std::min(diff, static_cast<double>(m.det_abs()) - diff) < 1e-8);
    }
  }
}

TEST_CASE("unit roots are exact at quarter turns") {
  CHECK(unit_root(0, 2) == Complex(1, 0));
  CHECK(unit_root(1, 2) == Complex(-1, 0));
  CHECK(unit_root(1, 4) == Complex(0, -1));
  CHECK(unit_root(-1, 4) == Complex(0, 1));
  CHECK(std::abs(unit_root(1, 3) - std::polar(1.0, -2.0 * M_PI / 3.0)) < 1e-15);
}

TEST_CASE("translated digit sets remain digit sets") {
  for (const auto& rows : kMatrices) {
    const DilationMatrix m = validate_dilation(rows);
    for (bool transpose : {false, true}) {
      const DigitSet ds = digit_set(m, transpose);
      for (const auto& mu : ds.digits) {
        std::vector<IntVec> shifted;
        for (const auto& k : ds.digits) shifted.push_back(sub(k, mu));
        CHECK(is_digit_set(m, transpose, shifted));
      }
    }
  }
}

TEST_CASE("documented character sums") {
  const DigitSet kb = digit_set(validate_dilation({{2}}), true);
  CHECK(std::abs(character_sum({0}, kb) - Complex(2.0)) < 1e-15);
  CHECK(std::abs(character_sum({1}, kb)) < 1e-15);
  CHECK(std::abs(character_sum({1, 0}, digit_set(validate_dilation({{1, 1}, {1, -1}}), true))) < 1e-15);
}

TEST_CASE("digit_of round trip over a box") {
  for (const auto& rows : kMatrices) {
    const DilationMatrix m = validate_dilation(rows);
    if (m.dim() != 2) continue;
    for (bool transpose : {false, true}) {
      const DigitSet ds = digit_set(m, transpose);
      for (std::int64_t x = -12; x <= 12; ++x)
        for (std::int64_t y = -12; y <= 12; ++y) {
          const DigitDecomposition dec = digit_of({x, y}, ds);
          const IntVec back = m.apply(dec.quotient, transpose);
          CHECK(back[0] + ds[dec.index][0] == x);
          CHECK(back[1] + ds[dec.index][1] == y);
        }
    }
  }
}
