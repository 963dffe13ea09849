#include "packetlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "packetlab/errors.hpp"

namespace packetlab {

namespace {

__extension__ using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::Overflow, "integer result exceeds 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t floor_mod(std::int64_t x, std::int64_t m) {
  std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

// Residues of adj(M)·v modulo |det M|; two vectors share a coset of MZ^d
// iff their keys agree.
IntVec coset_key(const IntMatrix& adj, std::int64_t det_abs, const IntVec& v) {
  IntVec w = adj.apply(v);
  for (auto& x : w) x = floor_mod(x, det_abs);
  return w;
}

}  // namespace

IntMatrix IntMatrix::identity(int dim) {
  IntMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntVec IntMatrix::apply(const IntVec& v) const {
  IntVec out(static_cast<std::size_t>(dim_), 0);
  for (int i = 0; i < dim_; ++i) {
    i128 acc = 0;
    for (int j = 0; j < dim_; ++j) acc += static_cast<i128>((*this)(i, j)) * v[j];
    out[i] = narrow(acc);
  }
  return out;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  IntMatrix out(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      i128 acc = 0;
      for (int k = 0; k < dim_; ++k) acc += static_cast<i128>((*this)(i, k)) * rhs(k, j);
      out(i, j) = narrow(acc);
    }
  return out;
}

Eigen::MatrixXd IntMatrix::to_real() const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
  return m;
}

std::vector<std::vector<std::int64_t>> IntMatrix::rows() const {
  std::vector<std::vector<std::int64_t>> out(dim_);
  for (int i = 0; i < dim_; ++i) {
    out[i].resize(dim_);
    for (int j = 0; j < dim_; ++j) out[i][j] = (*this)(i, j);
  }
  return out;
}

std::int64_t IntMatrix::inf_norm() const {
  std::int64_t best = 0;
  for (int i = 0; i < dim_; ++i) {
    std::int64_t row = 0;
    for (int j = 0; j < dim_; ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

std::int64_t determinant(const IntMatrix& m) {
  const int n = m.dim();
  if (n == 0) return 1;
  std::vector<i128> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  auto at = [&](int i, int j) -> i128& { return a[i * n + j]; };

  // Bareiss: every intermediate is a minor of m, so divisions are exact.
  i128 prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (at(k, k) == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (at(i, k) != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(at(k, j), at(swap, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  return narrow(sign * at(n - 1, n - 1));
}

IntMatrix adjugate(const IntMatrix& m) {
  const int n = m.dim();
  IntMatrix adj(n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // adj(i, j) = (-1)^{i+j} det(m without row j and column i)
      IntMatrix minor(n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      const std::int64_t d = determinant(minor);
      adj(i, j) = ((i + j) % 2 == 0) ? d : -d;
    }
  return adj;
}

IntVec DilationMatrix::apply(const IntVec& v, bool transpose) const {
  return transpose ? b_.apply(v) : a_.apply(v);
}

bool DilationMatrix::in_image(const IntVec& v, bool transpose) const {
  const IntVec w = (transpose ? adj_b_ : adj_a_).apply(v);
  return std::all_of(w.begin(), w.end(), [&](std::int64_t x) { return x % det_ == 0; });
}

IntVec DilationMatrix::solve_exact(const IntVec& v, bool transpose) const {
  IntVec w = (transpose ? adj_b_ : adj_a_).apply(v);
  for (auto& x : w) {
    if (x % det_ != 0) throw Error(ErrorCode::InternalInconsistency, "vector is not in the image lattice");
    x /= det_;
  }
  return w;
}

Eigen::VectorXd DilationMatrix::b_inverse_apply(const Eigen::VectorXd& xi) const {
  const int d = dim();
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) acc += static_cast<double>(adj_b_(i, j)) * xi[j];
    out[i] = acc / static_cast<double>(det_);
  }
  return out;
}

Eigen::VectorXd DilationMatrix::b_apply(const Eigen::VectorXd& xi) const {
  return b_.to_real() * xi;
}

std::int64_t DilationMatrix::dual_pairing_numerator(const IntVec& mu, const IntVec& nu) const {
  const IntVec w = adj_b_.apply(mu);
  i128 acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += static_cast<i128>(w[i]) * nu[i];
  const i128 da = det_abs();
  i128 r = acc % da;
  if (r < 0) r += da;
  if (det_ < 0 && r != 0) r = da - r;
  return static_cast<std::int64_t>(r);
}

DilationMatrix validate_dilation(const std::vector<std::vector<std::int64_t>>& rows) {
  const int d = static_cast<int>(rows.size());
  if (d == 0) throw Error(ErrorCode::NonSquare, "empty matrix");
  for (const auto& row : rows)
    if (static_cast<int>(row.size()) != d) throw Error(ErrorCode::NonSquare, "matrix is not square");

  DilationMatrix m;
  m.a_ = IntMatrix(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.a_(i, j) = rows[i][j];
  m.b_ = m.a_.transpose();
  m.det_ = determinant(m.a_);
  if (m.det_abs() <= 1) {
    throw Error(ErrorCode::SingularOrUnit, "|det A| = " + std::to_string(m.det_abs()) + " must be at least 2");
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m.a_.to_real(), false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NotExpanding, "eigenvalue computation failed");
  for (const auto& lambda : solver.eigenvalues()) {
    if (std::abs(lambda) <= 1.0 + kExpandingSlack) {
      throw Error(ErrorCode::NotExpanding, "eigenvalue of modulus " + std::to_string(std::abs(lambda)));
    }
  }
  m.adj_a_ = adjugate(m.a_);
  m.adj_b_ = adjugate(m.b_);
  return m;
}

DigitSet digit_set(const DilationMatrix& m, bool for_transpose) {
  const int d = m.dim();
  const std::int64_t a = m.det_abs();
  // a·Z^d ⊂ MZ^d, so [0, a)^d meets every coset.
  double box = std::pow(static_cast<double>(a), d);
  if (box > 1e8) throw Error(ErrorCode::SizeOverflow, "digit search box too large");

  std::vector<IntVec> candidates;
  candidates.reserve(static_cast<std::size_t>(box));
  IntVec v(d, 0);
  for (;;) {
    candidates.push_back(v);
    int i = 0;
    while (i < d && ++v[i] == a) v[i++] = 0;
    if (i == d) break;
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const IntVec& x, const IntVec& y) {
    return *std::max_element(x.begin(), x.end()) < *std::max_element(y.begin(), y.end());
  });

  const IntMatrix adj = adjugate(for_transpose ? m.b() : m.a());
  std::set<IntVec> seen;
  DigitSet ds{m, for_transpose, {}};
  for (const auto& c : candidates) {
    if (seen.insert(coset_key(adj, a, c)).second) {
      ds.digits.push_back(c);
      if (static_cast<std::int64_t>(ds.digits.size()) == a) break;
    }
  }
  if (static_cast<std::int64_t>(ds.digits.size()) != a) {
    throw Error(ErrorCode::InternalInconsistency, "coset count does not match |det|");
  }
  return ds;
}

bool is_digit_set(const DilationMatrix& m, bool for_transpose, const std::vector<IntVec>& digits) {
  if (static_cast<std::int64_t>(digits.size()) != m.det_abs()) return false;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (static_cast<int>(digits[i].size()) != m.dim()) return false;
    for (std::size_t j = 0; j < i; ++j) {
      IntVec diff(digits[i].size());
      for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = digits[i][t] - digits[j][t];
      if (m.in_image(diff, for_transpose)) return false;
    }
  }
  return true;
}

DigitSet make_digit_set(const DilationMatrix& m, bool for_transpose, std::vector<IntVec> digits) {
  if (!is_digit_set(m, for_transpose, digits)) {
    throw Error(ErrorCode::InvalidDigitSet, "digits are not one representative per coset");
  }
  if (std::any_of(digits.front().begin(), digits.front().end(), [](std::int64_t x) { return x != 0; })) {
    throw Error(ErrorCode::InvalidDigitSet, "first digit must be the zero vector");
  }
  return DigitSet{m, for_transpose, std::move(digits)};
}

DigitDecomposition digit_of(const IntVec& k, const DigitSet& ds) {
  IntVec diff(k.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t t = 0; t < k.size(); ++t) diff[t] = k[t] - ds[r][t];
    if (ds.matrix.in_image(diff, ds.for_transpose)) {
      return DigitDecomposition{r, ds.matrix.solve_exact(diff, ds.for_transpose)};
    }
  }
  throw Error(ErrorCode::InternalInconsistency, "no digit matches; digit set is corrupted");
}

std::size_t default_max_cells() {
  constexpr std::size_t fallback = std::size_t{1} << 24;
  if (const char* env = std::getenv("PACKETLAB_MAX_CELLS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return fallback;
}

std::size_t quotient_size(const DigitSet& ds, int level, std::size_t max_cells) {
  std::size_t n = 1;
  const auto a = static_cast<std::size_t>(ds.size());
  for (int i = 0; i < level; ++i) {
    if (n > max_cells / a) {
      throw Error(ErrorCode::SizeOverflow, "a^j exceeds the cell limit " + std::to_string(max_cells));
    }
    n *= a;
  }
  if (n > max_cells) throw Error(ErrorCode::SizeOverflow, "a^j exceeds the cell limit");
  return n;
}

std::vector<IntVec> enumerate_representatives(const DigitSet& ds, int level, std::size_t max_cells) {
  const std::size_t count = quotient_size(ds, level, max_cells);
  const int d = ds.dim();
  const std::size_t a = ds.size();
  std::vector<IntVec> reps(count, IntVec(d, 0));
  // reps at level i+1: reps_i[t] + A^i·digits[s] at index t + s·a^i.
  IntMatrix power = IntMatrix::identity(d);
  std::size_t block = 1;
  for (int i = 0; i < level; ++i) {
    std::vector<IntVec> shifted(a);
    for (std::size_t s = 0; s < a; ++s) shifted[s] = power.apply(ds[s]);
    for (std::size_t s = a; s-- > 1;) {
      for (std::size_t t = 0; t < block; ++t) {
        IntVec v = reps[t];
        for (int c = 0; c < d; ++c) v[c] += shifted[s][c];
        reps[t + s * block] = std::move(v);
      }
    }
    block *= a;
    power = ds.matrix.a() * power;
  }
  return reps;
}

std::size_t reduce_mod(const IntVec& k, int level, const DigitSet& ds) {
  std::size_t index = 0;
  std::size_t place = 1;
  IntVec rest = k;
  for (int i = 0; i < level; ++i) {
    DigitDecomposition step = digit_of(rest, ds);
    index += step.index * place;
    place *= ds.size();
    rest = std::move(step.quotient);
  }
  return index;
}

std::complex<double> unit_root(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw Error(ErrorCode::InternalInconsistency, "unit_root needs a positive denominator");
  num %= den;
  if (num < 0) num += den;
  if ((4 * static_cast<i128>(num)) % den == 0) {
    switch (static_cast<int>((4 * static_cast<i128>(num)) / den)) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, -1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, 1.0};
    }
  }
  return std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den));
}

std::complex<double> character_sum(const IntVec& nu, const DigitSet& kb) {
  std::complex<double> acc = 0.0;
  for (const auto& mu : kb.digits) acc += unit_root(kb.matrix.dual_pairing_numerator(mu, nu), kb.matrix.det_abs());
  return acc;
}

}  // namespace packetlab
