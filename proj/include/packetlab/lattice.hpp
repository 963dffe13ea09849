#ifndef PACKETLAB_LATTICE_HPP
#define PACKETLAB_LATTICE_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace packetlab {

using IntVec = std::vector<std::int64_t>;

/// Dense square integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim, 0) {}

  static IntMatrix identity(int dim);

  int dim() const { return dim_; }
  std::int64_t operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * dim_ + j]; }
  std::int64_t& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * dim_ + j]; }

  IntMatrix transpose() const;
  IntVec apply(const IntVec& v) const;
  IntMatrix operator*(const IntMatrix& rhs) const;
  Eigen::MatrixXd to_real() const;
  std::vector<std::vector<std::int64_t>> rows() const;
  std::int64_t inf_norm() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  int dim_ = 0;
  std::vector<std::int64_t> data_;
};

/// Exact determinant (fraction-free elimination).
std::int64_t determinant(const IntMatrix& m);
/// Exact adjugate, adj(M)·M = det(M)·I.
IntMatrix adjugate(const IntMatrix& m);

/// Expanding integer matrix A together with B = Aᵗ and a = |det A|.
class DilationMatrix {
 public:
  int dim() const { return a_.dim(); }
  const IntMatrix& a() const { return a_; }
  const IntMatrix& b() const { return b_; }
  std::int64_t det() const { return det_; }
  std::int64_t det_abs() const { return det_ < 0 ? -det_ : det_; }

  /// A (or B when `transpose`) applied to v.
  IntVec apply(const IntVec& v, bool transpose = false) const;

  /// True iff v ∈ MZ^d, M = A or B. Exact.
  bool in_image(const IntVec& v, bool transpose = false) const;

  /// Solves M x = v over the integers; the caller guarantees v ∈ MZ^d.
  IntVec solve_exact(const IntVec& v, bool transpose = false) const;

  /// Real-valued B^{-1}ξ.
  Eigen::VectorXd b_inverse_apply(const Eigen::VectorXd& xi) const;
  Eigen::VectorXd b_apply(const Eigen::VectorXd& xi) const;

  /// Numerator of ⟨B^{-1}μ, ν⟩ over det: returns n with ⟨B^{-1}μ,ν⟩ = n/det,
  /// reduced into [0, |det|).
  std::int64_t dual_pairing_numerator(const IntVec& mu, const IntVec& nu) const;

  friend bool operator==(const DilationMatrix& x, const DilationMatrix& y) { return x.a_ == y.a_; }

 private:
  friend DilationMatrix validate_dilation(const std::vector<std::vector<std::int64_t>>& rows);

  IntMatrix a_;
  IntMatrix b_;
  IntMatrix adj_a_;
  IntMatrix adj_b_;
  std::int64_t det_ = 0;
};

/// Eigenvalues with |λ| ≤ 1 + kExpandingSlack are rejected.
inline constexpr double kExpandingSlack = 1e-9;

/// Throws NonSquare, SingularOrUnit (|det| ≤ 1) or NotExpanding.
DilationMatrix validate_dilation(const std::vector<std::vector<std::int64_t>>& rows);

/// Coset representatives of MZ^d in Z^d (M = A, or B when `for_transpose`).
/// The first digit is always the zero vector; order is part of the contract
/// because packet indices depend on it.
struct DigitSet {
  DilationMatrix matrix;
  bool for_transpose = false;
  std::vector<IntVec> digits;

  std::size_t size() const { return digits.size(); }
  const IntVec& operator[](std::size_t i) const { return digits[i]; }
  int dim() const { return matrix.dim(); }
};

DigitSet digit_set(const DilationMatrix& m, bool for_transpose);

/// Exactly a vectors in pairwise distinct cosets of MZ^d.
bool is_digit_set(const DilationMatrix& m, bool for_transpose, const std::vector<IntVec>& digits);

/// Validates and wraps a user-supplied ordered digit list (zero must be first).
DigitSet make_digit_set(const DilationMatrix& m, bool for_transpose, std::vector<IntVec> digits);

struct DigitDecomposition {
  std::size_t index = 0;
  IntVec quotient;
};

/// k = M·quotient + digits[index].
DigitDecomposition digit_of(const IntVec& k, const DigitSet& ds);

/// Default bound on a^j, overridable through PACKETLAB_MAX_CELLS.
std::size_t default_max_cells();

/// Number of cosets of A^jZ^d, a^j, with the size limit enforced.
std::size_t quotient_size(const DigitSet& ds, int level, std::size_t max_cells = default_max_cells());

/// Representatives Σ_{i<j} A^i ε_i of Z^d/A^jZ^d. Index t has base-a digits
/// t_0 + t_1·a + ... (t_0 least significant) selecting ε_i = digits[t_i].
std::vector<IntVec> enumerate_representatives(const DigitSet& ds, int level,
                                              std::size_t max_cells = default_max_cells());

/// Index of the representative congruent to k mod A^jZ^d.
std::size_t reduce_mod(const IntVec& k, int level, const DigitSet& ds);

/// exp(-i2π num/den), exact at multiples of a quarter turn.
std::complex<double> unit_root(std::int64_t num, std::int64_t den);

/// Σ_{μ∈K_B} exp(-i2π⟨B^{-1}μ, ν⟩).
std::complex<double> character_sum(const IntVec& nu, const DigitSet& kb);

}  // namespace packetlab

#endif  // PACKETLAB_LATTICE_HPP
