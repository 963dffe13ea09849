#ifndef PACKETLAB_FILTERBANK_HPP
#define PACKETLAB_FILTERBANK_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "packetlab/lattice.hpp"

namespace packetlab {

using Complex = std::complex<double>;

struct Tap {
  IntVec k;
  Complex value;
};

/// Finitely supported sequence Z^d → C, taps kept sorted by position.
class Sequence {
 public:
  void add(const IntVec& k, Complex value);
  const std::vector<Tap>& taps() const { return taps_; }
  bool empty() const { return taps_.empty(); }

 private:
  std::vector<Tap> taps_;
};

/// Filter family {h^r_{ljk}}: for each channel r < a an L×L matrix of
/// coefficient sequences. Channel 0 is the low-pass filter matrix.
///
/// Stored values are the refinement coefficients themselves; the a^{-1/2}
/// normalization is applied when the symbol is evaluated.
class FilterBank {
 public:
  FilterBank(DigitSet digits_a, DigitSet digits_b, int multiplicity);

  const DilationMatrix& matrix() const { return digits_a_.matrix; }
  const DigitSet& digits_a() const { return digits_a_; }
  const DigitSet& digits_b() const { return digits_b_; }
  int multiplicity() const { return multiplicity_; }
  int channels() const { return static_cast<int>(digits_a_.size()); }
  int dim() const { return matrix().dim(); }

  const Sequence& sequence(int r, int l, int j) const;
  void add_tap(int r, int l, int j, const IntVec& k, Complex value);

  /// Componentwise bounding box of all taps; nullopt for the zero bank.
  std::optional<std::pair<IntVec, IntVec>> support_box() const;

  /// Distinct tap positions across all sequences, sorted.
  std::vector<IntVec> tap_positions() const;

 private:
  std::size_t slot(int r, int l, int j) const;

  DigitSet digits_a_;
  DigitSet digits_b_;
  int multiplicity_;
  std::vector<Sequence> sequences_;
};

/// H_r(ξ) evaluated at a point.
struct SymbolMatrix {
  Eigen::VectorXd xi;
  Eigen::MatrixXcd values;
};

SymbolMatrix eval_symbol(const FilterBank& fb, int r, const Eigen::VectorXd& xi);

/// The shift 2πB^{-1}β for a digit β of K_B, computed from exact rationals.
Eigen::VectorXd dual_shift(const DilationMatrix& m, const IntVec& beta);

/// Uniform tensor grid on [-π, π)^d, first coordinate varying fastest.
std::vector<Eigen::VectorXd> tensor_grid(int dim, int n);

/// grid points per dimension used when the caller passes 0.
int default_check_grid(int dim);

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kGridTolerance = 1e-10;

/// Location of the largest coefficient-domain defect; channel/multiplicity
/// indices are 0-based.
struct DefectSite {
  int r = 0, s = 0, j = 0, l = 0;
  IntVec p;
};

struct SplittingReport {
  std::optional<bool> exact_pass;
  double max_defect_exact = 0.0;
  std::optional<DefectSite> worst_exact;

  std::optional<bool> grid_pass;
  double max_defect_grid = 0.0;
  int grid_size = 0;

  bool pass() const { return exact_pass.value_or(true) && grid_pass.value_or(true); }
};

/// Checks Σ_{m,k} h^r_{j,m,k} conj(h^s_{l,m,k-Ap}) = δ_rs δ_jl δ_0p for every p
/// where the two supports can overlap.
SplittingReport check_splitting_exact(const FilterBank& fb, double tol = kExactTolerance);

/// Checks Σ_{μ∈K_B} H_r(ξ+2πB^{-1}μ) H_s(ξ+2πB^{-1}μ)* = δ_rs I on a grid,
/// measuring the operator-norm defect.
SplittingReport check_splitting_grid(const FilterBank& fb, int grid_n = 0, double tol = kGridTolerance);

SplittingReport check_splitting(const FilterBank& fb, int grid_n = 0);

/// Random aL×aL unitary from the QR factorization of a complex Gaussian matrix.
Eigen::MatrixXcd random_unitary(int n, unsigned long long seed);

/// One tap per digit: h^r_{l,j,α_s} = U[(r,l),(s,j)]. Without U, the character
/// matrix U[(r,l),(s,j)] = δ_lj a^{-1/2} exp(-i2π⟨B^{-1}β_r, α_s⟩) is used,
/// giving the generalized Haar bank. Throws NotUnitary.
FilterBank complete_bank_haar(const DigitSet& digits_a, const DigitSet& digits_b, int multiplicity,
                              const std::optional<Eigen::MatrixXcd>& unitary = std::nullopt);

/// Pointwise completion of the low-pass rows to an orthonormal basis of C^{aL}.
struct SampledCompletion {
  int grid_n = 0;
  int multiplicity = 0;
  int channels = 0;
  std::vector<Eigen::VectorXd> points;
  /// rows (r, l), columns (μ, j): entry h^r_{lj}(ξ + 2πB^{-1}β_μ).
  std::vector<Eigen::MatrixXcd> stacked;

  /// Sampled H_r(ξ_g).
  Eigen::MatrixXcd channel(std::size_t g, int r) const;
};

inline constexpr double kLowPassTolerance = 1e-8;
inline constexpr double kSpanTolerance = 1e-8;

SampledCompletion complete_bank_grid(const FilterBank& lowpass, int grid_n = 0);

}  // namespace packetlab

#endif  // PACKETLAB_FILTERBANK_HPP
