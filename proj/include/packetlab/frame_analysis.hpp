#ifndef PACKETLAB_FRAME_ANALYSIS_HPP
#define PACKETLAB_FRAME_ANALYSIS_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "packetlab/filterbank.hpp"

namespace packetlab {

enum class BlockKind { E, H, P };

/// aL×aL matrix made of a×a blocks of size L×L.
struct BlockSymbol {
  Eigen::VectorXd xi;
  BlockKind kind = BlockKind::E;
  int channels = 0;
  int multiplicity = 0;
  Eigen::MatrixXcd matrix;

  Eigen::MatrixXcd block(int r, int s) const {
    return matrix.block(static_cast<Eigen::Index>(r) * multiplicity, static_cast<Eigen::Index>(s) * multiplicity,
                        multiplicity, multiplicity);
  }
};

/// Character matrix: block (r,s) = δ_lj a^{-1/2} exp(-i⟨ξ + 2πB^{-1}β_s, α_r⟩).
BlockSymbol build_E(const DigitSet& digits_a, const DigitSet& digits_b, int multiplicity, const Eigen::VectorXd& xi);

/// Block (r,s) = H_r(ξ + 2πB^{-1}β_s).
BlockSymbol build_H(const FilterBank& fb, const Eigen::VectorXd& xi);

/// Polyphase matrix: block (r,s) entry (l,j) = Σ_k h^r_{l,j,α_s+Ak} exp(-i⟨ξ,k⟩).
BlockSymbol build_P(const FilterBank& fb, const Eigen::VectorXd& xi);

/// max over the grid of ‖H(ξ) - P(Bξ)E(ξ)‖₂.
double verify_factorization(const FilterBank& fb, int grid_n = 0);

int default_frame_grid(int dim);

inline constexpr double kUnitaryTolerance = 1e-8;
inline constexpr int kMaxBlockSize = 64;

struct LevelBounds {
  int level = 0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Extreme eigenvalues of H*(ξ)H(ξ) sampled on a grid. The lipschitz_slack
/// bounds how far the true inf/sup can sit from the sampled extremes, from
/// the ℓ¹ norms of the taps.
struct FrameReport {
  int grid_n = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double lipschitz_slack = 0.0;
  bool unitary = false;
  std::vector<LevelBounds> per_level;
};

/// Throws EigenFailure, SizeOverflow (aL > 64).
FrameReport frame_bounds(const FilterBank& fb, int grid_n = 0);

/// Rows (j, λ^j C1, Λ^j C2) for 0 ≤ j ≤ J. Throws InvalidBounds unless 0 < C1 ≤ C2.
std::vector<LevelBounds> propagate_bounds(const FrameReport& report, double c1, double c2, int levels);

/// P(ξ) on the tensor grid.
std::vector<Eigen::MatrixXcd> sample_P(const FilterBank& fb, int grid_n = 0);

/// True iff every eigenvalue of P*P lies in [C1 - 1e-10, C2 + 1e-10].
bool frame_condition_check(std::span<const Eigen::MatrixXcd> sampled, double c1, double c2);

}  // namespace packetlab

#endif  // PACKETLAB_FRAME_ANALYSIS_HPP
