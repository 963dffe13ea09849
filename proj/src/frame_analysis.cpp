#include "packetlab/frame_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "packetlab/errors.hpp"

namespace packetlab {

namespace {

double dot(const Eigen::VectorXd& xi, const IntVec& k) {
  double acc = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) acc += xi[static_cast<Eigen::Index>(i)] * static_cast<double>(k[i]);
  return acc;
}

BlockSymbol empty_block(BlockKind kind, int a, int L, const Eigen::VectorXd& xi) {
  return BlockSymbol{xi, kind, a, L, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(a) * L,
                                                            static_cast<Eigen::Index>(a) * L)};
}

}  // namespace

BlockSymbol build_E(const DigitSet& digits_a, const DigitSet& digits_b, int multiplicity, const Eigen::VectorXd& xi) {
  const int a = static_cast<int>(digits_a.size());
  const DilationMatrix& m = digits_a.matrix;
  const double det = static_cast<double>(m.det_abs());
  const double scale = 1.0 / std::sqrt(det);
  BlockSymbol e = empty_block(BlockKind::E, a, multiplicity, xi);
  for (int r = 0; r < a; ++r)
    for (int s = 0; s < a; ++s) {
      const Complex v =
          std::polar(scale, -dot(xi, digits_a[r])) * unit_root(m.dual_pairing_numerator(digits_b[s], digits_a[r]), m.det_abs());
      for (int l = 0; l < multiplicity; ++l) e.matrix(r * multiplicity + l, s * multiplicity + l) = v;
    }
  return e;
}

BlockSymbol build_H(const FilterBank& fb, const Eigen::VectorXd& xi) {
  const int a = fb.channels();
  const int L = fb.multiplicity();
  BlockSymbol h = empty_block(BlockKind::H, a, L, xi);
  for (int s = 0; s < a; ++s) {
    const Eigen::VectorXd shifted = xi + dual_shift(fb.matrix(), fb.digits_b()[s]);
    for (int r = 0; r < a; ++r) h.matrix.block(r * L, s * L, L, L) = eval_symbol(fb, r, shifted).values;
  }
  return h;
}

BlockSymbol build_P(const FilterBank& fb, const Eigen::VectorXd& xi) {
  const int a = fb.channels();
  const int L = fb.multiplicity();
  BlockSymbol p = empty_block(BlockKind::P, a, L, xi);
  for (int r = 0; r < a; ++r)
    for (int l = 0; l < L; ++l)
      for (int j = 0; j < L; ++j)
        for (const auto& tap : fb.sequence(r, l, j).taps()) {
          const DigitDecomposition dec = digit_of(tap.k, fb.digits_a());
          p.matrix(r * L + l, static_cast<Eigen::Index>(dec.index) * L + j) +=
              tap.value * std::polar(1.0, -dot(xi, dec.quotient));
        }
  return p;
}

int default_frame_grid(int dim) {
  if (dim <= 1) return 256;
  if (dim == 2) return 64;
  return 16;
}

double verify_factorization(const FilterBank& fb, int grid_n) {
  if (grid_n <= 0) grid_n = default_check_grid(fb.dim());
  double worst = 0.0;
  for (const auto& xi : tensor_grid(fb.dim(), grid_n)) {
    const Eigen::MatrixXcd h = build_H(fb, xi).matrix;
    const Eigen::MatrixXcd pe =
        build_P(fb, fb.matrix().b_apply(xi)).matrix * build_E(fb.digits_a(), fb.digits_b(), fb.multiplicity(), xi).matrix;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h - pe);
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

FrameReport frame_bounds(const FilterBank& fb, int grid_n) {
  const int a = fb.channels();
  const int L = fb.multiplicity();
  if (a * L > kMaxBlockSize) {
    throw Error(ErrorCode::SizeOverflow, "aL = " + std::to_string(a * L) + " exceeds " + std::to_string(kMaxBlockSize));
  }
  if (grid_n <= 0) grid_n = default_frame_grid(fb.dim());

  FrameReport report;
  report.grid_n = grid_n;
  report.lambda_min = std::numeric_limits<double>::infinity();
  report.lambda_max = 0.0;
  for (const auto& xi : tensor_grid(fb.dim(), grid_n)) {
    const Eigen::MatrixXcd h = build_H(fb, xi).matrix;
    const Eigen::MatrixXcd gram = h.adjoint() * h;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      std::string where;
      for (Eigen::Index i = 0; i < xi.size(); ++i) where += (i ? "," : "") + std::to_string(xi[i]);
      throw Error(ErrorCode::EigenFailure, "eigensolver did not converge at xi=(" + where + ")");
    }
    const auto& ev = solver.eigenvalues();
    report.lambda_min = std::min(report.lambda_min, std::max(0.0, ev.minCoeff()));
    report.lambda_max = std::max(report.lambda_max, std::max(0.0, ev.maxCoeff()));
  }

  // |σ(ξ)² - σ(ξ')²| ≤ 2·M·G·‖ξ-ξ'‖ with M, G Frobenius bounds on H and its
  // ξ-derivative; every point lies within (π/n)·√d of the grid.
  const double scale = 1.0 / std::sqrt(static_cast<double>(fb.matrix().det_abs()));
  double m2 = 0.0;
  double g2 = 0.0;
  for (int r = 0; r < a; ++r)
    for (int l = 0; l < L; ++l)
      for (int j = 0; j < L; ++j) {
        double m = 0.0;
        double g = 0.0;
        for (const auto& tap : fb.sequence(r, l, j).taps()) {
          double knorm = 0.0;
          for (auto c : tap.k) knorm += static_cast<double>(c) * static_cast<double>(c);
          m += std::abs(tap.value);
          g += std::abs(tap.value) * std::sqrt(knorm);
        }
        m2 += a * (scale * m) * (scale * m);
        g2 += a * (scale * g) * (scale * g);
      }
  const double spacing = std::numbers::pi / grid_n * std::sqrt(static_cast<double>(fb.dim()));
  report.lipschitz_slack = 2.0 * std::sqrt(m2) * std::sqrt(g2) * spacing;
  report.unitary = std::abs(report.lambda_min - 1.0) < kUnitaryTolerance &&
                   std::abs(report.lambda_max - 1.0) < kUnitaryTolerance;
  return report;
}

std::vector<LevelBounds> propagate_bounds(const FrameReport& report, double c1, double c2, int levels) {
  if (!(c1 > 0.0) || !(c1 <= c2) || !std::isfinite(c2)) {
    throw Error(ErrorCode::InvalidBounds, "need 0 < C1 <= C2 < inf");
  }
  if (levels < 0) throw Error(ErrorCode::Usage, "negative level count");
  std::vector<LevelBounds> rows;
  double lo = c1;
  double hi = c2;
  for (int j = 0; j <= levels; ++j) {
    rows.push_back({j, lo, hi});
    lo *= report.lambda_min;
    hi *= report.lambda_max;
  }
  return rows;
}

std::vector<Eigen::MatrixXcd> sample_P(const FilterBank& fb, int grid_n) {
  if (grid_n <= 0) grid_n = default_frame_grid(fb.dim());
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& xi : tensor_grid(fb.dim(), grid_n)) out.push_back(build_P(fb, xi).matrix);
  return out;
}

bool frame_condition_check(std::span<const Eigen::MatrixXcd> sampled, double c1, double c2) {
  if (!(c1 <= c2)) throw Error(ErrorCode::InvalidBounds, "need C1 <= C2");
  constexpr double slack = 1e-10;
  for (const auto& p : sampled) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(p.adjoint() * p, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolver did not converge");
    if (solver.eigenvalues().minCoeff() < c1 - slack || solver.eigenvalues().maxCoeff() > c2 + slack) return false;
  }
  return true;
}

}  // namespace packetlab
