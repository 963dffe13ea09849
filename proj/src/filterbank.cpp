#include "packetlab/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "packetlab/errors.hpp"

namespace packetlab {

void Sequence::add(const IntVec& k, Complex value) {
  auto it = std::lower_bound(taps_.begin(), taps_.end(), k,
                             [](const Tap& t, const IntVec& key) { return t.k < key; });
  if (it != taps_.end() && it->k == k) {
    it->value += value;
  } else {
    taps_.insert(it, Tap{k, value});
  }
}

FilterBank::FilterBank(DigitSet digits_a, DigitSet digits_b, int multiplicity)
    : digits_a_(std::move(digits_a)), digits_b_(std::move(digits_b)), multiplicity_(multiplicity) {
  if (multiplicity_ < 1) throw Error(ErrorCode::ShapeMismatch, "multiplicity must be at least 1");
  if (digits_a_.for_transpose || !digits_b_.for_transpose || !(digits_a_.matrix == digits_b_.matrix)) {
    throw Error(ErrorCode::InvalidDigitSet, "expected digit sets for A and for B of the same matrix");
  }
  sequences_.resize(static_cast<std::size_t>(channels()) * multiplicity_ * multiplicity_);
}

std::size_t FilterBank::slot(int r, int l, int j) const {
  if (r < 0 || r >= channels()) {
    throw Error(ErrorCode::ChannelOutOfRange, "channel " + std::to_string(r) + " of " + std::to_string(channels()));
  }
  if (l < 0 || l >= multiplicity_ || j < 0 || j >= multiplicity_) {
    throw Error(ErrorCode::ShapeMismatch, "multiplicity index out of range");
  }
  return (static_cast<std::size_t>(r) * multiplicity_ + l) * multiplicity_ + j;
}

const Sequence& FilterBank::sequence(int r, int l, int j) const { return sequences_[slot(r, l, j)]; }

void FilterBank::add_tap(int r, int l, int j, const IntVec& k, Complex value) {
  if (static_cast<int>(k.size()) != dim()) throw Error(ErrorCode::ShapeMismatch, "tap dimension mismatch");
  sequences_[slot(r, l, j)].add(k, value);
}

std::optional<std::pair<IntVec, IntVec>> FilterBank::support_box() const {
  std::optional<std::pair<IntVec, IntVec>> box;
  for (const auto& seq : sequences_)
    for (const auto& tap : seq.taps()) {
      if (!box) {
        box.emplace(tap.k, tap.k);
        continue;
      }
      for (std::size_t i = 0; i < tap.k.size(); ++i) {
        box->first[i] = std::min(box->first[i], tap.k[i]);
        box->second[i] = std::max(box->second[i], tap.k[i]);
      }
    }
  return box;
}

std::vector<IntVec> FilterBank::tap_positions() const {
  std::vector<IntVec> out;
  for (const auto& seq : sequences_)
    for (const auto& tap : seq.taps()) out.push_back(tap.k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

double dot(const Eigen::VectorXd& xi, const IntVec& k) {
  double acc = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) acc += xi[static_cast<Eigen::Index>(i)] * static_cast<double>(k[i]);
  return acc;
}

Eigen::MatrixXcd symbol_values(const FilterBank& fb, int r, const Eigen::VectorXd& xi) {
  const int L = fb.multiplicity();
  const double scale = 1.0 / std::sqrt(static_cast<double>(fb.matrix().det_abs()));
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(L, L);
  for (int l = 0; l < L; ++l)
    for (int j = 0; j < L; ++j) {
      Complex acc = 0.0;
      for (const auto& tap : fb.sequence(r, l, j).taps()) acc += tap.value * std::polar(1.0, -dot(xi, tap.k));
      h(l, j) = scale * acc;
    }
  return h;
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

std::string describe_point(const Eigen::VectorXd& xi) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < xi.size(); ++i) os << (i ? ", " : "") << xi[i];
  os << ")";
  return os.str();
}

}  // namespace

SymbolMatrix eval_symbol(const FilterBank& fb, int r, const Eigen::VectorXd& xi) {
  if (r < 0 || r >= fb.channels()) {
    throw Error(ErrorCode::ChannelOutOfRange, "channel " + std::to_string(r));
  }
  if (xi.size() != fb.dim()) throw Error(ErrorCode::ShapeMismatch, "frequency dimension mismatch");
  return SymbolMatrix{xi, symbol_values(fb, r, xi)};
}

Eigen::VectorXd dual_shift(const DilationMatrix& m, const IntVec& beta) {
  Eigen::VectorXd e(m.dim());
  const double det = static_cast<double>(m.det_abs());
  for (int i = 0; i < m.dim(); ++i) {
    IntVec unit(m.dim(), 0);
    unit[i] = 1;
    // i-th coordinate of B^{-1}β is ⟨B^{-1}β, e_i⟩.
    e[i] = 2.0 * std::numbers::pi * static_cast<double>(m.dual_pairing_numerator(beta, unit)) / det;
  }
  return e;
}

std::vector<Eigen::VectorXd> tensor_grid(int dim, int n) {
  if (n < 1) throw Error(ErrorCode::Usage, "grid size must be positive");
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
  std::vector<Eigen::VectorXd> out;
  out.reserve(total);
  std::vector<int> idx(dim, 0);
  for (std::size_t g = 0; g < total; ++g) {
    Eigen::VectorXd xi(dim);
    for (int i = 0; i < dim; ++i) xi[i] = -std::numbers::pi + 2.0 * std::numbers::pi * idx[i] / n;
    out.push_back(std::move(xi));
    for (int i = 0; i < dim && ++idx[i] == n; ++i) idx[i] = 0;
  }
  return out;
}

int default_check_grid(int dim) { return dim >= 3 ? 16 : 64; }

SplittingReport check_splitting_exact(const FilterBank& fb, double tol) {
  const int a = fb.channels();
  const int L = fb.multiplicity();
  const IntVec zero(fb.dim(), 0);
  SplittingReport report;
  report.max_defect_exact = 0.0;

  for (int r = 0; r < a; ++r)
    for (int s = 0; s < a; ++s)
      for (int j = 0; j < L; ++j)
        for (int l = 0; l < L; ++l) {
          std::map<IntVec, Complex> acc;
          acc[zero] = 0.0;
          for (int m = 0; m < L; ++m) {
            for (const auto& x : fb.sequence(r, j, m).taps())
              for (const auto& y : fb.sequence(s, l, m).taps()) {
                IntVec diff(x.k.size());
                for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = x.k[t] - y.k[t];
                if (!fb.matrix().in_image(diff)) continue;
                acc[fb.matrix().solve_exact(diff)] += x.value * std::conj(y.value);
              }
          }
          for (const auto& [p, value] : acc) {
            const double target = (r == s && j == l && p == zero) ? 1.0 : 0.0;
            const double defect = std::abs(value - target);
            if (!report.worst_exact || defect > report.max_defect_exact) {
              report.max_defect_exact = defect;
              report.worst_exact = DefectSite{r, s, j, l, p};
            }
          }
        }
  report.exact_pass = report.max_defect_exact < tol;
  return report;
}

SplittingReport check_splitting_grid(const FilterBank& fb, int grid_n, double tol) {
  const int a = fb.channels();
  const int L = fb.multiplicity();
  if (grid_n <= 0) grid_n = default_check_grid(fb.dim());

  std::vector<Eigen::VectorXd> shifts;
  for (const auto& beta : fb.digits_b().digits) shifts.push_back(dual_shift(fb.matrix(), beta));

  SplittingReport report;
  report.grid_size = grid_n;
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(L, L);
  std::vector<Eigen::MatrixXcd> h(static_cast<std::size_t>(a) * a);
  for (const auto& xi : tensor_grid(fb.dim(), grid_n)) {
    for (int r = 0; r < a; ++r)
      for (int mu = 0; mu < a; ++mu) h[r * a + mu] = symbol_values(fb, r, xi + shifts[mu]);
    for (int r = 0; r < a; ++r)
      for (int s = 0; s < a; ++s) {
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(L, L);
        for (int mu = 0; mu < a; ++mu) sum += h[r * a + mu] * h[s * a + mu].adjoint();
        if (r == s) sum -= identity;
        report.max_defect_grid = std::max(report.max_defect_grid, operator_norm(sum));
      }
  }
  report.grid_pass = report.max_defect_grid < tol;
  return report;
}

SplittingReport check_splitting(const FilterBank& fb, int grid_n) {
  SplittingReport report = check_splitting_exact(fb);
  const SplittingReport grid = check_splitting_grid(fb, grid_n);
  report.grid_pass = grid.grid_pass;
  report.max_defect_grid = grid.max_defect_grid;
  report.grid_size = grid.grid_size;
  return report;
}

Eigen::MatrixXcd random_unitary(int n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

FilterBank complete_bank_haar(const DigitSet& digits_a, const DigitSet& digits_b, int multiplicity,
                              const std::optional<Eigen::MatrixXcd>& unitary) {
  FilterBank fb(digits_a, digits_b, multiplicity);
  const int a = fb.channels();
  const int L = multiplicity;
  const int n = a * L;

  Eigen::MatrixXcd u;
  if (unitary) {
    u = *unitary;
    if (u.rows() != n || u.cols() != n) {
      throw Error(ErrorCode::ShapeMismatch, "unitary must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    const double defect = (u * u.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!(defect < kExactTolerance)) {
      throw Error(ErrorCode::NotUnitary, "|UU* - I| = " + std::to_string(defect));
    }
  } else {
    const double det = static_cast<double>(fb.matrix().det_abs());
    u = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < a; ++r)
      for (int s = 0; s < a; ++s) {
        const Complex c = unit_root(fb.matrix().dual_pairing_numerator(digits_b[r], digits_a[s]),
                                    fb.matrix().det_abs()) / std::sqrt(det);
        for (int l = 0; l < L; ++l) u(r * L + l, s * L + l) = c;
      }
  }

  for (int r = 0; r < a; ++r)
    for (int s = 0; s < a; ++s)
      for (int l = 0; l < L; ++l)
        for (int j = 0; j < L; ++j) {
          const Complex v = u(r * L + l, s * L + j);
          if (v != Complex(0.0, 0.0)) fb.add_tap(r, l, j, digits_a[s], v);
        }
  return fb;
}

Eigen::MatrixXcd SampledCompletion::channel(std::size_t g, int r) const {
  return stacked.at(g).block(static_cast<Eigen::Index>(r) * multiplicity, 0, multiplicity, multiplicity);
}

SampledCompletion complete_bank_grid(const FilterBank& lowpass, int grid_n) {
  const int a = lowpass.channels();
  const int L = lowpass.multiplicity();
  const int n = a * L;
  if (grid_n <= 0) grid_n = default_check_grid(lowpass.dim());

  std::vector<Eigen::VectorXd> shifts;
  for (const auto& beta : lowpass.digits_b().digits) shifts.push_back(dual_shift(lowpass.matrix(), beta));

  SampledCompletion out;
  out.grid_n = grid_n;
  out.multiplicity = L;
  out.channels = a;
  out.points = tensor_grid(lowpass.dim(), grid_n);
  out.stacked.reserve(out.points.size());

  for (const auto& xi : out.points) {
    // Column vectors: basis[t] is row t of the stacked matrix.
    std::vector<Eigen::VectorXcd> basis;
    basis.reserve(n);
    for (int l = 0; l < L; ++l) {
      Eigen::VectorXcd v(n);
      for (int mu = 0; mu < a; ++mu) {
        const Eigen::MatrixXcd h0 = symbol_values(lowpass, 0, xi + shifts[mu]);
        for (int j = 0; j < L; ++j) v[mu * L + j] = h0(l, j);
      }
      basis.push_back(std::move(v));
    }
    double defect = 0.0;
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < L; ++m)
        defect = std::max(defect, std::abs(basis[m].dot(basis[l]) - (l == m ? 1.0 : 0.0)));
    if (!(defect < kLowPassTolerance)) {
      throw Error(ErrorCode::LowPassNotIsometric,
                  "low-pass rows not orthonormal at xi=" + describe_point(xi) + ", defect " + std::to_string(defect));
    }

    for (int e = 0; e < n && static_cast<int>(basis.size()) < n; ++e) {
      Eigen::VectorXcd w = Eigen::VectorXcd::Unit(n, e);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) w -= q * q.dot(w);
      const double norm = w.norm();
      if (norm < kSpanTolerance) continue;
      basis.push_back(w / norm);
    }
    if (static_cast<int>(basis.size()) != n) {
      throw Error(ErrorCode::InternalInconsistency, "completion did not reach full rank");
    }

    Eigen::MatrixXcd stacked(n, n);
    for (int t = 0; t < n; ++t) stacked.row(t) = basis[t].transpose();
    out.stacked.push_back(std::move(stacked));
  }
  return out;
}

}  // namespace packetlab
