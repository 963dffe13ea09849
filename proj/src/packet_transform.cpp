#include "packetlab/packet_transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <set>
#include <utility>

#include "packetlab/basis_select.hpp"
#include "packetlab/errors.hpp"

namespace packetlab {

CoefficientGrid::CoefficientGrid(DigitSet digits_a, int level, int multiplicity)
    : digits_a_(std::move(digits_a)), level_(level), multiplicity_(multiplicity) {
  if (level_ < 0) throw Error(ErrorCode::ShapeMismatch, "negative level");
  if (multiplicity_ < 1) throw Error(ErrorCode::ShapeMismatch, "multiplicity must be at least 1");
  cells_ = quotient_size(digits_a_, level_);
  values_.assign(cells_ * static_cast<std::size_t>(multiplicity_), Complex(0.0, 0.0));
}

CoefficientGrid::CoefficientGrid(DigitSet digits_a, int level, int multiplicity, std::vector<Complex> values)
    : CoefficientGrid(std::move(digits_a), level, multiplicity) {
  if (values.size() != values_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(values_.size()) + " values, got " +
                                              std::to_string(values.size()));
  }
  values_ = std::move(values);
}

double CoefficientGrid::energy() const {
  double e = 0.0;
  for (const auto& v : values_) e += std::norm(v);
  return e;
}

double max_abs_diff(const CoefficientGrid& x, const CoefficientGrid& y) {
  if (x.values().size() != y.values().size()) throw Error(ErrorCode::ShapeMismatch, "grid sizes differ");
  double best = 0.0;
  for (std::size_t i = 0; i < x.values().size(); ++i) best = std::max(best, std::abs(x.values()[i] - y.values()[i]));
  return best;
}

std::vector<int> a_adic_expansion(std::uint64_t n, int base) {
  if (base < 2) throw Error(ErrorCode::Usage, "base must be at least 2");
  std::vector<int> digits;
  const auto b = static_cast<std::uint64_t>(base);
  while (n > 0) {
    digits.push_back(static_cast<int>(n % b));
    n /= b;
  }
  return digits;
}

Eigen::MatrixXcd packet_symbol(const FilterBank& fb, std::uint64_t n, const Eigen::VectorXd& xi) {
  const int L = fb.multiplicity();
  Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(L, L);
  Eigen::VectorXd arg = xi;
  for (int mu : a_adic_expansion(n, fb.channels())) {
    arg = fb.matrix().b_inverse_apply(arg);
    product = product * eval_symbol(fb, mu, arg).values;
  }
  return product;
}

namespace {

// For one level j: where each tap position lands, i.e. the index of
// A·rep_k + t in Z^d/A^jZ^d for every child cell k.
class PeriodizedIndex {
 public:
  PeriodizedIndex(const FilterBank& fb, int level) {
    const DigitSet& ds = fb.digits_a();
    const auto reps = enumerate_representatives(ds, level - 1);
    std::vector<IntVec> scaled;
    scaled.reserve(reps.size());
    for (const auto& rep : reps) scaled.push_back(fb.matrix().apply(rep));
    for (const auto& t : fb.tap_positions()) {
      std::vector<std::size_t> idx(reps.size());
      for (std::size_t k = 0; k < reps.size(); ++k) {
        IntVec p = scaled[k];
        for (std::size_t c = 0; c < p.size(); ++c) p[c] += t[c];
        idx[k] = reduce_mod(p, level, ds);
      }
      table_.emplace(t, std::move(idx));
    }
  }

  const std::vector<std::size_t>& at(const IntVec& t) const { return table_.at(t); }

 private:
  std::map<IntVec, std::vector<std::size_t>> table_;
};

void require_compatible(const CoefficientGrid& g, const FilterBank& fb) {
  if (g.multiplicity() != fb.multiplicity()) throw Error(ErrorCode::ShapeMismatch, "multiplicity mismatch");
  if (!(g.digits_a().matrix == fb.matrix()) || g.digits_a().digits != fb.digits_a().digits) {
    throw Error(ErrorCode::ShapeMismatch, "grid and bank use different lattices or digit orders");
  }
}

void require_orthonormal(const FilterBank& fb) {
  const SplittingReport report = check_splitting_exact(fb);
  if (!report.exact_pass.value_or(false)) {
    throw Error(ErrorCode::NotOrthonormal,
                "bank fails the splitting check (defect " + std::to_string(report.max_defect_exact) + ")");
  }
}

std::vector<CoefficientGrid> analyze_with(const CoefficientGrid& parent, const FilterBank& fb,
                                          const PeriodizedIndex& index) {
  const int a = fb.channels();
  const int L = fb.multiplicity();
  std::vector<CoefficientGrid> children;
  children.reserve(a);
  for (int r = 0; r < a; ++r) {
    CoefficientGrid child(parent.digits_a(), parent.level() - 1, L);
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < L; ++m)
        for (const auto& tap : fb.sequence(r, l, m).taps()) {
          const Complex h = std::conj(tap.value);
          const auto& idx = index.at(tap.k);
          for (std::size_t k = 0; k < child.cells(); ++k) child.at(l, k) += h * parent.at(m, idx[k]);
        }
    children.push_back(std::move(child));
  }
  return children;
}

CoefficientGrid synthesize_with(const std::vector<CoefficientGrid>& children, const FilterBank& fb,
                                const PeriodizedIndex& index) {
  const int L = fb.multiplicity();
  CoefficientGrid parent(children.front().digits_a(), children.front().level() + 1, L);
  for (int r = 0; r < fb.channels(); ++r)
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < L; ++m)
        for (const auto& tap : fb.sequence(r, l, m).taps()) {
          const auto& idx = index.at(tap.k);
          const CoefficientGrid& child = children[r];
          for (std::size_t k = 0; k < child.cells(); ++k) parent.at(m, idx[k]) += tap.value * child.at(l, k);
        }
  return parent;
}

void require_children(const std::vector<CoefficientGrid>& children, const FilterBank& fb) {
  if (static_cast<int>(children.size()) != fb.channels()) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(fb.channels()) + " children");
  }
  for (const auto& c : children) {
    require_compatible(c, fb);
    if (c.level() != children.front().level()) throw Error(ErrorCode::ShapeMismatch, "children on different levels");
  }
}

}  // namespace

std::vector<CoefficientGrid> analyze_step(const CoefficientGrid& parent, const FilterBank& fb, BankCheck check) {
  if (parent.level() < 1) throw Error(ErrorCode::LevelZero, "cannot split a level-0 grid");
  require_compatible(parent, fb);
  if (check == BankCheck::Verify) require_orthonormal(fb);
  return analyze_with(parent, fb, PeriodizedIndex(fb, parent.level()));
}

CoefficientGrid synthesize_step(const std::vector<CoefficientGrid>& children, const FilterBank& fb) {
  require_children(children, fb);
  return synthesize_with(children, fb, PeriodizedIndex(fb, children.front().level() + 1));
}

PacketTree::PacketTree(FilterBank bank, int root_level, int depth)
    : bank_(std::move(bank)), root_level_(root_level), depth_(depth) {
  if (depth_ < 0) throw Error(ErrorCode::Usage, "negative depth");
  if (depth_ > root_level_) throw Error(ErrorCode::DepthExceedsLevel, "depth exceeds root level");
}

const CoefficientGrid& PacketTree::node(const NodeKey& key) const {
  auto it = nodes_.find(key);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::MissingNode, "node (" + std::to_string(key.n) + ", " + std::to_string(key.level) + ")");
  }
  return it->second;
}

void PacketTree::insert(const NodeKey& key, CoefficientGrid grid) {
  if (grid.level() != key.level) throw Error(ErrorCode::ShapeMismatch, "node level does not match its grid");
  nodes_.insert_or_assign(key, std::move(grid));
}

NodeKey child_key(const NodeKey& parent, int channel, int base) {
  return NodeKey{parent.n * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(channel), parent.level - 1};
}

PacketTree decompose(const CoefficientGrid& data, const FilterBank& fb, int depth, BankCheck check) {
  if (depth < 0) throw Error(ErrorCode::Usage, "negative depth");
  if (depth > data.level()) {
    throw Error(ErrorCode::DepthExceedsLevel,
                "depth " + std::to_string(depth) + " exceeds level " + std::to_string(data.level()));
  }
  require_compatible(data, fb);
  if (check == BankCheck::Verify && depth > 0) require_orthonormal(fb);

  PacketTree tree(fb, data.level(), depth);
  const int a = fb.channels();
  std::vector<NodeKey> frontier{NodeKey{0, data.level()}};
  tree.insert(frontier.front(), data);
  for (int step = 0; step < depth; ++step) {
    const PeriodizedIndex index(fb, data.level() - step);
    std::vector<NodeKey> next;
    for (const auto& key : frontier) {
      auto children = analyze_with(tree.node(key), fb, index);
      for (int s = 0; s < a; ++s) {
        const NodeKey ck = child_key(key, s, a);
        tree.insert(ck, std::move(children[s]));
        next.push_back(ck);
      }
    }
    frontier = std::move(next);
  }
  return tree;
}

namespace {

CoefficientGrid rebuild(const PacketTree& tree, const std::set<NodeKey>& selected, const NodeKey& key,
                        std::map<int, PeriodizedIndex>& indices) {
  if (selected.count(key)) return tree.node(key);
  if (key.level <= tree.root_level() - tree.depth()) {
    throw Error(ErrorCode::MissingNode, "basis needs nodes below (" + std::to_string(key.n) + ", " +
                                            std::to_string(key.level) + ") beyond the tree depth");
  }
  const FilterBank& fb = tree.bank();
  std::vector<CoefficientGrid> children;
  children.reserve(fb.channels());
  for (int s = 0; s < fb.channels(); ++s) children.push_back(rebuild(tree, selected, child_key(key, s, fb.channels()), indices));
  auto it = indices.find(key.level);
  if (it == indices.end()) it = indices.emplace(key.level, PeriodizedIndex(fb, key.level)).first;
  return synthesize_with(children, fb, it->second);
}

}  // namespace

CoefficientGrid reconstruct(const PacketTree& tree, const BasisSpec& basis) {
  const int a = tree.bank().channels();
  if (basis.base != a || basis.exponent != tree.root_level()) {
    throw Error(ErrorCode::InadmissibleBasis, "basis is for a=" + std::to_string(basis.base) + ", J=" +
                                                  std::to_string(basis.exponent) + " but tree has a=" +
                                                  std::to_string(a) + ", J=" + std::to_string(tree.root_level()));
  }
  const PartitionReport report = check_partition(basis);
  if (!report.admissible) throw Error(ErrorCode::InadmissibleBasis, report.summary());
  std::set<NodeKey> selected;
  for (const auto& node : basis.nodes) {
    const NodeKey key{node.n, node.j};
    if (!tree.contains(key)) {
      throw Error(ErrorCode::MissingNode,
                  "node (" + std::to_string(node.n) + ", " + std::to_string(node.j) + ") not in tree");
    }
    selected.insert(key);
  }
  std::map<int, PeriodizedIndex> indices;
  return rebuild(tree, selected, NodeKey{0, tree.root_level()}, indices);
}

}  // namespace packetlab
