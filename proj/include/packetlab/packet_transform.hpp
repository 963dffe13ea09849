#ifndef PACKETLAB_PACKET_TRANSFORM_HPP
#define PACKETLAB_PACKET_TRANSFORM_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "packetlab/filterbank.hpp"
#include "packetlab/lattice.hpp"

namespace packetlab {

struct BasisSpec;

/// L-channel data on the quotient lattice Z^d/A^jZ^d. Entry (l, t) pairs
/// channel l with representative t of enumerate_representatives(level).
class CoefficientGrid {
 public:
  CoefficientGrid(DigitSet digits_a, int level, int multiplicity);
  CoefficientGrid(DigitSet digits_a, int level, int multiplicity, std::vector<Complex> values);

  const DigitSet& digits_a() const { return digits_a_; }
  int level() const { return level_; }
  int multiplicity() const { return multiplicity_; }
  std::size_t cells() const { return cells_; }

  Complex& at(int l, std::size_t t) { return values_[static_cast<std::size_t>(l) * cells_ + t]; }
  Complex at(int l, std::size_t t) const { return values_[static_cast<std::size_t>(l) * cells_ + t]; }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }

  double energy() const;

 private:
  DigitSet digits_a_;
  int level_;
  int multiplicity_;
  std::size_t cells_;
  std::vector<Complex> values_;
};

double max_abs_diff(const CoefficientGrid& x, const CoefficientGrid& y);

/// Digits (μ_1, …, μ_j) of n in base a, least significant first; n = 0 has
/// the empty expansion.
std::vector<int> a_adic_expansion(std::uint64_t n, int base);

/// H_{μ_1}(B^{-1}ξ) H_{μ_2}(B^{-2}ξ) ⋯ H_{μ_j}(B^{-j}ξ), identity for n = 0.
Eigen::MatrixXcd packet_symbol(const FilterBank& fb, std::uint64_t n, const Eigen::VectorXd& xi);

enum class BankCheck { Verify, Skip };

/// One level of analysis: child r gets d^r_l[k] = Σ_m Σ_p conj(h^r_{l,m,p-Ak}) c_m[p]
/// with the filters periodized on Z^d/A^jZ^d. With BankCheck::Verify the bank
/// must pass the exact splitting check (NotOrthonormal otherwise).
std::vector<CoefficientGrid> analyze_step(const CoefficientGrid& parent, const FilterBank& fb,
                                          BankCheck check = BankCheck::Verify);

/// Exact adjoint of analyze_step.
CoefficientGrid synthesize_step(const std::vector<CoefficientGrid>& children, const FilterBank& fb);

/// Packet-tree node: packet index n at level j (the root is (0, J)).
struct NodeKey {
  std::uint64_t n = 0;
  int level = 0;

  friend bool operator==(const NodeKey&, const NodeKey&) = default;
  /// Coarse-to-fine: higher levels first, then by packet index.
  friend std::strong_ordering operator<=>(const NodeKey& x, const NodeKey& y) {
    if (x.level != y.level) return y.level <=> x.level;
    return x.n <=> y.n;
  }
};

/// Children of node n under channel s are a·n + s, one level down. Internal
/// nodes are retained so any admissible basis can be synthesized.
class PacketTree {
 public:
  PacketTree(FilterBank bank, int root_level, int depth);

  const FilterBank& bank() const { return bank_; }
  int root_level() const { return root_level_; }
  int depth() const { return depth_; }
  const std::map<NodeKey, CoefficientGrid>& nodes() const { return nodes_; }

  bool contains(const NodeKey& key) const { return nodes_.count(key) != 0; }
  const CoefficientGrid& node(const NodeKey& key) const;
  void insert(const NodeKey& key, CoefficientGrid grid);

 private:
  FilterBank bank_;
  int root_level_;
  int depth_;
  std::map<NodeKey, CoefficientGrid> nodes_;
};

NodeKey child_key(const NodeKey& parent, int channel, int base);

PacketTree decompose(const CoefficientGrid& data, const FilterBank& fb, int depth,
                     BankCheck check = BankCheck::Verify);

/// Synthesizes the root from the coefficients of the nodes listed in `basis`
/// only. Throws InadmissibleBasis or MissingNode.
CoefficientGrid reconstruct(const PacketTree& tree, const BasisSpec& basis);

}  // namespace packetlab

#endif  // PACKETLAB_PACKET_TRANSFORM_HPP
