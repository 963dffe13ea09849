#ifndef PACKETLAB_BASIS_SELECT_HPP
#define PACKETLAB_BASIS_SELECT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "packetlab/packet_transform.hpp"

namespace packetlab {

struct BasisNode {
  std::uint64_t n = 0;
  int j = 0;

  friend auto operator<=>(const BasisNode&, const BasisNode&) = default;
};

enum class Provenance { Wavelet, Level, Packet, BestBasis, Custom };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

/// A finite node set S with base a and target exponent J; admissible when
/// the intervals I_{n,j} tile [0, a^J).
struct BasisSpec {
  int base = 2;
  int exponent = 0;
  std::vector<BasisNode> nodes;
  Provenance provenance = Provenance::Custom;
};

/// I_{n,j} = [a^j n, a^j (n+1) - 1]. Throws Overflow.
std::pair<std::uint64_t, std::uint64_t> interval(std::uint64_t n, int j, int base);

struct PartitionReport {
  bool admissible = false;
  /// Pairs of nodes whose intervals intersect (duplicates included).
  std::vector<std::pair<BasisNode, BasisNode>> overlaps;
  /// Maximal uncovered runs [lo, hi] inside [0, a^J).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> gaps;
  /// Nodes reaching beyond a^J - 1, or with j > J or negative level.
  std::vector<BasisNode> out_of_range;
  /// Σ |I_{n,j}| over nodes.
  std::uint64_t total_length = 0;

  std::string summary() const;
};

PartitionReport check_partition(const BasisSpec& spec);

/// {(0,0)} ∪ {(r,j): 1 ≤ r ≤ a-1, 0 ≤ j ≤ J-1}.
BasisSpec wavelet_basis(int base, int exponent);

/// All a^D nodes (n, J-D); provenance Packet when D = J.
BasisSpec level_basis(int base, int exponent, int depth);

enum class CostKind { Entropy, L1, Lp, ThresholdCount };

struct CostFunction {
  CostKind kind = CostKind::Entropy;
  double parameter = 0.0;

  /// Accepts entropy, l1, lp:P, threshold:T. Throws UnknownCost.
  static CostFunction parse(std::string_view id);
  std::string id() const;

  /// Additive cost of one node; entropy normalizes by `reference_energy`.
  double evaluate(const CoefficientGrid& grid, double reference_energy) const;
};

struct BestBasisResult {
  BasisSpec basis;
  double total_cost = 0.0;
  std::map<NodeKey, double> node_costs;
};

/// Bottom-up search over the tree: a node is kept when its cost does not
/// exceed the best total of its children. Throws IncompleteTree.
BestBasisResult best_basis(const PacketTree& tree, const CostFunction& cost);

/// Total cost of a basis whose nodes all lie in the tree.
double basis_cost(const PacketTree& tree, const BasisSpec& basis, const CostFunction& cost);

}  // namespace packetlab

#endif  // PACKETLAB_BASIS_SELECT_HPP
