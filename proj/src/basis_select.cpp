#include "packetlab/basis_select.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "packetlab/errors.hpp"

namespace packetlab {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Wavelet: return "wavelet";
    case Provenance::Level: return "level";
    case Provenance::Packet: return "packet";
    case Provenance::BestBasis: return "best-basis";
    case Provenance::Custom: return "custom";
  }
  return "custom";
}

Provenance parse_provenance(std::string_view name) {
  for (auto p : {Provenance::Wavelet, Provenance::Level, Provenance::Packet, Provenance::BestBasis,
                 Provenance::Custom}) {
    if (provenance_name(p) == name) return p;
  }
  throw Error(ErrorCode::FormatError, "unknown provenance '" + std::string(name) + "'");
}

namespace {

std::uint64_t checked_mul(std::uint64_t x, std::uint64_t y) {
  if (x != 0 && y > std::numeric_limits<std::uint64_t>::max() / x) {
    throw Error(ErrorCode::Overflow, "interval endpoint exceeds 64 bits");
  }
  return x * y;
}

std::uint64_t checked_pow(int base, int exp) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) v = checked_mul(v, static_cast<std::uint64_t>(base));
  return v;
}

std::string node_str(const BasisNode& n) {
  return "(" + std::to_string(n.n) + "," + std::to_string(n.j) + ")";
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> interval(std::uint64_t n, int j, int base) {
  if (base < 2 || j < 0) throw Error(ErrorCode::Usage, "interval needs a >= 2 and j >= 0");
  const std::uint64_t width = checked_pow(base, j);
  const std::uint64_t lo = checked_mul(width, n);
  const std::uint64_t hi_excl = checked_mul(width, n + 1);
  return {lo, hi_excl - 1};
}

std::string PartitionReport::summary() const {
  std::ostringstream os;
  os << (admissible ? "admissible" : "not admissible");
  for (const auto& [x, y] : overlaps) os << "; overlap " << node_str(x) << " vs " << node_str(y);
  for (const auto& [lo, hi] : gaps) os << "; gap [" << lo << "," << hi << "]";
  for (const auto& n : out_of_range) os << "; out of range " << node_str(n);
  return os.str();
}

PartitionReport check_partition(const BasisSpec& spec) {
  PartitionReport report;
  if (spec.base < 2 || spec.exponent < 0) throw Error(ErrorCode::Usage, "basis needs a >= 2 and J >= 0");
  const std::uint64_t limit = checked_pow(spec.base, spec.exponent);

  struct Span {
    std::uint64_t lo, hi;
    BasisNode node;
  };
  std::vector<Span> spans;
  for (const auto& node : spec.nodes) {
    if (node.j < 0 || node.j > spec.exponent) {
      report.out_of_range.push_back(node);
      continue;
    }
    const auto [lo, hi] = interval(node.n, node.j, spec.base);
    report.total_length += hi - lo + 1;
    if (hi >= limit) {
      report.out_of_range.push_back(node);
      continue;
    }
    spans.push_back({lo, hi, node});
  }
  std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) {
    return x.lo != y.lo ? x.lo < y.lo : x.node < y.node;
  });

  // Intervals of this family are nested or disjoint, so a sweep that tracks
  // the widest interval still open finds every intersecting pair with it.
  std::uint64_t next = 0;  // first uncovered position
  std::size_t open = spans.size();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& cur = spans[i];
    if (open != spans.size() && cur.lo <= spans[open].hi) {
      report.overlaps.emplace_back(spans[open].node, cur.node);
    }
    if (cur.lo > next) report.gaps.emplace_back(next, cur.lo - 1);
    if (open == spans.size() || cur.hi > spans[open].hi) open = i;
    next = std::max(next, cur.hi + 1);
  }
  if (next < limit) report.gaps.emplace_back(next, limit - 1);

  report.admissible = report.overlaps.empty() && report.gaps.empty() && report.out_of_range.empty();
  return report;
}

BasisSpec wavelet_basis(int base, int exponent) {
  if (exponent < 0) throw Error(ErrorCode::Usage, "negative exponent");
  BasisSpec spec{base, exponent, {{0, 0}}, Provenance::Wavelet};
  for (int j = 0; j < exponent; ++j)
    for (int r = 1; r < base; ++r) spec.nodes.push_back({static_cast<std::uint64_t>(r), j});
  return spec;
}

BasisSpec level_basis(int base, int exponent, int depth) {
  if (depth < 0) throw Error(ErrorCode::Usage, "negative depth");
  if (depth > exponent) throw Error(ErrorCode::DepthExceedsLevel, "depth exceeds exponent");
  BasisSpec spec{base, exponent, {}, depth == exponent ? Provenance::Packet : Provenance::Level};
  const std::uint64_t count = checked_pow(base, depth);
  for (std::uint64_t n = 0; n < count; ++n) spec.nodes.push_back({n, exponent - depth});
  return spec;
}

CostFunction CostFunction::parse(std::string_view id) {
  auto parameter = [&](std::string_view prefix) {
    const std::string text(id.substr(prefix.size()));
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(v)) {
      throw Error(ErrorCode::UnknownCost, "bad parameter in cost '" + std::string(id) + "'");
    }
    return v;
  };
  if (id == "entropy" || id == "shannon-entropy") return {CostKind::Entropy, 0.0};
  if (id == "l1") return {CostKind::L1, 0.0};
  if (id.starts_with("lp:")) {
    const double p = parameter("lp:");
    if (!(p > 0.0)) throw Error(ErrorCode::UnknownCost, "lp exponent must be positive");
    return {CostKind::Lp, p};
  }
  if (id.starts_with("threshold:")) {
    const double t = parameter("threshold:");
    if (t < 0.0) throw Error(ErrorCode::UnknownCost, "threshold must be non-negative");
    return {CostKind::ThresholdCount, t};
  }
  throw Error(ErrorCode::UnknownCost, "unknown cost '" + std::string(id) + "'");
}

std::string CostFunction::id() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case CostKind::Entropy: return "entropy";
    case CostKind::L1: return "l1";
    case CostKind::Lp: os << "lp:" << parameter; return os.str();
    case CostKind::ThresholdCount: os << "threshold:" << parameter; return os.str();
  }
  return "entropy";
}

double CostFunction::evaluate(const CoefficientGrid& grid, double reference_energy) const {
  double acc = 0.0;
  switch (kind) {
    case CostKind::Entropy:
      if (!(reference_energy > 0.0)) return 0.0;
      for (const auto& v : grid.values()) {
        const double p = std::norm(v) / reference_energy;
        if (p > 0.0) acc -= p * std::log(p);
      }
      return acc;
    case CostKind::L1:
      for (const auto& v : grid.values()) acc += std::abs(v);
      return acc;
    case CostKind::Lp:
      for (const auto& v : grid.values()) acc += std::pow(std::abs(v), parameter);
      return acc;
    case CostKind::ThresholdCount:
      for (const auto& v : grid.values()) acc += std::abs(v) > parameter ? 1.0 : 0.0;
      return acc;
  }
  return acc;
}

namespace {

struct Choice {
  double cost;
  std::vector<BasisNode> nodes;
};

Choice search(const PacketTree& tree, const NodeKey& key, const CostFunction& cost, double energy,
              std::map<NodeKey, double>& costs) {
  const double own = cost.evaluate(tree.node(key), energy);
  costs[key] = own;
  Choice keep{own, {{key.n, key.level}}};
  if (key.level == tree.root_level() - tree.depth()) return keep;

  const int a = tree.bank().channels();
  Choice split{0.0, {}};
  for (int s = 0; s < a; ++s) {
    Choice child = search(tree, child_key(key, s, a), cost, energy, costs);
    split.cost += child.cost;
    split.nodes.insert(split.nodes.end(), child.nodes.begin(), child.nodes.end());
  }
  return own <= split.cost ? keep : split;
}

}  // namespace

BestBasisResult best_basis(const PacketTree& tree, const CostFunction& cost) {
  const int a = tree.bank().channels();
  std::uint64_t width = 1;
  for (int t = 0; t <= tree.depth(); ++t) {
    for (std::uint64_t n = 0; n < width; ++n) {
      if (!tree.contains(NodeKey{n, tree.root_level() - t})) {
        throw Error(ErrorCode::IncompleteTree, "missing node (" + std::to_string(n) + ", " +
                                                   std::to_string(tree.root_level() - t) + ")");
      }
    }
    width *= static_cast<std::uint64_t>(a);
  }

  const NodeKey root{0, tree.root_level()};
  BestBasisResult result;
  Choice best = search(tree, root, cost, tree.node(root).energy(), result.node_costs);
  std::sort(best.nodes.begin(), best.nodes.end(), [](const BasisNode& x, const BasisNode& y) {
    return NodeKey{x.n, x.j} < NodeKey{y.n, y.j};
  });
  result.basis = BasisSpec{a, tree.root_level(), std::move(best.nodes), Provenance::BestBasis};
  result.total_cost = best.cost;
  const PartitionReport check = check_partition(result.basis);
  if (!check.admissible) throw Error(ErrorCode::InternalInconsistency, "best basis not admissible: " + check.summary());
  return result;
}

double basis_cost(const PacketTree& tree, const BasisSpec& basis, const CostFunction& cost) {
  const double energy = tree.node(NodeKey{0, tree.root_level()}).energy();
  double total = 0.0;
  for (const auto& node : basis.nodes) total += cost.evaluate(tree.node(NodeKey{node.n, node.j}), energy);
  return total;
}

}  // namespace packetlab
