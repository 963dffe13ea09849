#include "packetlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "packetlab/errors.hpp"
#include "packetlab/io.hpp"

namespace packetlab::cli {

namespace {

using io::json;

[[noreturn]] void usage(const std::string& what) { throw Error(ErrorCode::Usage, what); }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotOrthonormal:
    case ErrorCode::NotUnitary:
    case ErrorCode::LowPassNotIsometric:
    case ErrorCode::InadmissibleBasis:
    case ErrorCode::MissingNode:
    case ErrorCode::IncompleteTree:
    case ErrorCode::SizeOverflow:
    case ErrorCode::Overflow:
    case ErrorCode::EigenFailure:
    case ErrorCode::InternalInconsistency:
      return kDomainFailure;
    default:
      return kUsageError;
  }
}

const std::string& require(const std::string& value, const char* flag) {
  if (value.empty()) usage(std::string("missing ") + flag);
  return value;
}

int require_depth(const RunConfig& c) {
  if (c.depth < 0) usage("--depth must be given and non-negative");
  return c.depth;
}

io::GridEncoding encoding(const RunConfig& c) {
  return c.json_values ? io::GridEncoding::Json : io::GridEncoding::Base64;
}

FilterBank load_bank(const RunConfig& c) {
  return io::filterbank_from_json(io::read_json_file(require(c.bank_path, "--bank")));
}

CoefficientGrid load_data(const RunConfig& c, const FilterBank& bank) {
  CoefficientGrid grid = io::grid_from_json(io::read_json_file(require(c.data_path, "--data")));
  if (!(grid.digits_a().matrix == bank.matrix()) || grid.digits_a().digits != bank.digits_a().digits ||
      grid.multiplicity() != bank.multiplicity()) {
    throw Error(ErrorCode::ShapeMismatch, "data grid does not match the filter bank");
  }
  return grid;
}

PacketTree load_or_build_tree(const RunConfig& c, const FilterBank& bank) {
  if (!c.tree_path.empty()) return io::tree_from_json(io::read_json_file(c.tree_path), bank);
  return decompose(load_data(c, bank), bank, require_depth(c), c.force ? BankCheck::Skip : BankCheck::Verify);
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0' || !std::isfinite(v)) usage("bad number '" + cell + "' in --xi");
    out.push_back(v);
  }
  return out;
}

std::uint64_t parse_index(const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    usage("--n must be a non-negative integer, got '" + text + "'");
  }
  return v;
}

struct Outcome {
  json doc;
  int code = kPass;
};

Outcome cmd_digits(const RunConfig& c) {
  const DilationMatrix m = validate_dilation(io::matrix_rows_from_text(require(c.matrix, "--matrix")));
  return {io::digits_to_json(m, digit_set(m, false), digit_set(m, true))};
}

Outcome cmd_check_filters(const RunConfig& c) {
  const FilterBank bank = load_bank(c);
  SplittingReport exact = check_splitting_exact(bank, c.tol.value_or(kExactTolerance));
  const SplittingReport grid = check_splitting_grid(bank, c.grid_n, c.tol.value_or(kGridTolerance));
  exact.grid_pass = grid.grid_pass;
  exact.max_defect_grid = grid.max_defect_grid;
  exact.grid_size = grid.grid_size;
  return {io::splitting_report_to_json(exact), exact.pass() ? kPass : kDomainFailure};
}

Outcome cmd_complete_filters(const RunConfig& c) {
  if (!c.lowpass_path.empty()) {
    const FilterBank lowpass = io::filterbank_from_json(io::read_json_file(c.lowpass_path));
    const SampledCompletion done = complete_bank_grid(lowpass, c.grid_n);
    json samples = json::array();
    for (std::size_t g = 0; g < done.points.size(); ++g) {
      json xi = json::array();
      for (Eigen::Index i = 0; i < done.points[g].size(); ++i) xi.push_back(io::hex_double(done.points[g][i]));
      samples.push_back(json{{"xi", std::move(xi)}, {"stacked", io::complex_matrix_to_json(done.stacked[g])}});
    }
    return {json{{"schema", "packetlab-sampled-completion-v1"},
                 {"grid_n", done.grid_n},
                 {"L", done.multiplicity},
                 {"channels", done.channels},
                 {"samples", std::move(samples)}}};
  }
  if (c.multiplicity < 1) usage("--multiplicity must be positive");
  const DilationMatrix m = validate_dilation(io::matrix_rows_from_text(require(c.matrix, "--matrix")));
  const DigitSet ka = digit_set(m, false);
  const DigitSet kb = digit_set(m, true);
  std::optional<Eigen::MatrixXcd> u;
  if (!c.unitary_path.empty() && c.random_unitary) usage("--unitary and --random-unitary are exclusive");
  if (!c.unitary_path.empty()) u = io::complex_matrix_from_json(io::read_json_file(c.unitary_path));
  if (c.random_unitary) u = random_unitary(static_cast<int>(ka.size()) * c.multiplicity, c.seed);
  return {io::filterbank_to_json(complete_bank_haar(ka, kb, c.multiplicity, u))};
}

Outcome cmd_decompose(const RunConfig& c) {
  const FilterBank bank = load_bank(c);
  const CoefficientGrid data = load_data(c, bank);
  return {io::tree_to_json(decompose(data, bank, require_depth(c), c.force ? BankCheck::Skip : BankCheck::Verify),
                           encoding(c))};
}

Outcome cmd_reconstruct(const RunConfig& c) {
  const FilterBank bank = load_bank(c);
  const PacketTree tree = io::tree_from_json(io::read_json_file(require(c.tree_path, "--tree")), bank);
  const BasisSpec basis = c.basis_path.empty()
                              ? level_basis(bank.channels(), tree.root_level(), tree.depth())
                              : io::basis_from_json(io::read_json_file(c.basis_path));
  return {io::grid_to_json(reconstruct(tree, basis), encoding(c))};
}

Outcome cmd_partition_check(const RunConfig& c) {
  const BasisSpec basis = io::basis_from_json(io::read_json_file(require(c.basis_path, "--basis")));
  const PartitionReport report = check_partition(basis);
  json doc = io::partition_report_to_json(report);
  doc["schema"] = io::kBasisSchema;
  doc["basis"] = io::basis_to_json(basis);
  return {doc, report.admissible ? kPass : kDomainFailure};
}

Outcome cmd_best_basis(const RunConfig& c) {
  const CostFunction cost = CostFunction::parse(c.cost);
  const FilterBank bank = load_bank(c);
  const PacketTree tree = load_or_build_tree(c, bank);
  const BestBasisResult result = best_basis(tree, cost);
  json table = json::array();
  for (const auto& [key, value] : result.node_costs) {
    table.push_back(json::array({key.n, key.level, io::hex_double(value)}));
  }
  json doc = io::basis_to_json(result.basis);
  doc["cost"] = cost.id();
  doc["cost_table"] = std::move(table);
  doc["total_cost"] = io::hex_double(result.total_cost);
  return {doc};
}

Outcome cmd_frame_bounds(const RunConfig& c) {
  const FilterBank bank = load_bank(c);
  if (c.levels < 0) usage("--levels must be non-negative");
  if (c.c1.has_value() != c.c2.has_value()) usage("--c1 and --c2 go together");
  FrameReport report = frame_bounds(bank, c.grid_n);
  if (c.c1) report.per_level = propagate_bounds(report, *c.c1, *c.c2, c.levels);
  json doc = io::frame_report_to_json(report);
  if (c.c1) {
    doc["c1"] = io::hex_double(*c.c1);
    doc["c2"] = io::hex_double(*c.c2);
  }
  return {doc};
}

Outcome cmd_symbol(const RunConfig& c) {
  const FilterBank bank = load_bank(c);
  const std::uint64_t n = parse_index(require(c.n, "--n"));
  json values = json::array();
  std::stringstream points(require(c.xi, "--xi"));
  std::string point;
  while (std::getline(points, point, ';')) {
    const std::vector<double> coords = parse_reals(point);
    if (static_cast<int>(coords.size()) != bank.dim()) usage("xi point '" + point + "' has the wrong dimension");
    const Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(coords.data(), bank.dim());
    json xi_json = json::array();
    for (double v : coords) xi_json.push_back(io::hex_double(v));
    values.push_back(json{{"xi", std::move(xi_json)}, {"value", io::complex_matrix_to_json(packet_symbol(bank, n, xi))}});
  }
  json digits = json::array();
  for (int mu : a_adic_expansion(n, bank.channels())) digits.push_back(mu);
  return {json{{"schema", "packetlab-symbol-v1"}, {"n", n}, {"expansion", std::move(digits)}, {"values", std::move(values)}}};
}

const std::map<std::string, std::function<Outcome(const RunConfig&)>>& commands() {
  static const std::map<std::string, std::function<Outcome(const RunConfig&)>> table{
      {"digits", cmd_digits},
      {"check-filters", cmd_check_filters},
      {"complete-filters", cmd_complete_filters},
      {"decompose", cmd_decompose},
      {"reconstruct", cmd_reconstruct},
      {"partition-check", cmd_partition_check},
      {"best-basis", cmd_best_basis},
      {"frame-bounds", cmd_frame_bounds},
      {"symbol", cmd_symbol},
  };
  return table;
}

}  // namespace

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto it = commands().find(config.command);
    if (it == commands().end()) usage("unknown command '" + config.command + "'");
    if (config.tol && !(*config.tol > 0.0)) usage("--tol must be positive");
    if (config.grid_n < 0) usage("--grid must be positive");

    Outcome result = it->second(config);
    result.doc["seed"] = config.seed;
    const std::string text = io::dump(result.doc);
    if (config.out_path.empty()) {
      out << text;
    } else {
      io::write_text_file(config.out_path, text);
    }
    return result.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace packetlab::cli
