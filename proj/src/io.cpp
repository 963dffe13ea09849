#include "packetlab/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "packetlab/errors.hpp"

namespace packetlab::io {

namespace {

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::FormatError, what); }

void expect_schema(const json& doc, std::string_view schema) {
  if (!doc.is_object()) format_error("expected a JSON object");
  if (doc.contains("schema") && doc.at("schema").get<std::string>() != schema) {
    format_error("schema '" + doc.at("schema").get<std::string>() + "' is not " + std::string(schema));
  }
}

// Runs a parser and converts JSON library failures into FormatError.
template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    format_error(e.what());
  }
}

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

DigitSet digits_from(const json& doc, const char* key, const DilationMatrix& m, bool transpose) {
  if (!doc.contains(key)) return digit_set(m, transpose);
  std::vector<IntVec> digits;
  for (const auto& d : doc.at(key)) digits.push_back(int_vec_from_json(d, m.dim()));
  return make_digit_set(m, transpose, std::move(digits));
}

json node_pair(const BasisNode& n) { return json::array({n.n, n.j}); }

}  // namespace

std::string hex_double(double v) {
  if (!std::isfinite(v)) format_error("non-finite value cannot be serialized");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) format_error("expected a number or numeric string");
  const std::string text = v.get<std::string>();
  char* end = nullptr;
  const double out = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || !std::isfinite(out)) format_error("bad numeric string '" + text + "'");
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) format_error("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      int d = 0;
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) format_error("misplaced base64 padding");
        ++pad;
      } else {
        if (pad) format_error("misplaced base64 padding");
        d = decode_char(c);
        if (d < 0) format_error("invalid base64 character");
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

json complex_to_json(Complex c) { return json{{"re", hex_double(c.real())}, {"im", hex_double(c.imag())}}; }

Complex complex_from_json(const json& j) {
  if (j.is_array() && j.size() == 2) return {parse_double(j[0]), parse_double(j[1])};
  if (j.is_object()) return {parse_double(j.at("re")), j.contains("im") ? parse_double(j.at("im")) : 0.0};
  return {parse_double(j), 0.0};
}

json int_vec_to_json(const IntVec& v) { return json(v); }

IntVec int_vec_from_json(const json& j, int dim) {
  if (!j.is_array()) format_error("expected an integer vector");
  IntVec out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) format_error("expected integer entries");
    out.push_back(x.get<std::int64_t>());
  }
  if (static_cast<int>(out.size()) != dim) format_error("vector has dimension " + std::to_string(out.size()));
  return out;
}

std::vector<std::vector<std::int64_t>> matrix_rows_from_json(const json& j) {
  return guarded([&] {
    if (!j.is_array()) format_error("matrix must be an array of rows");
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& row : j) {
      if (!row.is_array()) format_error("matrix row must be an array");
      std::vector<std::int64_t> r;
      for (const auto& x : row) {
        if (!x.is_number_integer()) format_error("matrix entries must be integers");
        r.push_back(x.get<std::int64_t>());
      }
      rows.push_back(std::move(r));
    }
    return rows;
  });
}

std::vector<std::vector<std::int64_t>> matrix_rows_from_text(std::string_view text) {
  if (!text.empty() && text.front() == '[') {
    try {
      return matrix_rows_from_json(json::parse(text));
    } catch (const json::exception& e) {
      format_error(e.what());
    }
  }
  std::vector<std::vector<std::int64_t>> rows;
  std::string s(text);
  std::stringstream rows_in(s);
  std::string row_text;
  while (std::getline(rows_in, row_text, ';')) {
    std::vector<std::int64_t> row;
    std::stringstream cells(row_text);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const long long v = std::strtoll(cell.c_str(), &end, 10);
      while (end && *end == ' ') ++end;
      if (cell.empty() || end == cell.c_str() || *end != '\0') format_error("bad matrix entry '" + cell + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) format_error("empty matrix");
  return rows;
}

json digits_to_json(const DilationMatrix& m, const DigitSet& ka, const DigitSet& kb) {
  return json{{"schema", kDigitsSchema}, {"dim", m.dim()},          {"det_abs", m.det_abs()},
              {"matrix", m.a().rows()},  {"digits_A", ka.digits}, {"digits_B", kb.digits}};
}

json filterbank_to_json(const FilterBank& fb) {
  json channels = json::array();
  for (int r = 0; r < fb.channels(); ++r) {
    json entries = json::array();
    for (int l = 0; l < fb.multiplicity(); ++l)
      for (int j = 0; j < fb.multiplicity(); ++j) {
        const Sequence& seq = fb.sequence(r, l, j);
        if (seq.empty()) continue;
        json taps = json::array();
        for (const auto& tap : seq.taps()) {
          taps.push_back(json{{"k", tap.k}, {"re", hex_double(tap.value.real())}, {"im", hex_double(tap.value.imag())}});
        }
        entries.push_back(json{{"l", l}, {"j", j}, {"taps", std::move(taps)}});
      }
    channels.push_back(json{{"r", r}, {"entries", std::move(entries)}});
  }
  return json{{"schema", kFilterBankSchema},
              {"dim", fb.dim()},
              {"L", fb.multiplicity()},
              {"det_abs", fb.matrix().det_abs()},
              {"matrix", fb.matrix().a().rows()},
              {"digits_A", fb.digits_a().digits},
              {"digits_B", fb.digits_b().digits},
              {"channels", std::move(channels)}};
}

FilterBank filterbank_from_json(const json& doc) {
  return guarded([&] {
    expect_schema(doc, kFilterBankSchema);
    const DilationMatrix m = validate_dilation(matrix_rows_from_json(doc.at("matrix")));
    if (doc.contains("dim") && doc.at("dim").get<int>() != m.dim()) format_error("dim does not match matrix");
    if (doc.contains("det_abs") && doc.at("det_abs").get<std::int64_t>() != m.det_abs()) {
      format_error("det_abs does not match matrix");
    }
    const int L = doc.value("L", 1);
    FilterBank fb(digits_from(doc, "digits_A", m, false), digits_from(doc, "digits_B", m, true), L);
    for (const auto& ch : doc.at("channels")) {
      const int r = ch.at("r").get<int>();
      if (r < 0 || r >= fb.channels()) format_error("channel index " + std::to_string(r) + " out of range");
      for (const auto& entry : ch.at("entries")) {
        const int l = entry.at("l").get<int>();
        const int j = entry.at("j").get<int>();
        if (l < 0 || l >= L || j < 0 || j >= L) format_error("multiplicity index out of range");
        for (const auto& tap : entry.at("taps")) {
          const Complex v{parse_double(tap.at("re")), tap.contains("im") ? parse_double(tap.at("im")) : 0.0};
          fb.add_tap(r, l, j, int_vec_from_json(tap.at("k"), m.dim()), v);
        }
      }
    }
    return fb;
  });
}

json grid_to_json(const CoefficientGrid& grid, GridEncoding encoding) {
  json doc{{"schema", kGridSchema},
           {"dim", grid.digits_a().dim()},
           {"level", grid.level()},
           {"L", grid.multiplicity()},
           {"matrix", grid.digits_a().matrix.a().rows()},
           {"digits_A", grid.digits_a().digits}};
  if (encoding == GridEncoding::Base64) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(grid.values().size() * 16);
    auto put = [&](double x) {
      const auto bits = std::bit_cast<std::uint64_t>(x);
      for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    };
    for (const auto& v : grid.values()) {
      put(v.real());
      put(v.imag());
    }
    doc["encoding"] = "base64-f64le";
    doc["payload"] = base64_encode(bytes);
  } else {
    json values = json::array();
    for (const auto& v : grid.values()) values.push_back(json::array({hex_double(v.real()), hex_double(v.imag())}));
    doc["encoding"] = "json";
    doc["values"] = std::move(values);
  }
  return doc;
}

CoefficientGrid grid_from_json(const json& doc) {
  return guarded([&] {
    expect_schema(doc, kGridSchema);
    const DilationMatrix m = validate_dilation(matrix_rows_from_json(doc.at("matrix")));
    DigitSet ka = digits_from(doc, "digits_A", m, false);
    const int level = doc.at("level").get<int>();
    const int L = doc.value("L", 1);
    const std::string encoding = doc.value("encoding", std::string("json"));
    std::vector<Complex> values;
    if (encoding == "base64-f64le") {
      const auto bytes = base64_decode(doc.at("payload").get<std::string>());
      if (bytes.size() % 16 != 0) format_error("payload is not a whole number of complex values");
      auto get = [&](std::size_t offset) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[offset + b]) << (8 * b);
        return std::bit_cast<double>(bits);
      };
      for (std::size_t i = 0; i < bytes.size(); i += 16) values.emplace_back(get(i), get(i + 8));
    } else if (encoding == "json") {
      for (const auto& v : doc.at("values")) values.push_back(complex_from_json(v));
    } else {
      format_error("unknown grid encoding '" + encoding + "'");
    }
    try {
      return CoefficientGrid(std::move(ka), level, L, std::move(values));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ShapeMismatch) format_error(e.what());
      throw;
    }
  });
}

json tree_to_json(const PacketTree& tree, GridEncoding encoding) {
  json nodes = json::array();
  for (const auto& [key, grid] : tree.nodes()) {
    nodes.push_back(json{{"n", key.n}, {"j", key.level}, {"grid", grid_to_json(grid, encoding)}});
  }
  return json{{"schema", kTreeSchema},
              {"root_level", tree.root_level()},
              {"depth", tree.depth()},
              {"nodes", std::move(nodes)}};
}

PacketTree tree_from_json(const json& doc, const FilterBank& bank) {
  return guarded([&] {
    expect_schema(doc, kTreeSchema);
    PacketTree tree(bank, doc.at("root_level").get<int>(), doc.at("depth").get<int>());
    for (const auto& node : doc.at("nodes")) {
      CoefficientGrid grid = grid_from_json(node.at("grid"));
      if (grid.multiplicity() != bank.multiplicity() || !(grid.digits_a().matrix == bank.matrix()) ||
          grid.digits_a().digits != bank.digits_a().digits) {
        format_error("tree node grid does not match the filter bank lattice");
      }
      tree.insert(NodeKey{node.at("n").get<std::uint64_t>(), node.at("j").get<int>()}, std::move(grid));
    }
    return tree;
  });
}

json basis_to_json(const BasisSpec& spec) {
  json nodes = json::array();
  for (const auto& n : spec.nodes) nodes.push_back(node_pair(n));
  return json{{"schema", kBasisSchema},
              {"a", spec.base},
              {"J", spec.exponent},
              {"nodes", std::move(nodes)},
              {"provenance", provenance_name(spec.provenance)}};
}

BasisSpec basis_from_json(const json& doc) {
  return guarded([&] {
    expect_schema(doc, kBasisSchema);
    BasisSpec spec;
    spec.base = doc.at("a").get<int>();
    spec.exponent = doc.at("J").get<int>();
    if (spec.base < 2 || spec.exponent < 0) format_error("basis needs a >= 2 and J >= 0");
    for (const auto& n : doc.at("nodes")) {
      if (!n.is_array() || n.size() != 2) format_error("basis node must be [n, j]");
      if (!n[0].is_number_unsigned()) format_error("packet index must be a non-negative integer");
      spec.nodes.push_back({n[0].get<std::uint64_t>(), n[1].get<int>()});
    }
    spec.provenance = parse_provenance(doc.value("provenance", std::string("custom")));
    return spec;
  });
}

json partition_report_to_json(const PartitionReport& report) {
  json overlaps = json::array();
  for (const auto& [x, y] : report.overlaps) overlaps.push_back(json::array({node_pair(x), node_pair(y)}));
  json gaps = json::array();
  for (const auto& [lo, hi] : report.gaps) gaps.push_back(json::array({lo, hi}));
  json out_of_range = json::array();
  for (const auto& n : report.out_of_range) out_of_range.push_back(node_pair(n));
  return json{{"admissible", report.admissible},
              {"overlaps", std::move(overlaps)},
              {"gaps", std::move(gaps)},
              {"out_of_range", std::move(out_of_range)},
              {"total_length", report.total_length}};
}

json splitting_report_to_json(const SplittingReport& report) {
  json doc{{"schema", kSplittingSchema}, {"pass", report.pass()}};
  if (report.exact_pass) {
    doc["exact_pass"] = *report.exact_pass;
    doc["max_defect_exact"] = hex_double(report.max_defect_exact);
    if (report.worst_exact) {
      const auto& w = *report.worst_exact;
      doc["worst_exact"] = json{{"r", w.r}, {"s", w.s}, {"j", w.j}, {"l", w.l}, {"p", w.p}};
    }
  }
  if (report.grid_pass) {
    doc["grid_pass"] = *report.grid_pass;
    doc["max_defect_grid"] = hex_double(report.max_defect_grid);
    doc["grid_n"] = report.grid_size;
  }
  return doc;
}

json frame_report_to_json(const FrameReport& report) {
  json rows = json::array();
  for (const auto& row : report.per_level) {
    rows.push_back(json::array({row.level, hex_double(row.lower), hex_double(row.upper)}));
  }
  return json{{"schema", kFrameSchema},
              {"grid_n", report.grid_n},
              {"lambda_min", hex_double(report.lambda_min)},
              {"lambda_max", hex_double(report.lambda_max)},
              {"lipschitz_slack", hex_double(report.lipschitz_slack)},
              {"unitary", report.unitary},
              {"per_level", std::move(rows)}};
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({hex_double(m(i, j).real()), hex_double(m(i, j).imag())}));
    }
    rows.push_back(std::move(row));
  }
  return json{{"schema", kMatrixSchema}, {"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(rows)}};
}

Eigen::MatrixXcd complex_matrix_from_json(const json& doc) {
  return guarded([&] {
    expect_schema(doc, kMatrixSchema);
    const json& entries = doc.at("entries");
    const auto rows = static_cast<Eigen::Index>(entries.size());
    const auto cols = rows ? static_cast<Eigen::Index>(entries[0].size()) : 0;
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (static_cast<Eigen::Index>(entries[i].size()) != cols) format_error("ragged matrix");
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_from_json(entries[i][j]);
    }
    return m;
  });
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) format_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    format_error(path.string() + ": " + e.what());
  }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Usage, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Usage, "write failed for " + path.string());
}

}  // namespace packetlab::io
