#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <unistd.h>

#include <packetlab/cli.hpp>
#include <packetlab/errors.hpp>
#include <packetlab/io.hpp>

#include "corpus.hpp"

using namespace packetlab;
using packetlab::io::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("packetlab-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(cli::RunConfig c) {
  std::ostringstream out, err;
  const int code = cli::run_command(c, out, err);
  return {code, out.str(), err.str()};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Usage;
}

void save(const std::string& path, const json& doc) { io::write_text_file(path, io::dump(doc)); }

}  // namespace

TEST_CASE("hex floats round trip exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(io::parse_double(json(io::hex_double(v))) == v);
  }
  CHECK(io::hex_double(0.5) == "0x1p-1");
  CHECK(io::parse_double(json("0.25")) == 0.25);
  CHECK(io::parse_double(json(3)) == 3.0);
  CHECK(code_of([] { io::parse_double(json("1.0x")); }) == ErrorCode::FormatError);
  CHECK(code_of([] { io::parse_double(json::array()); }) == ErrorCode::FormatError);
  CHECK(code_of([] { io::hex_double(NAN); }) == ErrorCode::FormatError);
}

TEST_CASE("base64") {
  const std::string text = "foobar";
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  CHECK(io::base64_encode(std::span(bytes).first(0)).empty());
  CHECK(io::base64_encode(std::span(bytes).first(1)) == "Zg==");
  CHECK(io::base64_encode(std::span(bytes).first(2)) == "Zm8=");
  CHECK(io::base64_encode(bytes) == "Zm9vYmFy");
  std::mt19937_64 rng(2);
  for (std::size_t n = 0; n < 40; ++n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    CHECK(io::base64_decode(io::base64_encode(v)) == v);
  }
  for (const char* bad : {"Zg=", "Z===", "Zm9v!mFy", "Zg==Zg=="}) {
    CHECK(code_of([&] { io::base64_decode(bad); }) == ErrorCode::FormatError);
  }
}

TEST_CASE("matrix text") {
  CHECK(io::matrix_rows_from_text("1,1;1,-1") == std::vector<std::vector<std::int64_t>>{{1, 1}, {1, -1}});
  CHECK(io::matrix_rows_from_text("[[1,1],[1,-1]]") == std::vector<std::vector<std::int64_t>>{{1, 1}, {1, -1}});
  CHECK(code_of([] { io::matrix_rows_from_text("[[1,1],"); }) == ErrorCode::FormatError);
  CHECK(io::matrix_rows_from_text("2") == std::vector<std::vector<std::int64_t>>{{2}});
  CHECK(code_of([] { io::matrix_rows_from_text("1,a"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { io::matrix_rows_from_text(""); }) == ErrorCode::FormatError);
}

TEST_CASE("filter banks round trip") {
  for (const auto& entry : corpus::orthonormal()) {
    CAPTURE(entry.name);
    const json doc = io::filterbank_to_json(entry.bank);
    const FilterBank back = io::filterbank_from_json(json::parse(io::dump(doc)));
    CHECK(io::dump(io::filterbank_to_json(back)) == io::dump(doc));
    CHECK(back.digits_a().digits == entry.bank.digits_a().digits);
  }
}

TEST_CASE("filter bank parsing errors") {
  json doc = io::filterbank_to_json(corpus::haar(corpus::dilation({{2}})));
  json wrong = doc;
  wrong["schema"] = "packetlab-grid-v1";
  CHECK(code_of([&] { io::filterbank_from_json(wrong); }) == ErrorCode::FormatError);
  json digits = doc;
  digits["digits_A"] = json::array({json::array({0}), json::array({2})});
  CHECK(code_of([&] { io::filterbank_from_json(digits); }) == ErrorCode::InvalidDigitSet);
  json missing = doc;
  missing.erase("channels");
  CHECK(code_of([&] { io::filterbank_from_json(missing); }) == ErrorCode::FormatError);
  json channel = doc;
  channel["channels"][0]["r"] = 2;
  CHECK(code_of([&] { io::filterbank_from_json(channel); }) == ErrorCode::FormatError);
  json matrix = doc;
  matrix["matrix"] = json::array({json::array({1})});
  CHECK(code_of([&] { io::filterbank_from_json(matrix); }) == ErrorCode::SingularOrUnit);
  json implicit = doc;
  implicit.erase("digits_A");
  implicit.erase("digits_B");
  CHECK_NOTHROW(io::filterbank_from_json(implicit));
}

TEST_CASE("grids and trees round trip in both encodings") {
  std::mt19937_64 rng(4);
  const FilterBank fb = corpus::with_unitary(corpus::dilation({{1, 1}, {1, -1}}), 2, random_unitary(4, 8));
  CoefficientGrid x(fb.digits_a(), 3, 2);
  x.values() = corpus::random_values(x.values().size(), rng);
  for (auto enc : {io::GridEncoding::Base64, io::GridEncoding::Json}) {
    const CoefficientGrid back = io::grid_from_json(json::parse(io::dump(io::grid_to_json(x, enc))));
    CHECK(max_abs_diff(back, x) == 0.0);
    const PacketTree tree = decompose(x, fb, 2);
    const PacketTree tree_back = io::tree_from_json(json::parse(io::dump(io::tree_to_json(tree, enc))), fb);
    REQUIRE(tree_back.nodes().size() == tree.nodes().size());
    for (const auto& [key, grid] : tree.nodes()) CHECK(max_abs_diff(tree_back.node(key), grid) == 0.0);
  }
  json bad = io::grid_to_json(x);
  bad["payload"] = "AAAA";
  CHECK(code_of([&] { io::grid_from_json(bad); }) == ErrorCode::FormatError);
  json decimal = io::grid_to_json(x, io::GridEncoding::Json);
  decimal["values"][0] = json::array({1.5, -2});
  CHECK(io::grid_from_json(decimal).at(0, 0) == Complex(1.5, -2));
}

TEST_CASE("basis documents") {
  const BasisSpec spec = wavelet_basis(3, 2);
  const BasisSpec back = io::basis_from_json(json::parse(io::dump(io::basis_to_json(spec))));
  CHECK(back.nodes == spec.nodes);
  CHECK(back.base == 3);
  CHECK(back.provenance == Provenance::Wavelet);
  json bad = io::basis_to_json(spec);
  bad["nodes"][0] = json::array({-1, 0});
  CHECK(code_of([&] { io::basis_from_json(bad); }) == ErrorCode::FormatError);
}

TEST_CASE("output has sorted keys") {
  const std::string text = io::dump(json{{"zeta", 1}, {"alpha", 2}});
  CHECK(text.find("alpha") < text.find("zeta"));
  CHECK(text.back() == '\n');
}

TEST_CASE("cli digits") {
  cli::RunConfig c;
  c.command = "digits";
  c.matrix = "1,1;1,-1";
  Run r = run(c);
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["digits_A"] == json::parse("[[0,0],[1,0]]"));
  CHECK(json::parse(r.out)["seed"] == 0);
  c.matrix = "2";
  CHECK(json::parse(run(c).out)["digits_A"] == json::parse("[[0],[1]]"));
  c.matrix = "1,0;0,1";
  r = run(c);
  CHECK(r.code == 2);
  CHECK(r.err.find("SingularOrUnit") != std::string::npos);
  c.matrix = "";
  CHECK(run(c).code == 2);
}

TEST_CASE("cli check-filters and frame-bounds") {
  TempDir dir;
  const FilterBank haar = corpus::haar(corpus::dilation({{2}}));
  save(dir.file("haar.json"), io::filterbank_to_json(haar));
  save(dir.file("scaled.json"), io::filterbank_to_json(corpus::scaled(haar, 0.5)));
  {
    std::ofstream(dir.file("broken.json")) << "{\"schema\": ";
  }

  cli::RunConfig c;
  c.command = "check-filters";
  c.bank_path = dir.file("haar.json");
  CHECK(run(c).code == 0);
  c.bank_path = dir.file("scaled.json");
  Run r = run(c);
  CHECK(r.code == 1);
  CHECK(io::parse_double(json::parse(r.out)["max_defect_exact"]) == doctest::Approx(0.75));
  c.bank_path = dir.file("broken.json");
  CHECK(run(c).code == 2);
  c.bank_path = dir.file("absent.json");
  CHECK(run(c).code == 2);
  c.bank_path = dir.file("haar.json");
  c.tol = -1.0;
  CHECK(run(c).code == 2);

  cli::RunConfig f;
  f.command = "frame-bounds";
  f.bank_path = dir.file("haar.json");
  r = run(f);
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["unitary"] == true);
  f.bank_path = dir.file("scaled.json");
  f.c1 = 1.0;
  f.c2 = 2.0;
  f.levels = 2;
  r = run(f);
  REQUIRE(r.code == 0);
  const json rows = json::parse(r.out)["per_level"];
  REQUIRE(rows.size() == 3);
  CHECK(io::parse_double(rows[2][1]) == doctest::Approx(1.0 / 16));
  CHECK(io::parse_double(rows[2][2]) == doctest::Approx(2.0 / 16));
  f.c1 = 3.0;
  CHECK(run(f).code == 2);
}

TEST_CASE("cli decompose, reconstruct, best-basis, partition-check") {
  TempDir dir;
  std::mt19937_64 rng(5);
  const FilterBank fb = corpus::daubechies4();
  save(dir.file("bank.json"), io::filterbank_to_json(fb));
  CoefficientGrid x(fb.digits_a(), 5, 1);
  x.values() = corpus::random_values(x.values().size(), rng);
  save(dir.file("data.json"), io::grid_to_json(x));

  cli::RunConfig d;
  d.command = "decompose";
  d.bank_path = dir.file("bank.json");
  d.data_path = dir.file("data.json");
  d.depth = 5;
  d.out_path = dir.file("tree.json");
  REQUIRE(run(d).code == 0);

  cli::RunConfig rc;
  rc.command = "reconstruct";
  rc.bank_path = d.bank_path;
  rc.tree_path = d.out_path;
  Run r = run(rc);
  REQUIRE(r.code == 0);
  CHECK(max_abs_diff(io::grid_from_json(json::parse(r.out)), x) < 1e-10);

  save(dir.file("wavelet.json"), io::basis_to_json(wavelet_basis(2, 5)));
  rc.basis_path = dir.file("wavelet.json");
  r = run(rc);
  REQUIRE(r.code == 0);
  CHECK(max_abs_diff(io::grid_from_json(json::parse(r.out)), x) < 1e-10);

  save(dir.file("bad-basis.json"), io::basis_to_json(BasisSpec{2, 5, {{0, 5}, {1, 0}}, Provenance::Custom}));
  rc.basis_path = dir.file("bad-basis.json");
  CHECK(run(rc).code == 1);

  cli::RunConfig p;
  p.command = "partition-check";
  p.basis_path = dir.file("wavelet.json");
  CHECK(run(p).code == 0);
  p.basis_path = dir.file("bad-basis.json");
  r = run(p);
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["admissible"] == false);

  d.depth = 0;
  d.out_path = dir.file("tree0.json");
  REQUIRE(run(d).code == 0);
  rc.tree_path = d.out_path;
  rc.basis_path.clear();
  CHECK(max_abs_diff(io::grid_from_json(json::parse(run(rc).out)), x) == 0.0);

  d.depth = 6;
  CHECK(run(d).code == 2);
  save(dir.file("scaled.json"), io::filterbank_to_json(corpus::scaled(fb, 1.1)));
  d.depth = 2;
  d.bank_path = dir.file("scaled.json");
  CHECK(run(d).code == 1);
  d.force = true;
  CHECK(run(d).code == 0);

  cli::RunConfig b;
  b.command = "best-basis";
  b.bank_path = dir.file("bank.json");
  b.tree_path = dir.file("tree.json");
  b.cost = "l1";
  r = run(b);
  REQUIRE(r.code == 0);
  const json best = json::parse(r.out);
  CHECK(best["provenance"] == "best-basis");
  CHECK(best["cost_table"].size() == 63);
  CHECK(check_partition(io::basis_from_json(best)).admissible);
  b.cost = "bogus";
  CHECK(run(b).code == 2);

  save(dir.file("zero.json"), io::grid_to_json(CoefficientGrid(fb.digits_a(), 4, 1)));
  b.cost = "entropy";
  b.tree_path.clear();
  b.data_path = dir.file("zero.json");
  b.depth = 4;
  r = run(b);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["nodes"] == json::parse("[[0,4]]"));
}

TEST_CASE("cli complete-filters and symbol") {
  TempDir dir;
  cli::RunConfig c;
  c.command = "complete-filters";
  c.matrix = "1,1;1,-1";
  c.multiplicity = 2;
  c.random_unitary = true;
  c.seed = 7;
  c.out_path = dir.file("bank.json");
  REQUIRE(run(c).code == 0);
  const FilterBank fb = io::filterbank_from_json(io::read_json_file(c.out_path));
  CHECK(check_splitting(fb).pass());
  CHECK(io::read_json_file(c.out_path)["seed"] == 7);

  save(dir.file("u.json"), io::complex_matrix_to_json(Eigen::MatrixXcd::Identity(2, 2) * 1.5));
  cli::RunConfig bad;
  bad.command = "complete-filters";
  bad.matrix = "2";
  bad.unitary_path = dir.file("u.json");
  CHECK(run(bad).code == 1);

  cli::RunConfig low;
  low.command = "complete-filters";
  save(dir.file("low.json"), io::filterbank_to_json(corpus::map_taps(
                                 corpus::daubechies4(),
                                 [](int r, int, int, const IntVec&, Complex v) { return r == 0 ? v : Complex(0.0); })));
  low.lowpass_path = dir.file("low.json");
  low.grid_n = 8;
  const Run lr = run(low);
  REQUIRE(lr.code == 0);
  CHECK(json::parse(lr.out)["samples"].size() == 8);

  cli::RunConfig s;
  s.command = "symbol";
  s.bank_path = c.out_path;
  s.n = "0";
  s.xi = "0.1,0.2";
  Run r = run(s);
  REQUIRE(r.code == 0);
  const Eigen::MatrixXcd id = io::complex_matrix_from_json(json::parse(r.out)["values"][0]["value"]);
  CHECK(id.isIdentity(0.0));
  s.n = "5";
  s.xi = "0.1,0.2;-1,3";
  r = run(s);
  REQUIRE(r.code == 0);
  Eigen::VectorXd xi(2);
  xi << -1.0, 3.0;
  const Eigen::MatrixXcd got = io::complex_matrix_from_json(json::parse(r.out)["values"][1]["value"]);
  CHECK((got - packet_symbol(fb, 5, xi)).cwiseAbs().maxCoeff() == 0.0);
  s.n = "-5";
  CHECK(run(s).code == 2);
  s.n = "3";
  s.xi = "0.1";
  CHECK(run(s).code == 2);
}

TEST_CASE("cli rejects unknown commands and repeats byte for byte") {
  cli::RunConfig c;
  c.command = "transmogrify";
  CHECK(run(c).code == 2);
  c.command = "complete-filters";
  c.matrix = "3";
  c.multiplicity = 2;
  c.random_unitary = true;
  c.seed = 99;
  const Run first = run(c);
  const Run second = run(c);
  CHECK(first.code == 0);
  CHECK(first.out == second.out);
  c.seed = 100;
  CHECK(run(c).out != first.out);
}
