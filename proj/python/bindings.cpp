#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <packetlab/basis_select.hpp>
#include <packetlab/errors.hpp>
#include <packetlab/filterbank.hpp>
#include <packetlab/frame_analysis.hpp>
#include <packetlab/io.hpp>
#include <packetlab/lattice.hpp>
#include <packetlab/packet_transform.hpp>

namespace py = pybind11;
using namespace packetlab;

namespace {

using Rows = std::vector<std::vector<std::int64_t>>;
using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

// (L, cells) array <-> CoefficientGrid.
CoefficientGrid to_grid(const FilterBank& fb, int level, const ComplexArray& data) {
  CoefficientGrid g(fb.digits_a(), level, fb.multiplicity());
  if (data.ndim() != 2 || static_cast<std::size_t>(data.shape(0)) != static_cast<std::size_t>(fb.multiplicity()) ||
      static_cast<std::size_t>(data.shape(1)) != g.cells()) {
    throw Error(ErrorCode::ShapeMismatch, "data must have shape (L, a^level) = (" + std::to_string(fb.multiplicity()) +
                                              ", " + std::to_string(g.cells()) + ")");
  }
  std::copy(data.data(), data.data() + data.size(), g.values().begin());
  return g;
}

ComplexArray from_grid(const CoefficientGrid& g) {
  ComplexArray out({static_cast<py::ssize_t>(g.multiplicity()), static_cast<py::ssize_t>(g.cells())});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

BasisSpec to_basis(int a, int J, const std::vector<std::pair<std::uint64_t, int>>& nodes) {
  BasisSpec spec{a, J, {}, Provenance::Custom};
  for (const auto& [n, j] : nodes) spec.nodes.push_back({n, j});
  return spec;
}

std::vector<std::pair<std::uint64_t, int>> from_basis(const BasisSpec& spec) {
  std::vector<std::pair<std::uint64_t, int>> out;
  for (const auto& n : spec.nodes) out.emplace_back(n.n, n.j);
  return out;
}

py::dict splitting_dict(const SplittingReport& r) {
  py::dict d;
  d["pass"] = r.pass();
  d["exact_pass"] = r.exact_pass.value_or(false);
  d["max_defect_exact"] = r.max_defect_exact;
  d["grid_pass"] = r.grid_pass.value_or(false);
  d["max_defect_grid"] = r.max_defect_grid;
  d["grid_n"] = r.grid_size;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multiwavelet packets on integer dilation lattices";

  static py::exception<Error> error(m, "PacketlabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error.ptr())(e.what());
      exc.attr("code") = std::string(error_code_name(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def(
      "digit_sets",
      [](const Rows& rows) {
        const DilationMatrix dm = validate_dilation(rows);
        return std::make_pair(digit_set(dm, false).digits, digit_set(dm, true).digits);
      },
      py::arg("matrix"), "Digit sets (K_A, K_B) of a dilation matrix.");

  py::class_<FilterBank>(m, "FilterBank")
      .def_static(
          "from_json", [](const std::string& text) { return io::filterbank_from_json(io::json::parse(text)); },
          py::arg("text"))
      .def_static(
          "haar",
          [](const Rows& rows, int multiplicity, std::optional<Eigen::MatrixXcd> unitary) {
            const DilationMatrix dm = validate_dilation(rows);
            return complete_bank_haar(digit_set(dm, false), digit_set(dm, true), multiplicity, unitary);
          },
          py::arg("matrix"), py::arg("multiplicity") = 1, py::arg("unitary") = py::none(),
          "Constant-polyphase bank from a unitary aL x aL matrix (character matrix by default).")
      .def("to_json", [](const FilterBank& fb) { return io::dump(io::filterbank_to_json(fb)); })
      .def_property_readonly("channels", &FilterBank::channels)
      .def_property_readonly("multiplicity", &FilterBank::multiplicity)
      .def_property_readonly("dim", &FilterBank::dim)
      .def("add_tap", &FilterBank::add_tap, py::arg("r"), py::arg("l"), py::arg("j"), py::arg("k"), py::arg("value"))
      .def("symbol", [](const FilterBank& fb, int r, const Eigen::VectorXd& xi) { return eval_symbol(fb, r, xi).values; },
           py::arg("r"), py::arg("xi"))
      .def("packet_symbol", &packet_symbol, py::arg("n"), py::arg("xi"))
      .def("check_splitting", [](const FilterBank& fb, int grid_n) { return splitting_dict(check_splitting(fb, grid_n)); },
           py::arg("grid_n") = 0)
      .def(
          "frame_bounds",
          [](const FilterBank& fb, int grid_n) {
            const FrameReport r = frame_bounds(fb, grid_n);
            py::dict d;
            d["lambda_min"] = r.lambda_min;
            d["lambda_max"] = r.lambda_max;
            d["lipschitz_slack"] = r.lipschitz_slack;
            d["unitary"] = r.unitary;
            d["grid_n"] = r.grid_n;
            return d;
          },
          py::arg("grid_n") = 0);

  py::class_<PacketTree>(m, "PacketTree")
      .def_property_readonly("root_level", &PacketTree::root_level)
      .def_property_readonly("depth", &PacketTree::depth)
      .def("keys",
           [](const PacketTree& t) {
             std::vector<std::pair<std::uint64_t, int>> keys;
             for (const auto& [key, grid] : t.nodes()) keys.emplace_back(key.n, key.level);
             return keys;
           })
      .def("node", [](const PacketTree& t, std::uint64_t n, int j) { return from_grid(t.node(NodeKey{n, j})); },
           py::arg("n"), py::arg("j"))
      .def("to_json", [](const PacketTree& t) { return io::dump(io::tree_to_json(t)); });

  m.def(
      "decompose",
      [](const FilterBank& fb, const ComplexArray& data, int level, int depth, bool force) {
        return decompose(to_grid(fb, level, data), fb, depth, force ? BankCheck::Skip : BankCheck::Verify);
      },
      py::arg("bank"), py::arg("data"), py::arg("level"), py::arg("depth"), py::arg("force") = false,
      "Packet tree of an (L, a^level) array.");

  m.def(
      "reconstruct",
      [](const PacketTree& tree, std::optional<std::vector<std::pair<std::uint64_t, int>>> nodes) {
        const int a = tree.bank().channels();
        const BasisSpec basis = nodes ? to_basis(a, tree.root_level(), *nodes)
                                      : level_basis(a, tree.root_level(), tree.depth());
        return from_grid(reconstruct(tree, basis));
      },
      py::arg("tree"), py::arg("basis") = py::none());

  m.def(
      "check_partition",
      [](int a, int J, const std::vector<std::pair<std::uint64_t, int>>& nodes) {
        return check_partition(to_basis(a, J, nodes)).admissible;
      },
      py::arg("a"), py::arg("J"), py::arg("nodes"));

  m.def("wavelet_basis", [](int a, int J) { return from_basis(wavelet_basis(a, J)); }, py::arg("a"), py::arg("J"));
  m.def("level_basis", [](int a, int J, int D) { return from_basis(level_basis(a, J, D)); }, py::arg("a"),
        py::arg("J"), py::arg("D"));

  m.def(
      "best_basis",
      [](const PacketTree& tree, const std::string& cost) {
        const BestBasisResult r = best_basis(tree, CostFunction::parse(cost));
        return std::make_pair(from_basis(r.basis), r.total_cost);
      },
      py::arg("tree"), py::arg("cost") = "entropy", "(nodes, total cost) of the minimum-cost basis.");

  m.def("random_unitary", &random_unitary, py::arg("n"), py::arg("seed"));
}
