#include <iostream>

#include <CLI11.hpp>

#include "packetlab/cli.hpp"

int main(int argc, char** argv) {
  using packetlab::cli::RunConfig;
  RunConfig config;
  double c1 = 0.0;
  double c2 = 0.0;
  double tol = 0.0;

  CLI::App app{"packetlab: multiwavelet packets on integer dilation lattices"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", config.out_path, "write the report here instead of stdout");
    sub->add_option("--seed", config.seed, "seed recorded in the report");
  };
  auto banked = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--bank", config.bank_path, "filter bank JSON")->required();
  };

  auto* digits = app.add_subcommand("digits", "digit sets for A and its transpose");
  common(digits);
  digits->add_option("--matrix", config.matrix, "rows separated by ';', e.g. 1,1;1,-1")->required();

  auto* check = app.add_subcommand("check-filters", "orthonormality of a filter bank");
  banked(check);
  check->add_option("--grid", config.grid_n, "grid points per axis");
  auto* tol_opt = check->add_option("--tol", tol, "defect tolerance");

  auto* complete = app.add_subcommand("complete-filters", "complete a bank to an orthonormal one");
  common(complete);
  complete->add_option("--matrix", config.matrix, "dilation matrix");
  complete->add_option("--multiplicity,-L", config.multiplicity, "multiplicity L");
  complete->add_option("--unitary", config.unitary_path, "unitary aL x aL matrix JSON");
  complete->add_flag("--random-unitary", config.random_unitary, "draw the unitary from --seed");
  complete->add_option("--lowpass", config.lowpass_path, "low-pass bank for pointwise completion");
  complete->add_option("--grid", config.grid_n, "grid points per axis");

  auto* dec = app.add_subcommand("decompose", "full packet tree to --depth");
  banked(dec);
  dec->add_option("--data", config.data_path, "coefficient grid JSON")->required();
  dec->add_option("--depth", config.depth, "tree depth")->required();
  dec->add_flag("--force", config.force, "skip the orthonormality check");
  dec->add_flag("--json-values", config.json_values, "write grids as JSON arrays");

  auto* rec = app.add_subcommand("reconstruct", "synthesize the root from a basis");
  banked(rec);
  rec->add_option("--tree", config.tree_path, "packet tree JSON")->required();
  rec->add_option("--basis", config.basis_path, "basis JSON (default: the deepest level)");
  rec->add_flag("--json-values", config.json_values, "write grids as JSON arrays");

  auto* part = app.add_subcommand("partition-check", "admissibility of a basis");
  common(part);
  part->add_option("--basis", config.basis_path, "basis JSON")->required();

  auto* best = app.add_subcommand("best-basis", "minimum-cost basis");
  banked(best);
  best->add_option("--tree", config.tree_path, "packet tree JSON");
  best->add_option("--data", config.data_path, "coefficient grid JSON, decomposed to --depth");
  best->add_option("--depth", config.depth, "tree depth with --data");
  best->add_flag("--force", config.force, "skip the orthonormality check");
  best->add_option("--cost", config.cost, "entropy, l1, lp:P or threshold:T");

  auto* frame = app.add_subcommand("frame-bounds", "sampled frame bounds");
  banked(frame);
  frame->add_option("--grid", config.grid_n, "grid points per axis");
  auto* c1_opt = frame->add_option("--c1", c1, "lower bound of the input frame");
  auto* c2_opt = frame->add_option("--c2", c2, "upper bound of the input frame");
  frame->add_option("--levels,-J", config.levels, "number of levels in the bound table");

  auto* sym = app.add_subcommand("symbol", "packet symbol at given frequencies");
  banked(sym);
  sym->add_option("--n", config.n, "packet index")->required();
  sym->add_option("--xi", config.xi, "points separated by ';', coordinates by ','")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : packetlab::cli::kUsageError;
  }

  config.command = app.get_subcommands().front()->get_name();
  if (*tol_opt) config.tol = tol;
  if (*c1_opt) config.c1 = c1;
  if (*c2_opt) config.c2 = c2;
  return packetlab::cli::run_command(config, std::cout, std::cerr);
}
