#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace bmep::cli;

  CLI::App app{"Balanced minimum evolution toolkit: evaluate, approximate, solve and generate instances."};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions opts;
  std::string mode;
  app.add_option("--mode", mode, "Arithmetic: exact (integer matrices) or float")
      ->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--seed", opts.seed, "Random seed");
  app.add_option("--max-n", opts.max_n, "Exact-solver cap on species count")->capture_default_str();
  app.add_option("--cap-embeddings", opts.cap_embeddings, "Maximum embeddings to enumerate")->capture_default_str();
  app.add_flag("--csv", opts.csv, "CSV table output (ratio)");
  app.add_flag("--json", opts.json, "JSON report output");
  app.add_flag("--timing", opts.timing, "Include elapsed time in the report");

  std::string matrix_path, tree_path;

  auto* evaluate = app.add_subcommand("evaluate", "Objective, pi row sums and Kraft check of a tree");
  evaluate->add_option("matrix", matrix_path, "Matrix file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("tree", tree_path, "Newick file")->required()->check(CLI::ExistingFile);

  auto* approx = app.add_subcommand("approx", "MST-based approximation");
  approx->add_option("matrix", matrix_path, "Matrix file")->required()->check(CLI::ExistingFile);

  auto* exact = app.add_subcommand("exact", "Exact optimum by enumerating all cubic topologies");
  exact->add_option("matrix", matrix_path, "Matrix file")->required()->check(CLI::ExistingFile);

  std::string family, range;
  auto* ratio = app.add_subcommand("ratio", "OPT, TSP and MST table over a family");
  ratio->add_option("--family", family, "cycle or star")->required();
  ratio->add_option("--n-range", range, "Range such as 5..8")->required();

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--family", gen_opts.family, "all-ones, star, cycle, random, reduction or lift")->required();
  gen->add_option("--n", gen_opts.n, "Species count");
  gen->add_option("--graph", gen_opts.graph_path, "Edge-list graph (reduction)")->check(CLI::ExistingFile);
  gen->add_option("--lambda", gen_opts.lambda, "Reduction parameter in (1/2, 2/3)")->capture_default_str();
  gen->add_option("--coloring", gen_opts.coloring_path, "Proper 3-colouring (reduction)")->check(CLI::ExistingFile);
  gen->add_option("--input", gen_opts.input_path, "0/1 matrix to lift")->check(CLI::ExistingFile);
  gen->add_option("--out", gen_opts.out_path, "Matrix output file (default stdout)");
  gen->add_option("--witness-out", gen_opts.witness_out, "Witness Newick output file");

  ToursOptions tours_opts;
  auto* tours = app.add_subcommand("tours", "Compatible tours: sampled or enumerated mean cost against f");
  tours->add_option("matrix", matrix_path, "Matrix file")->required()->check(CLI::ExistingFile);
  tours->add_option("tree", tree_path, "Newick file")->required()->check(CLI::ExistingFile);
  tours->add_option("--samples", tours_opts.samples, "Number of sampled tours");
  tours->add_flag("--enumerate", tours_opts.enumerate, "Enumerate every embedding");

  CLI11_PARSE(app, argc, argv);
  if (!mode.empty()) opts.mode = mode;

  try {
    if (evaluate->parsed()) return cmd_evaluate(matrix_path, tree_path, opts, std::cout, std::cerr);
    if (approx->parsed()) return cmd_approx(matrix_path, opts, std::cout, std::cerr);
    if (exact->parsed()) return cmd_exact(matrix_path, opts, std::cout, std::cerr);
    if (ratio->parsed()) return cmd_ratio(family, range, opts, std::cout, std::cerr);
    if (gen->parsed()) return cmd_gen(gen_opts, opts, std::cout, std::cerr);
    if (tours->parsed()) return cmd_tours(matrix_path, tree_path, tours_opts, opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
