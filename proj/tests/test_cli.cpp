#include "commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace bmep;
using namespace bmep::cli;

namespace {

const std::string kData = BMEP_SAMPLE_DATA;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bmep_cli_" + name)).string();
}

struct Run {
  int code;
  std::string out, err;
};

template <class F>
Run run(F&& f) {
  std::ostringstream out, err;
  int code = f(out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST(CliEvaluate, AllOnesGivesN) {
  CommonOptions opts;
  auto r = run([&](auto& o, auto& e) { return cmd_evaluate(kData + "/all_ones_5.txt", kData + "/cubic_5.nwk", opts, o, e); });
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "5 (exact)"));
  EXPECT_TRUE(contains(r.out, "kraft_check  OK"));
}

TEST(CliEvaluate, NonCubicIsFlagged) {
  CommonOptions opts;
  opts.json = true;
  auto r = run([&](auto& o, auto& e) { return cmd_evaluate(kData + "/all_ones_5.txt", kData + "/star4_5.nwk", opts, o, e); });
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["cubic"].get<bool>());
  EXPECT_TRUE(contains(j["note"].get<std::string>(), "non-cubic"));
  EXPECT_EQ(j["objective"]["value"], "5");
  EXPECT_EQ(j["objective"]["mode"], "exact");
}

TEST(CliEvaluate, MismatchedSizesFail) {
  CommonOptions opts;
  auto r = run([&](auto& o, auto& e) { return cmd_evaluate(kData + "/star_8.txt", kData + "/cubic_5.nwk", opts, o, e); });
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(contains(r.err, "5 leaves"));
}

TEST(CliEvaluate, FloatModeOnRequest) {
  CommonOptions opts;
  opts.mode = "float";
  opts.json = true;
  auto r = run([&](auto& o, auto& e) { return cmd_evaluate(kData + "/all_ones_5.txt", kData + "/cubic_5.nwk", opts, o, e); });
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["objective"]["mode"], "float");
  EXPECT_EQ(j["pi_row_sums"]["mode"], "float");
}

TEST(CliApprox, StarAndAllOnes) {
  CommonOptions opts;
  opts.json = true;
  auto r = run([&](auto& o, auto& e) { return cmd_approx(kData + "/star_8.txt", opts, o, e); });
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(std::stod(j["ratio_vs_mst"]["value"].get<std::string>()), 2.0);
  EXPECT_TRUE(j["metric"].get<bool>());

  auto ones = run([&](auto& o, auto& e) { return cmd_approx(kData + "/all_ones_5.txt", opts, o, e); });
  EXPECT_EQ(nlohmann::json::parse(ones.out)["objective"]["value"], "5");
}

TEST(CliApprox, NonMetricWarns) {
  const std::string path = temp_path("nonmetric.txt");
  write_file(path, "4\na\nb 10\nc 1 1\nd 1 1 1\n");
  CommonOptions opts;
  auto r = run([&](auto& o, auto& e) { return cmd_approx(path, opts, o, e); });
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.err, "no approximation guarantee"));
  EXPECT_TRUE(contains(r.out, "tree"));
}

TEST(CliExact, OptimaAndRefusal) {
  CommonOptions opts;
  const std::string ones7 = temp_path("ones7.txt"), ones12 = temp_path("ones12.txt"), star6 = temp_path("star6.txt");
  write_file(ones7, write_matrix(all_ones(7)));
  write_file(ones12, write_matrix(all_ones(12)));
  write_file(star6, write_matrix(star_metric(6)));
  auto r = run([&](auto& o, auto& e) { return cmd_exact(ones7, opts, o, e); });
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "7 (exact)"));
  EXPECT_TRUE(contains(r.out, "945"));
  auto s = run([&](auto& o, auto& e) { return cmd_exact(star6, opts, o, e); });
  EXPECT_TRUE(contains(s.out, "10 (exact)"));
  auto refused = run([&](auto& o, auto& e) { return cmd_exact(ones12, opts, o, e); });
  EXPECT_NE(refused.code, 0);
  EXPECT_TRUE(contains(refused.err, "654729075"));
  opts.max_n = 12;
  EXPECT_NE(run([&](auto& o, auto& e) { return cmd_exact(ones7, opts, o, e); }).code, 0);
}

TEST(CliRatio, StarCsv) {
  CommonOptions opts;
  opts.csv = true;
  auto r = run([&](auto& o, auto& e) { return cmd_ratio("star", "5..8", opts, o, e); });
  EXPECT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, "n,opt,tsp,mst,opt_over_tsp,opt_over_mst");
  double previous = 0;
  int rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    double ratio = std::stod(row.substr(row.rfind(',') + 1));
    EXPECT_GE(ratio, previous);
    previous = ratio;
  }
  EXPECT_EQ(rows, 4);
}

TEST(CliRatio, CycleAndCaps) {
  CommonOptions opts;
  opts.json = true;
  auto r = run([&](auto& o, auto& e) { return cmd_ratio("cycle", "5..7", opts, o, e); });
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_NE(run([&](auto& o, auto& e) { return cmd_ratio("cycle", "5..12", opts, o, e); }).code, 0);
  EXPECT_NE(run([&](auto& o, auto& e) { return cmd_ratio("path", "5..6", opts, o, e); }).code, 0);
  EXPECT_THROW(parse_range("8..5"), InvalidInput);
  EXPECT_EQ(parse_range("5-9"), (std::pair<std::size_t, std::size_t>{5, 9}));
}

TEST(CliGen, FamiliesWriteMatrices) {
  CommonOptions opts;
  GenOptions g;
  g.family = "star";
  g.n = 5;
  auto r = run([&](auto& o, auto& e) { return cmd_gen(g, opts, o, e); });
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(read_matrix(r.out), star_metric(5));

  g.family = "random";
  g.n = 8;
  opts.seed = 42;
  auto random = run([&](auto& o, auto& e) { return cmd_gen(g, opts, o, e); });
  EXPECT_EQ(random.out, read_file(std::string(BMEP_TEST_DATA) + "/random_metric_8_42.txt"));

  GenOptions lift;
  lift.family = "lift";
  lift.input_path = kData + "/binary_6.txt";
  auto lifted = run([&](auto& o, auto& e) { return cmd_gen(lift, opts, o, e); });
  auto m = read_matrix(lifted.out);
  EXPECT_TRUE(is_metric(m));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (i != j) { EXPECT_TRUE(m.exact(i, j) == 1 || m.exact(i, j) == 2); }
    }
  }

  GenOptions bad;
  bad.family = "star";
  bad.n = 2;
  EXPECT_THROW(cmd_gen(bad, opts, std::cout, std::cerr), InvalidInput);
}

TEST(CliGen, ReductionCertificate) {
  CommonOptions opts;
  opts.json = true;
  GenOptions g;
  g.family = "reduction";
  g.graph_path = kData + "/c5.graph";
  g.coloring_path = kData + "/c5.coloring";
  g.out_path = temp_path("c5.txt");
  g.witness_out = temp_path("c5.nwk");
  auto r = run([&](auto& o, auto& e) { return cmd_gen(g, opts, o, e); });
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n"], 66);
  EXPECT_EQ(j["k"], 55);
  EXPECT_EQ(j["certificate"], "certificate OK");
  EXPECT_EQ(j["log2_threshold_no"]["mode"], "float");
  LeafTree witness = read_newick(read_file(*g.witness_out));
  EXPECT_EQ(witness.leaf_count(), 66u);

  const std::string improper = temp_path("bad.coloring");
  write_file(improper, "1 1 2 1 2\n");
  g.coloring_path = improper;
  EXPECT_THROW(cmd_gen(g, opts, std::cout, std::cerr), InvalidInput);
}

TEST(CliTours, EnumerateAndSample) {
  CommonOptions opts;
  const std::string matrix = temp_path("r6.txt");
  write_file(matrix, write_matrix(random_metric(6, 3)));
  ToursOptions enumerate{std::nullopt, true};
  auto r = run([&](auto& o, auto& e) { return cmd_tours(matrix, kData + "/cubic_6.nwk", enumerate, opts, o, e); });
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "mean tour cost == objective: OK"));

  ToursOptions sample{std::size_t{20000}, false};
  opts.seed = 9;
  auto s1 = run([&](auto& o, auto& e) { return cmd_tours(matrix, kData + "/cubic_6.nwk", sample, opts, o, e); });
  auto s2 = run([&](auto& o, auto& e) { return cmd_tours(matrix, kData + "/cubic_6.nwk", sample, opts, o, e); });
  EXPECT_EQ(s1.code, 0);
  EXPECT_EQ(s1.out, s2.out);

  ToursOptions neither{std::nullopt, false};
  EXPECT_NE(run([&](auto& o, auto& e) { return cmd_tours(matrix, kData + "/cubic_6.nwk", neither, opts, o, e); }).code, 0);

  opts.cap_embeddings = 4;
  EXPECT_THROW(cmd_tours(matrix, kData + "/cubic_6.nwk", enumerate, opts, std::cout, std::cerr), InvalidInput);
}

TEST(CliTours, StarOfThree) {
  CommonOptions opts;
  const std::string matrix = temp_path("ones3.txt"), tree = temp_path("star3.nwk");
  write_file(matrix, write_matrix(all_ones(3)));
  write_file(tree, "(1,2,3);\n");
  ToursOptions enumerate{std::nullopt, true};
  auto r = run([&](auto& o, auto& e) { return cmd_tours(matrix, tree, enumerate, opts, o, e); });
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "distinct_tours  1"));
}

TEST(CliReport, ExactJsonIsByteStable) {
  CommonOptions opts;
  opts.json = true;
  auto a = run([&](auto& o, auto& e) { return cmd_exact(kData + "/random_8.txt", opts, o, e); });
  auto b = run([&](auto& o, auto& e) { return cmd_exact(kData + "/random_8.txt", opts, o, e); });
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(contains(a.out, "elapsed_ms"));
  opts.timing = true;
  auto timed = run([&](auto& o, auto& e) { return cmd_exact(kData + "/random_8.txt", opts, o, e); });
  EXPECT_TRUE(contains(timed.out, "elapsed_ms"));
}
