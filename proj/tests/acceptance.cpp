// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "commands.hpp"
#include "oracles.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

using namespace bmep;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << std::fixed << v;
  return os.str();
}

InputGraph cycle_graph(std::size_t p) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v < p; ++v) edges.emplace_back(v, (v + 1) % p);
  return InputGraph(p, edges);
}

InputGraph petersen() {
  std::vector<Edge> edges;
  for (Vertex i = 0; i < 5; ++i) {
    edges.emplace_back(i, (i + 1) % 5);
    edges.emplace_back(i, i + 5);
    edges.emplace_back(i + 5, (i + 2) % 5 + 5);
  }
  return InputGraph(10, edges);
}

struct Fixture {
  std::string name;
  InputGraph graph;
  Colouring colouring;
};

std::vector<Fixture> reduction_fixtures() {
  return {{"C5", cycle_graph(5), {1, 2, 1, 2, 3}}, {"Petersen", petersen(), {1, 2, 1, 2, 3, 2, 3, 3, 1, 1}}};
}

// Tree with a vertex of degree exactly q (n between 6 and 14).
std::pair<LeafTree, Vertex> tree_with_degree(Rng& rng, std::size_t q) {
  while (true) {
    const std::size_t n = 6 + rng.below(9);
    LeafTree t = random_leaf_tree(n, 1 + rng.below(5), rng.below(2), rng);
    for (Vertex v = 0; v < t.vertex_count(); ++v) {
      if (!t.is_leaf(v) && t.degree(v) == q) return {t, v};
    }
  }
}

// ---------------------------------------------------------------------------

Outcome all_ones_objective() {
  Outcome out;
  auto start = std::chrono::steady_clock::now();
  Rng rng(1001);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rng.below(38);
    LeafTree t = random_cubic_tree(n, rng);
    Value f = evaluate(t, all_ones(n), ValueMode::Exact);
    out.require(f.is_exact() && f.exact() == Rational(static_cast<long long>(n)),
                "f = " + f.str() + " for n = " + std::to_string(n));
  }
  const double secs = seconds_since(start);
  out.require(secs < 5.0, "runtime " + fmt(secs) + " s");
  if (out.pass) out.detail = "100 random cubic trees, n in 3..40, f = n exactly (" + fmt(secs) + " s)";
  return out;
}

Outcome kraft_rows() {
  Outcome out;
  Rng rng(1002);
  std::size_t rows = 0;
  auto check = [&](const LeafTree& t) {
    for (const auto& s : kraft_row_sums(t, ValueMode::Exact)) {
      out.require(s.is_exact() && s.exact() == 2, "row sum " + s.str());
      ++rows;
    }
    for (const auto& row : oracle::pi(t)) {
      Rational sum = 0;
      for (const auto& x : row) sum += x;
      out.require(sum == 2, "oracle row sum " + to_exact_string(sum));
    }
  };
  for (int rep = 0; rep < 100; ++rep) check(random_cubic_tree(3 + rng.below(38), rng));
  int non_cubic = 0;
  while (non_cubic < 50) {
    LeafTree t = random_leaf_tree(4 + rng.below(17), 1 + rng.below(4), rng.below(3), rng);
    if (is_cubic(t)) continue;
    ++non_cubic;
    check(t);
  }
  if (out.pass) out.detail = "100 cubic (n <= 40) + 50 non-cubic (n <= 20) trees, " + std::to_string(rows) + " rows sum to 2";
  return out;
}

Outcome tour_expectation() {
  Outcome out;
  auto start = std::chrono::steady_clock::now();
  Rng rng(1003);
  std::size_t topologies = 0, checks = 0;
  for (std::size_t n = 4; n <= 6; ++n) {
    for (const auto& t : enumerate_cubic_topologies(n)) {
      ++topologies;
      for (int m = 0; m < 3; ++m) {
        auto d = oracle::random_integer_matrix(n, rng, 50);
        Value mean = mean_compatible_tour_cost(t, d, ValueMode::Exact);
        Rational f = oracle::objective(t, d);
        out.require(mean.exact() == f && evaluate(t, d).exact() == f,
                    "n = " + std::to_string(n) + ": mean " + mean.str() + " vs f " + to_exact_string(f));
        ++checks;
      }
    }
  }
  const double secs = seconds_since(start);
  out.require(topologies == 3 + 15 + 105, "visited " + std::to_string(topologies) + " topologies");
  out.require(secs < 30.0, "runtime " + fmt(secs) + " s");
  if (out.pass) {
    out.detail = std::to_string(topologies) + " topologies x 3 matrices, mean tour cost = f exactly (" + fmt(secs) + " s)";
  }
  return out;
}

Outcome split_identity() {
  Outcome out;
  Rng rng(1004);
  std::size_t count_checks = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t q = 4 + rep % 3;
    auto [t, u] = tree_with_degree(rng, q);
    const std::size_t n = t.leaf_count();
    auto nb = t.neighbors(u);
    std::vector<SquareMatrix<Rational>> split_pis;
    std::vector<LeafTree> split_trees;
    SquareMatrix<Rational> sum(n, Rational(0));
    for (std::size_t a = 0; a < q; ++a) {
      for (std::size_t b = a + 1; b < q; ++b) {
        split_trees.push_back(split_vertex(t, u, nb[a], nb[b]));
        auto pi = pi_matrix(split_trees.back(), ValueMode::Exact).exact();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) sum(i, j) += pi(i, j);
        }
      }
    }
    auto original = pi_matrix(t, ValueMode::Exact).exact();
    const long long splits = static_cast<long long>(q * (q - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out.require(sum(i, j) / splits == original(i, j), "average of split pi differs at q = " + std::to_string(q));
      }
    }
    if (q > 5) continue;
    // Direct path counting for every leaf pair whose path crosses u.
    auto ap = oracle::floyd_warshall(t);
    const SplitReweighting rw{q};
    const Vertex fresh = t.vertex_count();
    std::vector<oracle::AllPairs> split_paths;
    for (const auto& s : split_trees) split_paths.push_back(oracle::floyd_warshall(s));
    for (Species i = 0; i < n; ++i) {
      for (Species j = i + 1; j < n; ++j) {
        auto path = oracle::interior_path(ap, t.leaf(i), t.leaf(j));
        if (std::find(path.begin(), path.end(), u) == path.end()) continue;
        std::size_t only_new = 0, both = 0, only_old = 0;
        for (std::size_t s = 0; s < split_trees.size(); ++s) {
          auto p = oracle::interior_path(split_paths[s], split_trees[s].leaf(i), split_trees[s].leaf(j));
          const bool has_u = std::find(p.begin(), p.end(), u) != p.end();
          const bool has_new = std::find(p.begin(), p.end(), fresh) != p.end();
          only_new += has_new && !has_u;
          both += has_new && has_u;
          only_old += has_u && !has_new;
        }
        out.require(only_new == 1 && both == 2 * (q - 2) && only_old == q * (q - 1) / 2 - 1 - 2 * (q - 2) &&
                        only_new == rw.new_only_count() && both == rw.both_count() && only_old == rw.old_only_count(),
                    "path counts (" + std::to_string(only_new) + ", " + std::to_string(both) + ", " +
                        std::to_string(only_old) + ") at q = " + std::to_string(q));
        ++count_checks;
      }
    }
  }
  if (out.pass) {
    out.detail = "30 trees (q = 4, 5, 6), split average = pi exactly; " + std::to_string(count_checks) +
                 " crossing pairs counted (1, 2(q-2), C(q,2)-1-2(q-2)) for q = 4, 5";
  }
  return out;
}

struct MetricInstance {
  std::size_t n;
  DissimilarityMatrix d;
};

std::vector<MetricInstance> metric_instances() {
  std::vector<MetricInstance> out;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::size_t n = 5 + seed % 4;
    out.push_back({n, random_metric(n, seed)});
  }
  return out;
}

Outcome approximation_guarantee() {
  Outcome out;
  auto start = std::chrono::steady_clock::now();
  const Value two(Rational(2));
  double worst = 0;
  for (const auto& [n, d] : metric_instances()) {
    auto approx = approximate(d, ValueMode::Exact);
    Value mst = mst_cost(d, ValueMode::Exact);
    Value opt = solve_exact(d, ValueMode::Exact).optimum;
    out.require(is_cubic(approx.tree), "approximation tree is not cubic");
    out.require(approx.objective <= two * mst, "objective " + approx.objective.str() + " > 2 MST " + mst.str());
    out.require(approx.objective <= two * opt, "objective " + approx.objective.str() + " > 2 OPT " + opt.str());
    out.require(approx.objective >= opt, "objective " + approx.objective.str() + " < OPT " + opt.str());
    out.require(Value(oracle::objective(approx.tree, d)) == approx.objective, "objective disagrees with oracle");
    worst = std::max(worst, approx.objective.to_double() / opt.to_double());
  }
  const double secs = seconds_since(start);
  out.require(secs < 60.0, "runtime " + fmt(secs) + " s");
  if (out.pass) {
    out.detail = "50 random metrics, n in 5..8: OPT <= approx <= min(2 MST, 2 OPT); worst approx/OPT " + fmt(worst) +
                 " (" + fmt(secs) + " s)";
  }
  return out;
}

Outcome bound_chain() {
  Outcome out;
  for (const auto& [n, d] : metric_instances()) {
    Value mst = mst_cost(d, ValueMode::Exact);
    Value tsp = tsp_exact(d, ValueMode::Exact).cost;
    Value opt = solve_exact(d, ValueMode::Exact).optimum;
    out.require(mst <= tsp && tsp <= opt, "MST " + mst.str() + ", TSP " + tsp.str() + ", OPT " + opt.str());
    out.require(mst.exact() == oracle::prim_mst(d), "MST disagrees with Prim");
    out.require(tsp.exact() == oracle::brute_force_tsp(d), "TSP disagrees with brute force");
  }
  if (out.pass) out.detail = "50 instances: MST <= TSP <= OPT (exact), MST and TSP confirmed by independent oracles";
  return out;
}

Outcome star_family() {
  Outcome out;
  std::optional<Rational> previous;
  std::string table;
  for (std::size_t n = 5; n <= 8; ++n) {
    auto d = star_metric(n);
    Rational opt = solve_exact(d, ValueMode::Exact).optimum.exact();
    Rational mst = mst_cost(d, ValueMode::Exact).exact();
    out.require(opt >= Rational(static_cast<long long>(2 * n - 2)), "OPT " + to_exact_string(opt) + " < 2n-2");
    Rational ratio = opt / mst;
    out.require(!previous || ratio >= *previous, "OPT/MST decreased at n = " + std::to_string(n));
    previous = ratio;
    table += (table.empty() ? "" : ", ") + std::to_string(n) + ": " + to_exact_string(opt) + "/" +
             to_exact_string(mst) + " = " + to_exact_string(ratio);
  }
  if (out.pass) out.detail = "OPT >= 2n-2 and OPT/MST non-decreasing; n: OPT/MST = " + table;
  return out;
}

Outcome reduction_certificates() {
  Outcome out;
  std::string summary;
  for (const auto& fx : reduction_fixtures()) {
    auto red = reduction_from_graph(fx.graph);
    LeafTree w = witness_tree(red.graph, extend_colouring(fx.colouring, red.p), red.k);
    out.require(is_cubic(w), fx.name + ": witness not cubic");
    out.require(w.leaf_count() == red.p + red.k, fx.name + ": wrong leaf count");
    auto dist = oracle::leaf_distances(w);
    int min_edge = std::numeric_limits<int>::max();
    for (auto [u, v] : red.graph.edges()) min_edge = std::min(min_edge, dist[u][v]);
    const int needed = static_cast<int>((2 * red.k + 4) / 3);
    out.require(3 * static_cast<std::size_t>(needed) == 2 * red.k + 4, fx.name + ": (2k+4)/3 not integral");
    out.require(min_edge >= needed, fx.name + ": G-edge at leaf distance " + std::to_string(min_edge));
    LogValue cost = witness_cost(w, red.matrix);
    out.require(compare(cost, red.threshold_yes) <= 0, fx.name + ": witness cost above threshold");
    // Same comparison in the log domain from a float evaluation through pi.
    const double log_f = std::log2(evaluate(pi_matrix(w, ValueMode::Float), red.matrix).to_double());
    out.require(log_f <= red.threshold_yes.log2() + 1e-9, fx.name + ": float log-domain comparison fails");
    summary += (summary.empty() ? "" : "; ") + fx.name + " p=" + std::to_string(red.p) + " k=" +
               std::to_string(red.k) + " leaves=" + std::to_string(w.leaf_count()) + " min G-edge distance " +
               std::to_string(min_edge) + " >= " + std::to_string(needed) + ", log2 f " + fmt(log_f) +
               " <= log2 bound " + fmt(red.threshold_yes.log2());
  }
  if (out.pass) out.detail = summary;
  return out;
}

Outcome metric_lift_shift() {
  Outcome out;
  Rng rng(1009);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 3 + rng.below(28);
    LeafTree t = random_cubic_tree(n, rng);
    auto d = oracle::random_binary_matrix(n, rng);
    auto lifted = metric_lift(d);
    out.require(is_metric(lifted), "lifted matrix is not metric");
    out.require(evaluate(t, lifted).exact() == evaluate(t, d).exact() + static_cast<long long>(n),
                "f(lift) - f != n at n = " + std::to_string(n));
  }
  for (int rep = 0; rep < 10; ++rep) {
    auto d = oracle::random_binary_matrix(6, rng);
    auto before = solve_exact(d);
    auto after = solve_exact(metric_lift(d));
    out.require(leaf_distances(before.tree) == leaf_distances(after.tree), "argmin changed under the lift");
    out.require(after.optimum.exact() == before.optimum.exact() + 6, "optimum not shifted by n");
  }
  if (out.pass) out.detail = "50 trees: f(lift) = f + n exactly; 10 fixtures n = 6: identical argmin leaf distances";
  return out;
}

Outcome cycle_probe() {
  Outcome out;
  cli::CommonOptions opts;
  opts.csv = true;
  std::ostringstream table, err;
  const int code = cli::cmd_ratio("cycle", "5..9", opts, table, err);
  out.require(code == 0, "cmd_ratio failed: " + err.str());
  std::istringstream lines(table.str());
  std::string line, trend;
  std::getline(lines, line);
  out.require(line == "n,opt,tsp,mst,opt_over_tsp,opt_over_mst", "unexpected header '" + line + "'");
  int rows = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 6) {
      out.require(false, "malformed row '" + line + "'");
      continue;
    }
    ++rows;
    out.require(parse_decimal(cells[1]) >= parse_decimal(cells[2]), "OPT < TSP at n = " + cells[0]);
    trend += (trend.empty() ? "" : ", ") + cells[0] + ": " + cells[4];
  }
  out.require(rows == 5, std::to_string(rows) + " rows");
  if (out.pass) out.detail = "OPT >= TSP on every row; OPT/TSP (report only) " + trend;
  return out;
}

Outcome gap_structure() {
  Outcome out;
  std::string summary;
  auto describe = [&](const std::string& name, const ReductionOutput& r) {
    const double ratio = r.threshold_no.log2() - r.threshold_yes.log2();
    summary += (summary.empty() ? "" : "; ") + name + ": log2(no/yes) " + fmt(ratio, 3) + " vs log2 c^n " +
               fmt(to_double(r.log2_c_pow_n()), 3) + ", size condition " + (r.size_condition_met ? "met" : "not met");
  };
  for (const auto& fx : reduction_fixtures()) {
    auto r = reduction_from_graph(fx.graph);
    out.require(r.gap_nonempty(), fx.name + ": threshold_no <= threshold_yes");
    out.require(!r.size_condition_met || r.gap_at_least_c_pow_n(), fx.name + ": gap below c^n");
    describe(fx.name, r);
  }
  // Graphs large enough for the size condition, so the c^n inequality is exercised.
  for (std::size_t p : {40, 60}) {
    auto r = reduction_from_graph(InputGraph(p, {}));
    const std::string name = "empty graph on " + std::to_string(p);
    out.require(r.size_condition_met, name + ": size condition not met");
    out.require(r.gap_nonempty() && r.gap_at_least_c_pow_n(), name + ": gap below c^n");
    describe(name, r);
  }
  if (out.pass) out.detail = summary;
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"all-ones objective equals n", all_ones_objective},
      {"pi row sums equal 2", kraft_rows},
      {"mean compatible tour cost equals f", tour_expectation},
      {"split average reproduces pi; path counts", split_identity},
      {"approximation within twice MST and OPT", approximation_guarantee},
      {"MST <= TSP <= OPT", bound_chain},
      {"star family OPT >= 2n-2, OPT/MST non-decreasing", star_family},
      {"reduction witness certificates", reduction_certificates},
      {"metric lift shifts f by n, keeps argmin", metric_lift_shift},
      {"cycle-metric OPT/TSP table", cycle_probe},
      {"threshold gap structure", gap_structure},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
