#pragma once

// Command implementations behind the `bmep` executable. Each command writes
// its report to `out`, diagnostics to `err`, and returns the process exit code.

#include "bmep/bmep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace bmep::cli {

struct CommonOptions {
  std::optional<std::string> mode;  // "exact" | "float"; default from the matrix
  std::uint64_t seed = 1;
  std::size_t max_n = kDefaultExactCap;
  std::uint64_t cap_embeddings = kDefaultEmbeddingCap;
  bool json = false;
  bool csv = false;
  bool timing = false;
};

inline std::string ratio_text(double r) {
  if (!std::isfinite(r)) return "inf";
  std::ostringstream os;
  os << std::setprecision(12) << r;
  return os.str();
}

inline std::string log_text(const LogValue& v) {
  std::string power = "2^(" + to_exact_string(v.exponent) + ")";
  return v.multiplier == 1 ? power : v.multiplier.str() + " * " + power;
}

/// Ordered key/value report printed as aligned text or as JSON.
class Report {
 public:
  explicit Report(std::string command) { fields_["command"] = std::move(command); }

  void set(const std::string& key, nlohmann::ordered_json value) { fields_[key] = std::move(value); }
  void set_value(const std::string& key, const Value& v) {
    fields_[key] = {{"value", v.str()}, {"mode", to_string(v.mode())}};
  }
  void set_float(const std::string& key, double v) { fields_[key] = {{"value", ratio_text(v)}, {"mode", "float"}}; }
  void set_exact(const std::string& key, std::string text) {
    fields_[key] = {{"value", std::move(text)}, {"mode", "exact"}};
  }
  void set_values(const std::string& key, const std::vector<Value>& vs, ValueMode mode) {
    nlohmann::ordered_json values = nlohmann::ordered_json::array();
    for (const auto& v : vs) values.push_back(v.str());
    fields_[key] = {{"value", values}, {"mode", to_string(mode)}};
  }

  void print(std::ostream& out, bool json) const {
    if (json) {
      out << fields_.dump(2) << '\n';
      return;
    }
    std::size_t width = 0;
    for (const auto& [key, _] : fields_.items()) width = std::max(width, key.size());
    for (const auto& [key, value] : fields_.items()) {
      out << std::left << std::setw(static_cast<int>(width)) << key << "  " << render(value) << '\n';
    }
  }

 private:
  static std::string render(const nlohmann::ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_object() && v.contains("value") && v.contains("mode") && v.size() == 2) {
      const auto& value = v["value"];
      return (value.is_string() ? value.get<std::string>() : value.dump()) + " (" + v["mode"].get<std::string>() + ")";
    }
    return v.dump();
  }

  nlohmann::ordered_json fields_;
};

inline ValueMode resolve_mode(const CommonOptions& opts, const DissimilarityMatrix& d) {
  ValueMode mode = opts.mode ? parse_value_mode(*opts.mode) : d.default_mode();
  d.require_mode(mode);
  return mode;
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------

inline int cmd_evaluate(const std::string& matrix_path, const std::string& tree_path, const CommonOptions& opts,
                        std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  DissimilarityMatrix d = read_matrix(read_file(matrix_path));
  LeafTree t = read_newick(read_file(tree_path), &d.labels());
  if (t.leaf_count() != d.size()) {
    err << "error: tree has " << t.leaf_count() << " leaves but the matrix has " << d.size() << " species\n";
    return 1;
  }
  ValueMode mode = resolve_mode(opts, d);
  Report report("evaluate");
  report.set("n", d.size());
  report.set("cubic", is_cubic(t));
  if (!is_cubic(t)) report.set("note", "non-cubic tree: objective computed from the pi-matrix");
  report.set_value("objective", evaluate(t, d, mode));
  auto sums = kraft_row_sums(t, mode);
  const Value two = mode == ValueMode::Exact ? Value(Rational(2)) : Value(2.0);
  const bool kraft_ok = std::all_of(sums.begin(), sums.end(), [&](const Value& s) { return s == two; });
  report.set_values("pi_row_sums", sums, mode);
  report.set("kraft_check", kraft_ok ? "OK" : "FAILED");
  report.set("tree", write_newick(t));
  if (opts.timing) report.set_float("elapsed_ms", clock.elapsed_ms());
  report.print(out, opts.json);
  return kraft_ok ? 0 : 1;
}

inline int cmd_approx(const std::string& matrix_path, const CommonOptions& opts, std::ostream& out,
                      std::ostream& err) {
  Stopwatch clock;
  DissimilarityMatrix d = read_matrix(read_file(matrix_path));
  ValueMode mode = resolve_mode(opts, d);
  ApproxReport r = approximate(d, mode);
  Report report("approx");
  report.set("n", d.size());
  report.set("metric", r.metric);
  report.set_value("objective", r.objective);
  report.set_value("mst_bound", r.mst_bound);
  report.set_float("ratio_vs_mst", r.ratio_vs_mst);
  report.set("splits", r.steps);
  bool ok = true;
  if (r.metric) {
    const Value two = mode == ValueMode::Exact ? Value(Rational(2)) : Value(2.0);
    ok = r.objective <= two * r.mst_bound;
    report.set("guarantee", ok ? "objective <= 2 * MST: OK" : "objective <= 2 * MST: VIOLATED");
  } else {
    err << "warning: matrix is not metric; no approximation guarantee\n";
    report.set("guarantee", "none (non-metric input)");
  }
  report.set("tree", write_newick(r.tree));
  if (opts.timing) report.set_float("elapsed_ms", clock.elapsed_ms());
  report.print(out, opts.json);
  return ok ? 0 : 1;
}

inline int cmd_exact(const std::string& matrix_path, const CommonOptions& opts, std::ostream& out,
                     std::ostream& err) {
  Stopwatch clock;
  DissimilarityMatrix d = read_matrix(read_file(matrix_path));
  ValueMode mode = resolve_mode(opts, d);
  if (opts.max_n > kHardExactCap) {
    err << "error: --max-n cannot exceed " << kHardExactCap << '\n';
    return 1;
  }
  if (d.size() > opts.max_n) {
    err << "error: n = " << d.size() << " exceeds the exact-solver cap of " << opts.max_n << " ("
        << cubic_topology_count(d.size()).str() << " topologies); raise --max-n (at most " << kHardExactCap << ")\n";
    return 1;
  }
  ExactResult r = solve_exact(d, mode, opts.max_n);
  Report report("exact");
  report.set("n", d.size());
  report.set_value("optimum", r.optimum);
  report.set("topologies_examined", r.topologies_examined);
  report.set("tree", write_newick(r.tree));
  if (opts.timing) report.set_float("elapsed_ms", clock.elapsed_ms());
  report.print(out, opts.json);
  return 0;
}

/// Parses "a..b", "a-b" or a single "a".
inline std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  auto sep = text.find("..");
  std::size_t skip = 2;
  if (sep == std::string::npos) {
    sep = text.find('-');
    skip = 1;
  }
  auto number = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }) || s.size() > 6) {
      throw InvalidInput("malformed range '" + text + "'");
    }
    return static_cast<std::size_t>(std::stoul(s));
  };
  if (sep == std::string::npos) {
    auto n = number(text);
    return {n, n};
  }
  auto lo = number(text.substr(0, sep)), hi = number(text.substr(sep + skip));
  if (lo > hi) throw InvalidInput("empty range '" + text + "'");
  return {lo, hi};
}

inline int cmd_ratio(const std::string& family, const std::string& range, const CommonOptions& opts,
                     std::ostream& out, std::ostream& err) {
  if (family != "cycle" && family != "star") {
    err << "error: unknown family '" << family << "' (expected cycle or star)\n";
    return 1;
  }
  auto [lo, hi] = parse_range(range);
  const std::size_t cap = std::min(opts.max_n, kMaxTspSpecies);
  if (opts.max_n > kHardExactCap) {
    err << "error: --max-n cannot exceed " << kHardExactCap << '\n';
    return 1;
  }
  if (lo < 3 || hi > cap) {
    err << "error: n range " << lo << ".." << hi << " must lie within 3.." << cap << " (solver caps)\n";
    return 1;
  }
  Stopwatch clock;
  struct Row {
    std::size_t n;
    Value opt, tsp, mst;
  };
  std::vector<Row> rows;
  bool chain_ok = true;
  for (std::size_t n = lo; n <= hi; ++n) {
    DissimilarityMatrix d = family == "cycle" ? cycle_metric(n) : star_metric(n);
    ValueMode mode = resolve_mode(opts, d);
    Row row{n, solve_exact(d, mode, opts.max_n).optimum, tsp_exact(d, mode).cost, mst_cost(d, mode)};
    chain_ok = chain_ok && row.mst <= row.tsp && row.tsp <= row.opt;
    rows.push_back(std::move(row));
  }
  auto ratio = [](const Value& a, const Value& b) { return ratio_text(a.to_double() / b.to_double()); };
  if (opts.csv) {
    out << "n,opt,tsp,mst,opt_over_tsp,opt_over_mst\n";
    for (const auto& r : rows) {
      out << r.n << ',' << r.opt.str() << ',' << r.tsp.str() << ',' << r.mst.str() << ',' << ratio(r.opt, r.tsp)
          << ',' << ratio(r.opt, r.mst) << '\n';
    }
  } else {
    Report report("ratio");
    report.set("family", family);
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      table.push_back({{"n", r.n},
                       {"opt", r.opt.str()},
                       {"tsp", r.tsp.str()},
                       {"mst", r.mst.str()},
                       {"opt_over_tsp", ratio(r.opt, r.tsp)},
                       {"opt_over_mst", ratio(r.opt, r.mst)},
                       {"mode", to_string(r.opt.mode())}});
    }
    if (opts.json) {
      report.set("rows", table);
    } else {
      for (const auto& row : table) {
        report.set("n=" + std::to_string(row["n"].get<std::size_t>()),
                   "OPT " + row["opt"].get<std::string>() + "  TSP " + row["tsp"].get<std::string>() + "  MST " +
                       row["mst"].get<std::string>() + "  OPT/TSP " + row["opt_over_tsp"].get<std::string>() +
                       "  OPT/MST " + row["opt_over_mst"].get<std::string>());
      }
    }
    report.set("bound_chain", chain_ok ? "MST <= TSP <= OPT: OK" : "MST <= TSP <= OPT: VIOLATED");
    if (opts.timing) report.set_float("elapsed_ms", clock.elapsed_ms());
    report.print(out, opts.json);
  }
  if (!chain_ok) err << "error: bound chain MST <= TSP <= OPT violated\n";
  return chain_ok ? 0 : 1;
}

struct GenOptions {
  std::string family;
  std::size_t n = 0;
  std::optional<std::string> graph_path;
  std::optional<std::string> input_path;
  std::optional<std::string> coloring_path;
  std::optional<std::string> out_path;
  std::optional<std::string> witness_out;
  std::string lambda = "0.6";
};

inline int cmd_gen(const GenOptions& g, const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  auto need_n = [&] {
    if (g.n < 3) throw InvalidInput("--n must be at least 3 for family " + g.family);
    return g.n;
  };
  std::optional<DissimilarityMatrix> matrix;
  std::optional<Report> report;
  bool ok = true;

  if (g.family == "all-ones") {
    matrix = all_ones(need_n());
  } else if (g.family == "star") {
    matrix = star_metric(need_n());
  } else if (g.family == "cycle") {
    matrix = cycle_metric(need_n());
  } else if (g.family == "random") {
    matrix = random_metric(need_n(), opts.seed);
  } else if (g.family == "lift") {
    if (!g.input_path) throw InvalidInput("family lift needs --input <0/1 matrix file>");
    matrix = metric_lift(read_matrix(read_file(*g.input_path)));
  } else if (g.family == "reduction") {
    if (!g.graph_path) throw InvalidInput("family reduction needs --graph <edge list file>");
    InputGraph graph = read_graph(read_file(*g.graph_path));
    Rational lambda = parse_decimal(g.lambda);
    ReductionOutput red = reduction_from_graph(graph, lambda);
    matrix = red.matrix;
    report.emplace("gen");
    report->set("family", "reduction");
    report->set("lambda", to_exact_string(red.lambda));
    report->set("triangles_added", red.triangles_added);
    report->set("p", red.p);
    report->set("k", red.k);
    report->set("n", red.n);
    report->set("m", red.m);
    report->set_float("log2_threshold_yes", red.threshold_yes.log2());
    report->set_float("log2_threshold_no", red.threshold_no.log2());
    report->set_exact("threshold_yes", log_text(red.threshold_yes));
    report->set_exact("threshold_no", log_text(red.threshold_no));
    report->set("size_condition_met", red.size_condition_met);
    report->set("gap_nonempty", red.gap_nonempty());
    report->set("gap_at_least_c_pow_n", red.gap_at_least_c_pow_n());
    if (g.coloring_path) {
      Colouring colouring = read_colouring(read_file(*g.coloring_path));
      if (colouring.size() == graph.vertex_count() && colouring.size() != red.p) {
        colouring = extend_colouring(colouring, red.p);
      }
      LeafTree witness = witness_tree(red.graph, colouring, red.k);
      LogValue cost = witness_cost(witness, red.matrix);
      const bool certificate = is_cubic(witness) && witness.leaf_count() == red.n &&
                               compare(cost, red.threshold_yes) <= 0;
      ok = certificate;
      report->set_float("witness_log2_cost", cost.log2());
      report->set_exact("witness_cost", log_text(cost));
      report->set("certificate", certificate ? "certificate OK" : "certificate FAILED");
      if (g.witness_out) write_file(*g.witness_out, write_newick(witness) + "\n");
    }
  } else {
    err << "error: unknown family '" << g.family << "'\n";
    return 1;
  }

  const std::string text = write_matrix(*matrix);
  if (g.out_path) {
    write_file(*g.out_path, text);
  } else {
    out << text;
  }
  if (report) report->print(g.out_path ? out : err, opts.json);
  return ok ? 0 : 1;
}

struct ToursOptions {
  std::optional<std::size_t> samples;
  bool enumerate = false;
};

inline int cmd_tours(const std::string& matrix_path, const std::string& tree_path, const ToursOptions& t_opts,
                     const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  Stopwatch clock;
  DissimilarityMatrix d = read_matrix(read_file(matrix_path));
  LeafTree t = read_newick(read_file(tree_path), &d.labels());
  if (t.leaf_count() != d.size()) {
    err << "error: tree has " << t.leaf_count() << " leaves but the matrix has " << d.size() << " species\n";
    return 1;
  }
  if (t_opts.enumerate == t_opts.samples.has_value()) {
    err << "error: give exactly one of --enumerate or --samples N\n";
    return 1;
  }
  ValueMode mode = resolve_mode(opts, d);
  const Value f = evaluate(t, d, mode);
  Report report("tours");
  report.set("n", d.size());
  report.set_value("objective", f);
  bool ok = true;
  if (t_opts.enumerate) {
    std::uint64_t embeddings = 0;
    std::set<std::vector<Species>> distinct;
    for_each_embedding(
        t,
        [&](const Embedding& e) {
          ++embeddings;
          distinct.insert(embed_and_read_tour(t, e).order);
        },
        opts.cap_embeddings);
    const Value mean = mean_compatible_tour_cost(t, d, mode, opts.cap_embeddings);
    ok = mean == f;
    report.set("embeddings", embeddings);
    report.set("distinct_tours", distinct.size());
    report.set_value("mean_tour_cost", mean);
    report.set("check", ok ? "mean tour cost == objective: OK" : "mean tour cost == objective: FAILED");
  } else {
    const std::size_t samples = *t_opts.samples;
    if (samples < 2) {
      err << "error: --samples needs at least 2\n";
      return 1;
    }
    Rng rng(opts.seed);
    const std::size_t n = d.size();
    SquareMatrix<std::size_t> adjacent(n, 0);
    double sum = 0, sum_sq = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      Tour tour = sample_compatible_tour(t, rng);
      double c = tour_cost(tour, d, ValueMode::Float).to_double();
      sum += c;
      sum_sq += c * c;
      for (std::size_t k = 0; k < n; ++k) {
        Species a = tour.order[k], b = tour.order[(k + 1) % n];
        ++adjacent(std::min(a, b), std::max(a, b));
      }
    }
    const double count = static_cast<double>(samples);
    const double mean = sum / count;
    const double variance = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1));
    const double stderr_mean = std::sqrt(variance / count);
    const double diff = mean - f.to_double();
    const double z = stderr_mean > 0 ? diff / stderr_mean : (std::abs(diff) <= 1e-9 * std::abs(mean) ? 0.0 : INFINITY);
    // Largest adjacency-frequency deviation from pi, in standard errors.
    PiMatrix pi(t, ValueMode::Float);
    double worst = 0;
    std::string worst_pair = "-";
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double p = pi.approx()(i, j);
        double freq = static_cast<double>(adjacent(i, j)) / count;
        double se = std::sqrt(p * (1 - p) / count);
        double zz = se > 0 ? std::abs(freq - p) / se : (std::abs(freq - p) < 1e-12 ? 0.0 : INFINITY);
        if (zz > worst) {
          worst = zz;
          worst_pair = std::to_string(i + 1) + "-" + std::to_string(j + 1);
        }
      }
    }
    constexpr double kSigmaLimit = 5.0;
    ok = std::abs(z) <= kSigmaLimit && worst <= kSigmaLimit;
    report.set("samples", samples);
    report.set("seed", opts.seed);
    report.set_float("mean_tour_cost", mean);
    report.set_float("standard_error", stderr_mean);
    report.set_float("z_mean_vs_objective", z);
    report.set_float("max_adjacency_z", worst);
    report.set("max_adjacency_z_pair", worst_pair);
    report.set("check", ok ? "within 5 standard errors: OK" : "within 5 standard errors: FAILED");
  }
  if (opts.timing) report.set_float("elapsed_ms", clock.elapsed_ms());
  report.print(out, opts.json);
  return ok ? 0 : 1;
}

}  // namespace bmep::cli
