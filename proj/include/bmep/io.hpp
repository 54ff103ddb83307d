#pragma once

#include "bmep/instances.hpp"
#include "bmep/matrix.hpp"
#include "bmep/numeric.hpp"
#include "bmep/tree.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace bmep {

/// Thrown for malformed text input; carries a 1-based line number when known.
class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

/// Non-blank lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> tokenized_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
  std::istringstream is{std::string(text)};
  std::size_t number = 0;
  for (std::string line; std::getline(is, line);) {
    ++number;
    auto tokens = split_ws(line);
    if (!tokens.empty()) out.emplace_back(number, std::move(tokens));
  }
  return out;
}

inline std::size_t parse_count(const std::string& tok, std::size_t line, const char* what) {
  std::size_t value = 0;
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }) ||
      tok.size() > 9) {
    throw ParseError("line " + std::to_string(line) + ": malformed " + what + " '" + tok + "'");
  }
  value = std::stoul(tok);
  return value;
}

inline std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrix files: "n", then one line per species: label followed by either all
// n entries (square) or the i-1 entries left of the diagonal (lower-triangular).

inline DissimilarityMatrix read_matrix(std::string_view text) {
  auto lines = detail::tokenized_lines(text);
  if (lines.empty()) throw ParseError("empty matrix file");
  if (lines[0].second.size() != 1) throw ParseError(detail::line_prefix(lines[0].first) + "expected the species count");
  const std::size_t n = detail::parse_count(lines[0].second[0], lines[0].first, "species count");
  if (lines.size() != n + 1) {
    throw ParseError("count mismatch: expected " + std::to_string(n) + " species rows, found " +
                     std::to_string(lines.size() - 1));
  }
  if (n < 3) throw ParseError("matrix needs at least 3 species");
  const bool square = lines[1].second.size() == n + 1;
  std::vector<std::string> labels;
  std::vector<Rational> entries;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [number, tokens] = lines[i + 1];
    const std::size_t expected = square ? n : i;
    if (tokens.size() != expected + 1) {
      throw ParseError(detail::line_prefix(number) + "expected a label and " + std::to_string(expected) +
                       " entries, found " + std::to_string(tokens.size() - 1));
    }
    labels.push_back(tokens[0]);
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      try {
        entries.push_back(parse_decimal(tokens[k]));
      } catch (const std::invalid_argument& e) {
        throw ParseError(detail::line_prefix(number) + e.what());
      }
    }
  }
  DissimilarityMatrix d = square ? DissimilarityMatrix::from_square(n, entries)
                                 : DissimilarityMatrix::from_lower(n, entries);
  return d.with_labels(std::move(labels));
}

inline std::string format_entry(const Rational& r) {
  std::string s = to_exact_string(r);
  if (s.find('/') == std::string::npos) return s;
  std::ostringstream os;
  os.precision(17);
  os << to_double(r);
  return os.str();
}

/// Square layout, entries in exact decimal form.
inline std::string write_matrix(const DissimilarityMatrix& d) {
  std::ostringstream os;
  os << d.size() << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    os << d.labels()[i];
    for (std::size_t j = 0; j < d.size(); ++j) os << ' ' << format_entry(d.exact(i, j));
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Newick, leaves named by 1-based species index, no branch lengths.

namespace detail {

inline void write_subtree(const LeafTree& t, Vertex at, Vertex from, const std::vector<Species>& min_below,
                          std::string& out) {
  if (t.is_leaf(at)) {
    out += std::to_string(t.species_at(at) + 1);
    return;
  }
  std::vector<Vertex> children;
  for (Vertex y : t.neighbors(at)) {
    if (y != from) children.push_back(y);
  }
  std::sort(children.begin(), children.end(), [&](Vertex a, Vertex b) { return min_below[a] < min_below[b]; });
  out += '(';
  for (std::size_t c = 0; c < children.size(); ++c) {
    if (c) out += ',';
    write_subtree(t, children[c], at, min_below, out);
  }
  out += ')';
}

}  // namespace detail

/// Rooted at the internal vertex next to species 1; children ordered by their
/// smallest descendant species.
inline std::string write_newick(const LeafTree& t) {
  const Vertex root = t.neighbors(t.leaf(0))[0];
  // Smallest species below each vertex when hanging from `root`.
  std::vector<Species> min_below(t.vertex_count(), kNoSpecies);
  std::vector<Vertex> order, parent(t.vertex_count(), root);
  std::vector<Vertex> stack{root};
  while (!stack.empty()) {
    Vertex x = stack.back();
    stack.pop_back();
    order.push_back(x);
    for (Vertex y : t.neighbors(x)) {
      if (x != root && y == parent[x]) continue;
      if (y == root) continue;
      parent[y] = x;
      stack.push_back(y);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Vertex x = *it;
    if (t.is_leaf(x)) min_below[x] = t.species_at(x);
    if (x != root) min_below[parent[x]] = std::min(min_below[parent[x]], min_below[x]);
  }
  std::string out;
  detail::write_subtree(t, root, root, min_below, out);
  return out + ";";
}

namespace detail {

class NewickParser {
 public:
  NewickParser(std::string_view text, const std::vector<std::string>* labels) : text_(text), labels_(labels) {}

  LeafTree parse() {
    skip_ws();
    node(std::nullopt);
    skip_ws();
    expect(';');
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after ';'");
    const std::size_t n = leaf_names_.size();
    std::vector<Vertex> leaf_of(n, kNoSpecies);
    for (std::size_t k = 0; k < n; ++k) {
      Species s = resolve(leaf_names_[k].second, n);
      if (leaf_of[s] != kNoSpecies) throw ParseError("newick: species '" + leaf_names_[k].second + "' appears twice");
      leaf_of[s] = leaf_names_[k].first;
    }
    return LeafTree::from_edges(vertex_count_, edges_, leaf_of);
  }

 private:
  Vertex node(std::optional<Vertex> parent) {
    const Vertex self = vertex_count_++;
    if (parent) edges_.emplace_back(*parent, self);
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      while (true) {
        node(self);
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
      label();  // internal labels are ignored
    } else {
      std::string name = label();
      if (name.empty()) fail("missing leaf name");
      leaf_names_.emplace_back(self, name);
    }
    skip_ws();
    if (peek() == ':') {
      ++pos_;
      skip_ws();
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '.' || text_[pos_] == '-' || text_[pos_] == '+')) {
        ++pos_;
      }
    }
    return self;
  }

  std::string label() {
    skip_ws();
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
      out += c;
      ++pos_;
    }
    return out;
  }

  Species resolve(const std::string& name, std::size_t n) const {
    if (labels_ && labels_->size() == n) {
      auto it = std::find(labels_->begin(), labels_->end(), name);
      if (it != labels_->end()) return static_cast<Species>(it - labels_->begin());
    }
    bool numeric = !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) { return std::isdigit(c); });
    if (numeric && name.size() < 10) {
      std::size_t index = std::stoul(name);
      if (index >= 1 && index <= n) return index - 1;
    }
    throw ParseError("newick: leaf '" + name + "' is not a species index in 1.." + std::to_string(n));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("newick: " + what + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  const std::vector<std::string>* labels_;
  std::size_t pos_ = 0;
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::pair<Vertex, std::string>> leaf_names_;
};

}  // namespace detail

/// Parses a Newick tree. Leaves are species indices 1..n, or names from
/// `labels` when given. Branch lengths and internal labels are ignored; the
/// topology is kept exactly as written (a two-child root stays a degree-2 vertex).
inline LeafTree read_newick(std::string_view text, const std::vector<std::string>* labels = nullptr) {
  return detail::NewickParser(text, labels).parse();
}

// ---------------------------------------------------------------------------
// Edge lists: "p m", then m lines "u v" with 1-based vertices.

inline InputGraph read_graph(std::string_view text) {
  auto lines = detail::tokenized_lines(text);
  if (lines.empty() || lines[0].second.size() != 2) throw ParseError("graph header must be 'p m'");
  const std::size_t p = detail::parse_count(lines[0].second[0], lines[0].first, "vertex count");
  const std::size_t m = detail::parse_count(lines[0].second[1], lines[0].first, "edge count");
  if (lines.size() != m + 1) {
    throw ParseError("count mismatch: header announces " + std::to_string(m) + " edges, found " +
                     std::to_string(lines.size() - 1));
  }
  std::vector<Edge> edges;
  for (std::size_t e = 1; e <= m; ++e) {
    const auto& [number, tokens] = lines[e];
    if (tokens.size() != 2) throw ParseError(detail::line_prefix(number) + "expected 'u v'");
    std::size_t u = detail::parse_count(tokens[0], number, "vertex");
    std::size_t v = detail::parse_count(tokens[1], number, "vertex");
    if (u == v) throw ParseError(detail::line_prefix(number) + "self-loop at vertex " + std::to_string(u));
    if (u < 1 || v < 1 || u > p || v > p) throw ParseError(detail::line_prefix(number) + "vertex out of range");
    edges.emplace_back(u - 1, v - 1);
  }
  try {
    return InputGraph(p, std::move(edges));
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
}

inline std::string write_graph(const InputGraph& g) {
  std::ostringstream os;
  os << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) os << u + 1 << ' ' << v + 1 << '\n';
  return os.str();
}

/// Whitespace-separated colours in {1, 2, 3}, one per vertex in order.
inline Colouring read_colouring(std::string_view text) {
  Colouring out;
  for (const auto& [number, tokens] : detail::tokenized_lines(text)) {
    for (const auto& tok : tokens) {
      std::size_t c = detail::parse_count(tok, number, "colour");
      if (c < 1 || c > 3) throw ParseError(detail::line_prefix(number) + "colours must be 1, 2 or 3");
      out.push_back(static_cast<int>(c));
    }
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << content;
}

}  // namespace bmep
