#include "lexgraph/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "lexgraph/error.hpp"
#include "lexgraph/query.hpp"
#include "text_util.hpp"

namespace lexgraph {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw Error(ErrorKind::zero_vector, "cosine of a zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error(ErrorKind::precondition_violation, "dimension must be >= 1");
}

void EmbeddingTable::insert(std::string lemma, std::vector<double> vector) {
  if (vector.size() != dimension_) {
    throw Error(ErrorKind::dimension_mismatch,
                lemma + " has " + std::to_string(vector.size()) + " components, expected " +
                    std::to_string(dimension_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw Error(ErrorKind::malformed_line, lemma + " has a non-finite component");
  }
  vectors_.insert_or_assign(std::move(lemma), std::move(vector));
}

const std::vector<double>* EmbeddingTable::find(std::string_view lemma) const {
  auto it = vectors_.find(lemma);
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable EmbeddingTable::load(std::istream& input) {
  std::string line;
  int line_number = 0;
  std::optional<EmbeddingTable> table;
  auto fail = [&](const std::string& message) {
    throw Error(ErrorKind::malformed_line, "line " + std::to_string(line_number) + ": " + message);
  };
  while (std::getline(input, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head) || head.front() == '#') continue;
    if (!table) {
      std::string dim;
      if (head != "dim" || !(fields >> dim)) fail("expected 'dim N' header");
      auto n = detail::parse_int<std::size_t>(dim);
      if (!n || *n == 0) fail("bad dimension");
      table.emplace(*n);
      continue;
    }
    std::vector<double> values;
    std::string item;
    while (fields >> item) {
      auto v = detail::parse_double(item);
      if (!v) fail("bad component '" + item + "'");
      values.push_back(*v);
    }
    if (values.size() != table->dimension()) fail("wrong number of components for " + head);
    table->insert(detail::to_lower(head), std::move(values));
  }
  if (!table) throw Error(ErrorKind::malformed_line, "embedding file has no header");
  return std::move(*table);
}

EmbeddingTable EmbeddingTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  return load(in);
}

EmbeddingTable EmbeddingTable::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load(in);
}

std::string_view attachment_name(Attachment attachment) {
  switch (attachment) {
    case Attachment::verb_attachment: return "verb_attachment";
    case Attachment::noun_attachment: return "noun_attachment";
    case Attachment::unknown: return "unknown";
  }
  return "unknown";
}

Attachment attachment_score(std::string_view verb, std::string_view object_head,
                            std::string_view candidate, const EmbeddingTable& table,
                            double margin) {
  const auto* v = table.find(verb);
  const auto* o = table.find(object_head);
  const auto* c = table.find(candidate);
  if (v == nullptr || o == nullptr || c == nullptr) return Attachment::unknown;
  double to_verb = 0, to_noun = 0;
  try {
    to_verb = cosine_similarity(*v, *c);
    to_noun = cosine_similarity(*o, *c);
  } catch (const Error&) {
    return Attachment::unknown;
  }
  if (to_verb - to_noun >= margin) return Attachment::verb_attachment;
  if (to_noun - to_verb >= margin) return Attachment::noun_attachment;
  return Attachment::unknown;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t derive_walk_seed(std::uint64_t seed, std::string_view start_node,
                               std::uint64_t walk_index) {
  return mix64(mix64(seed ^ fnv1a64(start_node)) + walk_index);
}

namespace {

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / bound * bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % bound);
}

}  // namespace

std::vector<Walk> random_walks(const KnowledgeGraph& graph, const WalkConfig& config) {
  if (config.walk_length < 1 || config.walks_per_start < 1) {
    throw Error(ErrorKind::precondition_violation, "walk_length and walks_per_start must be >= 1");
  }
  std::set<std::string> starts;
  for (const std::string& selector : config.start_nodes) {
    for (std::string& id : resolve_selector(graph, selector)) starts.insert(std::move(id));
  }
  auto allowed = [&](const Edge& e) {
    return config.edge_kinds.empty() || config.edge_kinds.count(e.kind) != 0;
  };

  std::vector<Walk> walks;
  std::vector<const Edge*> options;
  for (const std::string& start : starts) {
    for (int w = 0; w < config.walks_per_start; ++w) {
      std::mt19937_64 rng(derive_walk_seed(config.seed, start, static_cast<std::uint64_t>(w)));
      Walk walk = {start};
      for (int step = 0; step < config.walk_length; ++step) {
        options.clear();
        for (const std::string& id : graph.out_edges(walk.back())) {
          const Edge* e = graph.find_edge(id);
          if (allowed(*e)) options.push_back(e);
        }
        if (options.empty()) break;
        walk.push_back(options[uniform_index(rng, options.size())]->to);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

std::map<std::pair<std::string, std::string>, long> cooccurrence_stats(
    const std::vector<Walk>& walks) {
  std::map<std::pair<std::string, std::string>, long> counts;
  for (const Walk& walk : walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      for (std::size_t j = i + 1; j < walk.size(); ++j) {
        if (walk[i] == walk[j]) continue;
        auto key = walk[i] < walk[j] ? std::pair(walk[i], walk[j]) : std::pair(walk[j], walk[i]);
        ++counts[key];
      }
    }
  }
  return counts;
}

std::string write_walks(const std::vector<Walk>& walks) {
  std::string out;
  for (const Walk& walk : walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i > 0) out += '\t';
      out += walk[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace lexgraph
