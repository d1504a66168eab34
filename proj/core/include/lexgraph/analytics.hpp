#pragma once

// Embedding lookups for attachment decisions, and seeded random walks over
// the graph.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexgraph/kgraph.hpp"

namespace lexgraph {

// Throws dimension_mismatch or zero_vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Text format: a `dim N` header line, then `lemma v1 ... vN` per line. Blank
// lines and lines starting with '#' are skipped.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension = 1);

  static EmbeddingTable load(std::istream& input);
  static EmbeddingTable load_file(const std::string& path);
  static EmbeddingTable parse(std::string_view text);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  // Throws dimension_mismatch, or malformed_line for a non-finite component.
  void insert(std::string lemma, std::vector<double> vector);
  const std::vector<double>* find(std::string_view lemma) const;

 private:
  std::size_t dimension_;
  std::map<std::string, std::vector<double>, std::less<>> vectors_;
};

enum class Attachment { verb_attachment, noun_attachment, unknown };

std::string_view attachment_name(Attachment attachment);

inline constexpr double kDefaultAttachmentMargin = 0.05;

// Compares cos(verb, candidate) with cos(object_head, candidate). The larger
// side wins when it leads by at least `margin`; otherwise, or when a lemma is
// missing (or has a zero vector), unknown.
Attachment attachment_score(std::string_view verb, std::string_view object_head,
                            std::string_view candidate, const EmbeddingTable& table,
                            double margin = kDefaultAttachmentMargin);

struct WalkConfig {
  std::uint64_t seed = 0;
  int walk_length = 8;  // steps
  int walks_per_start = 1;
  std::vector<std::string> start_nodes;  // selectors
  std::set<EdgeKind> edge_kinds;         // empty: every kind
};

using Walk = std::vector<std::string>;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view text);
// mix64(mix64(seed ^ fnv1a64(start)) + walk_index)
std::uint64_t derive_walk_seed(std::uint64_t seed, std::string_view start_node,
                               std::uint64_t walk_index);

// Each walk runs an mt19937_64 seeded with derive_walk_seed. A step lists the
// node's outgoing whitelisted edges in id order and picks index
// x mod n, redrawing x while x >= n * floor(2^64 / n). Sinks end a walk
// early. Start selectors resolve as in queries (unknown_selector); walks are
// emitted by start node id, then walk index.
std::vector<Walk> random_walks(const KnowledgeGraph& graph, const WalkConfig& config);

// Unordered pair counts over all position pairs i < j of each walk; pairs of
// the same node are skipped. Keys are (smaller id, larger id).
std::map<std::pair<std::string, std::string>, long> cooccurrence_stats(
    const std::vector<Walk>& walks);

// One walk per line, node ids separated by tabs.
std::string write_walks(const std::vector<Walk>& walks);

}  // namespace lexgraph
