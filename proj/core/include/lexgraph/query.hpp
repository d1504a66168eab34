#pragma once

// Constrained path search between two node selectors, authority ranking and
// phrase rendering.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lexgraph/kgraph.hpp"

namespace lexgraph {

struct PathConstraint {
  enum class Kind { edge_kind_whitelist, forbid_edge_kind, must_pass_node, opinion_kind_filter };

  Kind kind = Kind::edge_kind_whitelist;
  std::set<EdgeKind> edge_kinds;   // whitelist / forbid
  std::string node;                // must_pass_node selector
  std::set<OpinionKind> opinions;  // opinion filter (sourced edges only)

  static PathConstraint whitelist(std::set<EdgeKind> kinds);
  static PathConstraint forbid(std::set<EdgeKind> kinds);
  static PathConstraint must_pass(std::string selector);
  static PathConstraint opinion_filter(std::set<OpinionKind> opinions);
};

// Applied to role edges (SUBJECT_OF, OBJECT_OF, PREP_OBJECT). An unknown
// flag passes require_possible and fails require_necessary.
struct DeonticFilter {
  bool require_possible = false;
  bool require_necessary = false;
  bool exclude_negated = false;
};

struct Query {
  std::string from;  // lemma or node id
  std::string to;
  int max_length = 6;
  std::vector<PathConstraint> constraints;
  std::optional<DeonticFilter> deontic;
  std::optional<int> authority_floor;  // sourced edges only
};

struct RankedPath {
  std::vector<std::string> nodes;
  std::vector<std::string> edges;
  int min_authority = 0;  // over sourced edges; 0 when there are none
  int length = 0;
  std::string rendered_phrase;

  friend bool operator==(const RankedPath&, const RankedPath&) = default;
};

// Lemma selectors match every node with that lemma. Throws unknown_selector.
std::vector<std::string> resolve_selector(const KnowledgeGraph& graph, std::string_view selector);

// Whether a single edge passes the edge-level constraints and filters of `query`.
bool edge_admissible(const Edge& edge, const Query& query);

// Every simple path, edges traversed in either direction, ranked.
std::vector<RankedPath> find_paths(const KnowledgeGraph& graph, const Query& query);

// Higher min-authority, then shorter, then node ids, then edge ids.
bool path_before(const RankedPath& a, const RankedPath& b);
void rank_paths(std::vector<RankedPath>& paths);

std::string render_phrase(const KnowledgeGraph& graph, const RankedPath& path, bool debug = false);

// from=<sel> to=<sel> [max=N] [require=necessary|possible] [exclude-negated]
// [via=<sel>] [edge=KIND,...] [forbid=KIND,...] [opinion=KIND,...] [floor=N]
// Throws malformed_query.
Query parse_query_expression(std::string_view text);

struct Fact {
  std::string subject;  // lemma or node id
  std::string verb;     // lemma
  std::string object;   // may be empty
  bool negated = false;
};

enum class ConditionOutcome { satisfied, violated, unknown };

std::string_view condition_outcome_name(ConditionOutcome outcome);

// `condition_svo` is the conditional clause of a CONDITION_OF edge. Subjects
// and objects match when equal or when the fact's node has the condition's
// node among its IS_A ancestors. Throws precondition_violation.
ConditionOutcome evaluate_condition(const KnowledgeGraph& graph, std::string_view condition_svo,
                                    const std::vector<Fact>& facts);

}  // namespace lexgraph
