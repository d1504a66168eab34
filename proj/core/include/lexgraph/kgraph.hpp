#pragma once

// The knowledge graph: lemma-keyed nodes, typed edges carrying clause
// metadata and authority, an IS_A hierarchy with default inheritance, and a
// canonical line-delimited file format.

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "lexgraph/authority.hpp"
#include "lexgraph/svo.hpp"

namespace lexgraph {

enum class NodeKind { entity, class_, method, modifier, quality_class };

enum class EdgeKind {
  subject_of,
  object_of,
  prep_object,
  is_a,
  has_characteristic,
  has_modifier,
  condition_of,
  invokes,
  coordinate,
  contradicts,
  is_not,
};

inline constexpr EdgeKind kAllEdgeKinds[] = {
    EdgeKind::subject_of,   EdgeKind::object_of,    EdgeKind::prep_object,
    EdgeKind::is_a,         EdgeKind::has_characteristic, EdgeKind::has_modifier,
    EdgeKind::condition_of, EdgeKind::invokes,      EdgeKind::coordinate,
    EdgeKind::contradicts,  EdgeKind::is_not};

std::string_view node_kind_name(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);
std::string_view edge_kind_name(EdgeKind kind);  // SUBJECT_OF, IS_A, ...
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

// Noun-like parts of speech map to entity, verbs to method, adjectives and
// adverbs to modifier.
NodeKind node_kind_for_upos(std::string_view upos);

// "(lemma,kind)"
std::string make_node_id(std::string_view lemma, NodeKind kind);
std::optional<std::pair<std::string, NodeKind>> parse_node_id(std::string_view id);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::entity;
  std::string lemma;
  std::map<std::string, std::string> attributes;

  friend bool operator==(const Node&, const Node&) = default;
};

enum class StatementKind { clause, copula };

// Provenance record for one extracted clause or copular statement.
struct SvoRecord {
  std::string id;
  StatementKind kind = StatementKind::clause;
  std::string document_id;
  std::string subject;  // node ids; empty when the role is absent
  std::string verb;     // empty for copular statements
  std::string object;
  std::vector<std::pair<std::string, std::string>> prep_objects;  // (prep, node)
  bool negated = false;
  std::string modality;
  TriState possible = TriState::unknown;
  TriState necessary = TriState::unknown;
  Tense tense = Tense::unspecified;
  int temporal_relative = 0;
  std::string temporal_absolute;
  int authority = 0;
  OpinionKind opinion = OpinionKind::majority;
  std::string source_level;
  std::map<int, std::string> antecedents;

  friend bool operator==(const SvoRecord&, const SvoRecord&) = default;
};

struct Edge {
  std::string id;
  EdgeKind kind = EdgeKind::subject_of;
  std::string from;
  std::string to;
  std::string svo_id;  // empty for structural edges
  int authority = 0;   // 0 = no originating source
  OpinionKind opinion = OpinionKind::majority;
  bool negated = false;
  std::string modality;
  TriState possible = TriState::unknown;
  TriState necessary = TriState::unknown;
  Tense tense = Tense::unspecified;
  int temporal_relative = 0;
  std::string temporal_absolute;
  // Modifiers of the nominal endpoint of this mention.
  std::vector<std::string> modifiers;
  std::map<std::string, std::string> attributes;

  friend bool operator==(const Edge&, const Edge&) = default;
};

std::string make_edge_id(EdgeKind kind, std::string_view from, std::string_view to,
                         std::string_view svo_id, std::string_view discriminator = {});

enum class AssertionOrigin { explicit_, inherited, promoted };

std::string_view assertion_origin_name(AssertionOrigin origin);

struct CharacteristicAssertion {
  std::string subject;         // class or entity node
  std::string characteristic;  // node
  AssertionOrigin origin = AssertionOrigin::explicit_;
  bool negated = false;
  // Set on promoted assertions (and their inherited images): the share of
  // direct children that carry the characteristic explicitly. Its presence
  // marks the characteristic as an assumption.
  std::optional<double> occurrence_ratio;
  std::string source_svo;
  std::string inherited_from;  // ancestor the assertion came from

  friend bool operator==(const CharacteristicAssertion&,
                         const CharacteristicAssertion&) = default;
};

class KnowledgeGraph {
 public:
  static constexpr double kDefaultPromotionThreshold = 0.75;

  explicit KnowledgeGraph(AuthorityConfig authority = AuthorityConfig::defaults(),
                          double promotion_threshold = kDefaultPromotionThreshold);

  const AuthorityConfig& authority_config() const { return authority_; }
  double promotion_threshold() const { return promotion_threshold_; }

  const std::map<std::string, Node>& nodes() const { return nodes_; }
  const std::map<std::string, Edge>& edges() const { return edges_; }
  const std::map<std::string, SvoRecord>& svos() const { return svos_; }
  std::vector<CharacteristicAssertion> assertions() const;

  const Node* find_node(std::string_view id) const;
  const Edge* find_edge(std::string_view id) const;
  const SvoRecord* find_svo(std::string_view id) const;
  bool has_node(std::string_view id) const { return find_node(id) != nullptr; }

  // Edge ids in canonical order.
  const std::set<std::string>& out_edges(std::string_view node) const;
  const std::set<std::string>& in_edges(std::string_view node) const;
  std::vector<std::string> nodes_with_lemma(std::string_view lemma) const;

  // Transitive IS_A ancestors / direct IS_A neighbours.
  const std::set<std::string>& ancestors(std::string_view node) const;
  std::set<std::string> direct_parents(std::string_view node) const;
  std::set<std::string> direct_children(std::string_view node) const;

  // Returns the node id; an existing node is left untouched.
  std::string upsert_node(std::string_view lemma, NodeKind kind);
  void insert_node(Node node);
  // Returns false if an edge with the same id already exists. Throws
  // dangling_reference for missing endpoints or svo record, and
  // cycle_would_form for an IS_A edge closing a cycle.
  bool insert_edge(Edge edge);
  void insert_svo(SvoRecord record);
  void insert_assertion(CharacteristicAssertion assertion);
  bool remove_assertion(const CharacteristicAssertion& assertion);

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b);

 private:
  using AssertionKey = std::tuple<std::string, std::string, int, bool, std::string>;
  static AssertionKey key_of(const CharacteristicAssertion& assertion);
  void rebuild_closure();

  AuthorityConfig authority_;
  double promotion_threshold_;
  std::map<std::string, Node> nodes_;
  std::map<std::string, Edge> edges_;
  std::map<std::string, SvoRecord> svos_;
  std::map<AssertionKey, CharacteristicAssertion> assertions_;
  std::map<std::string, std::set<std::string>> out_;
  std::map<std::string, std::set<std::string>> in_;
  std::map<std::string, std::set<std::string>> ancestors_;
};

// Upserts role nodes, adds the svo record, role edges, HAS_MODIFIER edges for
// phrase modifiers, and clause-link edges for links where `triplet` is the
// parent. Throws unknown_source_level.
void add_svo(KnowledgeGraph& graph, const SvoTriplet& triplet, const Provenance& provenance);

// Class membership becomes IS_A; anything else a HAS_CHARACTERISTIC edge plus
// an explicit characteristic assertion.
void add_copula(KnowledgeGraph& graph, const CopulaAssertion& assertion,
                const Provenance& provenance);

// Selectors are node ids or bare lemmas. A lemma resolves to an existing
// entity/class node with that lemma, or creates a class node.
void assert_is_a(KnowledgeGraph& graph, std::string_view child, std::string_view parent);

// Explicit characteristic on a class or entity (nodes must exist).
void assert_characteristic(KnowledgeGraph& graph, std::string_view subject,
                           std::string_view characteristic, bool negated = false,
                           std::string_view source_svo = {});

// Explicit assertions on the node plus those inherited along IS_A; the
// nearest definition of a characteristic shadows farther ones.
std::vector<CharacteristicAssertion> get_characteristics(const KnowledgeGraph& graph,
                                                         std::string_view node);

// One level: promotes characteristics shared by at least the configured
// share of direct children. Returns the promoted assertions now on the class.
std::vector<CharacteristicAssertion> promote_characteristics(KnowledgeGraph& graph,
                                                             std::string_view class_node);

// Adds one CONTRADICTS edge per (affirmative, negated) pair of statements
// with the same subject, verb and object. Returns every CONTRADICTS edge.
std::vector<Edge> detect_contradictions(KnowledgeGraph& graph);

// Quality classes group comparable modifiers; IS_NOT is only legal between
// two members of the same quality class.
void declare_quality(KnowledgeGraph& graph, std::string_view quality,
                     const std::vector<std::string>& modifier_lemmas);
void assert_is_not(KnowledgeGraph& graph, std::string_view modifier_a,
                   std::string_view modifier_b);

// INVOKES edges whose child statement has an absolute date strictly before
// the parent's.
std::vector<std::string> check_temporal_consistency(const KnowledgeGraph& graph);

std::string serialize(const KnowledgeGraph& graph);
KnowledgeGraph deserialize(std::istream& input);
KnowledgeGraph deserialize(std::string_view text);

std::string export_cypher(const KnowledgeGraph& graph);
std::string export_jsonl(const KnowledgeGraph& graph);

}  // namespace lexgraph
