#include "lexgraph/kgraph.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexgraph/error.hpp"
#include "text_util.hpp"

namespace lexgraph {

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::entity: return "entity";
    case NodeKind::class_: return "class";
    case NodeKind::method: return "method";
    case NodeKind::modifier: return "modifier";
    case NodeKind::quality_class: return "quality_class";
  }
  return "entity";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  if (text == "entity") return NodeKind::entity;
  if (text == "class") return NodeKind::class_;
  if (text == "method") return NodeKind::method;
  if (text == "modifier") return NodeKind::modifier;
  if (text == "quality_class") return NodeKind::quality_class;
  return std::nullopt;
}

std::string_view edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::subject_of: return "SUBJECT_OF";
    case EdgeKind::object_of: return "OBJECT_OF";
    case EdgeKind::prep_object: return "PREP_OBJECT";
    case EdgeKind::is_a: return "IS_A";
    case EdgeKind::has_characteristic: return "HAS_CHARACTERISTIC";
    case EdgeKind::has_modifier: return "HAS_MODIFIER";
    case EdgeKind::condition_of: return "CONDITION_OF";
    case EdgeKind::invokes: return "INVOKES";
    case EdgeKind::coordinate: return "COORDINATE";
    case EdgeKind::contradicts: return "CONTRADICTS";
    case EdgeKind::is_not: return "IS_NOT";
  }
  return "SUBJECT_OF";
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  for (EdgeKind kind : kAllEdgeKinds) {
    if (edge_kind_name(kind) == text) return kind;
  }
  return std::nullopt;
}

NodeKind node_kind_for_upos(std::string_view upos) {
  if (upos == "VERB" || upos == "AUX") return NodeKind::method;
  if (upos == "ADJ" || upos == "ADV") return NodeKind::modifier;
  return NodeKind::entity;
}

std::string make_node_id(std::string_view lemma, NodeKind kind) {
  return "(" + std::string(lemma) + "," + std::string(node_kind_name(kind)) + ")";
}

std::optional<std::pair<std::string, NodeKind>> parse_node_id(std::string_view id) {
  if (id.size() < 4 || id.front() != '(' || id.back() != ')') return std::nullopt;
  const auto comma = id.rfind(',');
  if (comma == std::string_view::npos || comma < 2) return std::nullopt;
  auto kind = parse_node_kind(id.substr(comma + 1, id.size() - comma - 2));
  if (!kind) return std::nullopt;
  return std::pair(std::string(id.substr(1, comma - 1)), *kind);
}

std::string make_edge_id(EdgeKind kind, std::string_view from, std::string_view to,
                         std::string_view svo_id, std::string_view discriminator) {
  std::string id(edge_kind_name(kind));
  id += "|";
  id += from;
  id += "|";
  id += to;
  id += "|";
  id += svo_id;
  if (!discriminator.empty()) {
    id += "|";
    id += discriminator;
  }
  return id;
}

std::string_view assertion_origin_name(AssertionOrigin origin) {
  switch (origin) {
    case AssertionOrigin::explicit_: return "explicit";
    case AssertionOrigin::inherited: return "inherited";
    case AssertionOrigin::promoted: return "promoted";
  }
  return "explicit";
}

namespace {

std::optional<AssertionOrigin> parse_origin(std::string_view text) {
  if (text == "explicit") return AssertionOrigin::explicit_;
  if (text == "inherited") return AssertionOrigin::inherited;
  if (text == "promoted") return AssertionOrigin::promoted;
  return std::nullopt;
}

const std::set<std::string> kEmptySet;

bool hierarchy_kind(NodeKind kind) {
  return kind == NodeKind::entity || kind == NodeKind::class_;
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(AuthorityConfig authority, double promotion_threshold)
    : authority_(std::move(authority)), promotion_threshold_(promotion_threshold) {
  authority_.validate();
  if (!(promotion_threshold_ > 0.0 && promotion_threshold_ <= 1.0)) {
    throw Error(ErrorKind::precondition_violation, "promotion threshold must be in (0, 1]");
  }
}

std::vector<CharacteristicAssertion> KnowledgeGraph::assertions() const {
  std::vector<CharacteristicAssertion> out;
  out.reserve(assertions_.size());
  for (const auto& [key, assertion] : assertions_) out.push_back(assertion);
  return out;
}

const Node* KnowledgeGraph::find_node(std::string_view id) const {
  auto it = nodes_.find(std::string(id));
  return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* KnowledgeGraph::find_edge(std::string_view id) const {
  auto it = edges_.find(std::string(id));
  return it == edges_.end() ? nullptr : &it->second;
}

const SvoRecord* KnowledgeGraph::find_svo(std::string_view id) const {
  auto it = svos_.find(std::string(id));
  return it == svos_.end() ? nullptr : &it->second;
}

const std::set<std::string>& KnowledgeGraph::out_edges(std::string_view node) const {
  auto it = out_.find(std::string(node));
  return it == out_.end() ? kEmptySet : it->second;
}

const std::set<std::string>& KnowledgeGraph::in_edges(std::string_view node) const {
  auto it = in_.find(std::string(node));
  return it == in_.end() ? kEmptySet : it->second;
}

std::vector<std::string> KnowledgeGraph::nodes_with_lemma(std::string_view lemma) const {
  std::vector<std::string> out;
  for (const auto& [id, node] : nodes_) {
    if (node.lemma == lemma) out.push_back(id);
  }
  return out;
}

const std::set<std::string>& KnowledgeGraph::ancestors(std::string_view node) const {
  auto it = ancestors_.find(std::string(node));
  return it == ancestors_.end() ? kEmptySet : it->second;
}

std::set<std::string> KnowledgeGraph::direct_parents(std::string_view node) const {
  std::set<std::string> out;
  for (const std::string& id : out_edges(node)) {
    const Edge& e = edges_.at(id);
    if (e.kind == EdgeKind::is_a) out.insert(e.to);
  }
  return out;
}

std::set<std::string> KnowledgeGraph::direct_children(std::string_view node) const {
  std::set<std::string> out;
  for (const std::string& id : in_edges(node)) {
    const Edge& e = edges_.at(id);
    if (e.kind == EdgeKind::is_a) out.insert(e.from);
  }
  return out;
}

std::string KnowledgeGraph::upsert_node(std::string_view lemma, NodeKind kind) {
  if (lemma.empty()) throw Error(ErrorKind::precondition_violation, "empty node lemma");
  std::string id = make_node_id(lemma, kind);
  if (nodes_.find(id) == nodes_.end()) {
    nodes_.emplace(id, Node{id, kind, std::string(lemma), {}});
  }
  return id;
}

void KnowledgeGraph::insert_node(Node node) {
  if (node.id != make_node_id(node.lemma, node.kind)) {
    throw Error(ErrorKind::malformed_record, "node id does not match lemma/kind: " + node.id);
  }
  auto it = nodes_.find(node.id);
  if (it != nodes_.end()) {
    if (it->second != node) {
      throw Error(ErrorKind::precondition_violation, "conflicting node " + node.id);
    }
    return;
  }
  nodes_.emplace(node.id, std::move(node));
}

bool KnowledgeGraph::insert_edge(Edge edge) {
  if (edges_.count(edge.id) != 0) return false;
  const Node* from = find_node(edge.from);
  const Node* to = find_node(edge.to);
  if (from == nullptr || to == nullptr) {
    throw Error(ErrorKind::dangling_reference,
                "edge " + edge.id + " references missing node " +
                    (from == nullptr ? edge.from : edge.to));
  }
  if (!edge.svo_id.empty() && svos_.count(edge.svo_id) == 0) {
    throw Error(ErrorKind::dangling_reference,
                "edge " + edge.id + " references missing statement " + edge.svo_id);
  }
  if (edge.kind == EdgeKind::is_a) {
    if (!hierarchy_kind(from->kind) || !hierarchy_kind(to->kind)) {
      throw Error(ErrorKind::precondition_violation,
                  "IS_A requires entity or class nodes: " + edge.id);
    }
    if (edge.from == edge.to || ancestors(edge.to).count(edge.from) != 0) {
      throw Error(ErrorKind::cycle_would_form, edge.from + " IS_A " + edge.to);
    }
  }
  const EdgeKind kind = edge.kind;
  const std::string child = edge.from;
  const std::string parent = edge.to;
  out_[edge.from].insert(edge.id);
  in_[edge.to].insert(edge.id);
  edges_.emplace(edge.id, std::move(edge));
  if (kind == EdgeKind::is_a) {
    std::set<std::string> gained = ancestors(parent);
    gained.insert(parent);
    std::vector<std::string> affected = {child};
    for (const auto& [node, up] : ancestors_) {
      if (up.count(child) != 0) affected.push_back(node);
    }
    for (const std::string& node : affected) {
      ancestors_[node].insert(gained.begin(), gained.end());
    }
  }
  return true;
}

void KnowledgeGraph::insert_svo(SvoRecord record) {
  auto require = [&](const std::string& node) {
    if (!node.empty() && find_node(node) == nullptr) {
      throw Error(ErrorKind::dangling_reference,
                  "statement " + record.id + " references missing node " + node);
    }
  };
  require(record.subject);
  require(record.verb);
  require(record.object);
  for (const auto& [prep, node] : record.prep_objects) require(node);
  svos_.emplace(record.id, std::move(record));
}

KnowledgeGraph::AssertionKey KnowledgeGraph::key_of(const CharacteristicAssertion& a) {
  return {a.subject, a.characteristic, static_cast<int>(a.origin), a.negated, a.source_svo};
}

void KnowledgeGraph::insert_assertion(CharacteristicAssertion assertion) {
  if (assertion.origin == AssertionOrigin::inherited) {
    throw Error(ErrorKind::precondition_violation, "inherited assertions are derived, not stored");
  }
  for (const std::string* node : {&assertion.subject, &assertion.characteristic}) {
    if (find_node(*node) == nullptr) {
      throw Error(ErrorKind::dangling_reference, "assertion references missing node " + *node);
    }
  }
  if (!assertion.source_svo.empty() && find_svo(assertion.source_svo) == nullptr) {
    throw Error(ErrorKind::dangling_reference,
                "assertion references missing statement " + assertion.source_svo);
  }
  auto key = key_of(assertion);
  assertions_.insert_or_assign(std::move(key), std::move(assertion));
}

bool KnowledgeGraph::remove_assertion(const CharacteristicAssertion& assertion) {
  return assertions_.erase(key_of(assertion)) != 0;
}

bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
  return a.authority_ == b.authority_ && a.promotion_threshold_ == b.promotion_threshold_ &&
         a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.svos_ == b.svos_ &&
         a.assertions_ == b.assertions_;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

Edge edge_from_metadata(EdgeKind kind, const std::string& from, const std::string& to,
                        const SvoTriplet& triplet, int authority, OpinionKind opinion,
                        std::string_view discriminator = {}) {
  const SvoMetadata& m = triplet.metadata;
  Edge e;
  e.id = make_edge_id(kind, from, to, triplet.svo_id, discriminator);
  e.kind = kind;
  e.from = from;
  e.to = to;
  e.svo_id = triplet.svo_id;
  e.authority = authority;
  e.opinion = opinion;
  e.negated = m.negated;
  e.modality = m.modality.value_or("");
  e.possible = m.deontic_possible;
  e.necessary = m.deontic_necessary;
  e.tense = m.tense_time;
  e.temporal_relative = m.temporal_relative;
  e.temporal_absolute = m.temporal_absolute.value_or("");
  return e;
}

std::string phrase_node(KnowledgeGraph& graph, const NounPhrase& np) {
  return graph.upsert_node(np.lemma_key, node_kind_for_upos(np.head_upos));
}

void add_modifiers(KnowledgeGraph& graph, const std::string& owner, const NounPhrase& np,
                   const std::string& svo_id, int authority, OpinionKind opinion) {
  for (const std::string& modifier : np.modifier_lemmas) {
    const std::string mod = graph.upsert_node(modifier, NodeKind::modifier);
    if (mod == owner) continue;
    Edge e;
    e.id = make_edge_id(EdgeKind::has_modifier, owner, mod, svo_id);
    e.kind = EdgeKind::has_modifier;
    e.from = owner;
    e.to = mod;
    e.svo_id = svo_id;
    e.authority = authority;
    e.opinion = opinion;
    graph.insert_edge(std::move(e));
  }
}

}  // namespace

void add_svo(KnowledgeGraph& graph, const SvoTriplet& triplet, const Provenance& provenance) {
  const int authority =
      graph.authority_config().authority(provenance.source_level, provenance.opinion_kind);
  const OpinionKind opinion = provenance.opinion_kind;
  const SvoMetadata& m = triplet.metadata;

  SvoRecord record;
  record.id = triplet.svo_id;
  record.kind = StatementKind::clause;
  record.document_id = provenance.document_id;
  record.verb = graph.upsert_node(triplet.verb_lemma, NodeKind::method);
  if (triplet.subject) record.subject = phrase_node(graph, *triplet.subject);
  if (triplet.object) record.object = phrase_node(graph, *triplet.object);
  std::vector<std::string> prep_nodes;
  for (const PrepObject& p : triplet.prep_objects) {
    prep_nodes.push_back(phrase_node(graph, p.object));
    record.prep_objects.emplace_back(p.preposition, prep_nodes.back());
  }
  record.negated = m.negated;
  record.modality = m.modality.value_or("");
  record.possible = m.deontic_possible;
  record.necessary = m.deontic_necessary;
  record.tense = m.tense_time;
  record.temporal_relative = m.temporal_relative;
  record.temporal_absolute = m.temporal_absolute.value_or("");
  record.authority = authority;
  record.opinion = opinion;
  record.source_level = provenance.source_level;
  record.antecedents = m.resolved_antecedents;
  graph.insert_svo(record);

  if (triplet.subject) {
    Edge e = edge_from_metadata(EdgeKind::subject_of, record.subject, record.verb, triplet,
                                authority, opinion);
    e.modifiers = triplet.subject->modifier_lemmas;
    if (m.subject_inherited) e.attributes["inherited"] = "true";
    graph.insert_edge(std::move(e));
    if (!m.subject_inherited) {
      add_modifiers(graph, record.subject, *triplet.subject, triplet.svo_id, authority, opinion);
    }
  }
  if (triplet.object) {
    Edge e = edge_from_metadata(EdgeKind::object_of, record.object, record.verb, triplet,
                                authority, opinion);
    e.modifiers = triplet.object->modifier_lemmas;
    graph.insert_edge(std::move(e));
    add_modifiers(graph, record.object, *triplet.object, triplet.svo_id, authority, opinion);
  }
  for (std::size_t i = 0; i < triplet.prep_objects.size(); ++i) {
    const PrepObject& p = triplet.prep_objects[i];
    Edge e = edge_from_metadata(EdgeKind::prep_object, prep_nodes[i], record.verb, triplet,
                                authority, opinion, p.preposition);
    e.modifiers = p.object.modifier_lemmas;
    e.attributes["prep"] = p.preposition;
    graph.insert_edge(std::move(e));
    add_modifiers(graph, prep_nodes[i], p.object, triplet.svo_id, authority, opinion);
  }

  for (const ClauseLink& link : triplet.clause_links) {
    const std::string child = graph.upsert_node(link.child_verb_lemma, NodeKind::method);
    EdgeKind kind = EdgeKind::invokes;
    std::string from = record.verb;
    std::string to = child;
    switch (link.kind) {
      case LinkKind::conditional:
        kind = EdgeKind::condition_of;
        std::swap(from, to);
        break;
      case LinkKind::coordinate: kind = EdgeKind::coordinate; break;
      case LinkKind::nested_causal:
      case LinkKind::open_complement: kind = EdgeKind::invokes; break;
    }
    Edge e = edge_from_metadata(kind, from, to, triplet, authority, opinion, link.child_svo);
    e.attributes["child_svo"] = link.child_svo;
    e.attributes["link"] = std::string(link_kind_name(link.kind));
    if (link.trigger_lemma) e.attributes["trigger"] = *link.trigger_lemma;
    graph.insert_edge(std::move(e));
  }
}

void add_copula(KnowledgeGraph& graph, const CopulaAssertion& assertion,
                const Provenance& provenance) {
  const int authority =
      graph.authority_config().authority(provenance.source_level, provenance.opinion_kind);
  const OpinionKind opinion = provenance.opinion_kind;

  SvoRecord record;
  record.id = assertion.statement_id;
  record.kind = StatementKind::copula;
  record.document_id = provenance.document_id;
  record.subject = phrase_node(graph, assertion.subject);
  record.object = phrase_node(graph, assertion.predicate);
  record.negated = assertion.negated;
  record.temporal_relative = assertion.temporal_relative;
  record.temporal_absolute = assertion.temporal_absolute.value_or("");
  record.authority = authority;
  record.opinion = opinion;
  record.source_level = provenance.source_level;
  graph.insert_svo(record);

  const Node* subject = graph.find_node(record.subject);
  const Node* predicate = graph.find_node(record.object);
  const bool hierarchy = hierarchy_kind(subject->kind) && hierarchy_kind(predicate->kind);

  Edge e;
  e.from = record.subject;
  e.to = record.object;
  e.svo_id = record.id;
  e.authority = authority;
  e.opinion = opinion;
  e.negated = assertion.negated;
  e.temporal_relative = assertion.temporal_relative;
  e.temporal_absolute = record.temporal_absolute;
  e.modifiers = assertion.predicate.modifier_lemmas;
  if (assertion.class_membership && !assertion.negated && hierarchy) {
    e.kind = EdgeKind::is_a;
    e.id = make_edge_id(EdgeKind::is_a, e.from, e.to, record.id);
    graph.insert_edge(std::move(e));
  } else {
    e.kind = EdgeKind::has_characteristic;
    e.id = make_edge_id(EdgeKind::has_characteristic, e.from, e.to, record.id);
    graph.insert_edge(std::move(e));
    CharacteristicAssertion explicit_assertion;
    explicit_assertion.subject = record.subject;
    explicit_assertion.characteristic = record.object;
    explicit_assertion.origin = AssertionOrigin::explicit_;
    explicit_assertion.negated = assertion.negated;
    explicit_assertion.source_svo = record.id;
    graph.insert_assertion(std::move(explicit_assertion));
  }
  add_modifiers(graph, record.subject, assertion.subject, record.id, authority, opinion);
  add_modifiers(graph, record.object, assertion.predicate, record.id, authority, opinion);
}

// ---------------------------------------------------------------------------
// Hierarchy

namespace {

std::string resolve_hierarchy_selector(KnowledgeGraph& graph, std::string_view selector) {
  if (!selector.empty() && selector.front() == '(') {
    auto parsed = parse_node_id(selector);
    if (!parsed) throw Error(ErrorKind::unknown_node, std::string(selector));
    if (graph.has_node(selector)) return std::string(selector);
    if (!hierarchy_kind(parsed->second)) throw Error(ErrorKind::unknown_node, std::string(selector));
    return graph.upsert_node(parsed->first, parsed->second);
  }
  for (const std::string& id : graph.nodes_with_lemma(selector)) {
    if (hierarchy_kind(graph.find_node(id)->kind)) return id;
  }
  return graph.upsert_node(selector, NodeKind::class_);
}

void require_node(const KnowledgeGraph& graph, std::string_view id) {
  if (!graph.has_node(id)) throw Error(ErrorKind::unknown_node, std::string(id));
}

}  // namespace

void assert_is_a(KnowledgeGraph& graph, std::string_view child, std::string_view parent) {
  const std::string child_id = resolve_hierarchy_selector(graph, child);
  const std::string parent_id = resolve_hierarchy_selector(graph, parent);
  Edge e;
  e.kind = EdgeKind::is_a;
  e.from = child_id;
  e.to = parent_id;
  e.id = make_edge_id(EdgeKind::is_a, child_id, parent_id, "");
  graph.insert_edge(std::move(e));
}

void assert_characteristic(KnowledgeGraph& graph, std::string_view subject,
                           std::string_view characteristic, bool negated,
                           std::string_view source_svo) {
  require_node(graph, subject);
  require_node(graph, characteristic);
  CharacteristicAssertion a;
  a.subject = std::string(subject);
  a.characteristic = std::string(characteristic);
  a.origin = AssertionOrigin::explicit_;
  a.negated = negated;
  a.source_svo = std::string(source_svo);
  graph.insert_assertion(std::move(a));
}

std::vector<CharacteristicAssertion> get_characteristics(const KnowledgeGraph& graph,
                                                         std::string_view node) {
  require_node(graph, node);
  const std::vector<CharacteristicAssertion> all = graph.assertions();
  auto on = [&](const std::string& subject) {
    std::vector<const CharacteristicAssertion*> out;
    for (const CharacteristicAssertion& a : all) {
      if (a.subject == subject) out.push_back(&a);
    }
    return out;
  };

  std::vector<CharacteristicAssertion> result;
  std::map<std::string, int> defined_at;  // characteristic -> IS_A distance
  for (const CharacteristicAssertion* a : on(std::string(node))) {
    result.push_back(*a);
    defined_at.emplace(a->characteristic, 0);
  }

  // Breadth-first over parents so each ancestor is seen at its shortest
  // distance; nearer definitions shadow farther ones.
  std::set<std::string> visited = {std::string(node)};
  std::vector<std::string> frontier = {std::string(node)};
  for (int distance = 1; !frontier.empty(); ++distance) {
    std::set<std::string> next;
    for (const std::string& n : frontier) {
      for (const std::string& p : graph.direct_parents(n)) {
        if (visited.insert(p).second) next.insert(p);
      }
    }
    for (const std::string& ancestor : next) {
      for (const CharacteristicAssertion* a : on(ancestor)) {
        auto it = defined_at.find(a->characteristic);
        if (it != defined_at.end() && it->second < distance) continue;
        CharacteristicAssertion image = *a;
        image.subject = std::string(node);
        image.origin = AssertionOrigin::inherited;
        image.inherited_from = ancestor;
        result.push_back(std::move(image));
        defined_at.emplace(a->characteristic, distance);
      }
    }
    frontier.assign(next.begin(), next.end());
  }

  std::sort(result.begin(), result.end(),
            [](const CharacteristicAssertion& x, const CharacteristicAssertion& y) {
              return std::tie(x.characteristic, x.origin, x.inherited_from, x.negated,
                              x.source_svo) < std::tie(y.characteristic, y.origin,
                                                       y.inherited_from, y.negated,
                                                       y.source_svo);
            });
  return result;
}

std::vector<CharacteristicAssertion> promote_characteristics(KnowledgeGraph& graph,
                                                             std::string_view class_node) {
  require_node(graph, class_node);
  const std::set<std::string> children = graph.direct_children(class_node);
  if (children.empty()) {
    throw Error(ErrorKind::precondition_violation,
                std::string(class_node) + " has no direct children");
  }
  const std::string owner(class_node);
  std::map<std::pair<std::string, bool>, std::set<std::string>> carriers;
  std::set<std::string> own_explicit;
  for (const CharacteristicAssertion& a : graph.assertions()) {
    if (a.origin == AssertionOrigin::explicit_ && children.count(a.subject) != 0) {
      carriers[{a.characteristic, a.negated}].insert(a.subject);
    }
    if (a.subject == owner) {
      if (a.origin == AssertionOrigin::explicit_) {
        own_explicit.insert(a.characteristic);
      } else if (a.origin == AssertionOrigin::promoted) {
        graph.remove_assertion(a);
      }
    }
  }

  const double total = static_cast<double>(children.size());
  std::vector<CharacteristicAssertion> promoted;
  for (const auto& [key, subjects] : carriers) {
    const double ratio = static_cast<double>(subjects.size()) / total;
    if (ratio < graph.promotion_threshold() || own_explicit.count(key.first) != 0) continue;
    CharacteristicAssertion a;
    a.subject = owner;
    a.characteristic = key.first;
    a.origin = AssertionOrigin::promoted;
    a.negated = key.second;
    a.occurrence_ratio = ratio;
    graph.insert_assertion(a);
    promoted.push_back(std::move(a));
  }
  return promoted;
}

// ---------------------------------------------------------------------------
// Contradictions, quality classes, time

std::vector<Edge> detect_contradictions(KnowledgeGraph& graph) {
  using Key = std::tuple<int, std::string, std::string, std::string>;
  std::map<Key, std::pair<std::vector<const SvoRecord*>, std::vector<const SvoRecord*>>> groups;
  for (const auto& [id, record] : graph.svos()) {
    Key key{static_cast<int>(record.kind), record.subject, record.verb, record.object};
    auto& group = groups[key];
    (record.negated ? group.second : group.first).push_back(&record);
  }
  std::vector<Edge> added;
  for (const auto& [key, group] : groups) {
    for (const SvoRecord* affirmative : group.first) {
      for (const SvoRecord* negated : group.second) {
        const std::string anchor =
            affirmative->verb.empty() ? affirmative->subject : affirmative->verb;
        Edge e;
        e.kind = EdgeKind::contradicts;
        e.id = make_edge_id(EdgeKind::contradicts, anchor, anchor, affirmative->id, negated->id);
        e.from = anchor;
        e.to = anchor;
        e.svo_id = affirmative->id;
        e.authority = affirmative->authority;
        e.opinion = affirmative->opinion;
        e.attributes["counter_svo"] = negated->id;
        e.attributes["counter_authority"] = std::to_string(negated->authority);
        e.attributes["counter_opinion"] = std::string(opinion_kind_name(negated->opinion));
        added.push_back(std::move(e));
      }
    }
  }
  for (Edge& e : added) graph.insert_edge(std::move(e));

  std::vector<Edge> all;
  for (const auto& [id, e] : graph.edges()) {
    if (e.kind == EdgeKind::contradicts) all.push_back(e);
  }
  return all;
}

void declare_quality(KnowledgeGraph& graph, std::string_view quality,
                     const std::vector<std::string>& modifier_lemmas) {
  const std::string q = graph.upsert_node(quality, NodeKind::quality_class);
  for (const std::string& lemma : modifier_lemmas) {
    const std::string m = graph.upsert_node(lemma, NodeKind::modifier);
    Edge e;
    e.kind = EdgeKind::has_modifier;
    e.from = q;
    e.to = m;
    e.id = make_edge_id(EdgeKind::has_modifier, q, m, "");
    graph.insert_edge(std::move(e));
  }
}

void assert_is_not(KnowledgeGraph& graph, std::string_view modifier_a,
                   std::string_view modifier_b) {
  auto resolve = [&](std::string_view selector) {
    std::string id = !selector.empty() && selector.front() == '('
                         ? std::string(selector)
                         : make_node_id(selector, NodeKind::modifier);
    const Node* node = graph.find_node(id);
    if (node == nullptr || node->kind != NodeKind::modifier) {
      throw Error(ErrorKind::unknown_node, "modifier " + std::string(selector));
    }
    return id;
  };
  const std::string a = resolve(modifier_a);
  const std::string b = resolve(modifier_b);
  auto qualities = [&](const std::string& m) {
    std::set<std::string> out;
    for (const std::string& id : graph.in_edges(m)) {
      const Edge& e = *graph.find_edge(id);
      if (e.kind == EdgeKind::has_modifier &&
          graph.find_node(e.from)->kind == NodeKind::quality_class) {
        out.insert(e.from);
      }
    }
    return out;
  };
  const std::set<std::string> qa = qualities(a);
  const std::set<std::string> qb = qualities(b);
  const bool shared = std::any_of(qa.begin(), qa.end(),
                                  [&](const std::string& q) { return qb.count(q) != 0; });
  if (a == b || !shared) {
    throw Error(ErrorKind::precondition_violation,
                "IS_NOT needs two distinct modifiers of one quality class");
  }
  Edge e;
  e.kind = EdgeKind::is_not;
  e.from = a;
  e.to = b;
  e.id = make_edge_id(EdgeKind::is_not, a, b, "");
  graph.insert_edge(std::move(e));
}

namespace {

std::vector<int> date_parts(std::string_view date) {
  std::vector<int> parts;
  for (std::string_view piece : detail::split(date, '-')) {
    auto value = detail::parse_int<int>(piece);
    if (!value) return {};
    parts.push_back(*value);
  }
  return parts;
}

}  // namespace

std::vector<std::string> check_temporal_consistency(const KnowledgeGraph& graph) {
  std::vector<std::string> flagged;
  for (const auto& [id, e] : graph.edges()) {
    if (e.kind != EdgeKind::invokes) continue;
    auto child_id = e.attributes.find("child_svo");
    if (child_id == e.attributes.end()) continue;
    const SvoRecord* parent = graph.find_svo(e.svo_id);
    const SvoRecord* child = graph.find_svo(child_id->second);
    if (parent == nullptr || child == nullptr) continue;
    const std::vector<int> p = date_parts(parent->temporal_absolute);
    const std::vector<int> c = date_parts(child->temporal_absolute);
    if (p.empty() || c.empty()) continue;
    const std::size_t common = std::min(p.size(), c.size());
    if (std::lexicographical_compare(c.begin(), c.begin() + common, p.begin(),
                                     p.begin() + common)) {
      flagged.push_back(id);
    }
  }
  return flagged;
}

// ---------------------------------------------------------------------------
// Canonical file format

namespace {

constexpr std::string_view kMagic = "lexgraph-kg";
constexpr std::string_view kVersion = "v1";

// Scalars escape the record separators; list elements also escape the list
// punctuation.
std::string escape(std::string_view text, bool list_element = false) {
  std::string out;
  for (char c : text) {
    const bool special = c == '%' || c == '\t' || c == '\n' || c == '\r' ||
                         (list_element && (c == ',' || c == ';' || c == '='));
    if (special) {
      static constexpr char kHex[] = "0123456789ABCDEF";
      out += '%';
      out += kHex[(static_cast<unsigned char>(c) >> 4) & 0xF];
      out += kHex[static_cast<unsigned char>(c) & 0xF];
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out += text[i];
      continue;
    }
    auto hex = [&](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      throw Error(ErrorKind::malformed_record, "bad escape");
    };
    if (i + 2 >= text.size()) throw Error(ErrorKind::malformed_record, "truncated escape");
    out += static_cast<char>(hex(text[i + 1]) * 16 + hex(text[i + 2]));
    i += 2;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += escape(items[i], true);
  }
  return out;
}

std::vector<std::string> split_list(std::string_view field) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  for (std::string_view item : detail::split(field, ',')) out.push_back(unescape(item));
  return out;
}

std::string join_map(const std::map<std::string, std::string>& items) {
  std::string out;
  for (const auto& [key, value] : items) {
    if (!out.empty()) out += ';';
    out += escape(key, true) + "=" + escape(value, true);
  }
  return out;
}

std::map<std::string, std::string> split_map(std::string_view field) {
  std::map<std::string, std::string> out;
  if (field.empty()) return out;
  for (std::string_view item : detail::split(field, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::malformed_record, "bad map entry '" + std::string(item) + "'");
    }
    out[unescape(item.substr(0, eq))] = unescape(item.substr(eq + 1));
  }
  return out;
}

std::string bool_field(bool value) { return value ? "1" : "0"; }

}  // namespace

std::string serialize(const KnowledgeGraph& graph) {
  std::ostringstream out;
  const AuthorityConfig& config = graph.authority_config();
  out << kMagic << '\t' << kVersion << "\tthreshold=" << detail::format_double(graph.promotion_threshold());
  for (const auto& [name, weight] : config.source_weights) {
    out << "\tsource." << escape(name, true) << '=' << weight;
  }
  for (const auto& [kind, weight] : config.opinion_weights) {
    out << "\topinion." << opinion_kind_name(kind) << '=' << weight;
  }
  out << '\n';

  for (const auto& [id, n] : graph.nodes()) {
    out << "N\t" << escape(id) << '\t' << node_kind_name(n.kind) << '\t' << escape(n.lemma)
        << '\t' << join_map(n.attributes) << '\n';
  }
  for (const auto& [id, s] : graph.svos()) {
    std::map<std::string, std::string> antecedents;
    for (const auto& [index, lemma] : s.antecedents) antecedents[std::to_string(index)] = lemma;
    std::string prep_field;
    for (std::size_t i = 0; i < s.prep_objects.size(); ++i) {
      if (i > 0) prep_field += ';';
      prep_field += escape(s.prep_objects[i].first, true) + "=" +
                    escape(s.prep_objects[i].second, true);
    }
    out << "S\t" << escape(id) << '\t' << (s.kind == StatementKind::clause ? "clause" : "copula")
        << '\t' << escape(s.document_id) << '\t' << escape(s.subject) << '\t' << escape(s.verb)
        << '\t' << escape(s.object) << '\t' << prep_field << '\t' << bool_field(s.negated)
        << '\t' << escape(s.modality) << '\t' << tri_state_name(s.possible) << '\t'
        << tri_state_name(s.necessary) << '\t' << tense_name(s.tense) << '\t'
        << s.temporal_relative << '\t' << escape(s.temporal_absolute) << '\t' << s.authority
        << '\t' << opinion_kind_name(s.opinion) << '\t' << escape(s.source_level) << '\t'
        << join_map(antecedents) << '\n';
  }
  for (const auto& [id, e] : graph.edges()) {
    out << "E\t" << escape(id) << '\t' << edge_kind_name(e.kind) << '\t' << escape(e.from)
        << '\t' << escape(e.to) << '\t' << escape(e.svo_id) << '\t' << e.authority << '\t'
        << opinion_kind_name(e.opinion) << '\t' << bool_field(e.negated) << '\t'
        << escape(e.modality) << '\t' << tri_state_name(e.possible) << '\t'
        << tri_state_name(e.necessary) << '\t' << tense_name(e.tense) << '\t'
        << e.temporal_relative << '\t' << escape(e.temporal_absolute) << '\t'
        << join_list(e.modifiers) << '\t' << join_map(e.attributes) << '\n';
  }
  for (const CharacteristicAssertion& a : graph.assertions()) {
    out << "A\t" << escape(a.subject) << '\t' << escape(a.characteristic) << '\t'
        << assertion_origin_name(a.origin) << '\t' << bool_field(a.negated) << '\t'
        << (a.occurrence_ratio ? detail::format_double(*a.occurrence_ratio) : "") << '\t'
        << escape(a.source_svo) << '\n';
  }
  return out.str();
}

namespace {

class RecordParser {
 public:
  RecordParser(std::string_view line, int line_number)
      : fields_(detail::split(line, '\t')), line_number_(line_number) {}

  std::size_t size() const { return fields_.size(); }
  void expect(std::size_t count) const {
    if (fields_.size() != count) {
      fail("expected " + std::to_string(count) + " fields, got " +
           std::to_string(fields_.size()));
    }
  }
  std::string_view raw(std::size_t i) const { return fields_.at(i); }
  std::string text(std::size_t i) const { return unescape(fields_.at(i)); }
  int integer(std::size_t i) const {
    auto value = detail::parse_int<int>(fields_.at(i));
    if (!value) fail("bad integer '" + std::string(fields_.at(i)) + "'");
    return *value;
  }
  bool flag(std::size_t i) const {
    if (fields_.at(i) == "1") return true;
    if (fields_.at(i) != "0") fail("bad flag '" + std::string(fields_.at(i)) + "'");
    return false;
  }
  template <typename T>
  T parsed(std::size_t i, std::optional<T> value) const {
    if (!value) fail("bad value '" + std::string(fields_.at(i)) + "'");
    return *value;
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::malformed_record,
                "line " + std::to_string(line_number_) + ": " + message);
  }

 private:
  std::vector<std::string_view> fields_;
  int line_number_;
};

}  // namespace

KnowledgeGraph deserialize(std::istream& input) {
  std::string line;
  if (!std::getline(input, line)) {
    throw Error(ErrorKind::malformed_record, "missing header");
  }
  RecordParser header(line, 1);
  if (header.size() < 3 || header.raw(0) != kMagic || header.raw(1) != kVersion) {
    header.fail("bad header");
  }
  AuthorityConfig config;
  double threshold = KnowledgeGraph::kDefaultPromotionThreshold;
  for (std::size_t i = 2; i < header.size(); ++i) {
    const std::string_view field = header.raw(i);
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) header.fail("bad header field");
    const std::string_view key = field.substr(0, eq);
    const std::string_view value = field.substr(eq + 1);
    if (key == "threshold") {
      auto parsed = detail::parse_double(value);
      if (!parsed) header.fail("bad threshold");
      threshold = *parsed;
    } else if (detail::starts_with(key, "source.")) {
      auto weight = detail::parse_int<int>(value);
      if (!weight) header.fail("bad source weight");
      config.source_weights[unescape(key.substr(7))] = *weight;
    } else if (detail::starts_with(key, "opinion.")) {
      auto kind = parse_opinion_kind(key.substr(8));
      auto weight = detail::parse_int<int>(value);
      if (!kind || !weight) header.fail("bad opinion weight");
      config.opinion_weights[*kind] = *weight;
    } else {
      header.fail("unknown header field");
    }
  }
  KnowledgeGraph graph(config, threshold);

  std::vector<Node> nodes;
  std::vector<SvoRecord> svos;
  std::vector<Edge> edges;
  std::vector<CharacteristicAssertion> assertions;
  std::set<std::string> node_ids, svo_ids, edge_ids;
  int line_number = 1;
  while (std::getline(input, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    RecordParser r(line, line_number);
    const std::string_view tag = r.raw(0);
    if (tag == "N") {
      r.expect(5);
      Node n;
      n.id = r.text(1);
      n.kind = r.parsed(2, parse_node_kind(r.raw(2)));
      n.lemma = r.text(3);
      n.attributes = split_map(r.raw(4));
      if (!node_ids.insert(n.id).second) r.fail("duplicate node " + n.id);
      if (n.id != make_node_id(n.lemma, n.kind)) r.fail("node id mismatch " + n.id);
      nodes.push_back(std::move(n));
    } else if (tag == "S") {
      r.expect(19);
      SvoRecord s;
      s.id = r.text(1);
      if (r.raw(2) == "clause") {
        s.kind = StatementKind::clause;
      } else if (r.raw(2) == "copula") {
        s.kind = StatementKind::copula;
      } else {
        r.fail("bad statement kind");
      }
      s.document_id = r.text(3);
      s.subject = r.text(4);
      s.verb = r.text(5);
      s.object = r.text(6);
      if (!r.raw(7).empty()) {
        for (std::string_view item : detail::split(r.raw(7), ';')) {
          const auto eq = item.find('=');
          if (eq == std::string_view::npos) r.fail("bad prep entry");
          s.prep_objects.emplace_back(unescape(item.substr(0, eq)), unescape(item.substr(eq + 1)));
        }
      }
      s.negated = r.flag(8);
      s.modality = r.text(9);
      s.possible = r.parsed(10, parse_tri_state(r.raw(10)));
      s.necessary = r.parsed(11, parse_tri_state(r.raw(11)));
      s.tense = r.parsed(12, parse_tense(r.raw(12)));
      s.temporal_relative = r.integer(13);
      s.temporal_absolute = r.text(14);
      s.authority = r.integer(15);
      s.opinion = r.parsed(16, parse_opinion_kind(r.raw(16)));
      s.source_level = r.text(17);
      for (const auto& [index, lemma] : split_map(r.raw(18))) {
        auto parsed = detail::parse_int<int>(index);
        if (!parsed) r.fail("bad antecedent index");
        s.antecedents[*parsed] = lemma;
      }
      if (!svo_ids.insert(s.id).second) r.fail("duplicate statement " + s.id);
      svos.push_back(std::move(s));
    } else if (tag == "E") {
      r.expect(17);
      Edge e;
      e.id = r.text(1);
      e.kind = r.parsed(2, parse_edge_kind(r.raw(2)));
      e.from = r.text(3);
      e.to = r.text(4);
      e.svo_id = r.text(5);
      e.authority = r.integer(6);
      e.opinion = r.parsed(7, parse_opinion_kind(r.raw(7)));
      e.negated = r.flag(8);
      e.modality = r.text(9);
      e.possible = r.parsed(10, parse_tri_state(r.raw(10)));
      e.necessary = r.parsed(11, parse_tri_state(r.raw(11)));
      e.tense = r.parsed(12, parse_tense(r.raw(12)));
      e.temporal_relative = r.integer(13);
      e.temporal_absolute = r.text(14);
      e.modifiers = split_list(r.raw(15));
      e.attributes = split_map(r.raw(16));
      if (!edge_ids.insert(e.id).second) r.fail("duplicate edge " + e.id);
      edges.push_back(std::move(e));
    } else if (tag == "A") {
      r.expect(7);
      CharacteristicAssertion a;
      a.subject = r.text(1);
      a.characteristic = r.text(2);
      a.origin = r.parsed(3, parse_origin(r.raw(3)));
      a.negated = r.flag(4);
      if (!r.raw(5).empty()) a.occurrence_ratio = r.parsed(5, detail::parse_double(r.raw(5)));
      a.source_svo = r.text(6);
      assertions.push_back(std::move(a));
    } else {
      r.fail("unknown record tag '" + std::string(tag) + "'");
    }
  }

  for (Node& n : nodes) graph.insert_node(std::move(n));
  for (SvoRecord& s : svos) graph.insert_svo(std::move(s));
  for (Edge& e : edges) graph.insert_edge(std::move(e));
  for (CharacteristicAssertion& a : assertions) graph.insert_assertion(std::move(a));
  return graph;
}

KnowledgeGraph deserialize(std::string_view text) {
  std::istringstream stream{std::string(text)};
  return deserialize(stream);
}

// ---------------------------------------------------------------------------
// Exports

namespace {

std::string cypher_string(std::string_view text) {
  std::string out = "'";
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "'";
}

std::string_view cypher_label(NodeKind kind) {
  switch (kind) {
    case NodeKind::entity: return "Entity";
    case NodeKind::class_: return "Class";
    case NodeKind::method: return "Method";
    case NodeKind::modifier: return "Modifier";
    case NodeKind::quality_class: return "QualityClass";
  }
  return "Entity";
}

}  // namespace

std::string export_cypher(const KnowledgeGraph& graph) {
  std::ostringstream out;
  for (const auto& [id, n] : graph.nodes()) {
    out << "CREATE (:" << cypher_label(n.kind) << " {id:" << cypher_string(id)
        << ", lemma:" << cypher_string(n.lemma) << ", kind:" << cypher_string(node_kind_name(n.kind));
    for (const auto& [key, value] : n.attributes) {
      out << ", attr_" << key << ":" << cypher_string(value);
    }
    out << "});\n";
  }
  for (const auto& [id, e] : graph.edges()) {
    out << "MATCH (a {id:" << cypher_string(e.from) << "}), (b {id:" << cypher_string(e.to)
        << "}) CREATE (a)-[:" << edge_kind_name(e.kind) << " {id:" << cypher_string(id)
        << ", svo_id:" << cypher_string(e.svo_id) << ", authority:" << e.authority
        << ", opinion:" << cypher_string(opinion_kind_name(e.opinion))
        << ", negated:" << (e.negated ? "true" : "false")
        << ", modality:" << cypher_string(e.modality)
        << ", possible:" << cypher_string(tri_state_name(e.possible))
        << ", necessary:" << cypher_string(tri_state_name(e.necessary))
        << ", tense:" << cypher_string(tense_name(e.tense))
        << ", temporal_relative:" << e.temporal_relative
        << ", temporal_absolute:" << cypher_string(e.temporal_absolute) << ", modifiers:[";
    for (std::size_t i = 0; i < e.modifiers.size(); ++i) {
      out << (i ? ", " : "") << cypher_string(e.modifiers[i]);
    }
    out << "]}]->(b);\n";
  }
  return out.str();
}

std::string export_jsonl(const KnowledgeGraph& graph) {
  std::ostringstream out;
  for (const auto& [id, n] : graph.nodes()) {
    nlohmann::ordered_json j;
    j["type"] = "node";
    j["id"] = id;
    j["kind"] = node_kind_name(n.kind);
    j["lemma"] = n.lemma;
    j["attributes"] = n.attributes;
    out << j.dump() << '\n';
  }
  for (const auto& [id, e] : graph.edges()) {
    nlohmann::ordered_json j;
    j["type"] = "edge";
    j["id"] = id;
    j["kind"] = edge_kind_name(e.kind);
    j["from"] = e.from;
    j["to"] = e.to;
    j["svo_id"] = e.svo_id;
    j["authority"] = e.authority;
    j["opinion"] = opinion_kind_name(e.opinion);
    j["negated"] = e.negated;
    j["modality"] = e.modality;
    j["possible"] = tri_state_name(e.possible);
    j["necessary"] = tri_state_name(e.necessary);
    j["tense"] = tense_name(e.tense);
    j["temporal_relative"] = e.temporal_relative;
    j["temporal_absolute"] = e.temporal_absolute;
    j["modifiers"] = e.modifiers;
    j["attributes"] = e.attributes;
    out << j.dump() << '\n';
  }
  for (const auto& [id, r] : graph.svos()) {
    nlohmann::ordered_json j;
    j["type"] = "statement";
    j["id"] = id;
    j["kind"] = r.kind == StatementKind::copula ? "copula" : "clause";
    j["document_id"] = r.document_id;
    j["subject"] = r.subject;
    j["verb"] = r.verb;
    j["object"] = r.object;
    nlohmann::ordered_json preps = nlohmann::ordered_json::array();
    for (const auto& [prep, node] : r.prep_objects) preps.push_back({prep, node});
    j["prep_objects"] = preps;
    j["negated"] = r.negated;
    j["modality"] = r.modality;
    j["possible"] = tri_state_name(r.possible);
    j["necessary"] = tri_state_name(r.necessary);
    j["tense"] = tense_name(r.tense);
    j["temporal_relative"] = r.temporal_relative;
    j["temporal_absolute"] = r.temporal_absolute;
    j["authority"] = r.authority;
    j["opinion"] = opinion_kind_name(r.opinion);
    j["source_level"] = r.source_level;
    out << j.dump() << '\n';
  }
  for (const CharacteristicAssertion& a : graph.assertions()) {
    nlohmann::ordered_json j;
    j["type"] = "assertion";
    j["subject"] = a.subject;
    j["characteristic"] = a.characteristic;
    j["origin"] = assertion_origin_name(a.origin);
    j["negated"] = a.negated;
    if (a.occurrence_ratio) j["occurrence_ratio"] = *a.occurrence_ratio;
    j["source_svo"] = a.source_svo;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace lexgraph
