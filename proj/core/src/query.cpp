#include "lexgraph/query.hpp"

#include <algorithm>
#include <limits>

#include "lexgraph/error.hpp"
#include "text_util.hpp"

namespace lexgraph {

PathConstraint PathConstraint::whitelist(std::set<EdgeKind> kinds) {
  PathConstraint c;
  c.kind = Kind::edge_kind_whitelist;
  c.edge_kinds = std::move(kinds);
  return c;
}

PathConstraint PathConstraint::forbid(std::set<EdgeKind> kinds) {
  PathConstraint c;
  c.kind = Kind::forbid_edge_kind;
  c.edge_kinds = std::move(kinds);
  return c;
}

PathConstraint PathConstraint::must_pass(std::string selector) {
  PathConstraint c;
  c.kind = Kind::must_pass_node;
  c.node = std::move(selector);
  return c;
}

PathConstraint PathConstraint::opinion_filter(std::set<OpinionKind> opinions) {
  PathConstraint c;
  c.kind = Kind::opinion_kind_filter;
  c.opinions = std::move(opinions);
  return c;
}

std::vector<std::string> resolve_selector(const KnowledgeGraph& graph, std::string_view selector) {
  if (!selector.empty() && selector.front() == '(') {
    if (graph.has_node(selector)) return {std::string(selector)};
  } else {
    auto ids = graph.nodes_with_lemma(selector);
    if (!ids.empty()) return ids;
  }
  throw Error(ErrorKind::unknown_selector, "'" + std::string(selector) + "' matches no node");
}

namespace {

bool role_edge(EdgeKind kind) {
  return kind == EdgeKind::subject_of || kind == EdgeKind::object_of ||
         kind == EdgeKind::prep_object;
}

bool sourced(const Edge& e) { return e.authority > 0; }

}  // namespace

bool edge_admissible(const Edge& edge, const Query& query) {
  for (const PathConstraint& c : query.constraints) {
    switch (c.kind) {
      case PathConstraint::Kind::edge_kind_whitelist:
        if (c.edge_kinds.count(edge.kind) == 0) return false;
        break;
      case PathConstraint::Kind::forbid_edge_kind:
        if (c.edge_kinds.count(edge.kind) != 0) return false;
        break;
      case PathConstraint::Kind::opinion_kind_filter:
        if (sourced(edge) && c.opinions.count(edge.opinion) == 0) return false;
        break;
      case PathConstraint::Kind::must_pass_node: break;
    }
  }
  if (query.deontic && role_edge(edge.kind)) {
    const DeonticFilter& f = *query.deontic;
    if (f.require_possible && edge.possible == TriState::no) return false;
    if (f.require_necessary && edge.necessary != TriState::yes) return false;
    if (f.exclude_negated && edge.negated) return false;
  }
  if (query.authority_floor && sourced(edge) && edge.authority < *query.authority_floor) {
    return false;
  }
  return true;
}

namespace {

class PathSearch {
 public:
  PathSearch(const KnowledgeGraph& graph, const Query& query) : graph_(graph), query_(query) {
    if (query.max_length < 1) {
      throw Error(ErrorKind::precondition_violation, "max_length must be >= 1");
    }
    for (const std::string& id : resolve_selector(graph, query.to)) targets_.insert(id);
    for (const PathConstraint& c : query.constraints) {
      if (c.kind != PathConstraint::Kind::must_pass_node) continue;
      auto ids = resolve_selector(graph, c.node);
      must_pass_.emplace_back(ids.begin(), ids.end());
    }
  }

  std::vector<RankedPath> run() {
    for (const std::string& start : resolve_selector(graph_, query_.from)) {
      nodes_ = {start};
      edges_.clear();
      on_path_ = {start};
      visit(start);
    }
    return std::move(found_);
  }

 private:
  void visit(const std::string& node) {
    if (targets_.count(node) != 0) record();
    if (static_cast<int>(edges_.size()) >= query_.max_length) return;
    for (const auto* ids : {&graph_.out_edges(node), &graph_.in_edges(node)}) {
      for (const std::string& id : *ids) {
        const Edge& e = *graph_.find_edge(id);
        if (e.from == e.to || !edge_admissible(e, query_)) continue;
        const std::string& next = e.from == node ? e.to : e.from;
        if (on_path_.count(next) != 0) continue;
        on_path_.insert(next);
        nodes_.push_back(next);
        edges_.push_back(id);
        visit(next);
        edges_.pop_back();
        nodes_.pop_back();
        on_path_.erase(next);
      }
    }
  }

  void record() {
    for (const auto& required : must_pass_) {
      const bool hit = std::any_of(nodes_.begin(), nodes_.end(),
                                   [&](const std::string& n) { return required.count(n) != 0; });
      if (!hit) return;
    }
    RankedPath path;
    path.nodes = nodes_;
    path.edges = edges_;
    path.length = static_cast<int>(edges_.size());
    int lowest = std::numeric_limits<int>::max();
    for (const std::string& id : edges_) {
      const Edge& e = *graph_.find_edge(id);
      if (sourced(e)) lowest = std::min(lowest, e.authority);
    }
    path.min_authority = lowest == std::numeric_limits<int>::max() ? 0 : lowest;
    path.rendered_phrase = render_phrase(graph_, path);
    found_.push_back(std::move(path));
  }

  const KnowledgeGraph& graph_;
  const Query& query_;
  std::set<std::string> targets_;
  std::vector<std::set<std::string>> must_pass_;
  std::vector<std::string> nodes_;
  std::vector<std::string> edges_;
  std::set<std::string> on_path_;
  std::vector<RankedPath> found_;
};

}  // namespace

std::vector<RankedPath> find_paths(const KnowledgeGraph& graph, const Query& query) {
  auto paths = PathSearch(graph, query).run();
  rank_paths(paths);
  return paths;
}

bool path_before(const RankedPath& a, const RankedPath& b) {
  if (a.min_authority != b.min_authority) return a.min_authority > b.min_authority;
  if (a.length != b.length) return a.length < b.length;
  if (a.nodes != b.nodes) return a.nodes < b.nodes;
  return a.edges < b.edges;
}

void rank_paths(std::vector<RankedPath>& paths) {
  std::sort(paths.begin(), paths.end(), path_before);
}

namespace {

std::string_view connective(const Edge& e) {
  switch (e.kind) {
    case EdgeKind::has_characteristic: return e.negated ? "is not" : "is";
    case EdgeKind::is_a: return "is a";
    case EdgeKind::has_modifier: return "is";
    case EdgeKind::condition_of: return "if";
    case EdgeKind::invokes: return "to";
    case EdgeKind::coordinate: return "and";
    case EdgeKind::contradicts: return "contradicts";
    case EdgeKind::is_not: return "is not";
    default: return {};
  }
}

// The endpoint whose modifiers an edge carries.
const std::string& nominal_end(const Edge& e) { return role_edge(e.kind) ? e.from : e.to; }

}  // namespace

std::string render_phrase(const KnowledgeGraph& graph, const RankedPath& path, bool debug) {
  std::vector<const Edge*> edges;
  for (const std::string& id : path.edges) edges.push_back(graph.find_edge(id));

  std::vector<std::string> words;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const Node* node = graph.find_node(path.nodes[i]);
    const Edge* before = i > 0 ? edges[i - 1] : nullptr;
    const Edge* after = i < edges.size() ? edges[i] : nullptr;

    if (before != nullptr) {
      std::string_view link = connective(*before);
      if (!link.empty()) words.emplace_back(link);
      // verb -> prepositional object reads "verb prep object".
      if (before->kind == EdgeKind::prep_object && before->from == path.nodes[i]) {
        auto prep = before->attributes.find("prep");
        if (prep != before->attributes.end()) words.push_back(prep->second);
      }
    }

    if (node->kind == NodeKind::method) {
      const bool negated = (before != nullptr && role_edge(before->kind) && before->negated) ||
                           (after != nullptr && role_edge(after->kind) && after->negated);
      if (negated) words.emplace_back("not");
    } else {
      std::vector<std::string> modifiers;
      for (const Edge* e : {before, after}) {
        if (e == nullptr || nominal_end(*e) != path.nodes[i]) continue;
        for (const std::string& m : e->modifiers) {
          if (std::find(modifiers.begin(), modifiers.end(), m) == modifiers.end()) {
            modifiers.push_back(m);
          }
        }
      }
      words.insert(words.end(), modifiers.begin(), modifiers.end());
    }
    words.push_back(debug ? node->lemma + "[" + node->id + "]" : node->lemma);
  }

  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

namespace {

[[noreturn]] void bad_query(const std::string& message) {
  throw Error(ErrorKind::malformed_query, message);
}

int positive(std::string_view key, std::string_view value) {
  auto n = detail::parse_int<int>(value);
  if (!n || *n < 1) bad_query(std::string(key) + " needs a positive integer");
  return *n;
}

template <typename T, typename Parse>
std::set<T> parse_set(std::string_view key, std::string_view value, Parse parse) {
  std::set<T> out;
  for (std::string_view item : detail::split(value, ',')) {
    auto parsed = parse(item);
    if (!parsed) bad_query("unknown " + std::string(key) + " '" + std::string(item) + "'");
    out.insert(*parsed);
  }
  return out;
}

}  // namespace

Query parse_query_expression(std::string_view text) {
  Query q;
  bool have_from = false;
  bool have_to = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(start, end - start);
    pos = end;

    if (token == "exclude-negated") {
      if (!q.deontic) q.deontic.emplace();
      q.deontic->exclude_negated = true;
      continue;
    }
    const auto eq = token.find('=');
    if (eq == std::string_view::npos || eq + 1 == token.size()) {
      bad_query("expected key=value, got '" + std::string(token) + "'");
    }
    const std::string_view key = token.substr(0, eq);
    const std::string_view value = token.substr(eq + 1);
    if (key == "from") {
      q.from = std::string(value);
      have_from = true;
    } else if (key == "to") {
      q.to = std::string(value);
      have_to = true;
    } else if (key == "max") {
      q.max_length = positive(key, value);
    } else if (key == "floor") {
      q.authority_floor = positive(key, value);
    } else if (key == "require") {
      if (!q.deontic) q.deontic.emplace();
      if (value == "possible") {
        q.deontic->require_possible = true;
      } else if (value == "necessary") {
        q.deontic->require_necessary = true;
      } else {
        bad_query("require must be possible or necessary");
      }
    } else if (key == "via") {
      q.constraints.push_back(PathConstraint::must_pass(std::string(value)));
    } else if (key == "edge") {
      q.constraints.push_back(
          PathConstraint::whitelist(parse_set<EdgeKind>(key, value, parse_edge_kind)));
    } else if (key == "forbid") {
      q.constraints.push_back(
          PathConstraint::forbid(parse_set<EdgeKind>(key, value, parse_edge_kind)));
    } else if (key == "opinion") {
      q.constraints.push_back(
          PathConstraint::opinion_filter(parse_set<OpinionKind>(key, value, parse_opinion_kind)));
    } else {
      bad_query("unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_from || !have_to) bad_query("from= and to= are required");
  return q;
}

std::string_view condition_outcome_name(ConditionOutcome outcome) {
  switch (outcome) {
    case ConditionOutcome::satisfied: return "satisfied";
    case ConditionOutcome::violated: return "violated";
    case ConditionOutcome::unknown: return "unknown";
  }
  return "unknown";
}

namespace {

// `required` is a node id from the condition; `given` a fact selector.
bool class_compatible(const KnowledgeGraph& graph, const std::string& required,
                      const std::string& given) {
  if (required.empty()) return true;
  std::vector<std::string> candidates;
  if (!given.empty() && given.front() == '(') {
    candidates.push_back(given);
  } else {
    candidates = graph.nodes_with_lemma(given);
    if (candidates.empty()) return graph.find_node(required)->lemma == given;
  }
  return std::any_of(candidates.begin(), candidates.end(), [&](const std::string& id) {
    return id == required || graph.ancestors(id).count(required) != 0;
  });
}

}  // namespace

ConditionOutcome evaluate_condition(const KnowledgeGraph& graph, std::string_view condition_svo,
                                    const std::vector<Fact>& facts) {
  const SvoRecord* condition = graph.find_svo(condition_svo);
  bool is_condition = false;
  if (condition != nullptr) {
    for (const auto& [id, e] : graph.edges()) {
      if (e.kind != EdgeKind::condition_of) continue;
      auto child = e.attributes.find("child_svo");
      if (child != e.attributes.end() && child->second == condition_svo) {
        is_condition = true;
        break;
      }
    }
  }
  if (!is_condition || condition->verb.empty()) {
    throw Error(ErrorKind::precondition_violation,
                std::string(condition_svo) + " is not the condition of a CONDITION_OF edge");
  }
  const std::string verb = graph.find_node(condition->verb)->lemma;
  bool violated = false;
  for (const Fact& fact : facts) {
    if (fact.verb != verb) continue;
    if (!class_compatible(graph, condition->subject, fact.subject)) continue;
    if (!condition->object.empty() &&
        (fact.object.empty() || !class_compatible(graph, condition->object, fact.object))) {
      continue;
    }
    if (!fact.negated) return ConditionOutcome::satisfied;
    violated = true;
  }
  return violated ? ConditionOutcome::violated : ConditionOutcome::unknown;
}

}  // namespace lexgraph
