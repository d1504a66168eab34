#pragma once

// Shared fixtures, random generators and brute-force oracles for the tests.
// The oracles deliberately avoid the library's own search and indexing code.

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lexgraph/analytics.hpp"
#include "lexgraph/conllu.hpp"
#include "lexgraph/kgraph.hpp"
#include "lexgraph/pipeline.hpp"
#include "lexgraph/query.hpp"
#include "lexgraph/svo.hpp"

#ifndef LEXGRAPH_FIXTURE_DIR
#error "LEXGRAPH_FIXTURE_DIR must be defined"
#endif

namespace lexgraph::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(LEXGRAPH_FIXTURE_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::vector<Document> load_fixture(const std::string& name) {
  return parse_conllu(read_text(fixture_path(name)));
}

inline const std::vector<std::string>& corpus_files() {
  static const std::vector<std::string> files = {
      "corpus/bailey_majority.conllu", "corpus/muscarello_dissent.conllu",
      "corpus/muscarello_majority.conllu", "corpus/smith_dissent.conllu",
      "corpus/smith_majority.conllu"};
  return files;
}

inline std::vector<Document> load_corpus() {
  std::vector<Document> docs;
  for (const std::string& f : corpus_files()) {
    for (Document& d : load_fixture(f)) docs.push_back(std::move(d));
  }
  return docs;
}

inline KnowledgeGraph build_graph(const std::vector<Document>& docs,
                                  const PipelineConfig& config = {}) {
  KnowledgeGraph g(config.authority, config.promotion_threshold);
  compile_documents(g, docs, config);
  return g;
}

inline std::vector<SvoTriplet> extract_all(const Document& doc) {
  return extract_document(doc, PipelineConfig{}).triplets;
}

inline const SvoTriplet* find_triplet(const std::vector<SvoTriplet>& ts, const std::string& subject,
                                      const std::string& verb, const std::string& object) {
  for (const SvoTriplet& t : ts) {
    const std::string s = t.subject ? t.subject->lemma_key : "";
    const std::string o = t.object ? t.object->lemma_key : "";
    if (s == subject && t.verb_lemma == verb && o == object) return &t;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Random graphs

struct GraphShape {
  int min_nodes = 2;
  int max_nodes = 50;
  int max_edges = 200;
  double edges_per_node = 4.0;
  bool awkward_text = false;  // lemmas and payloads with separators/quotes
  int lemma_pool = 16;
};

inline std::string random_text(std::mt19937_64& rng, bool awkward, int pool) {
  static const std::vector<std::string> plain = {"a", "b", "c", "d", "e", "f", "g", "h",
                                                 "i", "j", "k", "l", "m", "n", "o", "p",
                                                 "q", "r", "s", "t", "u", "v", "w", "x"};
  static const std::vector<std::string> odd = {"tab\there", "semi;colon", "com,ma",  "eq=ual",
                                               "per%cent", "quo'te",     "back\\slash",
                                               "new\nline", "caf\xC3\xA9", "(paren)", "|pipe|",
                                               "cr\rret",  " space "};
  const int n = std::min<int>(pool, static_cast<int>(plain.size()));
  if (awkward && rng() % 3 == 0) {
    return odd[rng() % odd.size()] + plain[rng() % n];
  }
  return plain[rng() % n];
}

inline KnowledgeGraph random_graph(std::mt19937_64& rng, const GraphShape& shape) {
  AuthorityConfig authority = AuthorityConfig::defaults();
  if (shape.awkward_text) authority.source_weights["odd;level=x"] = 5;
  const double thresholds[] = {0.75, 0.5, 1.0, 0.6};
  KnowledgeGraph g(authority, thresholds[rng() % 4]);

  const int node_count =
      shape.min_nodes + static_cast<int>(rng() % (shape.max_nodes - shape.min_nodes + 1));
  std::vector<std::string> nodes;
  for (int i = 0; nodes.size() < static_cast<std::size_t>(node_count) && i < node_count * 4; ++i) {
    const NodeKind kinds[] = {NodeKind::entity, NodeKind::class_, NodeKind::method,
                              NodeKind::modifier, NodeKind::quality_class};
    const std::string id =
        g.upsert_node(random_text(rng, shape.awkward_text, shape.lemma_pool), kinds[rng() % 5]);
    if (std::find(nodes.begin(), nodes.end(), id) == nodes.end()) nodes.push_back(id);
  }
  if (shape.awkward_text && rng() % 2 == 0) {
    Node n;
    n.lemma = "attr" + std::to_string(rng() % 100);
    n.kind = NodeKind::entity;
    n.id = make_node_id(n.lemma, n.kind);
    n.attributes["k;=,%"] = random_text(rng, true, shape.lemma_pool);
    if (!g.has_node(n.id)) {
      g.insert_node(n);
      nodes.push_back(n.id);
    }
  }

  std::vector<std::string> svos;
  const int svo_count = static_cast<int>(rng() % (nodes.size() + 1));
  for (int i = 0; i < svo_count; ++i) {
    SvoRecord r;
    r.id = "doc" + std::to_string(rng() % 3) + ":s" + std::to_string(i) + ":" +
           std::to_string(rng() % 20);
    r.kind = rng() % 4 == 0 ? StatementKind::copula : StatementKind::clause;
    r.document_id = shape.awkward_text ? random_text(rng, true, shape.lemma_pool) : "doc";
    r.subject = rng() % 5 ? nodes[rng() % nodes.size()] : "";
    r.verb = r.kind == StatementKind::clause ? nodes[rng() % nodes.size()] : "";
    r.object = rng() % 3 ? nodes[rng() % nodes.size()] : "";
    if (rng() % 3 == 0) {
      r.prep_objects.emplace_back(random_text(rng, shape.awkward_text, 4),
                                  nodes[rng() % nodes.size()]);
    }
    r.negated = rng() % 2;
    r.modality = rng() % 3 == 0 ? "must" : "";
    r.possible = static_cast<TriState>(rng() % 3);
    r.necessary = static_cast<TriState>(rng() % 3);
    r.tense = static_cast<Tense>(rng() % 4);
    r.temporal_relative = static_cast<int>(rng() % 9);
    r.temporal_absolute = rng() % 2 ? "1998-06-0" + std::to_string(1 + rng() % 9) : "";
    r.authority = 1 + static_cast<int>(rng() % 9);
    r.opinion = static_cast<OpinionKind>(rng() % 3);
    r.source_level = rng() % 2 ? "supreme_court" : "unspecified";
    if (rng() % 3 == 0) r.antecedents[static_cast<int>(rng() % 9) + 1] = "gun";
    if (g.find_svo(r.id) != nullptr) continue;
    svos.push_back(r.id);
    g.insert_svo(std::move(r));
  }

  const int edge_target = std::min<int>(
      shape.max_edges, static_cast<int>(shape.edges_per_node * static_cast<double>(nodes.size())));
  const int edge_count = static_cast<int>(rng() % (edge_target + 1));
  for (int i = 0; i < edge_count; ++i) {
    Edge e;
    e.kind = kAllEdgeKinds[rng() % std::size(kAllEdgeKinds)];
    e.from = nodes[rng() % nodes.size()];
    e.to = nodes[rng() % nodes.size()];
    if (e.kind == EdgeKind::is_a) {
      const Node* a = g.find_node(e.from);
      const Node* b = g.find_node(e.to);
      const auto hier = [](NodeKind k) { return k == NodeKind::entity || k == NodeKind::class_; };
      if (!hier(a->kind) || !hier(b->kind) || e.from == e.to ||
          g.ancestors(e.to).count(e.from) != 0) {
        e.kind = EdgeKind::has_characteristic;
      }
    }
    e.svo_id = !svos.empty() && rng() % 4 != 0 ? svos[rng() % svos.size()] : "";
    e.authority = e.svo_id.empty() ? 0 : 1 + static_cast<int>(rng() % 9);
    e.opinion = static_cast<OpinionKind>(rng() % 3);
    e.negated = rng() % 4 == 0;
    e.modality = rng() % 4 == 0 ? "may" : "";
    e.possible = static_cast<TriState>(rng() % 3);
    e.necessary = static_cast<TriState>(rng() % 3);
    e.tense = static_cast<Tense>(rng() % 4);
    e.temporal_relative = static_cast<int>(rng() % 5);
    if (rng() % 3 == 0) e.modifiers.push_back(random_text(rng, shape.awkward_text, 6));
    if (rng() % 3 == 0) e.attributes["prep"] = random_text(rng, shape.awkward_text, 6);
    e.id = make_edge_id(e.kind, e.from, e.to, e.svo_id, std::to_string(i));
    g.insert_edge(std::move(e));
  }

  const int assertion_count = static_cast<int>(rng() % 6);
  for (int i = 0; i < assertion_count; ++i) {
    CharacteristicAssertion a;
    a.subject = nodes[rng() % nodes.size()];
    a.characteristic = nodes[rng() % nodes.size()];
    a.origin = rng() % 2 ? AssertionOrigin::explicit_ : AssertionOrigin::promoted;
    a.negated = rng() % 2;
    if (a.origin == AssertionOrigin::promoted) a.occurrence_ratio = (1 + rng() % 4) / 4.0;
    if (!svos.empty() && rng() % 2) a.source_svo = svos[rng() % svos.size()];
    g.insert_assertion(std::move(a));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Path oracle

inline std::vector<std::string> oracle_resolve(const KnowledgeGraph& g, const std::string& sel) {
  std::vector<std::string> out;
  for (const auto& [id, n] : g.nodes()) {
    if (id == sel || (sel.empty() || sel.front() != '(') && n.lemma == sel) out.push_back(id);
  }
  return out;
}

inline bool oracle_admits(const Edge& e, const Query& q) {
  const bool role = e.kind == EdgeKind::subject_of || e.kind == EdgeKind::object_of ||
                    e.kind == EdgeKind::prep_object;
  for (const PathConstraint& c : q.constraints) {
    if (c.kind == PathConstraint::Kind::edge_kind_whitelist && !c.edge_kinds.count(e.kind)) {
      return false;
    }
    if (c.kind == PathConstraint::Kind::forbid_edge_kind && c.edge_kinds.count(e.kind)) {
      return false;
    }
    if (c.kind == PathConstraint::Kind::opinion_kind_filter && e.authority > 0 &&
        !c.opinions.count(e.opinion)) {
      return false;
    }
  }
  if (q.deontic && role) {
    if (q.deontic->require_possible && e.possible == TriState::no) return false;
    if (q.deontic->require_necessary && e.necessary != TriState::yes) return false;
    if (q.deontic->exclude_negated && e.negated) return false;
  }
  if (q.authority_floor && e.authority > 0 && e.authority < *q.authority_floor) return false;
  return true;
}

using PathKey = std::pair<std::vector<std::string>, std::vector<std::string>>;

// Breadth-first expansion of every partial simple path, filtered afterwards.
inline std::set<PathKey> brute_force_paths(const KnowledgeGraph& g, const Query& q) {
  std::multimap<std::string, const Edge*> incident;
  for (const auto& [id, e] : g.edges()) {
    if (e.from == e.to) continue;
    incident.emplace(e.from, &e);
    incident.emplace(e.to, &e);
  }
  const auto from = oracle_resolve(g, q.from);
  const auto to_list = oracle_resolve(g, q.to);
  const std::set<std::string> to(to_list.begin(), to_list.end());
  std::vector<std::set<std::string>> via;
  for (const PathConstraint& c : q.constraints) {
    if (c.kind == PathConstraint::Kind::must_pass_node) {
      auto v = oracle_resolve(g, c.node);
      via.emplace_back(v.begin(), v.end());
    }
  }

  std::set<PathKey> out;
  std::deque<PathKey> queue;
  for (const std::string& f : from) queue.push_back({{f}, {}});
  while (!queue.empty()) {
    PathKey p = std::move(queue.front());
    queue.pop_front();
    const std::string last = p.first.back();
    if (to.count(last)) {
      bool ok = true;
      for (const auto& need : via) {
        ok = ok && std::any_of(p.first.begin(), p.first.end(),
                               [&](const std::string& n) { return need.count(n) != 0; });
      }
      if (ok) out.insert(p);
    }
    if (static_cast<int>(p.second.size()) >= q.max_length) continue;
    auto [lo, hi] = incident.equal_range(last);
    for (auto it = lo; it != hi; ++it) {
      const Edge& e = *it->second;
      if (!oracle_admits(e, q)) continue;
      const std::string next = e.from == last ? e.to : e.from;
      if (std::find(p.first.begin(), p.first.end(), next) != p.first.end()) continue;
      PathKey grown = p;
      grown.first.push_back(next);
      grown.second.push_back(e.id);
      queue.push_back(std::move(grown));
    }
  }
  return out;
}

inline Query random_query(std::mt19937_64& rng, const KnowledgeGraph& g) {
  std::vector<std::string> ids;
  for (const auto& [id, n] : g.nodes()) ids.push_back(id);
  auto selector = [&]() {
    const Node& n = *g.find_node(ids[rng() % ids.size()]);
    return rng() % 2 ? n.lemma : n.id;
  };
  auto kinds = [&]() {
    std::set<EdgeKind> k;
    for (EdgeKind kind : kAllEdgeKinds) {
      if (rng() % 2) k.insert(kind);
    }
    return k;
  };
  Query q;
  q.from = selector();
  q.to = selector();
  q.max_length = 1 + static_cast<int>(rng() % 4);
  if (rng() % 3 == 0) q.constraints.push_back(PathConstraint::whitelist(kinds()));
  if (rng() % 3 == 0) q.constraints.push_back(PathConstraint::forbid(kinds()));
  if (rng() % 4 == 0) q.constraints.push_back(PathConstraint::must_pass(selector()));
  if (rng() % 3 == 0) {
    std::set<OpinionKind> ops;
    for (int k = 0; k < 3; ++k) {
      if (rng() % 2) ops.insert(static_cast<OpinionKind>(k));
    }
    q.constraints.push_back(PathConstraint::opinion_filter(ops));
  }
  if (rng() % 3 == 0) {
    DeonticFilter f;
    f.require_possible = rng() % 2;
    f.require_necessary = rng() % 4 == 0;
    f.exclude_negated = rng() % 2;
    q.deontic = f;
  }
  if (rng() % 4 == 0) q.authority_floor = 1 + static_cast<int>(rng() % 9);
  return q;
}

inline std::set<PathKey> as_keys(const std::vector<RankedPath>& paths) {
  std::set<PathKey> out;
  for (const RankedPath& p : paths) out.insert({p.nodes, p.edges});
  return out;
}

// ---------------------------------------------------------------------------
// Contradiction oracle

inline std::set<std::pair<std::string, std::string>> brute_force_contradictions(
    const KnowledgeGraph& g) {
  std::vector<const SvoRecord*> all;
  for (const auto& [id, r] : g.svos()) all.push_back(&r);
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const SvoRecord& a = *all[i];
      const SvoRecord& b = *all[j];
      if (a.kind != b.kind || a.subject != b.subject || a.verb != b.verb ||
          a.object != b.object || a.negated == b.negated) {
        continue;
      }
      out.insert(a.negated ? std::pair(b.id, a.id) : std::pair(a.id, b.id));
    }
  }
  return out;
}

inline std::set<std::pair<std::string, std::string>> contradiction_pairs(
    const std::vector<Edge>& edges) {
  std::set<std::pair<std::string, std::string>> out;
  for (const Edge& e : edges) out.insert({e.svo_id, e.attributes.at("counter_svo")});
  return out;
}

inline KnowledgeGraph random_svo_collection(std::mt19937_64& rng, int max_svos) {
  KnowledgeGraph g;
  const int subjects = 1 + static_cast<int>(rng() % 6);
  const int verbs = 1 + static_cast<int>(rng() % 4);
  const int objects = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < subjects; ++i) g.upsert_node("s" + std::to_string(i), NodeKind::entity);
  for (int i = 0; i < verbs; ++i) g.upsert_node("v" + std::to_string(i), NodeKind::method);
  for (int i = 0; i < objects; ++i) g.upsert_node("o" + std::to_string(i), NodeKind::entity);
  const int count = static_cast<int>(rng() % (max_svos + 1));
  for (int i = 0; i < count; ++i) {
    SvoRecord r;
    r.id = "d:" + std::to_string(i);
    r.kind = rng() % 5 == 0 ? StatementKind::copula : StatementKind::clause;
    r.subject = make_node_id("s" + std::to_string(rng() % subjects), NodeKind::entity);
    r.verb = r.kind == StatementKind::clause
                 ? make_node_id("v" + std::to_string(rng() % verbs), NodeKind::method)
                 : "";
    r.object = rng() % 6 == 0 ? ""
                              : make_node_id("o" + std::to_string(rng() % objects), NodeKind::entity);
    r.negated = rng() % 3 == 0;
    r.opinion = static_cast<OpinionKind>(rng() % 3);
    r.authority = 3 * (3 - static_cast<int>(r.opinion));
    g.insert_svo(std::move(r));
  }
  return g;
}

}  // namespace lexgraph::testing
