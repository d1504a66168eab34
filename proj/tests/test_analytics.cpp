#include <doctest.h>

#include <cmath>
#include <random>

#include "lexgraph/error.hpp"
#include "support/support.hpp"

using namespace lexgraph;
namespace lt = lexgraph::testing;

namespace {

ErrorKind error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

double cos(const std::vector<double>& a, const std::vector<double>& b) {
  return cosine_similarity(a, b);
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

EmbeddingTable fixture_table() {
  return EmbeddingTable::load_file(lt::fixture_path("attachment.emb"));
}

}  // namespace

TEST_CASE("cosine: identity, orthogonality, hand-computed values") {
  CHECK(cos({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(cos({1, 0}, {0, 1})) < 1e-9);
  CHECK(cos({1, 0}, {-1, 0}) == doctest::Approx(-1.0).epsilon(1e-9));
  // (3,4)·(4,3) = 24, |a||b| = 25.
  CHECK(std::abs(cos({3, 4}, {4, 3}) - 0.96) < 1e-9);
  // (1,1,0)·(1,0,0) = 1, |a| = sqrt 2.
  CHECK(std::abs(cos({1, 1, 0}, {1, 0, 0}) - 1.0 / std::sqrt(2.0)) < 1e-9);
  CHECK(std::abs(cos({1, 2, 2}, {2, -1, 2}) - 4.0 / 9.0) < 1e-9);
}

TEST_CASE("cosine errors") {
  CHECK(error_of([] { cos({1, 2}, {1, 2, 3}); }) == ErrorKind::dimension_mismatch);
  CHECK(error_of([] { cos({0, 0}, {1, 2}); }) == ErrorKind::zero_vector);
  CHECK(error_of([] { cos({}, {}); }) == ErrorKind::zero_vector);
}

TEST_CASE("cosine symmetry, scale invariance and range over random pairs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> scale(0.001, 1000.0);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 16;
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    const double ab = cos(a, b);
    CHECK(std::abs(ab - cos(b, a)) <= 1e-9);
    auto scaled = a;
    const double k = scale(rng);
    for (double& x : scaled) x *= k;
    CHECK(std::abs(cos(scaled, b) - ab) <= 1e-9);
    CHECK(ab >= -1.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("embedding table parsing") {
  const EmbeddingTable t = fixture_table();
  CHECK(t.dimension() == 4);
  CHECK(t.size() == 4);
  REQUIRE(t.find("gun") != nullptr);
  CHECK(*t.find("gun") == std::vector<double>{1, 0, 0, 0});
  CHECK(t.find("knife") == nullptr);

  CHECK(error_of([] { EmbeddingTable::parse("dim 2\ngun 1 2 3\n"); }) ==
        ErrorKind::malformed_line);
  CHECK(error_of([] { EmbeddingTable(2).insert("gun", {1, 2, 3}); }) ==
        ErrorKind::dimension_mismatch);
  CHECK(error_of([] { EmbeddingTable::parse("gun 1 2\n"); }) == ErrorKind::malformed_line);
  CHECK(error_of([] { EmbeddingTable::parse("dim 2\ngun 1 x\n"); }) == ErrorKind::malformed_line);
  CHECK(error_of([] { EmbeddingTable::parse("dim 2\ngun 1 nan\n"); }) == ErrorKind::malformed_line);
  CHECK(error_of([] { EmbeddingTable::load_file("/nonexistent/table.emb"); }) == ErrorKind::io);
}

TEST_CASE("attachment: gun goes with the verb, telescope with the noun") {
  const EmbeddingTable t = fixture_table();
  CHECK(attachment_score("shoot", "man", "gun", t) == Attachment::verb_attachment);
  CHECK(attachment_score("shoot", "man", "telescope", t) == Attachment::noun_attachment);
  CHECK(attachment_score("shoot", "man", "knife", t) == Attachment::unknown);
  // Margins wider than the gap give up.
  CHECK(attachment_score("shoot", "man", "telescope", t, 0.6) == Attachment::unknown);
}

TEST_CASE("attachment is invariant to rescaling the table") {
  const EmbeddingTable base = fixture_table();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    EmbeddingTable scaled(4);
    for (const char* w : {"gun", "man", "shoot", "telescope"}) {
      auto v = *base.find(w);
      const double k = scale(rng);
      for (double& x : v) x *= k;
      scaled.insert(w, v);
    }
    for (const char* c : {"gun", "telescope"}) {
      CHECK(attachment_score("shoot", "man", c, scaled) == attachment_score("shoot", "man", c, base));
    }
  }
}

TEST_CASE("pipeline moves noun-attached prepositional objects") {
  const auto docs = lt::load_fixture("attachment.conllu");
  const EmbeddingTable t = fixture_table();
  const auto plain = extract_document(docs[0], PipelineConfig{});
  const auto checked = extract_document(docs[0], PipelineConfig{}, &t);
  REQUIRE(checked.triplets.size() == 2);
  CHECK(plain.noun_attached.empty());
  CHECK(checked.triplets[0].prep_objects.size() == 1);
  CHECK(checked.triplets[0].prep_objects[0].object.lemma_key == "gun");
  CHECK(checked.triplets[1].prep_objects.empty());
  REQUIRE(checked.noun_attached.size() == 1);
  CHECK(checked.noun_attached[0].second.object.lemma_key == "telescope");

  KnowledgeGraph g;
  add_extraction(g, checked);
  const std::string telescope = make_node_id("telescope", NodeKind::entity);
  const std::string man = make_node_id("man", NodeKind::entity);
  bool found = false;
  for (const auto& [id, e] : g.edges()) {
    if (e.kind == EdgeKind::prep_object && e.from == telescope) {
      CHECK(e.to == man);
      CHECK(e.attributes.at("attached") == "noun");
      CHECK(e.attributes.at("prep") == "with");
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("generator building blocks match published vectors") {
  // First splitmix64 output from state 0.
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
  CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
  CHECK(derive_walk_seed(7, "x", 3) == mix64(mix64(7 ^ fnv1a64("x")) + 3));
  // The standard library pins mt19937_64's 10000th output.
  std::mt19937_64 mt;
  mt.discard(9999);
  CHECK(mt() == 9981545732273789042ULL);
}

namespace {

// Independent re-derivation of the walk procedure.
std::vector<Walk> oracle_walks(const KnowledgeGraph& g, const WalkConfig& c) {
  std::set<std::string> starts;
  for (const std::string& s : c.start_nodes) {
    for (const std::string& id : lt::oracle_resolve(g, s)) starts.insert(id);
  }
  std::vector<Walk> out;
  for (const std::string& start : starts) {
    for (int w = 0; w < c.walks_per_start; ++w) {
      std::uint64_t s = c.seed ^ fnv1a64(start);
      std::mt19937_64 rng(mix64(mix64(s) + static_cast<std::uint64_t>(w)));
      Walk walk{start};
      for (int step = 0; step < c.walk_length; ++step) {
        std::vector<std::string> next;
        for (const auto& [id, e] : g.edges()) {
          if (e.from == walk.back() && (c.edge_kinds.empty() || c.edge_kinds.count(e.kind))) {
            next.push_back(e.to);
          }
        }
        if (next.empty()) break;
        const std::uint64_t n = next.size();
        const std::uint64_t limit = (~0ULL / n) * n;
        std::uint64_t x = rng();
        while (x >= limit) x = rng();
        walk.push_back(next[x % n]);
      }
      out.push_back(walk);
    }
  }
  return out;
}

WalkConfig all_starts(const KnowledgeGraph& g, std::uint64_t seed) {
  WalkConfig c;
  c.seed = seed;
  c.walk_length = 6;
  c.walks_per_start = 2;
  for (const auto& [id, n] : g.nodes()) c.start_nodes.push_back(id);
  return c;
}

}  // namespace

TEST_CASE("walks follow edges and match the reference procedure") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const KnowledgeGraph g = lt::random_graph(rng, lt::GraphShape{2, 20, 80, 3.0, false, 16});
    WalkConfig c = all_starts(g, rng());
    if (trial % 3 == 0) c.edge_kinds = {EdgeKind::subject_of, EdgeKind::is_a, EdgeKind::invokes};
    const auto walks = random_walks(g, c);
    CHECK(walks == oracle_walks(g, c));
    CHECK(walks == random_walks(g, c));
    for (const Walk& w : walks) {
      CHECK(static_cast<int>(w.size()) <= c.walk_length + 1);
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        bool edge = false;
        for (const std::string& id : g.out_edges(w[i])) {
          const Edge& e = *g.find_edge(id);
          edge |= e.to == w[i + 1] && (c.edge_kinds.empty() || c.edge_kinds.count(e.kind));
        }
        CHECK(edge);
      }
    }
  }
}

TEST_CASE("different seeds give different walks") {
  const KnowledgeGraph g = lt::build_graph(lt::load_corpus());
  WalkConfig c = all_starts(g, 1);
  const std::string first = write_walks(random_walks(g, c));
  int differing = 0;
  for (std::uint64_t seed = 2; seed < 12; ++seed) {
    c.seed = seed;
    differing += write_walks(random_walks(g, c)) != first;
  }
  CHECK(differing == 10);
}

TEST_CASE("forced cycle and sink") {
  KnowledgeGraph g;
  const std::string a = g.upsert_node("a", NodeKind::entity);
  const std::string b = g.upsert_node("b", NodeKind::entity);
  const std::string c = g.upsert_node("c", NodeKind::entity);
  const std::string sink = g.upsert_node("sink", NodeKind::entity);
  auto link = [&](const std::string& from, const std::string& to) {
    Edge e;
    e.kind = EdgeKind::coordinate;
    e.from = from;
    e.to = to;
    e.id = make_edge_id(e.kind, from, to, "");
    g.insert_edge(e);
  };
  link(a, b);
  link(b, c);
  link(c, a);
  WalkConfig config;
  config.walk_length = 4;
  config.start_nodes = {"a", "sink"};
  const auto walks = random_walks(g, config);
  REQUIRE(walks.size() == 2);
  CHECK(walks[0] == Walk{a, b, c, a, b});
  CHECK(walks[1] == Walk{sink});
  CHECK(write_walks(walks) == a + "\t" + b + "\t" + c + "\t" + a + "\t" + b + "\n" + sink + "\n");

  config.start_nodes = {"nowhere"};
  CHECK(error_of([&] { random_walks(g, config); }) == ErrorKind::unknown_selector);
  config.start_nodes = {"a"};
  config.walk_length = 0;
  CHECK(error_of([&] { random_walks(g, config); }) == ErrorKind::precondition_violation);
}

TEST_CASE("co-occurrence counts match a recount") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const KnowledgeGraph g = lt::random_graph(rng, lt::GraphShape{2, 15, 60, 3.0, false, 16});
    const auto walks = random_walks(g, all_starts(g, rng()));
    const auto stats = cooccurrence_stats(walks);
    std::map<std::pair<std::string, std::string>, long> recount;
    for (const Walk& w : walks) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = 0; j < w.size(); ++j) {
          if (i < j && w[i] < w[j]) ++recount[{w[i], w[j]}];
          if (i < j && w[j] < w[i]) ++recount[{w[j], w[i]}];
        }
      }
    }
    CHECK(stats == recount);
  }
  CHECK(cooccurrence_stats({{"x", "x", "y"}}) ==
        std::map<std::pair<std::string, std::string>, long>{{{"x", "y"}, 2}});
}
