#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "lexgraph/analytics.hpp"
#include "lexgraph/conllu.hpp"
#include "lexgraph/kgraph.hpp"
#include "lexgraph/pipeline.hpp"
#include "lexgraph/query.hpp"

namespace {

using namespace lexgraph;

std::vector<Document> corpus() {
  static const std::vector<Document> docs = [] {
    std::vector<Document> out;
    for (const char* name : {"bailey_majority", "muscarello_dissent", "muscarello_majority",
                             "smith_dissent", "smith_majority"}) {
      std::ifstream in(std::string(LEXGRAPH_FIXTURE_DIR) + "/corpus/" + name + ".conllu");
      std::ostringstream text;
      text << in.rdbuf();
      for (Document& d : parse_conllu(text.str())) out.push_back(std::move(d));
    }
    return out;
  }();
  return docs;
}

// Random multigraph: n nodes, 4n sourced edges.
KnowledgeGraph synthetic(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  KnowledgeGraph g;
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) {
    ids.push_back(g.upsert_node("n" + std::to_string(i), i % 2 ? NodeKind::method : NodeKind::entity));
  }
  SvoRecord r;
  r.id = "d:0";
  r.authority = 9;
  g.insert_svo(r);
  for (int i = 0; i < 4 * n; ++i) {
    Edge e;
    e.kind = i % 3 ? EdgeKind::subject_of : EdgeKind::invokes;
    e.from = ids[rng() % n];
    e.to = ids[rng() % n];
    e.svo_id = "d:0";
    e.authority = 1 + static_cast<int>(rng() % 9);
    e.id = make_edge_id(e.kind, e.from, e.to, e.svo_id, std::to_string(i));
    g.insert_edge(e);
  }
  return g;
}

void BM_ParseConllu(benchmark::State& state) {
  const std::string text = write_conllu(corpus());
  for (auto _ : state) benchmark::DoNotOptimize(parse_conllu(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseConllu);

void BM_ExtractCorpus(benchmark::State& state) {
  const auto docs = corpus();
  const PipelineConfig config;
  for (auto _ : state) {
    for (const Document& d : docs) benchmark::DoNotOptimize(extract_document(d, config));
  }
}
BENCHMARK(BM_ExtractCorpus);

void BM_CompileCorpus(benchmark::State& state) {
  const auto docs = corpus();
  const PipelineConfig config;
  for (auto _ : state) {
    KnowledgeGraph g;
    compile_documents(g, docs, config);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_CompileCorpus);

void BM_SerializeRoundTrip(benchmark::State& state) {
  const KnowledgeGraph g = synthetic(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(deserialize(serialize(g)));
}
BENCHMARK(BM_SerializeRoundTrip)->Arg(100)->Arg(1000);

void BM_FindPaths(benchmark::State& state) {
  const KnowledgeGraph g = synthetic(static_cast<int>(state.range(0)), 2);
  Query q;
  q.from = "n0";
  q.to = "n1";
  q.max_length = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(find_paths(g, q));
}
BENCHMARK(BM_FindPaths)->Args({50, 4})->Args({200, 4})->Args({200, 5});

void BM_RandomWalks(benchmark::State& state) {
  const KnowledgeGraph g = synthetic(static_cast<int>(state.range(0)), 3);
  WalkConfig c;
  c.seed = 7;
  c.walk_length = 16;
  c.walks_per_start = 4;
  for (const auto& [id, n] : g.nodes()) c.start_nodes.push_back(id);
  for (auto _ : state) benchmark::DoNotOptimize(random_walks(g, c));
}
BENCHMARK(BM_RandomWalks)->Arg(100)->Arg(1000);

void BM_DetectContradictions(benchmark::State& state) {
  std::mt19937_64 rng(4);
  KnowledgeGraph base;
  for (int i = 0; i < 8; ++i) {
    base.upsert_node("s" + std::to_string(i), NodeKind::entity);
    base.upsert_node("v" + std::to_string(i), NodeKind::method);
  }
  for (int i = 0; i < state.range(0); ++i) {
    SvoRecord r;
    r.id = "d:" + std::to_string(i);
    r.subject = make_node_id("s" + std::to_string(rng() % 8), NodeKind::entity);
    r.verb = make_node_id("v" + std::to_string(rng() % 8), NodeKind::method);
    r.negated = rng() % 4 == 0;
    r.authority = 9;
    base.insert_svo(r);
  }
  for (auto _ : state) {
    KnowledgeGraph g = base;
    benchmark::DoNotOptimize(detect_contradictions(g));
  }
}
BENCHMARK(BM_DetectContradictions)->Arg(1000);

void BM_Cosine(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (double& x : a) x = d(rng);
  for (double& x : b) x = d(rng);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_similarity(a, b));
}
BENCHMARK(BM_Cosine)->Arg(50)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
