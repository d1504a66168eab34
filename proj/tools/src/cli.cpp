#include "lexgraph_cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lexgraph/analytics.hpp"
#include "lexgraph/error.hpp"
#include "lexgraph/kgraph.hpp"
#include "lexgraph/pipeline.hpp"
#include "lexgraph/query.hpp"

namespace lexgraph::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Write to a sibling temporary, then rename over the target.
void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + temp.string());
    out << content;
    out.close();
    if (!out) {
      fs::remove(temp);
      throw Error(ErrorKind::io, "write failed for " + temp.string());
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp);
    throw Error(ErrorKind::io, "cannot replace " + path + ": " + ec.message());
  }
}

KnowledgeGraph load_graph(const std::string& path) { return deserialize(read_file(path)); }

void print_paths(std::ostream& out, const KnowledgeGraph& graph,
                 const std::vector<RankedPath>& paths, bool debug, int limit) {
  int printed = 0;
  for (const RankedPath& p : paths) {
    if (limit > 0 && printed++ >= limit) break;
    out << (debug ? render_phrase(graph, p, true) : p.rendered_phrase)
        << "\tauthority=" << p.min_authority << "\tlength=" << p.length << '\n';
  }
}

std::set<EdgeKind> edge_kinds(const std::string& list) {
  std::set<EdgeKind> kinds;
  if (list.empty()) return kinds;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) {
    auto kind = parse_edge_kind(item);
    if (!kind) throw Error(ErrorKind::malformed_query, "unknown edge kind '" + item + "'");
    kinds.insert(*kind);
  }
  return kinds;
}

std::string format_ratio(double r) {
  std::ostringstream s;
  s << r;
  return s.str();
}

struct Options {
  std::string config;

  std::vector<std::string> inputs;
  std::string output;
  std::string embeddings;
  bool triplets = false;

  std::string graph;
  std::vector<std::string> expression;
  bool debug = false;
  int limit = 0;

  bool cypher = false;
  bool jsonl = false;

  std::uint64_t seed = 0;
  int length = 8;
  int walks = 1;
  std::vector<std::string> starts;
  std::string edges;
  bool stats = false;

  std::string class_node;
};

class Runner {
 public:
  Runner(const Options& o, std::istream& in, std::ostream& out, std::ostream& err,
         const std::map<std::string, std::string>& env)
      : o_(o), in_(in), out_(out), err_(err), env_(env) {}

  PipelineConfig config() const {
    std::string path = o_.config;
    if (path.empty()) {
      auto it = env_.find("LEXGRAPH_CONFIG");
      if (it != env_.end()) path = it->second;
    }
    return path.empty() ? PipelineConfig{} : load_config_file(path);
  }

  int ingest() {
    PipelineConfig cfg = config();
    if (!o_.embeddings.empty()) cfg.embeddings_path = o_.embeddings;
    std::optional<EmbeddingTable> table;
    if (cfg.embeddings_path) table = EmbeddingTable::load_file(*cfg.embeddings_path);

    std::vector<Document> documents;
    for (const std::string& path : o_.inputs) {
      for (Document& d : parse_conllu(read_file(path), &cfg.authority)) {
        documents.push_back(std::move(d));
      }
    }
    KnowledgeGraph graph(cfg.authority, cfg.promotion_threshold);
    const IngestStats stats =
        compile_documents(graph, documents, cfg, table ? &*table : nullptr);
    write_file_atomic(o_.output, serialize(graph));
    if (o_.triplets) {
      for (const Document& d : documents) {
        out_ << write_triplets(extract_document(d, cfg, table ? &*table : nullptr).triplets);
      }
    }
    out_ << "documents\t" << stats.documents << "\nsentences\t" << stats.sentences
         << "\nsvos\t" << stats.svos << "\ncopulas\t" << stats.copulas << "\nnodes\t"
         << stats.nodes << "\nedges\t" << stats.edges << '\n';
    return kExitOk;
  }

  int query() {
    std::string text;
    for (const std::string& part : o_.expression) text += (text.empty() ? "" : " ") + part;
    const Query q = parse_query_expression(text);
    const KnowledgeGraph graph = load_graph(o_.graph);
    print_paths(out_, graph, find_paths(graph, q), o_.debug, o_.limit);
    return kExitOk;
  }

  int repl() {
    const KnowledgeGraph graph = load_graph(o_.graph);
    std::string line;
    while (std::getline(in_, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) break;
      try {
        print_paths(out_, graph, find_paths(graph, parse_query_expression(line)), o_.debug,
                    o_.limit);
      } catch (const Error& e) {
        err_ << "error: " << e.what() << '\n';
      }
      out_ << '\n';
    }
    return kExitOk;
  }

  int export_graph() {
    if (o_.cypher == o_.jsonl) {
      err_ << "export: choose exactly one of --cypher or --jsonl\n";
      return kExitUsage;
    }
    const KnowledgeGraph graph = load_graph(o_.graph);
    out_ << (o_.cypher ? export_cypher(graph) : export_jsonl(graph));
    return kExitOk;
  }

  int walk() {
    const KnowledgeGraph graph = load_graph(o_.graph);
    WalkConfig wc;
    wc.seed = o_.seed;
    wc.walk_length = o_.length;
    wc.walks_per_start = o_.walks;
    wc.start_nodes = o_.starts;
    if (wc.start_nodes.empty()) {
      for (const auto& [id, node] : graph.nodes()) wc.start_nodes.push_back(id);
    }
    wc.edge_kinds = edge_kinds(o_.edges);
    const std::vector<Walk> walks = random_walks(graph, wc);
    if (o_.stats) {
      for (const auto& [pair, count] : cooccurrence_stats(walks)) {
        out_ << pair.first << '\t' << pair.second << '\t' << count << '\n';
      }
    } else {
      out_ << write_walks(walks);
    }
    return kExitOk;
  }

  int promote() {
    KnowledgeGraph graph = load_graph(o_.graph);
    std::string node = o_.class_node;
    if (node.front() != '(') node = resolve_selector(graph, node).front();
    for (const CharacteristicAssertion& a : promote_characteristics(graph, node)) {
      out_ << a.subject << '\t' << a.characteristic << "\tratio=" << format_ratio(*a.occurrence_ratio)
           << (a.negated ? "\tnegated" : "") << "\tpromoted\n";
    }
    if (!o_.output.empty()) write_file_atomic(o_.output, serialize(graph));
    return kExitOk;
  }

  int contradictions() {
    KnowledgeGraph graph = load_graph(o_.graph);
    for (const Edge& e : detect_contradictions(graph)) {
      const SvoRecord* a = graph.find_svo(e.svo_id);
      const SvoRecord* b = graph.find_svo(e.attributes.at("counter_svo"));
      out_ << a->id << '\t' << a->authority << '\t' << opinion_kind_name(a->opinion) << '\t'
           << b->id << '\t' << b->authority << '\t' << opinion_kind_name(b->opinion) << '\n';
    }
    if (!o_.output.empty()) write_file_atomic(o_.output, serialize(graph));
    return kExitOk;
  }

 private:
  const Options& o_;
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  const std::map<std::string, std::string>& env_;
};

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err, const std::map<std::string, std::string>& env) {
  Options o;
  CLI::App app{"Compile dependency-parsed legal text into a queryable knowledge graph",
               "lexgraph"};
  app.require_subcommand(1);
  app.add_option("--config", o.config, "Config file (default: $LEXGRAPH_CONFIG)");

  auto* ingest = app.add_subcommand("ingest", "Build a graph file from CoNLL-U inputs");
  ingest->add_option("inputs", o.inputs, "CoNLL-U files")->required();
  ingest->add_option("-o,--output", o.output, "Graph file to write")->required();
  ingest->add_option("--embeddings", o.embeddings, "Embedding table for attachment checks");
  ingest->add_flag("--triplets", o.triplets, "Also print extracted triplets");

  auto* query = app.add_subcommand("query", "Answer one path query");
  query->add_option("graph", o.graph, "Graph file")->required();
  query->add_option("expression", o.expression, "from=<sel> to=<sel> ...")->required();
  query->add_flag("--debug", o.debug, "Append node ids to phrases");
  query->add_option("--limit", o.limit, "Print at most N paths");

  auto* repl = app.add_subcommand("repl", "Read queries from stdin; an empty line exits");
  repl->add_option("graph", o.graph, "Graph file")->required();
  repl->add_flag("--debug", o.debug, "Append node ids to phrases");
  repl->add_option("--limit", o.limit, "Print at most N paths per query");

  auto* exp = app.add_subcommand("export", "Export as Cypher or JSON lines");
  exp->add_option("graph", o.graph, "Graph file")->required();
  exp->add_flag("--cypher", o.cypher);
  exp->add_flag("--jsonl", o.jsonl);

  auto* walk = app.add_subcommand("walk", "Seeded random walks");
  walk->add_option("graph", o.graph, "Graph file")->required();
  walk->add_option("--seed", o.seed, "Generator seed");
  walk->add_option("--length", o.length, "Steps per walk")->check(CLI::PositiveNumber);
  walk->add_option("--walks", o.walks, "Walks per start node")->check(CLI::PositiveNumber);
  walk->add_option("--start", o.starts, "Start selector (repeatable; default: every node)");
  walk->add_option("--edges", o.edges, "Comma-separated edge kinds to follow");
  walk->add_flag("--stats", o.stats, "Print co-occurrence counts instead of walks");

  auto* promote = app.add_subcommand("promote", "Promote shared characteristics to a class");
  promote->add_option("graph", o.graph, "Graph file")->required();
  promote->add_option("class", o.class_node, "Class selector")->required();
  promote->add_option("-o,--output", o.output, "Write the updated graph here");

  auto* contra = app.add_subcommand("contradictions", "Detect affirmative/negated pairs");
  contra->add_option("graph", o.graph, "Graph file")->required();
  contra->add_option("-o,--output", o.output, "Write the updated graph here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Runner runner(o, in, out, err, env);
  try {
    if (*ingest) return runner.ingest();
    if (*query) return runner.query();
    if (*repl) return runner.repl();
    if (*exp) return runner.export_graph();
    if (*walk) return runner.walk();
    if (*promote) return runner.promote();
    if (*contra) return runner.contradictions();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::malformed_query ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace lexgraph::cli
