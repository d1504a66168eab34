#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "lexgraph_cli/cli.hpp"
#include "support/support.hpp"

using namespace lexgraph;
namespace lt = lexgraph::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = "",
           const std::map<std::string, std::string>& env = {}) {
  args.insert(args.begin(), "lexgraph");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err, env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("lexgraph_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string fixture(const std::string& name) { return lt::fixture_path(name); }

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_CASE("ingest prints stats and writes a loadable graph") {
  TempDir dir;
  const Result r = run({"ingest", fixture("bailey.conllu"), "-o", dir / "g.lg"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "documents\t1\nsentences\t1\nsvos\t3\ncopulas\t0\nnodes\t6\nedges\t8\n");
  CHECK(fs::exists(dir / "g.lg"));
  CHECK_FALSE(fs::exists(dir / "g.lg.tmp"));
  const KnowledgeGraph g = deserialize(lt::read_text(dir / "g.lg"));
  CHECK(g.nodes().size() == 6);
}

TEST_CASE("ingest --triplets emits the debug lines first") {
  TempDir dir;
  const Result r = run({"ingest", fixture("carries.conllu"), "-o", dir / "g.lg", "--triplets"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("muscarello_cond:s1:3\tone\tcarry\tfirearm\ttense=present,enumeration=a\n"
                    "muscarello_cond:s1:12\the_or_she\tpossess\tit\ttense=present\n",
                    0) == 0);
}

TEST_CASE("query answers use is active employment") {
  TempDir dir;
  REQUIRE(run({"ingest", fixture("bailey.conllu"), fixture("copula.conllu"), "-o", dir / "g.lg"})
              .code == 0);
  const Result r = run({"query", dir / "g.lg", "from=use", "to=employment"});
  CHECK(r.code == 0);
  CHECK(first_line(r.out) == "use is active employment\tauthority=9\tlength=1");

  const Result none = run({"query", dir / "g.lg", "from=gun to=employment max=1"});
  CHECK(none.code == 0);
  CHECK(none.out.empty());

  const Result bad = run({"query", dir / "g.lg", "from=gun"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK_FALSE(bad.err.empty());

  const Result unknown = run({"query", dir / "g.lg", "from=zzz to=gun"});
  CHECK(unknown.code == cli::kExitData);

  const Result debug = run({"query", dir / "g.lg", "from=use to=employment", "--debug", "--limit", "1"});
  CHECK(debug.out ==
        "use[(use,entity)] is active employment[(employment,entity)]"
        "\tauthority=9\tlength=1\n");
}

TEST_CASE("repl keeps going after errors and stops at an empty line") {
  TempDir dir;
  REQUIRE(run({"ingest", fixture("copula.conllu"), "-o", dir / "g.lg"}).code == 0);
  const Result r = run({"repl", dir / "g.lg"},
                       "from=use to=employment\nfrom=nothing to=use\nfrom=use\n\nfrom=use to=use\n");
  CHECK(r.code == 0);
  CHECK(r.out == "use is active employment\tauthority=9\tlength=1\n\n\n\n");
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 2);
}

TEST_CASE("export") {
  TempDir dir;
  REQUIRE(run({"ingest", fixture("bailey.conllu"), "-o", dir / "g.lg"}).code == 0);
  const Result cypher = run({"export", dir / "g.lg", "--cypher"});
  CHECK(cypher.code == 0);
  CHECK(std::count(cypher.out.begin(), cypher.out.end(), '\n') == 6 + 8);
  const Result jsonl = run({"export", dir / "g.lg", "--jsonl"});
  CHECK(jsonl.code == 0);
  CHECK(jsonl.out.rfind("{\"type\":\"node\"", 0) == 0);
  CHECK(run({"export", dir / "g.lg"}).code == cli::kExitUsage);
  CHECK(run({"export", dir / "g.lg", "--cypher", "--jsonl"}).code == cli::kExitUsage);

  std::ofstream(dir / "empty.lg") << serialize(KnowledgeGraph{});
  const Result empty = run({"export", dir / "empty.lg", "--cypher"});
  CHECK(empty.code == 0);
  CHECK(empty.out.empty());
}

TEST_CASE("walk output is reproducible") {
  TempDir dir;
  std::vector<std::string> args = {"ingest", "-o", dir / "g.lg"};
  for (const std::string& f : lt::corpus_files()) args.push_back(fixture(f));
  REQUIRE(run(args).code == 0);
  const Result a = run({"walk", dir / "g.lg", "--seed", "7", "--length", "5", "--walks", "2"});
  const Result b = run({"walk", dir / "g.lg", "--seed", "7", "--length", "5", "--walks", "2"});
  CHECK(a.code == 0);
  CHECK_FALSE(a.out.empty());
  CHECK(a.out == b.out);
  CHECK(run({"walk", dir / "g.lg", "--seed", "8", "--length", "5", "--walks", "2"}).out != a.out);

  const Result start = run({"walk", dir / "g.lg", "--seed", "7", "--start", "use", "--edges",
                            "SUBJECT_OF,OBJECT_OF,INVOKES"});
  CHECK(start.code == 0);
  CHECK(start.out.rfind("(use,", 0) == 0);
  CHECK(run({"walk", dir / "g.lg", "--edges", "NOPE"}).code == cli::kExitUsage);
  CHECK(run({"walk", dir / "g.lg", "--length", "0"}).code == cli::kExitUsage);

  const Result stats = run({"walk", dir / "g.lg", "--seed", "7", "--stats"});
  CHECK(stats.code == 0);
  CHECK(stats.out.find('\t') != std::string::npos);
}

TEST_CASE("promote prints the promotion and optionally saves it") {
  TempDir dir;
  KnowledgeGraph g;
  g.upsert_node("portable", NodeKind::modifier);
  const char* children[] = {"gun", "rifle", "pistol", "derringer"};
  for (int i = 0; i < 4; ++i) {
    assert_is_a(g, children[i], "firearm");
    if (i < 3) {
      assert_characteristic(g, make_node_id(children[i], NodeKind::class_),
                            make_node_id("portable", NodeKind::modifier));
    }
  }
  std::ofstream(dir / "f.lg") << serialize(g);
  const Result r = run({"promote", dir / "f.lg", "firearm", "-o", dir / "p.lg"});
  CHECK(r.code == 0);
  CHECK(r.out == "(firearm,class)\t(portable,modifier)\tratio=0.75\tpromoted\n");
  const KnowledgeGraph promoted = deserialize(lt::read_text(dir / "p.lg"));
  CHECK(promoted.assertions().size() == 4);
  CHECK(run({"promote", dir / "f.lg", "gun"}).code == cli::kExitData);
}

TEST_CASE("contradictions on the corpus") {
  TempDir dir;
  std::vector<std::string> args = {"ingest", "-o", dir / "g.lg"};
  for (const std::string& f : lt::corpus_files()) args.push_back(fixture(f));
  REQUIRE(run(args).code == 0);
  const Result r = run({"contradictions", dir / "g.lg", "-o", dir / "c.lg"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    CHECK(line.find("\t9\tmajority\t") != std::string::npos);
    CHECK(line.find("\t3\tdissenting") != std::string::npos);
  }
  CHECK(count == 2);
  const KnowledgeGraph c = deserialize(lt::read_text(dir / "c.lg"));
  const KnowledgeGraph before = deserialize(lt::read_text(dir / "g.lg"));
  CHECK(c.edges().size() == before.edges().size() + 2);
}

TEST_CASE("config via flag or environment") {
  TempDir dir;
  std::ofstream(dir / "strict.conf") << "source.supreme_court = 5\n";
  const std::string conf = dir / "strict.conf";
  REQUIRE(run({"--config", conf, "ingest", fixture("copula.conllu"), "-o", dir / "a.lg"}).code == 0);
  CHECK(first_line(run({"query", dir / "a.lg", "from=use to=employment"}).out) ==
        "use is active employment\tauthority=15\tlength=1");
  REQUIRE(run({"ingest", fixture("copula.conllu"), "-o", dir / "b.lg"}, "",
              {{"LEXGRAPH_CONFIG", conf}})
              .code == 0);
  CHECK(lt::read_text(dir / "a.lg") == lt::read_text(dir / "b.lg"));

  std::ofstream(dir / "bad.conf") << "whatever\n";
  CHECK(run({"--config", dir / "bad.conf", "ingest", fixture("copula.conllu"), "-o", dir / "c.lg"})
            .code == cli::kExitData);

  std::ofstream(dir / "narrow.conf") << "source.appellate = 2\n";
  // Source levels in the config are additive; supreme_court stays known.
  CHECK(run({"--config", dir / "narrow.conf", "ingest", fixture("copula.conllu"), "-o",
             dir / "d.lg"})
            .code == 0);
}

TEST_CASE("exit codes for usage and data errors") {
  TempDir dir;
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"ingest"}).code == cli::kExitUsage);
  CHECK(run({"query", dir / "missing.lg", "from=a to=b"}).code == cli::kExitData);
  std::ofstream(dir / "broken.conllu") << "1\tgo\tgo\tVERB\n";
  CHECK(run({"ingest", dir / "broken.conllu", "-o", dir / "x.lg"}).code == cli::kExitData);
  CHECK_FALSE(fs::exists(dir / "x.lg"));
  std::ofstream(dir / "junk.lg") << "junk\n";
  CHECK(run({"export", dir / "junk.lg", "--jsonl"}).code == cli::kExitData);
  CHECK(run({"--help"}).code == cli::kExitOk);
}
