#include "lexgraph/conllu.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>

#include "lexgraph/error.hpp"
#include "text_util.hpp"

namespace lexgraph {

using detail::parse_int;
using detail::split;
using detail::to_lower;
using detail::trim;

std::string Token::feat(std::string_view key) const {
  auto it = feats.find(std::string(key));
  return it == feats.end() ? std::string() : it->second;
}

std::vector<int> Sentence::children(int head) const {
  std::vector<int> out;
  for (const Token& t : tokens) {
    if (t.head == head) out.push_back(t.index);
  }
  return out;
}

bool Sentence::dominates(int ancestor, int node) const {
  int current = node;
  for (int steps = 0; steps <= size() && current > 0; ++steps) {
    if (current == ancestor) return true;
    current = token(current).head;
  }
  return ancestor == 0;
}

int Sentence::root() const {
  for (const Token& t : tokens) {
    if (t.head == 0) return t.index;
  }
  return 0;
}

std::string_view tree_violation_name(TreeViolation violation) {
  switch (violation) {
    case TreeViolation::empty_sentence: return "EmptySentence";
    case TreeViolation::bad_index: return "BadIndex";
    case TreeViolation::empty_lemma: return "EmptyLemma";
    case TreeViolation::head_out_of_range: return "HeadOutOfRange";
    case TreeViolation::self_loop: return "SelfLoop";
    case TreeViolation::cycle_detected: return "CycleDetected";
    case TreeViolation::multiple_roots: return "MultipleRoots";
    case TreeViolation::no_root: return "NoRoot";
  }
  return "Unknown";
}

bool ValidationReport::has(TreeViolation violation) const {
  return std::any_of(failures.begin(), failures.end(),
                     [&](const Entry& e) { return e.violation == violation; });
}

ValidationReport validate_tree(const Sentence& sentence) {
  ValidationReport report;
  const int n = sentence.size();
  if (n == 0) {
    report.failures.push_back({TreeViolation::empty_sentence, 0});
    return report;
  }
  bool heads_in_range = true;
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = sentence.tokens[i];
    if (t.index != i + 1) report.failures.push_back({TreeViolation::bad_index, i + 1});
    if (t.lemma.empty()) report.failures.push_back({TreeViolation::empty_lemma, i + 1});
    if (t.head < 0 || t.head > n) {
      report.failures.push_back({TreeViolation::head_out_of_range, i + 1});
      heads_in_range = false;
    } else if (t.head == i + 1) {
      report.failures.push_back({TreeViolation::self_loop, i + 1});
    }
    if (t.head == 0) ++roots;
  }
  if (roots == 0) report.failures.push_back({TreeViolation::no_root, 0});
  if (roots > 1) report.failures.push_back({TreeViolation::multiple_roots, 0});
  if (!heads_in_range) return report;

  // 0 = unvisited, 1 = on the current head chain, 2 = known to reach a root.
  std::vector<int> state(n + 1, 0);
  for (int start = 1; start <= n; ++start) {
    std::vector<int> chain;
    int current = start;
    while (current != 0 && state[current] == 0) {
      state[current] = 1;
      chain.push_back(current);
      current = sentence.tokens[current - 1].head;
    }
    if (current != 0 && state[current] == 1) {
      // Cycle through `current`; self-loops are already reported.
      if (sentence.tokens[current - 1].head != current) {
        int smallest = current;
        int walk = sentence.tokens[current - 1].head;
        while (walk != current) {
          smallest = std::min(smallest, walk);
          walk = sentence.tokens[walk - 1].head;
        }
        report.failures.push_back({TreeViolation::cycle_detected, smallest});
      }
    }
    for (int node : chain) state[node] = 2;
  }
  return report;
}

namespace {

[[noreturn]] void fail_line(ErrorKind kind, int line_number, const std::string& message) {
  throw Error(kind, "line " + std::to_string(line_number) + ": " + message);
}

class ConlluReader {
 public:
  explicit ConlluReader(const AuthorityConfig* authority) : authority_(authority) {}

  void consume(std::string_view raw, int line_number) {
    line_number_ = line_number;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      flush_sentence();
      return;
    }
    if (line.front() == '#') {
      comment(trim(line.substr(1)));
      return;
    }
    token_line(line);
  }

  std::vector<Document> finish() {
    flush_sentence();
    if (authority_ != nullptr) {
      for (const Document& doc : documents_) {
        if (!authority_->has_source(doc.provenance.source_level)) {
          throw Error(ErrorKind::unknown_source_level,
                      doc.provenance.source_level + " (document " +
                          doc.provenance.document_id + ")");
        }
      }
    }
    return std::move(documents_);
  }

 private:
  Document& current_document() {
    if (documents_.empty()) {
      documents_.emplace_back();
      documents_.back().provenance.document_id = "doc";
    }
    return documents_.back();
  }

  void comment(std::string_view body) {
    const auto eq = body.find('=');
    std::string_view key = trim(body.substr(0, eq));
    std::string_view value = eq == std::string_view::npos ? std::string_view{}
                                                          : trim(body.substr(eq + 1));
    if (key == "newdoc id" || key == "newdoc") {
      flush_sentence();
      documents_.emplace_back();
      documents_.back().provenance.document_id =
          value.empty() ? "doc" + std::to_string(documents_.size()) : std::string(value);
      seen_ids_.clear();
    } else if (key == "sent_id") {
      require_no_tokens("sent_id");
      sentence_id_ = std::string(value);
    } else if (key == "text") {
      require_no_tokens("text");
      text_ = std::string(value);
    } else if (key == "meta::source_level") {
      current_document().provenance.source_level = std::string(value);
    } else if (key == "meta::opinion_kind") {
      auto kind = parse_opinion_kind(value);
      if (!kind) {
        fail_line(ErrorKind::malformed_line, line_number_,
                  "unknown opinion kind '" + std::string(value) + "'");
      }
      current_document().provenance.opinion_kind = *kind;
    } else if (key == "meta::citation") {
      current_document().provenance.citation = std::string(value);
    } else if (key == "meta::date") {
      current_document().provenance.date = std::string(value);
    }
    // Any other comment is ignored.
  }

  void require_no_tokens(std::string_view what) {
    if (!tokens_.empty()) {
      fail_line(ErrorKind::malformed_line, line_number_,
                std::string(what) + " comment inside a sentence");
    }
  }

  void token_line(std::string_view line) {
    auto columns = split(line, '\t');
    if (columns.size() < 8 || columns.size() > 10) {
      fail_line(ErrorKind::malformed_line, line_number_,
                "expected 8-10 tab-separated columns, got " + std::to_string(columns.size()));
    }
    const std::string_view id = columns[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      return;  // multiword token range or empty node
    }
    Token token;
    auto index = parse_int<int>(id);
    if (!index) fail_line(ErrorKind::malformed_line, line_number_, "non-numeric id");
    token.index = *index;
    token.form = std::string(columns[1]);
    token.lemma = to_lower(columns[2]);
    if (token.lemma == "_" && token.form != "_") token.lemma = to_lower(token.form);
    token.upos = std::string(columns[3]);
    if (columns[5] != "_" && !columns[5].empty()) {
      for (std::string_view feat : split(columns[5], '|')) {
        const auto eq = feat.find('=');
        if (eq == std::string_view::npos || eq == 0) {
          fail_line(ErrorKind::malformed_line, line_number_,
                    "bad feature '" + std::string(feat) + "'");
        }
        token.feats[std::string(feat.substr(0, eq))] = std::string(feat.substr(eq + 1));
      }
    }
    auto head = parse_int<int>(columns[6]);
    if (!head) fail_line(ErrorKind::malformed_line, line_number_, "non-numeric head");
    token.head = *head;
    token.deprel = std::string(columns[7]);
    tokens_.push_back(std::move(token));
    if (sentence_start_ == 0) sentence_start_ = line_number_;
  }

  void flush_sentence() {
    if (tokens_.empty()) {
      sentence_id_.clear();
      text_.clear();
      return;
    }
    Document& doc = current_document();
    Sentence sentence;
    sentence.sentence_id =
        sentence_id_.empty() ? std::to_string(doc.sentences.size() + 1) : sentence_id_;
    sentence.text = text_;
    sentence.tokens = std::move(tokens_);
    tokens_.clear();
    sentence_id_.clear();
    text_.clear();
    const int start = sentence_start_;
    sentence_start_ = 0;

    const ValidationReport report = validate_tree(sentence);
    if (!report.ok()) {
      ErrorKind kind = ErrorKind::malformed_line;
      if (report.has(TreeViolation::multiple_roots)) kind = ErrorKind::multiple_roots;
      if (report.has(TreeViolation::self_loop) || report.has(TreeViolation::cycle_detected) ||
          report.has(TreeViolation::no_root)) {
        kind = ErrorKind::cycle_detected;
      }
      if (report.has(TreeViolation::bad_index) || report.has(TreeViolation::empty_lemma) ||
          report.has(TreeViolation::head_out_of_range)) {
        kind = ErrorKind::malformed_line;
      }
      std::string detail = "sentence " + sentence.sentence_id + ":";
      for (const auto& f : report.failures) {
        detail += " " + std::string(tree_violation_name(f.violation));
        if (f.token > 0) detail += "@" + std::to_string(f.token);
      }
      fail_line(kind, start, detail);
    }
    if (!seen_ids_.insert(sentence.sentence_id).second) {
      fail_line(ErrorKind::malformed_line, start,
                "duplicate sent_id " + sentence.sentence_id);
    }
    doc.sentences.push_back(std::move(sentence));
  }

  const AuthorityConfig* authority_;
  std::vector<Document> documents_;
  std::vector<Token> tokens_;
  std::set<std::string> seen_ids_;
  std::string sentence_id_;
  std::string text_;
  int line_number_ = 0;
  int sentence_start_ = 0;
};

}  // namespace

std::vector<Document> parse_conllu(std::istream& input, const AuthorityConfig* authority) {
  ConlluReader reader(authority);
  std::string line;
  int line_number = 0;
  while (std::getline(input, line)) reader.consume(line, ++line_number);
  return reader.finish();
}

std::vector<Document> parse_conllu(std::string_view text, const AuthorityConfig* authority) {
  std::istringstream stream{std::string(text)};
  return parse_conllu(stream, authority);
}

std::string write_conllu(const std::vector<Document>& documents) {
  std::ostringstream out;
  for (const Document& doc : documents) {
    const Provenance& p = doc.provenance;
    out << "# newdoc id = " << p.document_id << '\n';
    out << "# meta::source_level = " << p.source_level << '\n';
    out << "# meta::opinion_kind = " << opinion_kind_name(p.opinion_kind) << '\n';
    if (!p.citation.empty()) out << "# meta::citation = " << p.citation << '\n';
    if (!p.date.empty()) out << "# meta::date = " << p.date << '\n';
    for (const Sentence& sentence : doc.sentences) {
      out << "# sent_id = " << sentence.sentence_id << '\n';
      if (!sentence.text.empty()) out << "# text = " << sentence.text << '\n';
      for (const Token& t : sentence.tokens) {
        std::string feats;
        for (const auto& [key, value] : t.feats) {
          if (!feats.empty()) feats += '|';
          feats += key + "=" + value;
        }
        if (feats.empty()) feats = "_";
        out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t"
            << feats << '\t' << t.head << '\t' << t.deprel << "\t_\t_\n";
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace lexgraph
