#pragma once

// Dependency-parsed input: CoNLL-U reading, tree validation and writing.

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexgraph/authority.hpp"

namespace lexgraph {

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string lemma;  // lowercased at parse time
  std::string upos;
  std::map<std::string, std::string> feats;
  int head = 0;  // 0 = root
  std::string deprel;

  std::string feat(std::string_view key) const;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::string sentence_id;
  std::string text;
  std::vector<Token> tokens;

  // 1-based access; index must be in [1, size()].
  const Token& token(int index) const { return tokens.at(index - 1); }
  int size() const { return static_cast<int>(tokens.size()); }

  // Dependents of `head` in surface order; head 0 yields the root(s).
  std::vector<int> children(int head) const;
  // True if `node` lies in the subtree rooted at `ancestor` (inclusive).
  bool dominates(int ancestor, int node) const;
  int root() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Provenance {
  std::string document_id;
  std::string source_level = "unspecified";
  OpinionKind opinion_kind = OpinionKind::majority;
  std::string citation;
  // Optional absolute date (ISO 8601 prefix) stamped by `# meta::date`.
  std::string date;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Document {
  Provenance provenance;
  std::vector<Sentence> sentences;

  friend bool operator==(const Document&, const Document&) = default;
};

enum class TreeViolation {
  empty_sentence,
  bad_index,
  empty_lemma,
  head_out_of_range,
  self_loop,
  cycle_detected,
  multiple_roots,
  no_root,
};

std::string_view tree_violation_name(TreeViolation violation);

struct ValidationReport {
  struct Entry {
    TreeViolation violation;
    int token = 0;  // offending token index, 0 when not token-specific
  };
  std::vector<Entry> failures;

  bool ok() const { return failures.empty(); }
  bool has(TreeViolation violation) const;
};

ValidationReport validate_tree(const Sentence& sentence);

// Parses a CoNLL-U stream. Documents are delimited by `# newdoc id = X`;
// sentences before the first newdoc belong to a document with id "doc".
// With `authority` set, every document's source level must be known to it.
std::vector<Document> parse_conllu(std::istream& input,
                                   const AuthorityConfig* authority = nullptr);
std::vector<Document> parse_conllu(std::string_view text,
                                   const AuthorityConfig* authority = nullptr);

// Writes the consumed columns back out (xpos, deps and misc as `_`).
std::string write_conllu(const std::vector<Document>& documents);

}  // namespace lexgraph
