#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace lexgraph {

enum class OpinionKind { majority, concurring, dissenting };

std::string_view opinion_kind_name(OpinionKind kind);
std::optional<OpinionKind> parse_opinion_kind(std::string_view text);

// Weights that rank legal sources. The authority of a statement is the
// product of its source weight and its opinion weight.
struct AuthorityConfig {
  std::map<std::string, int> source_weights;
  std::map<OpinionKind, int> opinion_weights;

  // supreme_court=3, appellate=2, unspecified=1; majority=3, concurring=2,
  // dissenting=1.
  static AuthorityConfig defaults();

  bool has_source(std::string_view source_level) const;

  // Throws Error(unknown_source_level) for a source level not in the table.
  int authority(std::string_view source_level, OpinionKind opinion) const;

  // Throws Error(precondition_violation) if a map is empty or a weight < 1.
  void validate() const;

  friend bool operator==(const AuthorityConfig&, const AuthorityConfig&) = default;
};

}  // namespace lexgraph
