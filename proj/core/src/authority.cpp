#include "lexgraph/authority.hpp"

#include "lexgraph/error.hpp"

namespace lexgraph {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_line: return "MalformedLine";
    case ErrorKind::cycle_detected: return "CycleDetected";
    case ErrorKind::multiple_roots: return "MultipleRoots";
    case ErrorKind::unknown_source_level: return "UnknownSourceLevel";
    case ErrorKind::cycle_would_form: return "CycleWouldForm";
    case ErrorKind::unknown_node: return "UnknownNode";
    case ErrorKind::malformed_record: return "MalformedRecord";
    case ErrorKind::dangling_reference: return "DanglingReference";
    case ErrorKind::unknown_selector: return "UnknownSelector";
    case ErrorKind::zero_vector: return "ZeroVector";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::precondition_violation: return "PreconditionViolation";
    case ErrorKind::malformed_query: return "MalformedQuery";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

std::string_view opinion_kind_name(OpinionKind kind) {
  switch (kind) {
    case OpinionKind::majority: return "majority";
    case OpinionKind::concurring: return "concurring";
    case OpinionKind::dissenting: return "dissenting";
  }
  return "majority";
}

std::optional<OpinionKind> parse_opinion_kind(std::string_view text) {
  if (text == "majority") return OpinionKind::majority;
  if (text == "concurring") return OpinionKind::concurring;
  if (text == "dissenting") return OpinionKind::dissenting;
  return std::nullopt;
}

AuthorityConfig AuthorityConfig::defaults() {
  AuthorityConfig config;
  config.source_weights = {{"supreme_court", 3}, {"appellate", 2}, {"unspecified", 1}};
  config.opinion_weights = {{OpinionKind::majority, 3},
                            {OpinionKind::concurring, 2},
                            {OpinionKind::dissenting, 1}};
  return config;
}

bool AuthorityConfig::has_source(std::string_view source_level) const {
  return source_weights.find(std::string(source_level)) != source_weights.end();
}

int AuthorityConfig::authority(std::string_view source_level, OpinionKind opinion) const {
  auto source = source_weights.find(std::string(source_level));
  if (source == source_weights.end()) {
    throw Error(ErrorKind::unknown_source_level, std::string(source_level));
  }
  auto weight = opinion_weights.find(opinion);
  if (weight == opinion_weights.end()) {
    throw Error(ErrorKind::precondition_violation,
                "no weight for opinion kind " + std::string(opinion_kind_name(opinion)));
  }
  return source->second * weight->second;
}

void AuthorityConfig::validate() const {
  if (source_weights.empty() || opinion_weights.empty()) {
    throw Error(ErrorKind::precondition_violation, "authority weight maps must be non-empty");
  }
  for (const auto& [name, weight] : source_weights) {
    if (weight < 1) {
      throw Error(ErrorKind::precondition_violation, "source weight < 1 for " + name);
    }
  }
  for (const auto& [kind, weight] : opinion_weights) {
    if (weight < 1) {
      throw Error(ErrorKind::precondition_violation,
                  "opinion weight < 1 for " + std::string(opinion_kind_name(kind)));
    }
  }
}

}  // namespace lexgraph
