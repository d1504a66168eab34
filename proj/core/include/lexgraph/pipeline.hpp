#pragma once

// End-to-end compilation: parsed documents -> extracted statements -> graph.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lexgraph/analytics.hpp"
#include "lexgraph/authority.hpp"
#include "lexgraph/conllu.hpp"
#include "lexgraph/kgraph.hpp"
#include "lexgraph/svo.hpp"

namespace lexgraph {

struct PipelineConfig {
  AuthorityConfig authority = AuthorityConfig::defaults();
  double promotion_threshold = KnowledgeGraph::kDefaultPromotionThreshold;
  DeonticTable deontic = DeonticTable::defaults();
  std::optional<std::string> embeddings_path;
  double attachment_margin = kDefaultAttachmentMargin;
};

// Config files hold `key = value` lines; '#' starts a comment and order does
// not matter. Keys:
//   source.<level> = N            opinion.<majority|concurring|dissenting> = N
//   promotion_threshold = R       attachment_margin = R
//   deontic.<modal> = necessary|possible|weak_possible|none
//   embeddings = path             (relative to the config file)
// Listed weights replace the defaults for that key; other defaults stay.
// Throws malformed_line or precondition_violation.
PipelineConfig load_config(std::istream& input, const std::string& base_dir = {});
PipelineConfig load_config_file(const std::string& path);

struct DocumentExtraction {
  Provenance provenance;
  std::vector<SvoTriplet> triplets;
  std::vector<CopulaAssertion> copulas;
  // Prepositional phrases moved from a verb to its object by the embedding
  // attachment check: (svo_id, prepositional object).
  std::vector<std::pair<std::string, PrepObject>> noun_attached;
};

// Per-sentence extraction, then pronoun resolution across the document. With
// a table, each "with"/"of"-style prepositional object is scored against the
// verb and the direct object and moved to the object on noun attachment.
DocumentExtraction extract_document(const Document& document, const PipelineConfig& config,
                                    const EmbeddingTable* embeddings = nullptr);

struct IngestStats {
  int documents = 0;
  int sentences = 0;
  int svos = 0;
  int copulas = 0;
  int nodes = 0;
  int edges = 0;
};

void add_extraction(KnowledgeGraph& graph, const DocumentExtraction& extraction);

// Validates every document's source level before touching the graph.
IngestStats compile_documents(KnowledgeGraph& graph, const std::vector<Document>& documents,
                              const PipelineConfig& config,
                              const EmbeddingTable* embeddings = nullptr);

}  // namespace lexgraph
