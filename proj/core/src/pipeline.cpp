#include "lexgraph/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "lexgraph/error.hpp"
#include "text_util.hpp"

namespace lexgraph {

PipelineConfig load_config(std::istream& input, const std::string& base_dir) {
  PipelineConfig config;
  std::string line;
  int line_number = 0;
  auto fail = [&](const std::string& message) {
    throw Error(ErrorKind::malformed_line,
                "config line " + std::to_string(line_number) + ": " + message);
  };
  auto weight = [&](std::string_view value) {
    auto n = detail::parse_int<int>(value);
    if (!n || *n < 1) fail("weights must be positive integers");
    return *n;
  };
  auto real = [&](std::string_view value) {
    auto r = detail::parse_double(value);
    if (!r) fail("expected a number, got '" + std::string(value) + "'");
    return *r;
  };
  while (std::getline(input, line)) {
    ++line_number;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = detail::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const std::string_view key = detail::trim(body.substr(0, eq));
    const std::string_view value = detail::trim(body.substr(eq + 1));
    if (detail::starts_with(key, "source.") && key.size() > 7) {
      config.authority.source_weights[std::string(key.substr(7))] = weight(value);
    } else if (detail::starts_with(key, "opinion.")) {
      auto kind = parse_opinion_kind(key.substr(8));
      if (!kind) fail("unknown opinion kind '" + std::string(key.substr(8)) + "'");
      config.authority.opinion_weights[*kind] = weight(value);
    } else if (key == "promotion_threshold") {
      config.promotion_threshold = real(value);
      if (!(config.promotion_threshold > 0 && config.promotion_threshold <= 1)) {
        fail("promotion_threshold must be in (0, 1]");
      }
    } else if (key == "attachment_margin") {
      config.attachment_margin = real(value);
      if (config.attachment_margin < 0) fail("attachment_margin must be >= 0");
    } else if (detail::starts_with(key, "deontic.") && key.size() > 8) {
      const std::string modal = detail::to_lower(key.substr(8));
      if (value == "none") {
        config.deontic.erase(modal);
      } else if (auto cls = parse_modal_class(value)) {
        config.deontic.set(modal, *cls);
      } else {
        fail("unknown modal class '" + std::string(value) + "'");
      }
    } else if (key == "embeddings") {
      std::filesystem::path path{std::string(value)};
      if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
      config.embeddings_path = path.string();
    } else {
      fail("unknown key '" + std::string(key) + "'");
    }
  }
  config.authority.validate();
  return config;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path);
  return load_config(in, std::filesystem::path(path).parent_path().string());
}

DocumentExtraction extract_document(const Document& document, const PipelineConfig& config,
                                    const EmbeddingTable* embeddings) {
  DocumentExtraction out;
  out.provenance = document.provenance;
  for (std::size_t i = 0; i < document.sentences.size(); ++i) {
    ExtractionContext context;
    context.document_id = document.provenance.document_id;
    context.sentence_ordinal = static_cast<int>(i);
    context.date = document.provenance.date;
    context.deontic = &config.deontic;
    const Sentence& sentence = document.sentences[i];
    for (SvoTriplet& t : extract_sentence(sentence, context)) out.triplets.push_back(std::move(t));
    for (CopulaAssertion& c : classify_copula(sentence, context)) {
      out.copulas.push_back(std::move(c));
    }
  }
  resolve_pronouns(document, out.triplets);

  if (embeddings != nullptr) {
    for (SvoTriplet& t : out.triplets) {
      if (!t.object) continue;
      auto& preps = t.prep_objects;
      for (auto it = preps.begin(); it != preps.end();) {
        const Attachment decision =
            attachment_score(t.verb_lemma, t.object->lemma_key, it->object.lemma_key,
                             *embeddings, config.attachment_margin);
        if (decision == Attachment::noun_attachment) {
          out.noun_attached.emplace_back(t.svo_id, std::move(*it));
          it = preps.erase(it);
        } else {
          ++it;
        }
      }
    }
  }
  return out;
}

void add_extraction(KnowledgeGraph& graph, const DocumentExtraction& extraction) {
  const Provenance& provenance = extraction.provenance;
  for (const SvoTriplet& t : extraction.triplets) add_svo(graph, t, provenance);
  for (const CopulaAssertion& c : extraction.copulas) add_copula(graph, c, provenance);

  for (const auto& [svo_id, prep] : extraction.noun_attached) {
    const SvoRecord* record = graph.find_svo(svo_id);
    if (record == nullptr || record->object.empty()) continue;
    const std::string pobj =
        graph.upsert_node(prep.object.lemma_key, node_kind_for_upos(prep.object.head_upos));
    Edge e;
    e.kind = EdgeKind::prep_object;
    e.from = pobj;
    e.to = record->object;
    e.svo_id = svo_id;
    e.id = make_edge_id(e.kind, e.from, e.to, svo_id, prep.preposition);
    e.authority = record->authority;
    e.opinion = record->opinion;
    e.temporal_relative = record->temporal_relative;
    e.temporal_absolute = record->temporal_absolute;
    e.modifiers = prep.object.modifier_lemmas;
    e.attributes["prep"] = prep.preposition;
    e.attributes["attached"] = "noun";
    graph.insert_edge(std::move(e));
  }
}

IngestStats compile_documents(KnowledgeGraph& graph, const std::vector<Document>& documents,
                              const PipelineConfig& config, const EmbeddingTable* embeddings) {
  for (const Document& d : documents) {
    if (!graph.authority_config().has_source(d.provenance.source_level)) {
      throw Error(ErrorKind::unknown_source_level,
                  d.provenance.source_level + " (document " + d.provenance.document_id + ")");
    }
  }
  IngestStats stats;
  for (const Document& d : documents) {
    const DocumentExtraction extraction = extract_document(d, config, embeddings);
    add_extraction(graph, extraction);
    ++stats.documents;
    stats.sentences += static_cast<int>(d.sentences.size());
    stats.svos += static_cast<int>(extraction.triplets.size());
    stats.copulas += static_cast<int>(extraction.copulas.size());
  }
  stats.nodes = static_cast<int>(graph.nodes().size());
  stats.edges = static_cast<int>(graph.edges().size());
  return stats;
}

}  // namespace lexgraph
