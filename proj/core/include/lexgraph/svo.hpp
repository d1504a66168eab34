#pragma once

// Rule-based subject-verb-object extraction over dependency trees.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexgraph/conllu.hpp"

namespace lexgraph {

inline constexpr std::string_view kUnresolved = "UNRESOLVED";

struct NounPhrase {
  int head_token = 0;
  std::vector<int> token_indices;  // sorted
  // Head lemma; coordinated subjects join conjuncts with the conjunction
  // ("he_or_she").
  std::string lemma_key;
  std::string head_upos;
  std::vector<std::string> modifier_lemmas;  // surface order
  std::optional<std::string> determiner;
  bool plural = false;
  // Heads of coordinated conjuncts folded into this phrase (excluding
  // head_token).
  std::vector<int> conjunct_heads;

  friend bool operator==(const NounPhrase&, const NounPhrase&) = default;
};

enum class TriState { yes, no, unknown };
enum class Tense { past, present, future, unspecified };

std::string_view tri_state_name(TriState value);
std::optional<TriState> parse_tri_state(std::string_view text);
std::string_view tense_name(Tense value);
std::optional<Tense> parse_tense(std::string_view text);

struct Possession {
  std::string possessor;
  std::string possessed;
  friend bool operator==(const Possession&, const Possession&) = default;
};

struct SvoMetadata {
  bool negated = false;
  std::optional<std::string> negation_trigger;
  std::optional<std::string> modality;
  Tense tense_time = Tense::unspecified;
  std::optional<std::string> enumeration;
  std::vector<Possession> possession;
  bool pronoun_subject = false;
  bool pronoun_object = false;
  // Pronoun token index -> antecedent lemma or kUnresolved.
  std::map<int, std::string> resolved_antecedents;
  TriState deontic_possible = TriState::unknown;
  TriState deontic_necessary = TriState::unknown;
  int temporal_relative = 0;
  std::optional<std::string> temporal_absolute;
  bool incomplete = false;
  bool subject_inherited = false;

  friend bool operator==(const SvoMetadata&, const SvoMetadata&) = default;
};

enum class LinkKind { nested_causal, conditional, open_complement, coordinate };

std::string_view link_kind_name(LinkKind kind);

struct ClauseLink {
  LinkKind kind = LinkKind::nested_causal;
  std::string parent_svo;
  std::string child_svo;
  std::optional<std::string> trigger_lemma;
  std::string child_verb_lemma;

  friend bool operator==(const ClauseLink&, const ClauseLink&) = default;
};

struct PrepObject {
  std::string preposition;
  NounPhrase object;
  friend bool operator==(const PrepObject&, const PrepObject&) = default;
};

struct SvoTriplet {
  std::string svo_id;  // document:sentence:verb_index[+object_index]
  std::optional<NounPhrase> subject;
  int verb_token = 0;
  std::string verb_lemma;
  std::optional<NounPhrase> object;
  std::vector<PrepObject> prep_objects;
  SvoMetadata metadata;
  // Links in which this triplet is the parent.
  std::vector<ClauseLink> clause_links;

  friend bool operator==(const SvoTriplet&, const SvoTriplet&) = default;
};

// Copular statement: "use is active employment", "a gun is a firearm".
struct CopulaAssertion {
  std::string statement_id;  // document:sentence:predicate_index
  NounPhrase subject;
  NounPhrase predicate;
  // Indefinite-article noun predicate: class membership (is_a). Otherwise an
  // attribute of the subject.
  bool class_membership = false;
  bool negated = false;
  int temporal_relative = 0;
  std::optional<std::string> temporal_absolute;

  friend bool operator==(const CopulaAssertion&, const CopulaAssertion&) = default;
};

// Maps a modal lemma (and the clause's polarity) to deontic flags.
class DeonticTable {
 public:
  enum class ModalClass {
    necessary,      // yes/necessary; negated -> possible=no
    possible,       // yes/possible; negated -> possible=no
    weak_possible,  // yes/possible; negated -> unknown
  };

  struct Effect {
    TriState possible = TriState::unknown;
    TriState necessary = TriState::unknown;
    friend bool operator==(const Effect&, const Effect&) = default;
  };

  // must/shall necessary; may/can possible; might weak_possible.
  static DeonticTable defaults();

  void set(std::string modal, ModalClass modal_class);
  void erase(std::string_view modal);
  Effect apply(const std::optional<std::string>& modality, bool negated) const;

  const std::map<std::string, ModalClass, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, ModalClass, std::less<>> entries_;
};

std::optional<DeonticTable::ModalClass> parse_modal_class(std::string_view text);

struct ExtractionContext {
  std::string document_id = "doc";
  int sentence_ordinal = 0;
  std::string date;  // document-level absolute date, may be empty
  const DeonticTable* deontic = nullptr;  // nullptr: defaults
};

std::vector<NounPhrase> chunk_noun_phrases(const Sentence& sentence);

// Roles only; metadata carries `incomplete` and `subject_inherited`.
std::vector<SvoTriplet> extract_svos(const Sentence& sentence,
                                     const ExtractionContext& context = {});

SvoMetadata extract_metadata(const SvoTriplet& triplet, const Sentence& sentence,
                             const ExtractionContext& context = {});

std::vector<ClauseLink> link_clauses(const Sentence& sentence,
                                     const std::vector<SvoTriplet>& triplets);

std::vector<CopulaAssertion> classify_copula(const Sentence& sentence,
                                             const ExtractionContext& context = {});

// Runs roles, metadata and clause linking for one sentence; links are stored
// on their parent triplet.
std::vector<SvoTriplet> extract_sentence(const Sentence& sentence,
                                         const ExtractionContext& context = {});

// Nearest-preceding-match by grammatical number, in document order. A
// triplet's host sentence is document.sentences[metadata.temporal_relative].
void resolve_pronouns(const Document& document, std::vector<SvoTriplet>& triplets);

// Token indices in the verb's local clause: its subtree minus the subtrees of
// other clause heads. Includes the verb.
std::vector<int> local_clause_tokens(const Sentence& sentence, int verb_token);

// One line per triplet: svo_id, subject, verb, object, flags (tab-separated).
std::string write_triplets(const std::vector<SvoTriplet>& triplets);

}  // namespace lexgraph
