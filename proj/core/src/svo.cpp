#include "lexgraph/svo.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace lexgraph {

std::string_view tri_state_name(TriState value) {
  switch (value) {
    case TriState::yes: return "yes";
    case TriState::no: return "no";
    case TriState::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<TriState> parse_tri_state(std::string_view text) {
  if (text == "yes") return TriState::yes;
  if (text == "no") return TriState::no;
  if (text == "unknown") return TriState::unknown;
  return std::nullopt;
}

std::string_view tense_name(Tense value) {
  switch (value) {
    case Tense::past: return "past";
    case Tense::present: return "present";
    case Tense::future: return "future";
    case Tense::unspecified: return "unspecified";
  }
  return "unspecified";
}

std::optional<Tense> parse_tense(std::string_view text) {
  if (text == "past") return Tense::past;
  if (text == "present") return Tense::present;
  if (text == "future") return Tense::future;
  if (text == "unspecified") return Tense::unspecified;
  return std::nullopt;
}

std::string_view link_kind_name(LinkKind kind) {
  switch (kind) {
    case LinkKind::nested_causal: return "nested_causal";
    case LinkKind::conditional: return "conditional";
    case LinkKind::open_complement: return "open_complement";
    case LinkKind::coordinate: return "coordinate";
  }
  return "nested_causal";
}

DeonticTable DeonticTable::defaults() {
  DeonticTable table;
  table.set("must", ModalClass::necessary);
  table.set("shall", ModalClass::necessary);
  table.set("may", ModalClass::possible);
  table.set("can", ModalClass::possible);
  table.set("might", ModalClass::weak_possible);
  return table;
}

void DeonticTable::set(std::string modal, ModalClass modal_class) {
  entries_[std::move(modal)] = modal_class;
}

void DeonticTable::erase(std::string_view modal) {
  auto it = entries_.find(modal);
  if (it != entries_.end()) entries_.erase(it);
}

DeonticTable::Effect DeonticTable::apply(const std::optional<std::string>& modality,
                                         bool negated) const {
  Effect effect;
  if (!modality) return effect;
  auto it = entries_.find(*modality);
  if (it == entries_.end()) return effect;
  switch (it->second) {
    case ModalClass::necessary:
      if (negated) {
        effect.possible = TriState::no;
      } else {
        effect.necessary = TriState::yes;
      }
      break;
    case ModalClass::possible:
      effect.possible = negated ? TriState::no : TriState::yes;
      break;
    case ModalClass::weak_possible:
      if (!negated) effect.possible = TriState::yes;
      break;
  }
  return effect;
}

std::optional<DeonticTable::ModalClass> parse_modal_class(std::string_view text) {
  if (text == "necessary") return DeonticTable::ModalClass::necessary;
  if (text == "possible") return DeonticTable::ModalClass::possible;
  if (text == "weak_possible") return DeonticTable::ModalClass::weak_possible;
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 5> kChunkRelations = {"det", "amod", "compound",
                                                             "nmod:poss", "nummod"};
constexpr std::array<std::string_view, 6> kNegators = {"not", "never", "no",
                                                       "n't", "neither", "nor"};
constexpr std::array<std::string_view, 10> kModals = {
    "must", "shall", "may", "can", "might", "could", "should", "would", "will", "ought"};
constexpr std::array<std::string_view, 4> kConditionalMarkers = {"if", "when", "whether",
                                                                 "unless"};
constexpr std::array<std::string_view, 11> kThirdSingular = {
    "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself"};
constexpr std::array<std::string_view, 7> kGendered = {"he",  "him", "his",    "himself",
                                                       "she", "her", "herself"};
constexpr std::array<std::string_view, 5> kThirdPlural = {"they", "them", "their", "theirs",
                                                          "themselves"};
// Nouns that denote people in judgment text; used only for he/she agreement.
constexpr std::array<std::string_view, 22> kPersonNouns = {
    "person",    "man",      "woman",     "defendant", "petitioner", "respondent",
    "appellant", "appellee", "plaintiff", "officer",   "judge",      "justice",
    "witness",   "individual", "offender", "dealer",   "user",       "owner",
    "buyer",     "seller",   "agent",     "citizen"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view value) {
  return std::find(set.begin(), set.end(), value) != set.end();
}

std::string_view base_relation(std::string_view deprel) {
  return deprel.substr(0, deprel.find(':'));
}

bool is_chunk_relation(std::string_view deprel) {
  return contains(kChunkRelations, deprel) || deprel == "poss";
}

bool is_nominal(const Token& t) {
  return t.upos == "NOUN" || t.upos == "PROPN" || t.upos == "PRON";
}

bool is_negator(const Token& t) {
  return base_relation(t.deprel) == "neg" || contains(kNegators, t.lemma) ||
         contains(kNegators, detail::to_lower(t.form));
}

bool is_passive_subject(std::string_view deprel) {
  return deprel == "nsubj:pass" || deprel == "nsubjpass" || deprel == "csubj:pass" ||
         deprel == "csubjpass";
}

bool is_active_subject(std::string_view deprel) {
  const auto base = base_relation(deprel);
  return (base == "nsubj" || base == "csubj") && !is_passive_subject(deprel);
}

bool is_object(std::string_view deprel) { return deprel == "obj" || deprel == "dobj"; }

bool looks_like_date(std::string_view text) {
  auto digits = [&](std::size_t from, std::size_t count) {
    if (text.size() < from + count) return false;
    for (std::size_t i = from; i < from + count; ++i) {
      if (text[i] < '0' || text[i] > '9') return false;
    }
    return true;
  };
  if (text.size() == 4) return digits(0, 4);
  if (text.size() == 7) return digits(0, 4) && text[4] == '-' && digits(5, 2);
  if (text.size() == 10) {
    return digits(0, 4) && text[4] == '-' && digits(5, 2) && text[7] == '-' && digits(8, 2);
  }
  return false;
}

// Per-sentence structural facts shared by the extraction passes.
class ClauseAnalysis {
 public:
  explicit ClauseAnalysis(const Sentence& sentence)
      : s_(sentence),
        chunk_head_(sentence.size() + 1, 0),
        host_(sentence.size() + 1, 0),
        absorbed_into_(sentence.size() + 1, 0),
        copular_(sentence.size() + 1, false) {
    const int n = s_.size();
    for (int t = 1; t <= n; ++t) chunk_head_[t] = climb_chunk(t);
    for (int t = 1; t <= n; ++t) {
      if (is_nominal(tok(t)) && chunk_head_[t] == t) chunks_.push_back(build_chunk(t));
    }
    for (int h = 1; h <= n; ++h) detect_have_to(h);
    for (int t = 1; t <= n; ++t) {
      for (int c : s_.children(t)) {
        if (tok(c).deprel == "cop") copular_[t] = true;
      }
      if (!copular_[t] && be_predicate(t) != 0) copular_[t] = true;
    }
  }

  const Token& tok(int index) const { return s_.token(index); }
  const Sentence& sentence() const { return s_; }
  const std::vector<NounPhrase>& chunks() const { return chunks_; }

  bool is_svo_verb(int t) const {
    return t > 0 && tok(t).upos == "VERB" && absorbed_into_[t] == 0 && !copular_[t];
  }
  bool is_copular(int t) const { return copular_[t]; }
  int host(int verb) const { return host_[verb]; }
  int absorbed_into(int t) const { return absorbed_into_[t]; }
  int anchor(int verb) const { return host_[verb] != 0 ? host_[verb] : verb; }

  // The clause verb that owns token t, if t is a clause verb or an absorbed
  // have-to host.
  int clause_verb_at(int t) const {
    if (is_svo_verb(t)) return t;
    if (absorbed_into_[t] != 0) return absorbed_into_[t];
    return 0;
  }

  // Children of the verb and of its absorbed host, excluding the verb itself.
  std::vector<int> clause_children(int verb) const {
    std::vector<int> out = s_.children(verb);
    if (host_[verb] != 0) {
      for (int c : s_.children(host_[verb])) {
        if (c != verb) out.push_back(c);
      }
      std::sort(out.begin(), out.end());
    }
    return out;
  }

  // be-as-root copula: returns the predicate token or 0.
  int be_predicate(int t) const {
    const Token& b = tok(t);
    if (b.lemma != "be" || (b.upos != "AUX" && b.upos != "VERB")) return 0;
    if (b.deprel == "cop" || base_relation(b.deprel) == "aux") return 0;
    bool has_subject = false;
    int predicate = 0;
    for (int c : s_.children(t)) {
      const Token& ct = tok(c);
      if (base_relation(ct.deprel) == "nsubj") has_subject = true;
      const auto rel = base_relation(ct.deprel);
      if (predicate == 0 && ct.upos != "VERB" &&
          (rel == "attr" || rel == "acomp" || rel == "xcomp" || is_object(ct.deprel))) {
        predicate = c;
      }
    }
    return has_subject ? predicate : 0;
  }

  NounPhrase phrase_at(int t) const {
    for (const NounPhrase& np : chunks_) {
      if (np.head_token == t) return np;
    }
    NounPhrase np;
    np.head_token = t;
    np.token_indices = {t};
    np.lemma_key = tok(t).lemma;
    np.head_upos = tok(t).upos;
    np.plural = tok(t).feat("Number") == "Plur";
    for (int c : s_.children(t)) {
      if (base_relation(tok(c).deprel) == "det" && !np.determiner) np.determiner = tok(c).lemma;
    }
    return np;
  }

  // Folds coordinated conjuncts ("he or she") into one phrase.
  NounPhrase coordinated_phrase(int t) const {
    NounPhrase np = phrase_at(t);
    for (int c : s_.children(t)) {
      if (base_relation(tok(c).deprel) != "conj" || !is_nominal(tok(c))) continue;
      std::string conjunction = "and";
      for (int cc : s_.children(c)) {
        if (base_relation(tok(cc).deprel) == "cc") {
          conjunction = tok(cc).lemma;
          break;
        }
      }
      const NounPhrase other = phrase_at(c);
      np.lemma_key += "_" + conjunction + "_" + other.lemma_key;
      np.conjunct_heads.push_back(c);
      np.token_indices.insert(np.token_indices.end(), other.token_indices.begin(),
                              other.token_indices.end());
      np.modifier_lemmas.insert(np.modifier_lemmas.end(), other.modifier_lemmas.begin(),
                                other.modifier_lemmas.end());
      if (conjunction == "and") np.plural = true;
    }
    std::sort(np.token_indices.begin(), np.token_indices.end());
    return np;
  }

  bool has_marker(int verb, const std::function<bool(const Token&)>& pred) const {
    for (int c : clause_children(verb)) {
      if (pred(tok(c))) return true;
    }
    return false;
  }

  std::optional<std::string> first_child_lemma(int verb, std::string_view relation) const {
    for (int c : clause_children(verb)) {
      if (base_relation(tok(c).deprel) == relation) return tok(c).lemma;
    }
    return std::nullopt;
  }

  std::optional<std::string> conditional_marker(int verb) const {
    for (int c : clause_children(verb)) {
      const Token& ct = tok(c);
      const auto rel = base_relation(ct.deprel);
      if ((rel == "mark" || rel == "advmod") && contains(kConditionalMarkers, ct.lemma)) {
        return ct.lemma;
      }
    }
    return std::nullopt;
  }

 private:
  int climb_chunk(int t) const {
    int current = t;
    for (int steps = 0; steps < s_.size(); ++steps) {
      const Token& ct = tok(current);
      if (!is_chunk_relation(ct.deprel) || ct.head == 0 || !is_nominal(tok(ct.head))) break;
      current = ct.head;
    }
    return current;
  }

  NounPhrase build_chunk(int head) const {
    NounPhrase np;
    np.head_token = head;
    np.lemma_key = tok(head).lemma;
    np.head_upos = tok(head).upos;
    np.plural = tok(head).feat("Number") == "Plur" || contains(kThirdPlural, tok(head).lemma);
    for (int t = 1; t <= s_.size(); ++t) {
      if (chunk_head_[t] != head) continue;
      np.token_indices.push_back(t);
      if (t == head) continue;
      const Token& member = tok(t);
      if (member.upos == "ADJ" || member.upos == "ADV") np.modifier_lemmas.push_back(member.lemma);
      if (member.head == head && base_relation(member.deprel) == "det" && !np.determiner) {
        np.determiner = member.lemma;
      }
    }
    return np;
  }

  void detect_have_to(int h) {
    const Token& have = tok(h);
    if (have.lemma != "have" || have.upos != "VERB") return;
    int complement = 0;
    for (int c : s_.children(h)) {
      if (is_object(tok(c).deprel)) return;
      if (complement == 0 && base_relation(tok(c).deprel) == "xcomp" && tok(c).upos == "VERB") {
        for (int m : s_.children(c)) {
          if (base_relation(tok(m).deprel) == "mark" && tok(m).lemma == "to") complement = c;
        }
      }
    }
    if (complement != 0) {
      host_[complement] = h;
      absorbed_into_[h] = complement;
    }
  }

  const Sentence& s_;
  std::vector<int> chunk_head_;
  std::vector<NounPhrase> chunks_;
  std::vector<int> host_;
  std::vector<int> absorbed_into_;
  std::vector<bool> copular_;
};

std::string svo_id_for(const ExtractionContext& context, const Sentence& sentence, int verb) {
  return context.document_id + ":" + sentence.sentence_id + ":" + std::to_string(verb);
}

struct Roles {
  std::optional<NounPhrase> subject;
  bool subject_inherited = false;
  bool passive = false;
  std::optional<NounPhrase> object;
  int object_token = 0;
  std::vector<PrepObject> prep_objects;
};

class RoleExtractor {
 public:
  explicit RoleExtractor(const ClauseAnalysis& analysis) : a_(analysis) {}

  Roles roles(int verb) {
    Roles r;
    int explicit_subject = 0;
    int passive_subject = 0;
    for (int c : a_.clause_children(verb)) {
      const Token& ct = a_.tok(c);
      if (explicit_subject == 0 && is_active_subject(ct.deprel)) explicit_subject = c;
      if (passive_subject == 0 && is_passive_subject(ct.deprel)) passive_subject = c;
    }
    r.passive = passive_subject != 0;

    int agent = 0;
    for (int c : a_.clause_children(verb)) {
      const Token& ct = a_.tok(c);
      if (ct.deprel == "obl:agent") {
        agent = c;
      } else if (ct.deprel == "agent") {
        for (int p : a_.sentence().children(c)) {
          if (base_relation(a_.tok(p).deprel) == "pobj") agent = p;
        }
      } else if (r.passive && base_relation(ct.deprel) == "obl" && case_of(c) == "by") {
        agent = c;
      }
      if (agent != 0) break;
    }

    if (explicit_subject != 0) {
      r.subject = a_.coordinated_phrase(explicit_subject);
    } else if (agent != 0) {
      r.subject = a_.coordinated_phrase(agent);
    } else if (!r.passive) {
      if (auto inherited = inherited_subject(verb)) {
        r.subject = std::move(inherited);
        r.subject_inherited = true;
      }
    }

    if (passive_subject != 0) {
      r.object_token = passive_subject;
    } else {
      for (int c : a_.clause_children(verb)) {
        if (is_object(a_.tok(c).deprel)) {
          r.object_token = c;
          break;
        }
      }
    }
    if (r.object_token != 0) r.object = a_.phrase_at(r.object_token);

    for (int c : a_.clause_children(verb)) {
      if (c == agent) continue;
      const Token& ct = a_.tok(c);
      const auto rel = base_relation(ct.deprel);
      if (rel == "obl" || rel == "nmod") {
        std::string prep = case_of(c);
        if (!prep.empty()) r.prep_objects.push_back({prep, a_.phrase_at(c)});
      } else if (rel == "prep") {
        for (int p : a_.sentence().children(c)) {
          if (base_relation(a_.tok(p).deprel) == "pobj") {
            r.prep_objects.push_back({ct.lemma, a_.phrase_at(p)});
            break;
          }
        }
      }
    }
    return r;
  }

  // Explicit (non-inherited) subject of a clause verb, or nullopt.
  std::optional<NounPhrase> explicit_subject(int verb) const {
    for (int c : a_.clause_children(verb)) {
      if (is_active_subject(a_.tok(c).deprel)) return a_.coordinated_phrase(c);
    }
    return std::nullopt;
  }

 private:
  std::string case_of(int nominal) const {
    std::string prep;
    for (int c : a_.sentence().children(nominal)) {
      const Token& ct = a_.tok(c);
      if (base_relation(ct.deprel) != "case") continue;
      if (!prep.empty()) prep += "_";
      prep += ct.lemma;
      for (int f : a_.sentence().children(c)) {
        if (base_relation(a_.tok(f).deprel) == "fixed") prep += "_" + a_.tok(f).lemma;
      }
    }
    return prep;
  }

  bool non_finite(int verb) const {
    const std::string form = a_.tok(verb).feat("VerbForm");
    if (form == "Inf" || form == "Ger") return true;
    return a_.has_marker(verb, [](const Token& t) {
      return base_relation(t.deprel) == "mark" && t.lemma == "to";
    });
  }

  std::optional<NounPhrase> inherited_subject(int verb) {
    auto memo = inherited_.find(verb);
    if (memo != inherited_.end()) return memo->second;
    std::optional<NounPhrase> result;
    const int anchor = a_.anchor(verb);
    const auto rel = base_relation(a_.tok(anchor).deprel);
    if (rel == "conj") {
      int current = anchor;
      while (base_relation(a_.tok(current).deprel) == "conj") {
        const int parent = a_.clause_verb_at(a_.tok(current).head);
        if (parent == 0) break;
        if (auto subject = explicit_subject(parent)) {
          result = std::move(subject);
          break;
        }
        current = a_.anchor(parent);
      }
    } else if (rel == "xcomp" ||
               ((rel == "advcl" || rel == "ccomp") && non_finite(verb) &&
                !a_.conditional_marker(verb))) {
      const int parent = a_.clause_verb_at(a_.tok(anchor).head);
      if (parent != 0) {
        result = explicit_subject(parent);
        if (!result) result = inherited_subject(parent);
      }
    }
    inherited_[verb] = result;
    return result;
  }

  const ClauseAnalysis& a_;
  std::map<int, std::optional<NounPhrase>> inherited_;
};

std::vector<int> local_tokens(const ClauseAnalysis& a, int verb) {
  std::vector<int> out;
  std::vector<int> stack = {a.anchor(verb)};
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    out.push_back(t);
    for (int c : a.sentence().children(t)) {
      if (c != verb) {
        if (a.is_svo_verb(c)) continue;
        if (a.absorbed_into(c) != 0 && a.absorbed_into(c) != verb) continue;
        if (a.is_copular(c)) continue;
      }
      stack.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> date_in(const ClauseAnalysis& a, const std::vector<int>& tokens) {
  for (int t : tokens) {
    if (a.tok(t).upos == "NUM" && looks_like_date(a.tok(t).form)) return a.tok(t).form;
  }
  return std::nullopt;
}

void append_possession(const ClauseAnalysis& a, const NounPhrase& np,
                       std::vector<Possession>& out) {
  for (int t : np.token_indices) {
    const Token& member = a.tok(t);
    if ((member.deprel == "nmod:poss" || member.deprel == "poss") && member.head > 0) {
      out.push_back({member.lemma, a.tok(member.head).lemma});
    }
  }
}

std::string join_lemmas(const std::optional<NounPhrase>& np) { return np ? np->lemma_key : "-"; }

}  // namespace

std::vector<NounPhrase> chunk_noun_phrases(const Sentence& sentence) {
  return ClauseAnalysis(sentence).chunks();
}

std::vector<int> local_clause_tokens(const Sentence& sentence, int verb_token) {
  return local_tokens(ClauseAnalysis(sentence), verb_token);
}

std::vector<SvoTriplet> extract_svos(const Sentence& sentence, const ExtractionContext& context) {
  const ClauseAnalysis analysis(sentence);
  RoleExtractor extractor(analysis);
  std::vector<SvoTriplet> out;
  for (int v = 1; v <= sentence.size(); ++v) {
    if (!analysis.is_svo_verb(v)) continue;
    Roles roles = extractor.roles(v);
    SvoTriplet triplet;
    triplet.svo_id = svo_id_for(context, sentence, v);
    triplet.subject = roles.subject;
    triplet.verb_token = v;
    triplet.verb_lemma = sentence.token(v).lemma;
    triplet.object = roles.object;
    triplet.prep_objects = roles.prep_objects;
    triplet.metadata.subject_inherited = roles.subject_inherited;
    triplet.metadata.temporal_relative = context.sentence_ordinal;
    triplet.metadata.incomplete =
        !triplet.subject && !triplet.object && triplet.prep_objects.empty();
    out.push_back(triplet);

    // One additional triplet per conjoined object.
    if (roles.object_token != 0) {
      for (int c : sentence.children(roles.object_token)) {
        const Token& ct = sentence.token(c);
        if (base_relation(ct.deprel) != "conj" || !is_nominal(ct)) continue;
        SvoTriplet extra = triplet;
        extra.svo_id = triplet.svo_id + "+" + std::to_string(c);
        extra.object = analysis.phrase_at(c);
        out.push_back(std::move(extra));
      }
    }
  }
  return out;
}

SvoMetadata extract_metadata(const SvoTriplet& triplet, const Sentence& sentence,
                             const ExtractionContext& context) {
  const ClauseAnalysis a(sentence);
  const int verb = triplet.verb_token;
  const int host = a.host(verb);
  SvoMetadata meta;
  meta.resolved_antecedents = triplet.metadata.resolved_antecedents;
  meta.subject_inherited = triplet.metadata.subject_inherited;

  const std::vector<int> local = local_tokens(a, verb);
  for (int t : local) {
    if (t == verb || t == host) continue;
    if (is_negator(a.tok(t))) {
      meta.negated = true;
      meta.negation_trigger = a.tok(t).lemma;
      break;
    }
  }

  std::vector<int> auxiliaries;
  for (int c : a.clause_children(verb)) {
    const Token& ct = a.tok(c);
    if (base_relation(ct.deprel) == "aux" && ct.deprel != "aux:pass") auxiliaries.push_back(c);
  }
  for (int aux : auxiliaries) {
    if (contains(kModals, a.tok(aux).lemma)) {
      meta.modality = a.tok(aux).lemma;
      break;
    }
  }
  if (!meta.modality) {
    const bool to_marked = a.has_marker(verb, [](const Token& t) {
      return base_relation(t.deprel) == "mark" && t.lemma == "to";
    });
    const bool have_aux = std::any_of(auxiliaries.begin(), auxiliaries.end(),
                                      [&](int aux) { return a.tok(aux).lemma == "have"; });
    if (host != 0 || (have_aux && to_marked)) meta.modality = "have_to";
  }

  auto tense_of = [](const Token& t) -> std::optional<Tense> {
    const std::string value = t.feat("Tense");
    if (value == "Past") return Tense::past;
    if (value == "Pres") return Tense::present;
    if (value == "Fut") return Tense::future;
    return std::nullopt;
  };
  std::optional<Tense> tense = tense_of(a.tok(verb));
  if (!tense && host != 0) tense = tense_of(a.tok(host));
  for (int aux : auxiliaries) {
    if (tense) break;
    const Token& at = a.tok(aux);
    if (at.lemma == "will" || at.lemma == "shall") {
      tense = Tense::future;
    } else {
      tense = tense_of(at);
    }
  }
  meta.tense_time = tense.value_or(Tense::unspecified);

  if (triplet.object && triplet.object->determiner) {
    meta.enumeration = triplet.object->determiner;
  } else if (triplet.subject && triplet.subject->determiner) {
    meta.enumeration = triplet.subject->determiner;
  } else {
    for (const PrepObject& p : triplet.prep_objects) {
      if (p.object.determiner) {
        meta.enumeration = p.object.determiner;
        break;
      }
    }
  }

  if (triplet.subject && !meta.subject_inherited) {
    append_possession(a, *triplet.subject, meta.possession);
  }
  if (triplet.object) append_possession(a, *triplet.object, meta.possession);
  for (const PrepObject& p : triplet.prep_objects) append_possession(a, p.object, meta.possession);

  meta.pronoun_subject = triplet.subject && triplet.subject->head_upos == "PRON";
  meta.pronoun_object = triplet.object && triplet.object->head_upos == "PRON";

  const DeonticTable defaults = DeonticTable::defaults();
  const DeonticTable& table = context.deontic != nullptr ? *context.deontic : defaults;
  const DeonticTable::Effect effect = table.apply(meta.modality, meta.negated);
  meta.deontic_possible = effect.possible;
  meta.deontic_necessary = effect.necessary;

  meta.temporal_relative = context.sentence_ordinal;
  meta.temporal_absolute = date_in(a, local);
  if (!meta.temporal_absolute && !context.date.empty()) meta.temporal_absolute = context.date;

  meta.incomplete = !triplet.subject && !triplet.object && triplet.prep_objects.empty();
  return meta;
}

std::vector<ClauseLink> link_clauses(const Sentence& sentence,
                                     const std::vector<SvoTriplet>& triplets) {
  const ClauseAnalysis a(sentence);
  std::map<int, const SvoTriplet*> primary;
  for (const SvoTriplet& t : triplets) primary.emplace(t.verb_token, &t);

  std::vector<ClauseLink> links;
  for (const auto& [verb, child] : primary) {
    int current = a.tok(a.anchor(verb)).head;
    int parent = 0;
    for (int steps = 0; current != 0 && steps <= sentence.size(); ++steps) {
      const int candidate = a.clause_verb_at(current);
      if (candidate != 0 && candidate != verb && primary.count(candidate) != 0) {
        parent = candidate;
        break;
      }
      current = a.tok(current).head;
    }
    if (parent == 0) continue;

    ClauseLink link;
    link.parent_svo = primary.at(parent)->svo_id;
    link.child_svo = child->svo_id;
    link.child_verb_lemma = child->verb_lemma;
    const auto rel = base_relation(a.tok(a.anchor(verb)).deprel);
    if (auto marker = a.conditional_marker(verb)) {
      link.kind = LinkKind::conditional;
      link.trigger_lemma = marker;
    } else if (rel == "xcomp") {
      link.kind = LinkKind::open_complement;
      link.trigger_lemma = a.first_child_lemma(verb, "mark");
    } else if (rel == "conj") {
      link.kind = LinkKind::coordinate;
      for (int c : sentence.children(a.anchor(verb))) {
        if (base_relation(a.tok(c).deprel) == "cc") {
          link.trigger_lemma = a.tok(c).lemma;
          break;
        }
      }
    } else {
      link.kind = LinkKind::nested_causal;
      link.trigger_lemma = a.first_child_lemma(verb, "mark");
    }
    links.push_back(std::move(link));
  }

  // Conjoined-object expansions hang off their primary triplet.
  for (const SvoTriplet& t : triplets) {
    const SvoTriplet* head = primary.at(t.verb_token);
    if (head == &t) continue;
    ClauseLink link;
    link.kind = LinkKind::coordinate;
    link.parent_svo = head->svo_id;
    link.child_svo = t.svo_id;
    link.child_verb_lemma = t.verb_lemma;
    if (t.object) {
      for (int c : sentence.children(t.object->head_token)) {
        if (base_relation(a.tok(c).deprel) == "cc") {
          link.trigger_lemma = a.tok(c).lemma;
          break;
        }
      }
    }
    links.push_back(std::move(link));
  }
  std::stable_sort(links.begin(), links.end(), [](const ClauseLink& x, const ClauseLink& y) {
    return x.child_svo < y.child_svo;
  });
  return links;
}

std::vector<CopulaAssertion> classify_copula(const Sentence& sentence,
                                             const ExtractionContext& context) {
  const ClauseAnalysis a(sentence);
  std::vector<CopulaAssertion> out;
  for (int p = 1; p <= sentence.size(); ++p) {
    if (!a.is_copular(p)) continue;
    int predicate = 0;
    std::vector<int> clause_tokens = {p};
    bool cop_relation = false;
    for (int c : sentence.children(p)) {
      if (a.tok(c).deprel == "cop") {
        cop_relation = true;
        clause_tokens.push_back(c);
      }
    }
    predicate = cop_relation ? p : a.be_predicate(p);
    if (predicate == 0) continue;

    int subject = 0;
    for (int c : sentence.children(p)) {
      const auto rel = base_relation(a.tok(c).deprel);
      if (rel == "nsubj" || rel == "csubj") {
        subject = c;
        break;
      }
    }
    if (subject == 0) continue;

    CopulaAssertion assertion;
    assertion.statement_id = context.document_id + ":" + sentence.sentence_id + ":" +
                             std::to_string(predicate);
    assertion.subject = a.coordinated_phrase(subject);
    assertion.predicate = a.phrase_at(predicate);
    const Token& pt = a.tok(predicate);
    const bool noun_predicate = pt.upos == "NOUN" || pt.upos == "PROPN";
    const auto& det = assertion.predicate.determiner;
    for (int owner : clause_tokens) {
      for (int c : sentence.children(owner)) {
        if (c != subject && is_negator(a.tok(c))) assertion.negated = true;
      }
    }
    if (predicate != p) {
      for (int c : sentence.children(predicate)) {
        if (is_negator(a.tok(c))) assertion.negated = true;
      }
    }
    assertion.class_membership = noun_predicate && det && (*det == "a" || *det == "an");
    assertion.temporal_relative = context.sentence_ordinal;
    std::vector<int> local = clause_tokens;
    for (int c : sentence.children(p)) local.push_back(c);
    std::sort(local.begin(), local.end());
    assertion.temporal_absolute = date_in(a, local);
    if (!assertion.temporal_absolute && !context.date.empty()) {
      assertion.temporal_absolute = context.date;
    }
    out.push_back(std::move(assertion));
  }
  return out;
}

std::vector<SvoTriplet> extract_sentence(const Sentence& sentence,
                                         const ExtractionContext& context) {
  std::vector<SvoTriplet> triplets = extract_svos(sentence, context);
  for (SvoTriplet& t : triplets) t.metadata = extract_metadata(t, sentence, context);
  for (ClauseLink& link : link_clauses(sentence, triplets)) {
    for (SvoTriplet& t : triplets) {
      if (t.svo_id == link.parent_svo) {
        t.clause_links.push_back(std::move(link));
        break;
      }
    }
  }
  return triplets;
}

namespace {

enum class PronounNumber { singular, plural, none };

PronounNumber pronoun_number(const Token& t) {
  if (contains(kThirdSingular, t.lemma)) return PronounNumber::singular;
  if (contains(kThirdPlural, t.lemma)) return PronounNumber::plural;
  if (t.feat("PronType") == "Prs" && t.feat("Person") == "3") {
    if (t.feat("Number") == "Sing") return PronounNumber::singular;
    if (t.feat("Number") == "Plur") return PronounNumber::plural;
  }
  return PronounNumber::none;
}

bool animate(const Token& t) {
  const std::string animacy = t.feat("Animacy");
  if (animacy == "Anim") return true;
  if (animacy == "Inan") return false;
  return t.upos == "PROPN" || contains(kPersonNouns, t.lemma);
}

struct Mention {
  int sentence = 0;
  int head = 0;
  const Token* token = nullptr;
  bool plural = false;
};

}  // namespace

void resolve_pronouns(const Document& document, std::vector<SvoTriplet>& triplets) {
  std::vector<Mention> mentions;
  for (int i = 0; i < static_cast<int>(document.sentences.size()); ++i) {
    const Sentence& s = document.sentences[i];
    for (const NounPhrase& np : chunk_noun_phrases(s)) {
      if (np.head_upos == "PRON") continue;
      mentions.push_back({i, np.head_token, &s.token(np.head_token), np.plural});
    }
  }

  auto resolve = [&](int sentence, int index) -> std::string {
    const Token& pronoun = document.sentences[sentence].token(index);
    const PronounNumber number = pronoun_number(pronoun);
    if (number == PronounNumber::none) return std::string(kUnresolved);
    const bool gendered = contains(kGendered, pronoun.lemma);
    const bool neuter = number == PronounNumber::singular && !gendered;
    for (auto it = mentions.rbegin(); it != mentions.rend(); ++it) {
      if (std::pair(it->sentence, it->head) >= std::pair(sentence, index)) continue;
      if (it->plural != (number == PronounNumber::plural)) continue;
      if (gendered && !animate(*it->token)) continue;
      if (neuter && animate(*it->token)) continue;
      return it->token->lemma;
    }
    return std::string(kUnresolved);
  };

  for (SvoTriplet& t : triplets) {
    const int ordinal = t.metadata.temporal_relative;
    if (ordinal < 0 || ordinal >= static_cast<int>(document.sentences.size())) continue;
    const Sentence& s = document.sentences[ordinal];
    auto visit = [&](const NounPhrase& np) {
      std::vector<int> heads = {np.head_token};
      heads.insert(heads.end(), np.conjunct_heads.begin(), np.conjunct_heads.end());
      for (int h : heads) {
        if (h < 1 || h > s.size() || s.token(h).upos != "PRON") continue;
        t.metadata.resolved_antecedents[h] = resolve(ordinal, h);
      }
    };
    if (t.subject) visit(*t.subject);
    if (t.object) visit(*t.object);
    for (const PrepObject& p : t.prep_objects) visit(p.object);
  }
}

std::string write_triplets(const std::vector<SvoTriplet>& triplets) {
  std::ostringstream out;
  for (const SvoTriplet& t : triplets) {
    std::vector<std::string> flags;
    const SvoMetadata& m = t.metadata;
    if (m.negated) flags.push_back("negated");
    if (m.modality) flags.push_back("modality=" + *m.modality);
    if (m.tense_time != Tense::unspecified) {
      flags.push_back("tense=" + std::string(tense_name(m.tense_time)));
    }
    if (m.deontic_possible != TriState::unknown) {
      flags.push_back("possible=" + std::string(tri_state_name(m.deontic_possible)));
    }
    if (m.deontic_necessary != TriState::unknown) {
      flags.push_back("necessary=" + std::string(tri_state_name(m.deontic_necessary)));
    }
    if (m.enumeration) flags.push_back("enumeration=" + *m.enumeration);
    if (m.subject_inherited) flags.push_back("inherited_subject");
    if (m.incomplete) flags.push_back("incomplete");
    for (const PrepObject& p : t.prep_objects) {
      flags.push_back("prep=" + p.preposition + ":" + p.object.lemma_key);
    }
    std::string joined;
    for (const std::string& f : flags) joined += (joined.empty() ? "" : ",") + f;
    out << t.svo_id << '\t' << join_lemmas(t.subject) << '\t' << t.verb_lemma << '\t'
        << join_lemmas(t.object) << '\t' << (joined.empty() ? "-" : joined) << '\n';
  }
  return out.str();
}

}  // namespace lexgraph
