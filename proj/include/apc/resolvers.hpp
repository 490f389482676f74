#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "apc/corpus.hpp"
#include "apc/error.hpp"
#include "apc/extraction.hpp"
#include "apc/records.hpp"

namespace apc {

enum class Strategy {
  Random,
  TokenDistance,
  TopicalEntity,
  SyntacticDistance,
  Parallelism,
  Url,
  TransformerSingle,
  TransformerMulti,
};

enum class Mode { Standard, GoldTwoMention };
enum class Setting { SnippetContext, PageContext };

struct ResolverConfig {
  Strategy strategy = Strategy::Random;
  Mode mode = Mode::Standard;
  Setting setting = Setting::SnippetContext;
  std::uint64_t seed = 0;
};

// The URL cue reads the source page title, which the snippet-context task
// forbids.
inline void validate_config(const ResolverConfig& cfg) {
  if (cfg.strategy == Strategy::Url &&
      cfg.setting != Setting::PageContext) {
    throw std::invalid_argument(
        "the url strategy requires the page-context setting");
  }
}

struct Resolution {
  std::optional<Mention> selected;
  bool a_pred = false;
  bool b_pred = false;
};

// An example's three spans located in its parsed document.
struct AlignedExample {
  Mention pronoun;
  Mention name_a;
  Mention name_b;
};

namespace detail {

// Token range covering exactly [start, start+len) scalar offsets; the range
// must begin and end on token boundaries.
inline TokenSpan align_char_span(const Document& doc, int start, int len,
                                 const std::string& example_id) {
  int end = start + len;
  for (const Sentence& s : doc.sentences) {
    for (const Token& t : s.tokens) {
      if (t.char_start != start) continue;
      int last = t.index;
      while (last < static_cast<int>(s.tokens.size()) &&
             s.tokens[last].char_end < end) {
        ++last;
      }
      if (last < static_cast<int>(s.tokens.size()) &&
          s.tokens[last].char_end == end) {
        return {s.index, t.index, last + 1};
      }
    }
  }
  throw AlignmentError("example " + example_id +
                       ": span at offset " + std::to_string(start) +
                       " does not align to token boundaries");
}

inline Mention mention_from_span(const Document& doc, const TokenSpan& span,
                                 MentionKind kind) {
  Mention m;
  m.kind = kind;
  m.sentence_index = span.sentence;
  m.begin = span.begin;
  m.end = span.end;
  const Sentence& s = doc.sentences.at(span.sentence);
  m.head_index = mention_head(m, s);
  m.role = role_of_deprel(s.tokens[m.head_index].deprel);
  if (kind == MentionKind::Pronoun) {
    std::string lower = to_lower(s.tokens[m.head_index].text);
    m.gender = pronoun_form_gender(lower);
    m.is_reflexive = is_reflexive_form(lower);
  }
  return m;
}

}  // namespace detail

inline AlignedExample align_example(const ExampleRecord& ex,
                                    const Document& doc) {
  if (doc.text != ex.text) {
    throw AlignmentError("example " + ex.id +
                         ": snippet text differs from document text");
  }
  AlignedExample out;
  out.pronoun = detail::mention_from_span(
      doc,
      detail::align_char_span(doc, ex.pronoun_offset,
                              static_cast<int>(utf8_length(ex.pronoun)),
                              ex.id),
      MentionKind::Pronoun);
  out.name_a = detail::mention_from_span(
      doc,
      detail::align_char_span(doc, ex.a_offset,
                              static_cast<int>(utf8_length(ex.name_a)), ex.id),
      MentionKind::Name);
  out.name_b = detail::mention_from_span(
      doc,
      detail::align_char_span(doc, ex.b_offset,
                              static_cast<int>(utf8_length(ex.name_b)), ex.id),
      MentionKind::Name);
  return out;
}

// Candidate antecedents for a pronoun. Standard mode: every PERSON name
// mention except co-arguments of the pronoun's own predicate, where binding
// precludes coreference with a non-reflexive pronoun. Gold-two-mention mode:
// exactly the two annotated name spans.
inline std::vector<Mention> candidate_antecedents(const AlignedExample& ex,
                                                  const Document& doc,
                                                  Mode mode) {
  if (mode == Mode::GoldTwoMention) {
    return {ex.name_a, ex.name_b};
  }
  std::vector<Mention> out;
  const Mention& p = ex.pronoun;
  const Sentence& psent = doc.sentences.at(p.sentence_index);
  const Token& ptok = psent.tokens.at(p.head_index);
  bool pronoun_is_argument = is_argument_deprel(ptok.deprel);
  for (const Mention& m : find_mentions(doc)) {
    if (m.kind != MentionKind::Name) continue;
    if (pronoun_is_argument && m.sentence_index == p.sentence_index) {
      const Token& h = psent.tokens.at(m.head_index);
      if (h.head == ptok.head && h.index != ptok.index &&
          is_argument_deprel(h.deprel)) {
        continue;
      }
    }
    out.push_back(m);
  }
  return out;
}

namespace detail {

// Shared tie rule for every argmin/argmax selection: prefer candidates that
// precede the pronoun, then the earliest start offset.
struct TieBreak {
  const Document& doc;
  int pronoun_begin;

  bool prefer(const Mention& a, const Mention& b) const {
    bool a_before = flat_end(doc, span_of(a)) <= pronoun_begin;
    bool b_before = flat_end(doc, span_of(b)) <= pronoun_begin;
    if (a_before != b_before) return a_before;
    return flat_begin(doc, span_of(a)) < flat_begin(doc, span_of(b));
  }
};

template <typename Key>
inline std::optional<Mention> argmin_by(const std::vector<Mention>& cands,
                                        const Document& doc,
                                        const Mention& pronoun, Key&& key) {
  if (cands.empty()) return std::nullopt;
  TieBreak tie{doc, flat_begin(doc, span_of(pronoun))};
  const Mention* best = nullptr;
  auto best_key = key(cands.front());
  for (const Mention& m : cands) {
    auto k = key(m);
    if (!best || k < best_key || (k == best_key && tie.prefer(m, *best))) {
      best = &m;
      best_key = k;
    }
  }
  return *best;
}

}  // namespace detail

inline Resolution resolve_random(const std::vector<Mention>& cands,
                                 std::mt19937_64& rng) {
  Resolution r;
  if (cands.empty()) return r;
  std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
  r.selected = cands[pick(rng)];
  return r;
}

inline Resolution resolve_random(const std::vector<Mention>& cands,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return resolve_random(cands, rng);
}

// Closest candidate to the pronoun by surface token count.
inline Resolution resolve_token_distance(const std::vector<Mention>& cands,
                                         const Mention& pronoun,
                                         const Document& doc) {
  Resolution r;
  r.selected = detail::argmin_by(cands, doc, pronoun, [&](const Mention& m) {
    return token_distance(doc, span_of(m), span_of(pronoun));
  });
  return r;
}

// Closest candidate containing the most frequent token string over all
// candidates' tokens.
inline Resolution resolve_topical_entity(const std::vector<Mention>& cands,
                                         const Mention& pronoun,
                                         const Document& doc) {
  Resolution r;
  if (cands.empty()) return r;
  std::map<std::string, int> freq;
  for (const Mention& m : cands) {
    const Sentence& s = doc.sentences.at(m.sentence_index);
    for (int i = m.begin; i < m.end; ++i) ++freq[s.tokens[i].text];
  }
  int top = 0;
  for (const auto& [token, count] : freq) top = std::max(top, count);
  std::vector<Mention> topical;
  for (const Mention& m : cands) {
    const Sentence& s = doc.sentences.at(m.sentence_index);
    for (int i = m.begin; i < m.end; ++i) {
      if (freq[s.tokens[i].text] == top) {
        topical.push_back(m);
        break;
      }
    }
  }
  return resolve_token_distance(topical, pronoun, doc);
}

// Syntactically closest candidate head; equal tree distances fall back to
// token distance.
inline Resolution resolve_syntactic_distance(const std::vector<Mention>& cands,
                                             const Mention& pronoun,
                                             const Document& doc) {
  Resolution r;
  r.selected = detail::argmin_by(cands, doc, pronoun, [&](const Mention& m) {
    return std::pair(syntactic_distance(doc, head_ref(m), head_ref(pronoun)),
                     token_distance(doc, span_of(m), span_of(pronoun)));
  });
  return r;
}

// Subject and direct-object pronouns pick the closest candidate bearing the
// same grammatical role; anything else backs off to syntactic distance.
inline Resolution resolve_parallelism(const std::vector<Mention>& cands,
                                      const Mention& pronoun,
                                      const Document& doc) {
  if (pronoun.role == Role::Subject || pronoun.role == Role::DirectObject) {
    std::vector<Mention> same_role;
    for (const Mention& m : cands) {
      if (m.role == pronoun.role) same_role.push_back(m);
    }
    if (!same_role.empty()) {
      return resolve_token_distance(same_role, pronoun, doc);
    }
  }
  return resolve_syntactic_distance(cands, pronoun, doc);
}

// Syntactically closest candidate with a token overlap with the page title;
// no overlap backs off to parallelism.
inline Resolution resolve_url(const std::vector<Mention>& cands,
                              const Mention& pronoun, const Document& doc,
                              const std::string& page_title) {
  std::vector<Mention> overlapping;
  if (!page_title.empty()) {
    auto title_tokens = split_ws(page_title);
    for (const Mention& m : cands) {
      const Sentence& s = doc.sentences.at(m.sentence_index);
      for (int i = m.begin; i < m.end && !title_tokens.empty(); ++i) {
        bool hit = false;
        for (const std::string& t : title_tokens) {
          if (equals_ci(s.tokens[i].text, t)) {
            hit = true;
            break;
          }
        }
        if (hit) {
          overlapping.push_back(m);
          break;
        }
      }
    }
  }
  if (overlapping.empty()) return resolve_parallelism(cands, pronoun, doc);
  return resolve_syntactic_distance(overlapping, pronoun, doc);
}

// Maps a selected surface onto the two annotated names: a token-boundary
// substring either way infers coreference. When both names match, only the
// longer overlap survives, so the result is never (true, true).
inline std::pair<bool, bool> align_to_pair(
    const std::optional<std::string>& selected, const std::string& name_a,
    const std::string& name_b) {
  if (!selected) return {false, false};
  bool a = surfaces_overlap(*selected, name_a);
  bool b = surfaces_overlap(*selected, name_b);
  if (a && b) {
    std::size_t overlap_a =
        std::min(utf8_length(*selected), utf8_length(name_a));
    std::size_t overlap_b =
        std::min(utf8_length(*selected), utf8_length(name_b));
    if (overlap_a >= overlap_b) {
      b = false;
    } else {
      a = false;
    }
  }
  return {a, b};
}

// Runs one heuristic strategy and aligns the selection to the example's
// name pair. Transformer strategies are dispatched by the caller, which owns
// the attention data.
inline Resolution resolve_heuristic(const ResolverConfig& cfg,
                                    const ExampleRecord& ex,
                                    const AlignedExample& aligned,
                                    const std::vector<Mention>& cands,
                                    const Document& doc,
                                    std::mt19937_64& rng) {
  validate_config(cfg);
  Resolution r;
  switch (cfg.strategy) {
    case Strategy::Random:
      r = resolve_random(cands, rng);
      break;
    case Strategy::TokenDistance:
      r = resolve_token_distance(cands, aligned.pronoun, doc);
      break;
    case Strategy::TopicalEntity:
      r = resolve_topical_entity(cands, aligned.pronoun, doc);
      break;
    case Strategy::SyntacticDistance:
      r = resolve_syntactic_distance(cands, aligned.pronoun, doc);
      break;
    case Strategy::Parallelism:
      r = resolve_parallelism(cands, aligned.pronoun, doc);
      break;
    case Strategy::Url:
      r = resolve_url(cands, aligned.pronoun, doc, doc.page_title);
      break;
    default:
      throw std::invalid_argument("strategy requires attention data");
  }
  std::optional<std::string> surface;
  if (r.selected) surface = mention_text(doc, *r.selected);
  auto [a, b] = align_to_pair(surface, ex.name_a, ex.name_b);
  r.a_pred = a;
  r.b_pred = b;
  return r;
}

}  // namespace apc
