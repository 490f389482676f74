#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "apc/corpus.hpp"

namespace apc {

// Ambiguous-pronoun context shapes, named for where the pronoun sits
// relative to the two candidate names.
enum class PatternKind {
  FinalPro,    // (Name, Name, Pronoun)
  MedialPro,   // (Name, Pronoun, Name)
  InitialPro,  // (Pronoun, Name, Name)
};

inline std::string_view pattern_name(PatternKind k) {
  switch (k) {
    case PatternKind::FinalPro: return "FinalPro";
    case PatternKind::MedialPro: return "MedialPro";
    default: return "InitialPro";
  }
}

inline std::optional<PatternKind> pattern_from_name(std::string_view s) {
  if (s == "FinalPro") return PatternKind::FinalPro;
  if (s == "MedialPro") return PatternKind::MedialPro;
  if (s == "InitialPro") return PatternKind::InitialPro;
  return std::nullopt;
}

// One extracted context: a gendered pronoun with two candidate names in
// textual order.
struct CandidateContext {
  const Document* doc = nullptr;
  Mention pronoun;
  Mention name_a;  // textual order: name_a precedes name_b
  Mention name_b;
  PatternKind pattern = PatternKind::FinalPro;
  Gender gender = Gender::Unknown;
  bool page_entity_mentioned = false;
};

namespace detail {

inline bool spans_overlap(const Document& doc, const TokenSpan& a,
                          const TokenSpan& b) {
  return flat_begin(doc, a) < flat_end(doc, b) &&
         flat_begin(doc, b) < flat_end(doc, a);
}

// A coordinated span ("Smith and Jones") counts as plural.
inline bool is_plural_span(const Document& doc, const Mention& m) {
  const Sentence& s = doc.sentences.at(m.sentence_index);
  for (int i = m.begin; i < m.end; ++i) {
    const std::string& rel = s.tokens[i].deprel;
    if (rel == "conj" || rel == "cc") return true;
  }
  return false;
}

// All tokens of the subtree rooted at `root` (token indices).
inline std::vector<int> subtree_tokens(const Sentence& s, int root) {
  const int n = static_cast<int>(s.tokens.size());
  std::vector<int> out;
  std::vector<bool> in(n, false);
  in[root] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    for (int i = 0; i < n; ++i) {
      if (!in[i] && s.tokens[i].head != kRootHead && in[s.tokens[i].head]) {
        in[i] = true;
        grew = true;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (in[i]) out.push_back(i);
  }
  return out;
}

inline bool subtree_precedes(const Sentence& s, int root, int limit) {
  for (int i : subtree_tokens(s, root)) {
    if (i >= limit) return false;
  }
  return true;
}

}  // namespace detail

// All PERSON name spans headed by a proper noun, plus all gendered
// non-reflexive singular pronouns with their gender from the closed form
// list. Reflexives and neuter or plural pronouns never surface here.
inline std::vector<Mention> find_mentions(const Document& doc) {
  std::vector<Mention> out;
  for (const EntitySpan& e : doc.entities) {
    if (e.label != "PERSON") continue;
    Mention m;
    m.kind = MentionKind::Name;
    m.sentence_index = e.sentence;
    m.begin = e.begin;
    m.end = e.end;
    m.gender = Gender::Unknown;
    const Sentence& sent = doc.sentences.at(e.sentence);
    m.head_index = mention_head(m, sent);
    if (sent.tokens[m.head_index].pos != "PROPN") continue;
    m.role = role_of_deprel(sent.tokens[m.head_index].deprel);
    out.push_back(m);
  }
  for (const Sentence& sent : doc.sentences) {
    for (const Token& t : sent.tokens) {
      std::string lower = to_lower(t.text);
      Gender g = pronoun_form_gender(lower);
      if (g == Gender::Unknown) continue;
      Mention m;
      m.kind = MentionKind::Pronoun;
      m.sentence_index = sent.index;
      m.begin = t.index;
      m.end = t.index + 1;
      m.gender = g;
      m.head_index = t.index;
      m.role = role_of_deprel(t.deprel);
      m.is_reflexive = false;
      out.push_back(m);
    }
  }
  std::sort(out.begin(), out.end(), [&](const Mention& a, const Mention& b) {
    return std::tuple(a.sentence_index, a.begin, a.end) <
           std::tuple(b.sentence_index, b.begin, b.end);
  });
  return out;
}

// True when another mention compatible with the pronoun in gender, number
// and entity type lies strictly between the earliest and the latest of the
// three spans. Unknown-gender names count as compatible; coordinated
// (plural) spans do not.
inline bool has_intruder(const Document& doc, const Mention& pronoun,
                         const Mention& name_a, const Mention& name_b,
                         Gender gender) {
  const Mention* three[3] = {&pronoun, &name_a, &name_b};
  int lo_end = flat_end(doc, span_of(*three[0]));
  int hi_begin = flat_begin(doc, span_of(*three[0]));
  for (const Mention* m : three) {
    lo_end = std::min(lo_end, flat_end(doc, span_of(*m)));
    hi_begin = std::max(hi_begin, flat_begin(doc, span_of(*m)));
  }
  for (const Mention& m : find_mentions(doc)) {
    bool is_one_of_three = false;
    for (const Mention* t : three) {
      if (detail::spans_overlap(doc, span_of(m), span_of(*t))) {
        is_one_of_three = true;
        break;
      }
    }
    if (is_one_of_three) continue;
    if (m.gender != Gender::Unknown && m.gender != gender) continue;
    if (m.kind == MentionKind::Name && detail::is_plural_span(doc, m)) {
      continue;
    }
    int b = flat_begin(doc, span_of(m));
    int e = flat_end(doc, span_of(m));
    if (b >= lo_end && e <= hi_begin) return true;
  }
  return false;
}

// True when the pronoun sits in an initial subordinate clause (its clause
// head bears an adverbial-clause relation and the whole clause precedes the
// governing predicate), or is a possessive inside an initial prepositional
// phrase.
inline bool is_fronted(const Mention& pronoun, const Sentence& sentence) {
  int cur = pronoun.head_index;
  const Token& ptok = sentence.tokens.at(cur);
  while (true) {
    const Token& t = sentence.tokens.at(cur);
    if (t.deprel.substr(0, 5) == "advcl" && t.head != kRootHead) {
      if (detail::subtree_precedes(sentence, cur, t.head)) return true;
    }
    if (t.head == kRootHead) break;
    cur = t.head;
  }
  if (is_possessive_pronoun_token(ptok)) {
    cur = ptok.head;
    while (cur != kRootHead) {
      const Token& t = sentence.tokens.at(cur);
      bool has_case_child = false;
      for (const Token& c : sentence.tokens) {
        if (c.head == cur && (c.deprel == "case" || c.pos == "ADP")) {
          has_case_child = true;
          break;
        }
      }
      if (has_case_child && t.head != kRootHead &&
          detail::subtree_precedes(sentence, cur, t.head)) {
        return true;
      }
      cur = t.head;
    }
  }
  return false;
}

// Pattern for a (pronoun, name, name) triple, or nullopt when any
// constraint fails. Names may be passed in either order.
inline std::optional<PatternKind> classify_pattern(const Document& doc,
                                                   const Mention& pronoun,
                                                   const Mention& name_a,
                                                   const Mention& name_b) {
  if (pronoun.gender == Gender::Unknown || pronoun.is_reflexive) {
    return std::nullopt;
  }
  const Sentence& sa = doc.sentences.at(name_a.sentence_index);
  const Sentence& sb = doc.sentences.at(name_b.sentence_index);
  if (equals_ci(sa.tokens.at(name_a.head_index).text,
                sb.tokens.at(name_b.head_index).text)) {
    return std::nullopt;
  }
  if (detail::spans_overlap(doc, span_of(name_a), span_of(name_b)) ||
      detail::spans_overlap(doc, span_of(pronoun), span_of(name_a)) ||
      detail::spans_overlap(doc, span_of(pronoun), span_of(name_b))) {
    return std::nullopt;
  }
  if (has_intruder(doc, pronoun, name_a, name_b, pronoun.gender)) {
    return std::nullopt;
  }

  const Mention* first = &name_a;
  const Mention* second = &name_b;
  if (flat_begin(doc, span_of(*second)) < flat_begin(doc, span_of(*first))) {
    std::swap(first, second);
  }
  int p = flat_begin(doc, span_of(pronoun));
  int n1 = flat_begin(doc, span_of(*first));
  int n2 = flat_begin(doc, span_of(*second));
  const Sentence& psent = doc.sentences.at(pronoun.sentence_index);

  if (p > n2) {  // (Name, Name, Pronoun)
    if (first->sentence_index != second->sentence_index) return std::nullopt;
    int ns = first->sentence_index;
    if (pronoun.sentence_index == ns || pronoun.sentence_index == ns + 1) {
      return PatternKind::FinalPro;
    }
    return std::nullopt;
  }
  if (p < n1) {  // (Pronoun, Name, Name)
    if (first->sentence_index != second->sentence_index ||
        pronoun.sentence_index != first->sentence_index) {
      return std::nullopt;
    }
    if (is_fronted(pronoun, psent)) return PatternKind::InitialPro;
    return std::nullopt;
  }
  // (Name, Pronoun, Name)
  if (pronoun.sentence_index != second->sentence_index ||
      first->sentence_index + 1 != pronoun.sentence_index) {
    return std::nullopt;
  }
  if (is_fronted(pronoun, psent)) return PatternKind::MedialPro;
  return std::nullopt;
}

// Case-insensitive token-string overlap between a mention and the page
// title.
inline bool mention_overlaps_title(const Document& doc, const Mention& m) {
  if (doc.page_title.empty()) return false;
  auto title_tokens = split_ws(doc.page_title);
  const Sentence& s = doc.sentences.at(m.sentence_index);
  for (int i = m.begin; i < m.end; ++i) {
    for (const std::string& t : title_tokens) {
      if (equals_ci(s.tokens[i].text, t)) return true;
    }
  }
  return false;
}

// Every (pronoun, name, name) triple passing classify_pattern, deduplicated
// on (pronoun span, unordered name-span pair), in stable document order.
inline std::vector<CandidateContext> extract_candidates(const Document& doc) {
  std::vector<Mention> mentions = find_mentions(doc);
  std::vector<Mention> names;
  std::vector<Mention> pronouns;
  for (const Mention& m : mentions) {
    (m.kind == MentionKind::Name ? names : pronouns).push_back(m);
  }
  std::vector<CandidateContext> out;
  std::set<std::tuple<int, int, int, int, int, int>> seen;
  for (const Mention& p : pronouns) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        auto kind = classify_pattern(doc, p, names[i], names[j]);
        if (!kind) continue;
        int pb = flat_begin(doc, span_of(p));
        int ab = flat_begin(doc, span_of(names[i]));
        int ae = flat_end(doc, span_of(names[i]));
        int bb = flat_begin(doc, span_of(names[j]));
        int be = flat_end(doc, span_of(names[j]));
        auto key = std::tuple(pb, std::min(ab, bb), std::min(ae, be),
                              std::max(ab, bb), std::max(ae, be),
                              flat_end(doc, span_of(p)));
        if (!seen.insert(key).second) continue;
        CandidateContext c;
        c.doc = &doc;
        c.pronoun = p;
        c.name_a = names[i];  // find_mentions output is position-sorted
        c.name_b = names[j];
        c.pattern = *kind;
        c.gender = p.gender;
        c.page_entity_mentioned = mention_overlaps_title(doc, names[i]) ||
                                  mention_overlaps_title(doc, names[j]);
        out.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace apc
