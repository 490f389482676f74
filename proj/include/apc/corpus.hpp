#pragma once

#include <array>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apc/error.hpp"
#include "apc/text.hpp"

namespace apc {

// Head sentinel for the root token of a sentence.
inline constexpr int kRootHead = -1;

enum class Gender { Masculine, Feminine, Unknown };
enum class MentionKind { Name, Pronoun };
enum class Role { Subject, DirectObject, Other };

struct Token {
  int index = 0;         // 0-based position in sentence
  std::string text;
  std::string pos;       // coarse tag, UD style (PROPN, PRON, VERB, ...)
  int head = kRootHead;  // in-sentence index of the governor, kRootHead at root
  std::string deprel;
  int char_start = 0;    // scalar offsets into the document text, end exclusive
  int char_end = 0;
  std::string ner = "O";  // BIO tag, "O" when outside any entity
  bool space_after = true;
};

struct Sentence {
  int index = 0;  // 0-based position in document
  std::vector<Token> tokens;
};

// A contiguous NER run.
struct EntitySpan {
  int sentence = 0;
  int begin = 0;
  int end = 0;  // token range, end exclusive
  std::string label;
};

struct Document {
  std::string id;
  std::string url;
  std::string page_title;
  std::vector<Sentence> sentences;
  std::string text;  // full snippet text; token offsets index into it
  std::vector<EntitySpan> entities;
};

struct Mention {
  MentionKind kind = MentionKind::Name;
  int sentence_index = 0;
  int begin = 0;
  int end = 0;  // token range within the sentence, end exclusive
  Gender gender = Gender::Unknown;
  int head_index = 0;  // inside [begin, end)
  Role role = Role::Other;
  bool is_reflexive = false;  // pronouns only
};

// A token span addressed at document scope.
struct TokenSpan {
  int sentence = 0;
  int begin = 0;
  int end = 0;
};

struct TokenRef {
  int sentence = 0;
  int token = 0;
};

inline TokenSpan span_of(const Mention& m) {
  return {m.sentence_index, m.begin, m.end};
}

inline TokenRef head_ref(const Mention& m) {
  return {m.sentence_index, m.head_index};
}

// ---------------------------------------------------------------------------
// Pronoun lexicon: the closed sets of gendered, non-reflexive singular forms.

struct PronounForm {
  std::string_view form;  // lower-cased surface
  Gender gender;
};

inline const std::array<PronounForm, 6>& pronoun_forms() {
  static const std::array<PronounForm, 6> forms = {{
      {"he", Gender::Masculine},
      {"him", Gender::Masculine},
      {"his", Gender::Masculine},
      {"she", Gender::Feminine},
      {"her", Gender::Feminine},
      {"hers", Gender::Feminine},
  }};
  return forms;
}

// Gender of a lower-cased gendered non-reflexive singular pronoun form;
// Unknown for anything else (reflexives, neuter and plural forms included).
inline Gender pronoun_form_gender(std::string_view lower) {
  for (const auto& p : pronoun_forms()) {
    if (p.form == lower) return p.gender;
  }
  return Gender::Unknown;
}

inline bool is_reflexive_form(std::string_view lower) {
  return lower == "himself" || lower == "herself";
}

// Unambiguously possessive forms; "her" is possessive only when the parse
// says so (see is_possessive_pronoun_token).
inline bool is_possessive_form(std::string_view lower) {
  return lower == "his" || lower == "hers";
}

inline bool is_possessive_deprel(std::string_view deprel) {
  return deprel == "nmod:poss" || deprel == "poss";
}

inline bool is_possessive_pronoun_token(const Token& t) {
  return is_possessive_deprel(t.deprel) || is_possessive_form(to_lower(t.text));
}

inline Role role_of_deprel(std::string_view deprel) {
  if (deprel.substr(0, 5) == "nsubj") return Role::Subject;
  if (deprel == "obj" || deprel == "dobj") return Role::DirectObject;
  return Role::Other;
}

// Argument relations of a predicate, for co-argument checks.
inline bool is_argument_deprel(std::string_view deprel) {
  return deprel.substr(0, 5) == "nsubj" || deprel == "obj" ||
         deprel == "dobj" || deprel == "iobj";
}

// ---------------------------------------------------------------------------
// Structure validation.

// Exactly one root, heads in range and not self-referential, and the head
// links form a tree (checked with union-find: every non-root edge must join
// two distinct components).
inline void validate_sentence(const Sentence& s) {
  const int n = static_cast<int>(s.tokens.size());
  if (n == 0) throw StructuralError("empty sentence");
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.index != i) throw StructuralError("token index out of order");
    if (t.head == kRootHead) {
      ++roots;
      continue;
    }
    if (t.head < 0 || t.head >= n) {
      throw StructuralError("token head out of range");
    }
    if (t.head == i) throw StructuralError("token is its own head");
    int a = find(i), b = find(t.head);
    if (a == b) throw StructuralError("dependency links contain a cycle");
    parent[a] = b;
  }
  if (roots != 1) {
    throw StructuralError("sentence must have exactly one root token, found " +
                          std::to_string(roots));
  }
}

inline void validate_document(const Document& doc) {
  int offset = -1;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const Sentence& s = doc.sentences[i];
    if (s.index != static_cast<int>(i)) {
      throw StructuralError("sentence index out of order");
    }
    validate_sentence(s);
    for (const Token& t : s.tokens) {
      if (t.char_start >= t.char_end || t.char_start <= offset) {
        throw StructuralError("token offsets must be increasing");
      }
      offset = t.char_start;
    }
  }
  std::size_t len = utf8_length(doc.text);
  if (!doc.sentences.empty()) {
    const Token& last = doc.sentences.back().tokens.back();
    if (static_cast<std::size_t>(last.char_end) > len) {
      throw StructuralError("token offsets exceed document text");
    }
  }
}

// ---------------------------------------------------------------------------
// Flat token positions and span text.

inline int flat_index(const Document& doc, TokenRef r) {
  int base = 0;
  for (int s = 0; s < r.sentence; ++s) {
    base += static_cast<int>(doc.sentences[s].tokens.size());
  }
  return base + r.token;
}

inline int flat_begin(const Document& doc, const TokenSpan& s) {
  return flat_index(doc, {s.sentence, s.begin});
}

inline int flat_end(const Document& doc, const TokenSpan& s) {
  return flat_index(doc, {s.sentence, s.end - 1}) + 1;
}

inline const Token& token_at(const Document& doc, TokenRef r) {
  return doc.sentences.at(r.sentence).tokens.at(r.token);
}

inline int span_char_start(const Document& doc, const TokenSpan& s) {
  return token_at(doc, {s.sentence, s.begin}).char_start;
}

inline int span_char_end(const Document& doc, const TokenSpan& s) {
  return token_at(doc, {s.sentence, s.end - 1}).char_end;
}

inline std::string span_text(const Document& doc, const TokenSpan& s) {
  int a = span_char_start(doc, s);
  int b = span_char_end(doc, s);
  return utf8_substr(doc.text, static_cast<std::size_t>(a),
                     static_cast<std::size_t>(b - a));
}

inline std::string mention_text(const Document& doc, const Mention& m) {
  return span_text(doc, span_of(m));
}

// ---------------------------------------------------------------------------
// Span and tree operations.

// The unique span token whose head lies outside the span (or at root); when
// several qualify the rightmost wins, English names being head-final.
inline int mention_head(const Mention& m, const Sentence& s) {
  if (m.begin < 0 || m.end > static_cast<int>(s.tokens.size()) ||
      m.begin >= m.end) {
    throw std::invalid_argument("mention span out of range");
  }
  int found = -1;
  for (int i = m.begin; i < m.end; ++i) {
    int h = s.tokens[i].head;
    if (h == kRootHead || h < m.begin || h >= m.end) found = i;
  }
  if (found < 0) {
    throw StructuralError("no span token is headed outside the span");
  }
  return found;
}

// Tokens strictly between two non-overlapping spans in the document's flat
// token sequence; adjacent spans give 0.
inline int token_distance(const Document& doc, const TokenSpan& a,
                          const TokenSpan& b) {
  int ab = flat_begin(doc, a), ae = flat_end(doc, a);
  int bb = flat_begin(doc, b), be = flat_end(doc, b);
  if (ab < be && bb < ae) {
    throw std::invalid_argument("token_distance requires disjoint spans");
  }
  return ab < bb ? bb - ae : ab - be;
}

inline int depth_to_root(const Sentence& s, int token) {
  int depth = 0;
  int cur = token;
  while (s.tokens.at(cur).head != kRootHead) {
    cur = s.tokens[cur].head;
    ++depth;
    if (depth > static_cast<int>(s.tokens.size())) {
      throw StructuralError("dependency links contain a cycle");
    }
  }
  return depth;
}

inline int tree_distance(const Sentence& s, int a, int b) {
  if (a == b) return 0;
  std::vector<int> up(s.tokens.size(), -1);
  int d = 0;
  for (int cur = a;; cur = s.tokens.at(cur).head) {
    up[cur] = d++;
    if (s.tokens[cur].head == kRootHead) break;
  }
  d = 0;
  for (int cur = b;; cur = s.tokens.at(cur).head) {
    if (up[cur] >= 0) return up[cur] + d;
    ++d;
    if (s.tokens[cur].head == kRootHead) break;
  }
  throw StructuralError("tokens do not share a root");
}

// Shortest undirected path in the dependency tree when both tokens share a
// sentence. Across sentences: distance of each token to its root plus one
// bridge per sentence boundary crossed, which keeps cross-sentence candidates
// systematically farther.
inline int syntactic_distance(const Document& doc, TokenRef a, TokenRef b) {
  if (a.sentence == b.sentence) {
    return tree_distance(doc.sentences.at(a.sentence), a.token, b.token);
  }
  int bridges = a.sentence < b.sentence ? b.sentence - a.sentence
                                        : a.sentence - b.sentence;
  return depth_to_root(doc.sentences.at(a.sentence), a.token) +
         depth_to_root(doc.sentences.at(b.sentence), b.token) + bridges;
}

// ---------------------------------------------------------------------------
// Enum names shared by serialization and reports.

inline std::string_view gender_name(Gender g) {
  switch (g) {
    case Gender::Masculine: return "M";
    case Gender::Feminine: return "F";
    default: return "U";
  }
}

inline std::optional<Gender> gender_from_name(std::string_view s) {
  if (s == "M") return Gender::Masculine;
  if (s == "F") return Gender::Feminine;
  if (s == "U") return Gender::Unknown;
  return std::nullopt;
}

}  // namespace apc
