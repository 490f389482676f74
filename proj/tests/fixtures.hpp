#pragma once

// Hand-annotated documents and synthetic data generators shared by the test
// suites. Fixture sentences are written in the corpus dialect: UD-style
// coarse tags and relations, head-final proper-name compounds, NER BIO tags
// in MISC.

#include <cstdint>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "apc/attention.hpp"
#include "apc/conllu.hpp"
#include "apc/corpus.hpp"
#include "apc/records.hpp"

namespace fixtures {

struct Tok {
  const char* form;
  const char* pos;
  int head;  // 1-based, 0 = root
  const char* rel;
  const char* ner = "O";
};

inline std::string conllu_sentence(const std::vector<Tok>& toks) {
  std::string out;
  int id = 1;
  for (const Tok& t : toks) {
    out += std::to_string(id++);
    out += '\t';
    out += t.form;
    out += "\t_\t";
    out += t.pos;
    out += "\t_\t_\t";
    out += std::to_string(t.head);
    out += '\t';
    out += t.rel;
    out += "\t_\t";
    out += std::string(t.ner) == "O" ? "_" : std::string("NER=") + t.ner;
    out += '\n';
  }
  out += '\n';
  return out;
}

inline std::string conllu_doc(const std::string& id, const std::string& url,
                              const std::string& title,
                              const std::vector<std::vector<Tok>>& sentences) {
  std::string out = "# newdoc id = " + id + "\n";
  if (!url.empty()) out += "# url = " + url + "\n";
  if (!title.empty()) out += "# page_title = " + title + "\n";
  for (const auto& s : sentences) out += conllu_sentence(s);
  return out;
}

inline apc::Document parse_one(const std::string& conllu) {
  auto docs = apc::parse_corpus(conllu);
  if (docs.size() != 1) throw std::runtime_error("expected one document");
  return std::move(docs.front());
}

// ---------------------------------------------------------------------------
// The extraction pattern suite: one positive per pattern plus one violation
// per constraint.

// (Name, Name, Pronoun), all in one sentence.
inline apc::Document doc_final_pro() {
  return parse_one(conllu_doc(
      "final-pos", "http://pages.test/keller", "",
      {{{"Keller", "PROPN", 2, "nsubj", "B-PERSON"},
        {"criticizes", "VERB", 0, "root"},
        {"Moreau", "PROPN", 5, "nmod:poss", "B-PERSON"},
        {"'s", "PART", 3, "case"},
        {"nepotism", "NOUN", 2, "obj"},
        {":", "PUNCT", 2, "punct"},
        {"county", "NOUN", 9, "compound"},
        {"ethics", "NOUN", 9, "compound"},
        {"rules", "NOUN", 11, "nsubj"},
        {"never", "ADV", 11, "advmod"},
        {"applied", "VERB", 2, "parataxis"},
        {"to", "ADP", 13, "case"},
        {"him", "PRON", 11, "obl"},
        {".", "PUNCT", 2, "punct"}}}));
}

// (Name, Pronoun, Name) with a possessive pronoun in an initial
// prepositional phrase, first name in the directly preceding sentence.
inline apc::Document doc_medial_pro() {
  return parse_one(conllu_doc(
      "medial-pos", "http://pages.test/okafor", "",
      {{{"Okafor", "PROPN", 2, "nsubj", "B-PERSON"},
        {"founded", "VERB", 0, "root"},
        {"a", "DET", 5, "det"},
        {"small", "ADJ", 5, "amod"},
        {"observatory", "NOUN", 2, "obj"},
        {".", "PUNCT", 2, "punct"}},
       {{"After", "ADP", 3, "case"},
        {"his", "PRON", 3, "nmod:poss"},
        {"death", "NOUN", 10, "obl"},
        {"in", "ADP", 5, "case"},
        {"1902", "NUM", 3, "nmod"},
        {",", "PUNCT", 10, "punct"},
        {"Daniel", "PROPN", 9, "compound", "B-PERSON"},
        {"R.", "PROPN", 9, "compound", "I-PERSON"},
        {"Hale", "PROPN", 10, "nsubj", "I-PERSON"},
        {"bought", "VERB", 0, "root"},
        {"the", "DET", 12, "det"},
        {"site", "NOUN", 10, "obj"},
        {".", "PUNCT", 10, "punct"}}}));
}

// (Pronoun, Name, Name) with the pronoun in an initial subordinate clause.
inline apc::Document doc_initial_pro() {
  return parse_one(conllu_doc(
      "initial-pos", "http://pages.test/castellano", "",
      {{{"Believing", "VERB", 10, "advcl"},
        {"that", "SCONJ", 5, "mark"},
        {"he", "PRON", 5, "nsubj"},
        {"was", "AUX", 5, "cop"},
        {"ready", "ADJ", 1, "ccomp"},
        {"to", "PART", 7, "mark"},
        {"lead", "VERB", 5, "xcomp"},
        {",", "PUNCT", 10, "punct"},
        {"Castellano", "PROPN", 10, "nsubj", "B-PERSON"},
        {"promoted", "VERB", 0, "root"},
        {"Iverson", "PROPN", 10, "obj", "B-PERSON"},
        {"to", "ADP", 13, "case"},
        {"captain", "NOUN", 10, "obl"},
        {".", "PUNCT", 10, "punct"}}}));
}

// Violation: a same-gender pronoun intrudes between the two names.
inline apc::Document doc_intruder() {
  return parse_one(conllu_doc(
      "viol-intruder", "", "",
      {{{"Keller", "PROPN", 2, "nsubj", "B-PERSON"},
        {"gave", "VERB", 0, "root"},
        {"him", "PRON", 2, "iobj"},
        {"a", "DET", 5, "det"},
        {"warning", "NOUN", 2, "obj"},
        {"before", "SCONJ", 8, "mark"},
        {"Moreau", "PROPN", 8, "nsubj", "B-PERSON"},
        {"resigned", "VERB", 2, "advcl"},
        {",", "PUNCT", 12, "punct"},
        {"but", "CCONJ", 12, "cc"},
        {"he", "PRON", 12, "nsubj"},
        {"stayed", "VERB", 2, "conj"},
        {".", "PUNCT", 2, "punct"}}}));
}

// Violation: the pronoun appears two sentences after the names.
inline apc::Document doc_sentence_gap() {
  return parse_one(conllu_doc(
      "viol-gap", "", "",
      {{{"Keller", "PROPN", 2, "nsubj", "B-PERSON"},
        {"praised", "VERB", 0, "root"},
        {"Moreau", "PROPN", 2, "obj", "B-PERSON"},
        {".", "PUNCT", 2, "punct"}},
       {{"The", "DET", 2, "det"},
        {"report", "NOUN", 4, "nsubj"},
        {"was", "AUX", 4, "cop"},
        {"long", "ADJ", 0, "root"},
        {".", "PUNCT", 4, "punct"}},
       {{"Later", "ADV", 3, "advmod"},
        {"he", "PRON", 3, "nsubj"},
        {"resigned", "VERB", 0, "root"},
        {".", "PUNCT", 3, "punct"}}}));
}

// Violation: medial shape but the pronoun is a plain main-clause subject.
inline apc::Document doc_not_fronted() {
  return parse_one(conllu_doc(
      "viol-fronting", "", "",
      {{{"Okafor", "PROPN", 2, "nsubj", "B-PERSON"},
        {"founded", "VERB", 0, "root"},
        {"a", "DET", 5, "det"},
        {"small", "ADJ", 5, "amod"},
        {"observatory", "NOUN", 2, "obj"},
        {".", "PUNCT", 2, "punct"}},
       {{"He", "PRON", 2, "nsubj"},
        {"sold", "VERB", 0, "root"},
        {"the", "DET", 4, "det"},
        {"site", "NOUN", 2, "obj"},
        {"to", "ADP", 8, "case"},
        {"Daniel", "PROPN", 8, "compound", "B-PERSON"},
        {"R.", "PROPN", 8, "compound", "I-PERSON"},
        {"Hale", "PROPN", 2, "obl", "I-PERSON"},
        {".", "PUNCT", 2, "punct"}}}));
}

// Violation: the two names share a head token string.
inline apc::Document doc_same_head() {
  return parse_one(conllu_doc(
      "viol-head", "", "",
      {{{"Mara", "PROPN", 2, "compound", "B-PERSON"},
        {"Voss", "PROPN", 3, "nsubj", "I-PERSON"},
        {"met", "VERB", 0, "root"},
        {"Voss", "PROPN", 3, "obj", "B-PERSON"},
        {"at", "ADP", 7, "case"},
        {"the", "DET", 7, "det"},
        {"station", "NOUN", 3, "obl"},
        {",", "PUNCT", 12, "punct"},
        {"and", "CCONJ", 12, "cc"},
        {"later", "ADV", 12, "advmod"},
        {"she", "PRON", 12, "nsubj"},
        {"smiled", "VERB", 3, "conj"},
        {".", "PUNCT", 3, "punct"}}}));
}

// Violation: only a reflexive pronoun is present.
inline apc::Document doc_reflexive() {
  return parse_one(conllu_doc(
      "viol-reflexive", "", "",
      {{{"Keller", "PROPN", 2, "nsubj", "B-PERSON"},
        {"blamed", "VERB", 0, "root"},
        {"himself", "PRON", 2, "obj"},
        {"after", "SCONJ", 6, "mark"},
        {"Moreau", "PROPN", 6, "nsubj", "B-PERSON"},
        {"resigned", "VERB", 2, "advcl"},
        {".", "PUNCT", 2, "punct"}}}));
}

// Violation: initial shape but the names sit in different sentences.
inline apc::Document doc_split_names() {
  return parse_one(conllu_doc(
      "viol-split", "", "",
      {{{"Fearing", "VERB", 8, "advcl"},
        {"that", "SCONJ", 5, "mark"},
        {"she", "PRON", 5, "nsubj"},
        {"would", "AUX", 5, "aux"},
        {"lose", "VERB", 1, "ccomp"},
        {",", "PUNCT", 8, "punct"},
        {"Mara", "PROPN", 8, "nsubj", "B-PERSON"},
        {"hesitated", "VERB", 0, "root"},
        {".", "PUNCT", 8, "punct"}},
       {{"Priya", "PROPN", 2, "nsubj", "B-PERSON"},
        {"watched", "VERB", 0, "root"},
        {".", "PUNCT", 2, "punct"}}}));
}

// Violation: the only pronoun is neuter.
inline apc::Document doc_neuter() {
  return parse_one(conllu_doc(
      "viol-neuter", "", "",
      {{{"The", "DET", 2, "det"},
        {"committee", "NOUN", 3, "nsubj"},
        {"met", "VERB", 0, "root"},
        {"Keller", "PROPN", 3, "obj", "B-PERSON"},
        {"and", "CCONJ", 6, "cc"},
        {"Moreau", "PROPN", 4, "conj", "B-PERSON"},
        {",", "PUNCT", 10, "punct"},
        {"and", "CCONJ", 10, "cc"},
        {"it", "PRON", 10, "nsubj"},
        {"adjourned", "VERB", 3, "conj"},
        {".", "PUNCT", 3, "punct"}}}));
}

// Positive: a coordinated (plural) person span between the names is
// number-incompatible with a singular pronoun, so it does not intrude.
inline apc::Document doc_plural_between() {
  return parse_one(conllu_doc(
      "pos-plural", "", "",
      {{{"Keller", "PROPN", 2, "nsubj", "B-PERSON"},
        {"consulted", "VERB", 0, "root"},
        {"Ruiz", "PROPN", 2, "obj", "B-PERSON"},
        {"and", "CCONJ", 5, "cc", "I-PERSON"},
        {"Chen", "PROPN", 3, "conj", "I-PERSON"},
        {"before", "SCONJ", 8, "mark"},
        {"Moreau", "PROPN", 8, "nsubj", "B-PERSON"},
        {"arrived", "VERB", 2, "advcl"},
        {",", "PUNCT", 13, "punct"},
        {"and", "CCONJ", 13, "cc"},
        {"then", "ADV", 13, "advmod"},
        {"he", "PRON", 13, "nsubj"},
        {"spoke", "VERB", 2, "conj"},
        {".", "PUNCT", 2, "punct"}}}));
}

// Positive: an organization between the names is the wrong entity type to
// intrude.
inline apc::Document doc_org_between() {
  return parse_one(conllu_doc(
      "pos-org", "", "",
      {{{"Keller", "PROPN", 2, "nsubj", "B-PERSON"},
        {"left", "VERB", 0, "root"},
        {"Volta", "PROPN", 4, "compound", "B-ORG"},
        {"Labs", "PROPN", 2, "obj", "I-ORG"},
        {"after", "SCONJ", 7, "mark"},
        {"Moreau", "PROPN", 7, "nsubj", "B-PERSON"},
        {"resigned", "VERB", 2, "advcl"},
        {",", "PUNCT", 11, "punct"},
        {"and", "CCONJ", 11, "cc"},
        {"he", "PRON", 11, "nsubj"},
        {"moved", "VERB", 2, "conj"},
        {"away", "ADV", 11, "advmod"},
        {".", "PUNCT", 2, "punct"}}}));
}

// Violation: medial shape with the first name two sentences back.
inline apc::Document doc_medial_gap() {
  return parse_one(conllu_doc(
      "viol-medial-gap", "", "",
      {{{"Okafor", "PROPN", 2, "nsubj", "B-PERSON"},
        {"founded", "VERB", 0, "root"},
        {"a", "DET", 5, "det"},
        {"small", "ADJ", 5, "amod"},
        {"observatory", "NOUN", 2, "obj"},
        {".", "PUNCT", 2, "punct"}},
       {{"The", "DET", 2, "det"},
        {"site", "NOUN", 3, "nsubj"},
        {"grew", "VERB", 0, "root"},
        {".", "PUNCT", 3, "punct"}},
       {{"After", "ADP", 3, "case"},
        {"his", "PRON", 3, "nmod:poss"},
        {"death", "NOUN", 8, "obl"},
        {",", "PUNCT", 8, "punct"},
        {"Daniel", "PROPN", 7, "compound", "B-PERSON"},
        {"R.", "PROPN", 7, "compound", "I-PERSON"},
        {"Hale", "PROPN", 8, "nsubj", "I-PERSON"},
        {"bought", "VERB", 0, "root"},
        {"it", "PRON", 8, "obj"},
        {".", "PUNCT", 8, "punct"}}}));
}

// A two-token name governed by its final token, with the page title
// overlapping it; used for head, alignment and URL-cue tests.
inline apc::Document doc_rink() {
  return parse_one(conllu_doc(
      "rink", "http://pages.test/noor_alvarez", "Noor Alvarez",
      {{{"In", "ADP", 2, "case"},
        {"May", "PROPN", 4, "obl"},
        {"Okafor", "PROPN", 4, "nsubj", "B-PERSON"},
        {"joined", "VERB", 0, "root"},
        {"Noor", "PROPN", 6, "compound", "B-PERSON"},
        {"Alvarez", "PROPN", 8, "nmod:poss", "I-PERSON"},
        {"'s", "PART", 6, "case"},
        {"rink", "NOUN", 4, "obj"},
        {"before", "SCONJ", 11, "mark"},
        {"she", "PRON", 11, "nsubj"},
        {"moved", "VERB", 4, "advcl"},
        {".", "PUNCT", 4, "punct"}}}));
}

struct PatternCase {
  apc::Document doc;
  int expected_candidates;
  const char* expected_pattern;  // nullptr when no candidate is expected
};

// The full constraint suite for the extraction tests.
inline std::vector<PatternCase> pattern_suite() {
  std::vector<PatternCase> cases;
  cases.push_back({doc_final_pro(), 1, "FinalPro"});
  cases.push_back({doc_medial_pro(), 1, "MedialPro"});
  cases.push_back({doc_initial_pro(), 1, "InitialPro"});
  cases.push_back({doc_intruder(), 0, nullptr});
  cases.push_back({doc_sentence_gap(), 0, nullptr});
  cases.push_back({doc_not_fronted(), 0, nullptr});
  cases.push_back({doc_same_head(), 0, nullptr});
  cases.push_back({doc_reflexive(), 0, nullptr});
  cases.push_back({doc_split_names(), 0, nullptr});
  cases.push_back({doc_neuter(), 0, nullptr});
  cases.push_back({doc_plural_between(), 2, "FinalPro"});
  cases.push_back({doc_org_between(), 1, "FinalPro"});
  cases.push_back({doc_medial_gap(), 0, nullptr});
  return cases;
}

// ---------------------------------------------------------------------------
// Random sentence trees (Pruefer sequences) for distance-metric checks.

inline apc::Sentence random_tree_sentence(int n, std::mt19937_64& rng) {
  std::vector<int> parent(n, apc::kRootHead);
  if (n > 1) {
    // Decode a random Pruefer sequence into an undirected labeled tree, then
    // root it at node 0 by BFS.
    std::vector<int> prufer(n - 2);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int& v : prufer) v = pick(rng);
    std::vector<int> degree(n, 1);
    for (int v : prufer) ++degree[v];
    std::vector<std::vector<int>> adj(n);
    std::vector<int> leaves;
    for (int v = 0; v < n; ++v) {
      if (degree[v] == 1) leaves.push_back(v);
    }
    std::sort(leaves.begin(), leaves.end(), std::greater<int>());
    for (int v : prufer) {
      int leaf = leaves.back();
      leaves.pop_back();
      adj[leaf].push_back(v);
      adj[v].push_back(leaf);
      if (--degree[v] == 1) {
        leaves.push_back(v);
        std::sort(leaves.begin(), leaves.end(), std::greater<int>());
      }
    }
    int a = leaves[leaves.size() - 1];
    int b = leaves[leaves.size() - 2];
    adj[a].push_back(b);
    adj[b].push_back(a);
    std::vector<bool> seen(n, false);
    std::vector<int> queue = {0};
    seen[0] = true;
    while (!queue.empty()) {
      int cur = queue.back();
      queue.pop_back();
      for (int next : adj[cur]) {
        if (!seen[next]) {
          seen[next] = true;
          parent[next] = cur;
          queue.push_back(next);
        }
      }
    }
  }
  apc::Sentence s;
  s.index = 0;
  int offset = 0;
  for (int i = 0; i < n; ++i) {
    apc::Token t;
    t.index = i;
    t.text = "w" + std::to_string(i);
    t.pos = "NOUN";
    t.head = parent[i];
    t.deprel = parent[i] == apc::kRootHead ? "root" : "dep";
    t.char_start = offset;
    offset += static_cast<int>(t.text.size());
    t.char_end = offset;
    ++offset;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

// Breadth-first-search oracle over the undirected edge list.
inline int bfs_distance(const apc::Sentence& s, int a, int b) {
  int n = static_cast<int>(s.tokens.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    if (s.tokens[i].head != apc::kRootHead) {
      adj[i].push_back(s.tokens[i].head);
      adj[s.tokens[i].head].push_back(i);
    }
  }
  std::vector<int> dist(n, -1);
  std::vector<int> frontier = {a};
  dist[a] = 0;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int cur : frontier) {
      for (int adj_node : adj[cur]) {
        if (dist[adj_node] < 0) {
          dist[adj_node] = dist[cur] + 1;
          next.push_back(adj_node);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist[b];
}

// ---------------------------------------------------------------------------
// Randomized resolver fixtures: one- or two-clause sentences with two to
// four singleton person names in varied grammatical roles and one gendered
// pronoun.

struct ResolverFixture {
  apc::Document doc;
  apc::Mention pronoun;
  std::vector<apc::Mention> candidates;
};

inline ResolverFixture random_resolver_fixture(std::mt19937_64& rng) {
  static const char* kNames[] = {"Keller", "Moreau", "Okafor", "Hale",
                                 "Ruiz",   "Chen",   "Priya",  "Voss"};
  std::uniform_int_distribution<int> n_names_pick(2, 4);
  std::uniform_int_distribution<int> coin(0, 1);
  int n_names = n_names_pick(rng);

  // Clause 1: N1 <verb> N2 [near N3 [with N4]]; clause 2 holds the pronoun
  // in a random role.
  std::vector<Tok> toks;
  std::vector<int> name_positions;
  auto add = [&](Tok t) { toks.push_back(t); };
  add({kNames[0], "PROPN", 2, "nsubj", "B-PERSON"});
  name_positions.push_back(0);
  add({"visited", "VERB", 0, "root"});
  add({kNames[1], "PROPN", 2, "obj", "B-PERSON"});
  name_positions.push_back(2);
  if (n_names >= 3) {
    add({"near", "ADP", 5, "case"});
    add({kNames[2], "PROPN", 2, "obl", "B-PERSON"});
    name_positions.push_back(4);
  }
  if (n_names >= 4) {
    int head = static_cast<int>(toks.size()) + 2;
    add({"with", "ADP", head, "case"});
    add({kNames[3], "PROPN", 2, "obl", "B-PERSON"});
    name_positions.push_back(head - 1);
  }
  int verb2 = 0;
  {
    add({"and", "CCONJ", 0, "cc"});
    int cc = static_cast<int>(toks.size()) - 1;
    std::uniform_int_distribution<int> role_pick(0, 3);
    int role = role_pick(rng);
    bool fem = coin(rng) == 1;
    switch (role) {
      case 0: {  // subject pronoun
        add({fem ? "she" : "he", "PRON", cc + 3, "nsubj"});
        add({"smiled", "VERB", 2, "conj"});
        verb2 = cc + 2;
        break;
      }
      case 1: {  // direct-object pronoun
        add({"people", "NOUN", cc + 3, "nsubj"});
        add({"trusted", "VERB", 2, "conj"});
        add({fem ? "her" : "him", "PRON", cc + 3, "obj"});
        verb2 = cc + 2;
        break;
      }
      case 2: {  // possessive pronoun
        add({fem ? "her" : "his", "PRON", cc + 3, "nmod:poss"});
        add({"plan", "NOUN", cc + 4, "nsubj"});
        add({"failed", "VERB", 2, "conj"});
        verb2 = cc + 3;
        break;
      }
      default: {  // oblique pronoun
        add({"luck", "NOUN", cc + 3, "nsubj"});
        add({"stayed", "VERB", 2, "conj"});
        add({"with", "ADP", cc + 5, "case"});
        add({fem ? "her" : "him", "PRON", cc + 3, "obl"});
        verb2 = cc + 2;
        break;
      }
    }
    toks[static_cast<std::size_t>(cc)].head = verb2 + 1;
  }
  add({".", "PUNCT", 2, "punct"});

  std::uniform_int_distribution<int> title_pick(0, 2);
  std::string title;
  int tp = title_pick(rng);
  if (tp == 0) {
    title = kNames[static_cast<std::size_t>(
        std::uniform_int_distribution<int>(0, n_names - 1)(rng))];
  } else if (tp == 1) {
    title = "Quiet Harbor";  // overlaps no candidate
  }
  ResolverFixture fx{parse_one(conllu_doc("rand", "http://pages.test/rand",
                                          title, {toks})),
                     {},
                     {}};
  for (const apc::Mention& m : apc::find_mentions(fx.doc)) {
    if (m.kind == apc::MentionKind::Pronoun) {
      fx.pronoun = m;
    } else {
      fx.candidates.push_back(m);
    }
  }
  return fx;
}

// ---------------------------------------------------------------------------
// Synthetic end-to-end corpus. Each document yields exactly one candidate
// context. Gold labels are built so that role parallelism is right about 80%
// of the time while surface order carries no signal.

struct SyntheticCorpus {
  std::string conllu;
  std::string labels_tsv;  // rater labels keyed by `<doc>-0`
  int n_docs = 0;
};

inline SyntheticCorpus synthetic_corpus(int n_docs, std::uint64_t seed) {
  static const char* kSurnames[] = {
      "Keller", "Moreau", "Okafor", "Hale",   "Ruiz",  "Chen",
      "Priya",  "Voss",   "Iverson", "Castellano", "Alvarez", "Novak",
      "Farkas", "Diallo", "Sato",   "Lindgren"};
  constexpr int kNameCount = 16;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> name_pick(0, kNameCount - 1);
  std::uniform_int_distribution<int> percent(0, 99);

  SyntheticCorpus out;
  out.n_docs = n_docs;
  std::string labels = "ID\tR1\tR2\tR3\n";
  for (int d = 0; d < n_docs; ++d) {
    std::string id = "syn" + std::to_string(d);
    // A few shared URLs so splitting has real groups to keep together.
    std::string url = "http://pages.test/" +
                      (d % 7 == 3 ? "shared" + std::to_string(d / 14)
                                  : "page" + std::to_string(d));
    int a_idx = name_pick(rng);
    int b_idx = name_pick(rng);
    while (b_idx == a_idx) b_idx = name_pick(rng);
    std::string name_a = kSurnames[a_idx];
    std::string name_b = kSurnames[b_idx];
    bool fem = percent(rng) < 45;
    bool title_match = percent(rng) < 50;
    std::string title = title_match ? name_a : "Harbor Review";

    int shape = percent(rng);
    std::vector<std::vector<Tok>> sentences;
    bool parallel_gold = percent(rng) < 80;
    bool gold_is_a;
    if (shape < 40) {
      // Final pattern, subject pronoun: parallelism favors the subject (A).
      sentences = {{{name_a.c_str(), "PROPN", 2, "nsubj", "B-PERSON"},
                    {"praised", "VERB", 0, "root"},
                    {name_b.c_str(), "PROPN", 2, "obj", "B-PERSON"},
                    {".", "PUNCT", 2, "punct"}},
                   {{"Then", "ADV", 3, "advmod"},
                    {fem ? "she" : "he", "PRON", 3, "nsubj"},
                    {"won", "VERB", 0, "root"},
                    {"the", "DET", 5, "det"},
                    {"match", "NOUN", 3, "obj"},
                    {".", "PUNCT", 3, "punct"}}};
      gold_is_a = parallel_gold;
    } else if (shape < 80) {
      // Final pattern, object pronoun: parallelism favors the object (B).
      sentences = {{{name_a.c_str(), "PROPN", 2, "nsubj", "B-PERSON"},
                    {"praised", "VERB", 0, "root"},
                    {name_b.c_str(), "PROPN", 2, "obj", "B-PERSON"},
                    {".", "PUNCT", 2, "punct"}},
                   {{"The", "DET", 2, "det"},
                    {"crowd", "NOUN", 3, "nsubj"},
                    {"cheered", "VERB", 0, "root"},
                    {fem ? "her" : "him", "PRON", 3, "obj"},
                    {".", "PUNCT", 3, "punct"}}};
      gold_is_a = !parallel_gold;
    } else if (shape < 90) {
      // Medial pattern: syntactic distance favors the second name (B).
      sentences = {{{name_a.c_str(), "PROPN", 2, "nsubj", "B-PERSON"},
                    {"founded", "VERB", 0, "root"},
                    {"the", "DET", 4, "det"},
                    {"observatory", "NOUN", 2, "obj"},
                    {".", "PUNCT", 2, "punct"}},
                   {{"After", "ADP", 3, "case"},
                    {fem ? "her" : "his", "PRON", 3, "nmod:poss"},
                    {"death", "NOUN", 6, "obl"},
                    {",", "PUNCT", 6, "punct"},
                    {name_b.c_str(), "PROPN", 6, "nsubj", "B-PERSON"},
                    {"bought", "VERB", 0, "root"},
                    {"the", "DET", 8, "det"},
                    {"site", "NOUN", 6, "obj"},
                    {".", "PUNCT", 6, "punct"}}};
      gold_is_a = !parallel_gold;
    } else {
      // Initial pattern, subject pronoun in a fronted clause: parallelism
      // favors the subject (A).
      sentences = {{{"Believing", "VERB", 7, "advcl"},
                    {"that", "SCONJ", 4, "mark"},
                    {fem ? "she" : "he", "PRON", 4, "nsubj"},
                    {"won", "VERB", 1, "ccomp"},
                    {",", "PUNCT", 7, "punct"},
                    {name_a.c_str(), "PROPN", 7, "nsubj", "B-PERSON"},
                    {"thanked", "VERB", 0, "root"},
                    {name_b.c_str(), "PROPN", 7, "obj", "B-PERSON"},
                    {".", "PUNCT", 7, "punct"}}};
      gold_is_a = parallel_gold;
    }
    out.conllu += conllu_doc(id, url, title, sentences);

    // Rater labels: mostly unanimous on gold, some 2-1, a few degenerate.
    int noise = percent(rng);
    std::string gold = gold_is_a ? "A" : "B";
    std::string other = gold_is_a ? "B" : "A";
    std::string r1 = gold, r2 = gold, r3 = gold;
    if (noise < 8) {
      r3 = other;  // 2-1 split, same consensus
    } else if (noise < 14) {
      r1 = r2 = r3 = "NEITHER";  // kept, scored as a Neither example
    } else if (noise < 18) {
      r1 = r2 = r3 = "BOTH";  // dropped by the final filter
    } else if (noise < 20) {
      r1 = "A";
      r2 = "B";
      r3 = "NEITHER";  // no consensus, dropped
    } else if (noise < 22) {
      r1 = r2 = r3 = "NOT-SURE";  // dropped
    }
    labels += id + "-0\t" + r1 + "\t" + r2 + "\t" + r3 + "\n";
  }
  out.labels_tsv = std::move(labels);
  return out;
}

// ---------------------------------------------------------------------------
// Attention record builders.

// Uniform attention everywhere except caller-set hot entries, then row
// normalization.
inline apc::AttentionRecord uniform_attention(
    const std::string& id, const std::vector<std::string>& subtokens,
    const std::vector<std::pair<int, int>>& offsets, int layers = 2,
    int heads = 2) {
  apc::AttentionRecord rec;
  rec.id = id;
  rec.subtokens = subtokens;
  rec.offsets = offsets;
  rec.n_layers = layers;
  rec.n_heads = heads;
  int n = rec.size();
  rec.weights.assign(
      static_cast<std::size_t>(layers) * heads * n * n,
      1.0 / static_cast<double>(n));
  return rec;
}

inline void normalize_rows(apc::AttentionRecord& rec) {
  int n = rec.size();
  for (int l = 0; l < rec.n_layers; ++l) {
    for (int h = 0; h < rec.n_heads; ++h) {
      for (int q = 0; q < n; ++q) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += rec.at(l, h, q, k);
        for (int k = 0; k < n; ++k) rec.at(l, h, q, k) /= sum;
      }
    }
  }
}

// Whitespace subtokenization of a snippet with scalar offsets.
inline void whitespace_subtokens(const std::string& text,
                                 std::vector<std::string>& subtokens,
                                 std::vector<std::pair<int, int>>& offsets) {
  int offset = 0;
  std::string current;
  int start = 0;
  auto flush = [&]() {
    if (!current.empty()) {
      subtokens.push_back(current);
      offsets.emplace_back(start, offset);
      current.clear();
    }
  };
  for (unsigned char c : text) {
    if (apc::utf8_continuation(c)) {
      current += static_cast<char>(c);
      continue;
    }
    if (c == ' ') {
      flush();
      ++offset;
      start = offset;
    } else {
      if (current.empty()) start = offset;
      current += static_cast<char>(c);
      ++offset;
    }
  }
  flush();
}

// ---------------------------------------------------------------------------
// Scratch directories for file-driven tests.

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("apc-tests-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
