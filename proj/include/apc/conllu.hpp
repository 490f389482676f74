#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apc/corpus.hpp"
#include "apc/error.hpp"
#include "apc/text.hpp"

// Annotated-corpus file format, CoNLL-U style:
//
//   # newdoc id = <document id>
//   # url = <source page url>            (optional)
//   # page_title = <source page title>   (optional)
//   1<TAB>In<TAB>_<TAB>ADP<TAB>_<TAB>_<TAB>4<TAB>case<TAB>_<TAB>_
//   ...
//
// Ten tab-separated columns per token (ID FORM LEMMA UPOS XPOS FEATS HEAD
// DEPREL DEPS MISC), a blank line between sentences. MISC carries an NER BIO
// tag as `NER=B-PERSON` and spacing as `SpaceAfter=No`. Document text is
// reconstructed from token forms and spacing; offsets count Unicode scalars.

namespace apc {

namespace detail {

struct PendingToken {
  Token token;
  std::size_t line = 0;
};

}  // namespace detail

inline std::vector<Document> parse_corpus(std::string_view bytes) {
  std::vector<Document> docs;
  std::optional<Document> doc;
  std::vector<detail::PendingToken> pending;

  auto flush_sentence = [&]() {
    if (pending.empty()) return;
    Sentence sent;
    sent.index = static_cast<int>(doc->sentences.size());
    sent.tokens.reserve(pending.size());
    for (auto& p : pending) sent.tokens.push_back(std::move(p.token));
    try {
      validate_sentence(sent);
    } catch (const StructuralError& e) {
      throw ParseError(pending.front().line, e.what());
    }
    // BIO runs become entity spans; I- must continue a matching B- run.
    std::string open_label;
    int open_begin = -1;
    auto close_run = [&](int end) {
      if (open_begin >= 0) {
        doc->entities.push_back({sent.index, open_begin, end, open_label});
      }
      open_begin = -1;
      open_label.clear();
    };
    for (int i = 0; i < static_cast<int>(sent.tokens.size()); ++i) {
      const std::string& tag = sent.tokens[i].ner;
      if (tag.size() > 2 && tag[1] == '-') {
        std::string label = tag.substr(2);
        if (tag[0] == 'B') {
          close_run(i);
          open_label = label;
          open_begin = i;
          continue;
        }
        if (tag[0] == 'I') {
          if (open_begin < 0 || label != open_label) {
            throw ParseError(pending[i].line,
                             "NER tag " + tag + " does not continue a run");
          }
          continue;
        }
      }
      if (tag != "O") {
        throw ParseError(pending[i].line, "unrecognized NER tag " + tag);
      }
      close_run(i);
    }
    close_run(static_cast<int>(sent.tokens.size()));
    doc->sentences.push_back(std::move(sent));
    pending.clear();
  };

  auto flush_document = [&]() {
    if (!doc) return;
    flush_sentence();
    // Reconstruct the snippet text and assign scalar offsets.
    int offset = 0;
    std::string text;
    for (std::size_t si = 0; si < doc->sentences.size(); ++si) {
      Sentence& sent = doc->sentences[si];
      for (std::size_t ti = 0; ti < sent.tokens.size(); ++ti) {
        Token& t = sent.tokens[ti];
        t.char_start = offset;
        offset += static_cast<int>(utf8_length(t.text));
        t.char_end = offset;
        text += t.text;
        bool last_of_doc = si + 1 == doc->sentences.size() &&
                           ti + 1 == sent.tokens.size();
        if (!last_of_doc && t.space_after) {
          text += ' ';
          ++offset;
        }
      }
    }
    doc->text = std::move(text);
    docs.push_back(std::move(*doc));
    doc.reset();
  };

  std::size_t line_no = 0;
  for (std::string_view raw : split(bytes, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (doc) flush_sentence();
      continue;
    }
    if (line[0] == '#') {
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      auto key_value = [&](std::string_view key) -> std::optional<std::string> {
        if (body.size() < key.size() || body.substr(0, key.size()) != key) {
          return std::nullopt;
        }
        std::string_view rest = body.substr(key.size());
        std::size_t eq = rest.find('=');
        if (eq == std::string_view::npos) return std::nullopt;
        std::string_view head = rest.substr(0, eq);
        for (char c : head) {
          if (c != ' ') return std::nullopt;
        }
        std::string_view value = rest.substr(eq + 1);
        while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
        return std::string(value);
      };
      if (auto id = key_value("newdoc id")) {
        flush_document();
        doc.emplace();
        doc->id = *id;
        continue;
      }
      if (!doc) {
        throw ParseError(line_no, "metadata comment before any '# newdoc'");
      }
      if (auto url = key_value("url")) {
        doc->url = *url;
      } else if (auto title = key_value("page_title")) {
        doc->page_title = *title;
      }
      continue;  // unknown comments are ignored
    }
    if (!doc) throw ParseError(line_no, "token line before any '# newdoc'");
    auto cols = split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(line_no, "expected 10 tab-separated columns, got " +
                                    std::to_string(cols.size()));
    }
    auto id = detail::parse_int(cols[0]);
    if (!id) {
      throw ParseError(line_no, "non-integer token ID '" +
                                    std::string(cols[0]) + "'");
    }
    if (*id != static_cast<int>(pending.size()) + 1) {
      throw ParseError(line_no, "token ID " + std::to_string(*id) +
                                    " out of sequence");
    }
    Token t;
    t.index = *id - 1;
    t.text = std::string(cols[1]);
    t.pos = std::string(cols[3]);
    auto head = detail::parse_int(cols[6]);
    if (!head) {
      throw ParseError(line_no,
                       "non-integer HEAD '" + std::string(cols[6]) + "'");
    }
    t.head = *head == 0 ? kRootHead : *head - 1;
    t.deprel = std::string(cols[7]);
    if (cols[9] != "_") {
      for (std::string_view part : split(cols[9], '|')) {
        if (part.substr(0, 4) == "NER=") {
          t.ner = std::string(part.substr(4));
        } else if (part == "SpaceAfter=No") {
          t.space_after = false;
        }
      }
    }
    pending.push_back({std::move(t), line_no});
  }
  flush_document();
  return docs;
}

inline std::string write_corpus(const std::vector<Document>& docs) {
  std::string out;
  for (const Document& doc : docs) {
    out += "# newdoc id = " + doc.id + "\n";
    if (!doc.url.empty()) out += "# url = " + doc.url + "\n";
    if (!doc.page_title.empty()) {
      out += "# page_title = " + doc.page_title + "\n";
    }
    for (const Sentence& sent : doc.sentences) {
      for (const Token& t : sent.tokens) {
        std::string misc;
        if (t.ner != "O" && !t.ner.empty()) misc = "NER=" + t.ner;
        if (!t.space_after) {
          if (!misc.empty()) misc += '|';
          misc += "SpaceAfter=No";
        }
        if (misc.empty()) misc = "_";
        out += std::to_string(t.index + 1);
        out += '\t';
        out += t.text;
        out += "\t_\t";
        out += t.pos.empty() ? "_" : t.pos;
        out += "\t_\t_\t";
        out += std::to_string(t.head == kRootHead ? 0 : t.head + 1);
        out += '\t';
        out += t.deprel.empty() ? "_" : t.deprel;
        out += "\t_\t";
        out += misc;
        out += '\n';
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace apc
