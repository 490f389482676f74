#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apc/error.hpp"
#include "apc/extraction.hpp"
#include "apc/text.hpp"

namespace apc {

// One labeled snippet: a pronoun and two candidate names with gold pair
// labels. Offsets are scalar offsets into `text`.
struct ExampleRecord {
  std::string id;
  std::string text;
  std::string pronoun;
  int pronoun_offset = 0;
  std::string name_a;
  int a_offset = 0;
  bool a_coref = false;
  std::string name_b;
  int b_offset = 0;
  bool b_coref = false;
  std::string url;

  bool operator==(const ExampleRecord&) const = default;
};

// One extracted context awaiting annotation. Serializable carrier of a
// CandidateContext: enough surface data to curate and sample without the
// source parse.
struct CandidateRecord {
  std::string id;
  std::string doc_id;
  std::string url;
  std::string page_title;
  std::string text;
  std::string pronoun;
  int pronoun_offset = 0;
  std::string name_a;
  int a_offset = 0;
  std::string name_b;
  int b_offset = 0;
  PatternKind pattern = PatternKind::FinalPro;
  Gender gender = Gender::Unknown;
  bool page_entity = false;

  bool operator==(const CandidateRecord&) const = default;
};

using PredictionMap = std::map<std::string, std::pair<bool, bool>>;

namespace detail {

inline const std::string_view kExampleHeader =
    "ID\tText\tPronoun\tPronoun-offset\tA\tA-offset\tA-coref\tB\tB-offset\t"
    "B-coref\tURL";
inline const std::string_view kCandidateHeader =
    "ID\tDoc\tURL\tPageTitle\tText\tPronoun\tPronoun-offset\tA\tA-offset\tB\t"
    "B-offset\tPattern\tGender\tPageEntity";
inline const std::string_view kPredictionHeader = "ID\tA-coref\tB-coref";

inline bool parse_bool(std::string_view s, std::size_t line) {
  if (equals_ci(s, "TRUE")) return true;
  if (equals_ci(s, "FALSE")) return false;
  throw ParseError(line, "unknown boolean literal '" + std::string(s) + "'");
}

inline int parse_offset(std::string_view s, std::size_t line) {
  auto v = detail::parse_int(s);
  if (!v || *v < 0) {
    throw ParseError(line, "invalid offset '" + std::string(s) + "'");
  }
  return *v;
}

inline std::string_view bool_name(bool b) { return b ? "TRUE" : "FALSE"; }

// Tab-separated rows; never quoted, so cell text must stay free of tabs and
// newlines.
inline void require_clean_cell(std::string_view cell, std::string_view what,
                               std::string_view id) {
  if (cell.find('\t') != std::string_view::npos ||
      cell.find('\n') != std::string_view::npos ||
      cell.find('\r') != std::string_view::npos) {
    throw ValidationError("record " + std::string(id) + ": " +
                          std::string(what) +
                          " contains a tab or line break");
  }
}

// Segments a TSV body into (line_number, columns) rows, skipping the final
// empty line of a trailing newline.
template <typename Fn>
inline void for_each_row(std::string_view bytes, std::string_view header,
                         std::size_t n_cols, Fn&& fn) {
  std::size_t line_no = 0;
  bool saw_header = false;
  for (std::string_view raw : split(bytes, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != header) {
        throw ParseError(line_no, "unexpected header; want '" +
                                      std::string(header) + "'");
      }
      saw_header = true;
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != n_cols) {
      throw ParseError(line_no, "expected " + std::to_string(n_cols) +
                                    " columns, got " +
                                    std::to_string(cols.size()));
    }
    fn(line_no, cols);
  }
}

}  // namespace detail

// Checks that `text` reads `surface` at scalar offset `offset`.
inline void validate_offset(const ExampleRecord& r, std::string_view surface,
                            int offset, std::string_view what) {
  std::size_t len = utf8_length(surface);
  bool ok = offset >= 0 &&
            static_cast<std::size_t>(offset) + len <= utf8_length(r.text);
  if (ok) {
    ok = utf8_substr(r.text, static_cast<std::size_t>(offset), len) == surface;
  }
  if (!ok) {
    throw ValidationError("record " + r.id + ": " + std::string(what) +
                          " offset " + std::to_string(offset) +
                          " does not match surface '" + std::string(surface) +
                          "'");
  }
}

inline void validate_example(const ExampleRecord& r) {
  validate_offset(r, r.pronoun, r.pronoun_offset, "pronoun");
  validate_offset(r, r.name_a, r.a_offset, "A");
  validate_offset(r, r.name_b, r.b_offset, "B");
  if (r.a_coref && r.b_coref) {
    throw ValidationError("record " + r.id +
                          ": A-coref and B-coref are both TRUE");
  }
}

inline std::vector<ExampleRecord> read_examples(std::string_view bytes) {
  std::vector<ExampleRecord> out;
  std::set<std::string, std::less<>> seen;
  detail::for_each_row(
      bytes, detail::kExampleHeader, 11,
      [&](std::size_t line, const std::vector<std::string_view>& c) {
        if (!seen.emplace(c[0]).second) {
          throw ParseError(line, "duplicate example id '" + std::string(c[0]) +
                                     "'");
        }
        ExampleRecord r;
        r.id = std::string(c[0]);
        r.text = std::string(c[1]);
        r.pronoun = std::string(c[2]);
        r.pronoun_offset = detail::parse_offset(c[3], line);
        r.name_a = std::string(c[4]);
        r.a_offset = detail::parse_offset(c[5], line);
        r.a_coref = detail::parse_bool(c[6], line);
        r.name_b = std::string(c[7]);
        r.b_offset = detail::parse_offset(c[8], line);
        r.b_coref = detail::parse_bool(c[9], line);
        r.url = std::string(c[10]);
        validate_example(r);
        out.push_back(std::move(r));
      });
  return out;
}

inline std::string write_examples(const std::vector<ExampleRecord>& records) {
  std::string out(detail::kExampleHeader);
  out += '\n';
  for (const ExampleRecord& r : records) {
    const std::pair<std::string_view, std::string_view> cells[] = {
        {r.id, "id"},      {r.text, "text"},   {r.pronoun, "pronoun"},
        {r.name_a, "A"},   {r.name_b, "B"},    {r.url, "url"}};
    for (auto [cell, what] : cells) {
      detail::require_clean_cell(cell, what, r.id);
    }
    validate_example(r);
    out += r.id;
    out += '\t';
    out += r.text;
    out += '\t';
    out += r.pronoun;
    out += '\t';
    out += std::to_string(r.pronoun_offset);
    out += '\t';
    out += r.name_a;
    out += '\t';
    out += std::to_string(r.a_offset);
    out += '\t';
    out += detail::bool_name(r.a_coref);
    out += '\t';
    out += r.name_b;
    out += '\t';
    out += std::to_string(r.b_offset);
    out += '\t';
    out += detail::bool_name(r.b_coref);
    out += '\t';
    out += r.url;
    out += '\n';
  }
  return out;
}

inline PredictionMap read_predictions(std::string_view bytes) {
  PredictionMap out;
  detail::for_each_row(
      bytes, detail::kPredictionHeader, 3,
      [&](std::size_t line, const std::vector<std::string_view>& c) {
        std::string id(c[0]);
        bool a = detail::parse_bool(c[1], line);
        bool b = detail::parse_bool(c[2], line);
        if (!out.emplace(std::move(id), std::pair(a, b)).second) {
          throw ParseError(line,
                           "duplicate prediction id '" + std::string(c[0]) +
                               "'");
        }
      });
  return out;
}

inline std::string write_predictions(const PredictionMap& preds) {
  std::string out(detail::kPredictionHeader);
  out += '\n';
  for (const auto& [id, pair] : preds) {
    out += id;
    out += '\t';
    out += detail::bool_name(pair.first);
    out += '\t';
    out += detail::bool_name(pair.second);
    out += '\n';
  }
  return out;
}

inline std::vector<CandidateRecord> read_candidates(std::string_view bytes) {
  std::vector<CandidateRecord> out;
  detail::for_each_row(
      bytes, detail::kCandidateHeader, 14,
      [&](std::size_t line, const std::vector<std::string_view>& c) {
        CandidateRecord r;
        r.id = std::string(c[0]);
        r.doc_id = std::string(c[1]);
        r.url = std::string(c[2]);
        r.page_title = std::string(c[3]);
        r.text = std::string(c[4]);
        r.pronoun = std::string(c[5]);
        r.pronoun_offset = detail::parse_offset(c[6], line);
        r.name_a = std::string(c[7]);
        r.a_offset = detail::parse_offset(c[8], line);
        r.name_b = std::string(c[9]);
        r.b_offset = detail::parse_offset(c[10], line);
        auto pattern = pattern_from_name(c[11]);
        if (!pattern) {
          throw ParseError(line, "unknown pattern '" + std::string(c[11]) +
                                     "'");
        }
        r.pattern = *pattern;
        auto gender = gender_from_name(c[12]);
        if (!gender || *gender == Gender::Unknown) {
          throw ParseError(line, "unknown gender '" + std::string(c[12]) +
                                     "'");
        }
        r.gender = *gender;
        r.page_entity = detail::parse_bool(c[13], line);
        out.push_back(std::move(r));
      });
  return out;
}

inline std::string write_candidates(const std::vector<CandidateRecord>& recs) {
  std::string out(detail::kCandidateHeader);
  out += '\n';
  for (const CandidateRecord& r : recs) {
    detail::require_clean_cell(r.text, "text", r.id);
    out += r.id;
    out += '\t';
    out += r.doc_id;
    out += '\t';
    out += r.url;
    out += '\t';
    out += r.page_title;
    out += '\t';
    out += r.text;
    out += '\t';
    out += r.pronoun;
    out += '\t';
    out += std::to_string(r.pronoun_offset);
    out += '\t';
    out += r.name_a;
    out += '\t';
    out += std::to_string(r.a_offset);
    out += '\t';
    out += r.name_b;
    out += '\t';
    out += std::to_string(r.b_offset);
    out += '\t';
    out += pattern_name(r.pattern);
    out += '\t';
    out += gender_name(r.gender);
    out += '\t';
    out += detail::bool_name(r.page_entity);
    out += '\n';
  }
  return out;
}

// Flattens an in-memory context into its serializable record. `serial`
// disambiguates multiple contexts from one document.
inline CandidateRecord to_candidate_record(const CandidateContext& c,
                                           int serial) {
  const Document& doc = *c.doc;
  CandidateRecord r;
  r.id = doc.id + "-" + std::to_string(serial);
  r.doc_id = doc.id;
  r.url = doc.url;
  r.page_title = doc.page_title;
  r.text = doc.text;
  r.pronoun = mention_text(doc, c.pronoun);
  r.pronoun_offset = span_char_start(doc, span_of(c.pronoun));
  r.name_a = mention_text(doc, c.name_a);
  r.a_offset = span_char_start(doc, span_of(c.name_a));
  r.name_b = mention_text(doc, c.name_b);
  r.b_offset = span_char_start(doc, span_of(c.name_b));
  r.pattern = c.pattern;
  r.gender = c.gender;
  r.page_entity = c.page_entity_mentioned;
  return r;
}

}  // namespace apc
