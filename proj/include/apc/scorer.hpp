#pragma once

#include <array>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "apc/corpus.hpp"
#include "apc/error.hpp"
#include "apc/records.hpp"
#include "apc/resolvers.hpp"

namespace apc {

struct Confusion {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend Confusion operator+(Confusion a, const Confusion& b) { return a += b; }
  bool operator==(const Confusion&) const = default;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Precision, recall and F1 with the 0/0 -> 0 convention.
inline PRF f1(const Confusion& c) {
  PRF out;
  out.precision = c.tp + c.fp > 0
                      ? static_cast<double>(c.tp) /
                            static_cast<double>(c.tp + c.fp)
                      : 0.0;
  out.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) /
                                     static_cast<double>(c.tp + c.fn)
                               : 0.0;
  out.f1 = out.precision + out.recall > 0
               ? 2.0 * out.precision * out.recall /
                     (out.precision + out.recall)
               : 0.0;
  return out;
}

// Feminine-to-masculine F1 ratio; NaN marks the undefined case.
inline double bias(double masc_f1, double fem_f1) {
  if (masc_f1 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return fem_f1 / masc_f1;
}

inline double round_half_even(double value, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::nearbyint(value * scale) / scale;  // FE_TONEAREST ties to even
}

struct GenderedConfusion {
  Confusion masculine;
  Confusion feminine;
  long long missing_predictions = 0;  // coverage warning, not an error

  Confusion overall() const { return masculine + feminine; }
};

namespace detail {

inline Gender example_gender(const ExampleRecord& r) {
  Gender g = pronoun_form_gender(to_lower(r.pronoun));
  if (g == Gender::Unknown) {
    throw ValidationError("record " + r.id + ": pronoun '" + r.pronoun +
                          "' is not a gendered non-reflexive form");
  }
  return g;
}

inline void tally_pair(Confusion& c, bool gold, bool pred) {
  if (gold && pred) {
    ++c.tp;
  } else if (!gold && pred) {
    ++c.fp;
  } else if (gold && !pred) {
    ++c.fn;
  }
}

}  // namespace detail

// Per-gender confusion counts over (example, name) pair decisions. Examples
// without a prediction score as (FALSE, FALSE) and are counted as missing;
// predictions for unknown ids are an error.
inline GenderedConfusion confusion_from_pairs(
    const std::vector<ExampleRecord>& gold, const PredictionMap& predictions) {
  GenderedConfusion out;
  std::map<std::string, const ExampleRecord*> by_id;
  for (const ExampleRecord& r : gold) by_id[r.id] = &r;
  for (const auto& [id, pred] : predictions) {
    if (!by_id.count(id)) {
      throw ValidationError("prediction for unknown example id '" + id + "'");
    }
  }
  for (const ExampleRecord& r : gold) {
    auto it = predictions.find(r.id);
    bool a_pred = false, b_pred = false;
    if (it == predictions.end()) {
      ++out.missing_predictions;
    } else {
      a_pred = it->second.first;
      b_pred = it->second.second;
    }
    Confusion& c = detail::example_gender(r) == Gender::Masculine
                       ? out.masculine
                       : out.feminine;
    detail::tally_pair(c, r.a_coref, a_pred);
    detail::tally_pair(c, r.b_coref, b_pred);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Score report.

struct ScoreReport {
  PRF masculine;
  PRF feminine;
  PRF overall;
  double bias_ratio = std::numeric_limits<double>::quiet_NaN();
  long long missing_predictions = 0;
};

inline ScoreReport make_report(const GenderedConfusion& counts) {
  ScoreReport r;
  r.masculine = f1(counts.masculine);
  r.feminine = f1(counts.feminine);
  r.overall = f1(counts.overall());
  r.bias_ratio = bias(r.masculine.f1, r.feminine.f1);
  r.missing_predictions = counts.missing_predictions;
  return r;
}

// Metrics are reported x100 at one decimal, the bias ratio at two, matching
// the usual presentation.
inline std::string format_metric(double value) {
  double v = round_half_even(value * 100.0, 1);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

inline std::string format_bias(double value) {
  if (std::isnan(value)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", round_half_even(value, 2));
  return buf;
}

inline std::string report_tsv(const ScoreReport& r) {
  std::string out = "Split\tP\tR\tF1\n";
  auto row = [&](std::string_view name, const PRF& prf) {
    out += name;
    out += '\t';
    out += format_metric(prf.precision);
    out += '\t';
    out += format_metric(prf.recall);
    out += '\t';
    out += format_metric(prf.f1);
    out += '\n';
  };
  row("M", r.masculine);
  row("F", r.feminine);
  row("O", r.overall);
  out += "B\t";
  out += format_bias(r.bias_ratio);
  out += '\n';
  return out;
}

inline nlohmann::json report_json(const ScoreReport& r) {
  auto block = [](const PRF& prf) {
    return nlohmann::json{{"precision", prf.precision},
                          {"recall", prf.recall},
                          {"f1", prf.f1}};
  };
  nlohmann::json j;
  j["masculine"] = block(r.masculine);
  j["feminine"] = block(r.feminine);
  j["overall"] = block(r.overall);
  if (std::isnan(r.bias_ratio)) {
    j["bias"] = nullptr;
  } else {
    j["bias"] = r.bias_ratio;
  }
  j["missing_predictions"] = r.missing_predictions;
  return j;
}

// ---------------------------------------------------------------------------
// Cluster-output scoring for external systems.

struct CharSpan {
  int begin = 0;
  int end = 0;
};

// Predicted coreference clusters over one snippet, as character spans.
struct ClusterSet {
  std::string example_id;
  std::vector<std::vector<CharSpan>> clusters;
};

enum class ClusterScoring { GapAlign, OntoNotesPair };

namespace detail {

// Whether any cluster member head-aligns with the given mention head.
inline bool contains_head(const Document& doc,
                          const std::vector<TokenSpan>& member_spans,
                          TokenRef head) {
  for (const TokenSpan& s : member_spans) {
    Mention m;
    m.sentence_index = s.sentence;
    m.begin = s.begin;
    m.end = s.end;
    if (s.sentence == head.sentence &&
        mention_head(m, doc.sentences.at(s.sentence)) == head.token) {
      return true;
    }
  }
  return false;
}

inline TokenSpan align_cluster_span(const Document& doc, const CharSpan& span,
                                    const std::string& id) {
  return align_char_span(doc, span.begin, span.end - span.begin, id);
}

}  // namespace detail

// Scores system clusters against the examples' pair labels.
//
// GapAlign: the cluster holding the target pronoun is head-aligned against
// the two names; a contained correct name is a TP, a contained incorrect
// name an FP, and a missing correct name an FN.
//
// OntoNotesPair: the pronoun's cluster scores a TP when it contains at least
// one gold coreferent name, an FP when it contains at least one non-gold
// name, and an FN when it contains no gold name; examples whose gold label
// is Neither have no gold coreferent and are skipped.
inline GenderedConfusion score_clusters(
    const std::vector<ClusterSet>& systems,
    const std::vector<ExampleRecord>& examples,
    const std::vector<Document>& docs, ClusterScoring mode) {
  std::map<std::string, const ClusterSet*> clusters_by_id;
  for (const ClusterSet& c : systems) clusters_by_id[c.example_id] = &c;
  std::map<std::string, const Document*> docs_by_id;
  for (const Document& d : docs) docs_by_id[d.id] = &d;

  GenderedConfusion out;
  for (const ExampleRecord& ex : examples) {
    const Document* doc = nullptr;
    for (const auto& [id, d] : docs_by_id) {
      if (ex.id.rfind(id + "-", 0) == 0 || ex.id == id) {
        if (!doc || id.size() > doc->id.size()) doc = d;
      }
    }
    if (!doc) {
      for (const Document& d : docs) {
        if (d.text == ex.text) {
          doc = &d;
          break;
        }
      }
    }
    if (!doc) {
      throw AlignmentError("example " + ex.id + ": no matching document");
    }
    AlignedExample aligned = align_example(ex, *doc);
    TokenRef pron{aligned.pronoun.sentence_index, aligned.pronoun.head_index};
    TokenRef head_a = head_ref(aligned.name_a);
    TokenRef head_b = head_ref(aligned.name_b);

    bool in_a = false, in_b = false, clustered = false;
    auto it = clusters_by_id.find(ex.id);
    if (it != clusters_by_id.end()) {
      int holding = -1;
      const ClusterSet& cs = *it->second;
      for (std::size_t ci = 0; ci < cs.clusters.size(); ++ci) {
        for (const CharSpan& span : cs.clusters[ci]) {
          TokenSpan ts = detail::align_cluster_span(*doc, span, ex.id);
          int pb = flat_index(*doc, pron);
          if (flat_begin(*doc, ts) <= pb && pb < flat_end(*doc, ts)) {
            if (holding >= 0 && holding != static_cast<int>(ci)) {
              throw ValidationError("example " + ex.id +
                                    ": overlapping clusters share the "
                                    "pronoun");
            }
            holding = static_cast<int>(ci);
          }
        }
      }
      if (holding >= 0) {
        clustered = true;
        std::vector<TokenSpan> member_spans;
        for (const CharSpan& span : cs.clusters[holding]) {
          member_spans.push_back(detail::align_cluster_span(*doc, span,
                                                            ex.id));
        }
        in_a = detail::contains_head(*doc, member_spans, head_a);
        in_b = detail::contains_head(*doc, member_spans, head_b);
      }
    }
    if (!clustered) ++out.missing_predictions;

    Confusion& c = detail::example_gender(ex) == Gender::Masculine
                       ? out.masculine
                       : out.feminine;
    if (mode == ClusterScoring::GapAlign) {
      detail::tally_pair(c, ex.a_coref, in_a);
      detail::tally_pair(c, ex.b_coref, in_b);
    } else {
      if (!ex.a_coref && !ex.b_coref) continue;
      bool has_gold = (ex.a_coref && in_a) || (ex.b_coref && in_b);
      bool has_nongold = (!ex.a_coref && in_a) || (!ex.b_coref && in_b);
      if (has_gold) ++c.tp;
      if (has_nongold) ++c.fp;
      if (!has_gold) ++c.fn;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Difficulty bucketing by agreement with gold.

enum class DifficultyBucket { Green, Yellow, Red };

inline DifficultyBucket bucket_of(int agreement) {
  if (agreement == 4) return DifficultyBucket::Green;
  if (agreement == 0) return DifficultyBucket::Red;
  return DifficultyBucket::Yellow;
}

struct DifficultyHistogram {
  std::array<long long, 5> by_agreement = {0, 0, 0, 0, 0};

  long long green() const { return by_agreement[4]; }
  long long yellow() const {
    return by_agreement[1] + by_agreement[2] + by_agreement[3];
  }
  long long red() const { return by_agreement[0]; }
  long long total() const {
    long long t = 0;
    for (long long v : by_agreement) t += v;
    return t;
  }
};

// Agreement of exactly four systems with gold, per scored pair. For NameA or
// NameB gold only the positive pair is scored; Neither scores both pairs.
inline DifficultyHistogram difficulty_buckets(
    const std::vector<ExampleRecord>& gold,
    const std::vector<PredictionMap>& systems) {
  if (systems.size() != 4) {
    throw std::invalid_argument("difficulty bucketing requires exactly four "
                                "system prediction sets");
  }
  DifficultyHistogram out;
  for (const ExampleRecord& ex : gold) {
    auto system_pred = [&](const PredictionMap& preds) {
      auto it = preds.find(ex.id);
      return it == preds.end() ? std::pair(false, false) : it->second;
    };
    auto score_side = [&](bool use_a) {
      int agree = 0;
      bool g = use_a ? ex.a_coref : ex.b_coref;
      for (const PredictionMap& preds : systems) {
        auto [a, b] = system_pred(preds);
        bool p = use_a ? a : b;
        if (p == g) ++agree;
      }
      ++out.by_agreement[static_cast<std::size_t>(agree)];
    };
    if (ex.a_coref) {
      score_side(true);
    } else if (ex.b_coref) {
      score_side(false);
    } else {
      score_side(true);
      score_side(false);
    }
  }
  return out;
}

inline std::string difficulty_tsv(const DifficultyHistogram& h) {
  std::string out = "Agreement\tCount\tBucket\n";
  static const char* kBuckets[5] = {"Red", "Yellow", "Yellow", "Yellow",
                                    "Green"};
  for (int a = 4; a >= 0; --a) {
    out += std::to_string(a);
    out += '\t';
    out += std::to_string(h.by_agreement[static_cast<std::size_t>(a)]);
    out += '\t';
    out += kBuckets[a];
    out += '\n';
  }
  out += "Green\t" + std::to_string(h.green()) + "\t-\n";
  out += "Yellow\t" + std::to_string(h.yellow()) + "\t-\n";
  out += "Red\t" + std::to_string(h.red()) + "\t-\n";
  return out;
}

}  // namespace apc
