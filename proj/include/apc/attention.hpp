#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "apc/corpus.hpp"
#include "apc/error.hpp"
#include "apc/forest.hpp"
#include "apc/resolvers.hpp"
#include "apc/text.hpp"

namespace apc {

inline constexpr int kDefaultLayers = 6;
inline constexpr int kDefaultHeads = 8;
inline constexpr double kRowSumTolerance = 1e-4;

struct HeadId {
  int layer = 0;
  int head = 0;
};

// Exported encoder self-attention for one snippet: subtokens with their
// character alignment and the dense [layer][head][query][key] weights.
struct AttentionRecord {
  std::string id;
  std::vector<std::string> subtokens;
  std::vector<std::pair<int, int>> offsets;  // scalar (start, end) per subtoken
  int n_layers = kDefaultLayers;
  int n_heads = kDefaultHeads;
  std::vector<double> weights;  // flattened [layer][head][query][key]

  int size() const { return static_cast<int>(subtokens.size()); }

  double at(int layer, int head, int query, int key) const {
    int n = size();
    return weights[((static_cast<std::size_t>(layer) * n_heads + head) * n +
                    query) *
                       n +
                   key];
  }

  double& at(int layer, int head, int query, int key) {
    int n = size();
    return weights[((static_cast<std::size_t>(layer) * n_heads + head) * n +
                    query) *
                       n +
                   key];
  }
};

// Softmax rows must sum to one and weights must be non-negative.
inline void validate_attention(const AttentionRecord& rec) {
  const int n = rec.size();
  if (n == 0) throw ValidationError("record " + rec.id + ": no subtokens");
  if (rec.offsets.size() != rec.subtokens.size()) {
    throw ValidationError("record " + rec.id +
                          ": offsets/subtokens length mismatch");
  }
  std::size_t expect = static_cast<std::size_t>(rec.n_layers) * rec.n_heads *
                       n * n;
  if (rec.weights.size() != expect) {
    throw ValidationError("record " + rec.id + ": weight tensor has " +
                          std::to_string(rec.weights.size()) +
                          " entries, expected " + std::to_string(expect));
  }
  for (int l = 0; l < rec.n_layers; ++l) {
    for (int h = 0; h < rec.n_heads; ++h) {
      for (int q = 0; q < n; ++q) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
          double w = rec.at(l, h, q, k);
          if (w < 0.0) {
            throw ValidationError("record " + rec.id +
                                  ": negative attention weight");
          }
          sum += w;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
          throw ValidationError(
              "record " + rec.id + ": attention row (layer " +
              std::to_string(l) + ", head " + std::to_string(h) + ", query " +
              std::to_string(q) + ") sums to " + std::to_string(sum));
        }
      }
    }
  }
}

// JSON-lines, one record per line:
//   {"id": ..., "subtokens": [...], "offsets": [[s,e],...],
//    "layers": L, "heads": H, "weights": [L][H][n][n]}
inline std::vector<AttentionRecord> load_attention(std::string_view bytes) {
  std::vector<AttentionRecord> out;
  std::size_t line_no = 0;
  for (std::string_view raw : split(bytes, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    try {
      AttentionRecord rec;
      rec.id = j.at("id").get<std::string>();
      rec.subtokens = j.at("subtokens").get<std::vector<std::string>>();
      for (const auto& pair : j.at("offsets")) {
        rec.offsets.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
      }
      rec.n_layers = j.at("layers").get<int>();
      rec.n_heads = j.at("heads").get<int>();
      const int n = rec.size();
      const auto& w = j.at("weights");
      if (static_cast<int>(w.size()) != rec.n_layers) {
        throw ValidationError("record " + rec.id + ": layer count mismatch");
      }
      rec.weights.reserve(static_cast<std::size_t>(rec.n_layers) *
                          rec.n_heads * n * n);
      for (const auto& layer : w) {
        if (static_cast<int>(layer.size()) != rec.n_heads) {
          throw ValidationError("record " + rec.id + ": head count mismatch");
        }
        for (const auto& head : layer) {
          if (static_cast<int>(head.size()) != n) {
            throw ValidationError("record " + rec.id +
                                  ": query dimension mismatch");
          }
          for (const auto& row : head) {
            if (static_cast<int>(row.size()) != n) {
              throw ValidationError("record " + rec.id +
                                    ": key dimension mismatch");
            }
            for (const auto& v : row) {
              rec.weights.push_back(v.get<double>());
            }
          }
        }
      }
      validate_attention(rec);
      out.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

inline std::string write_attention(const std::vector<AttentionRecord>& recs) {
  std::string out;
  for (const AttentionRecord& rec : recs) {
    nlohmann::json j;
    j["id"] = rec.id;
    j["subtokens"] = rec.subtokens;
    auto offsets = nlohmann::json::array();
    for (auto [s, e] : rec.offsets) {
      offsets.push_back(nlohmann::json::array({s, e}));
    }
    j["offsets"] = std::move(offsets);
    j["layers"] = rec.n_layers;
    j["heads"] = rec.n_heads;
    const int n = rec.size();
    auto layers = nlohmann::json::array();
    for (int l = 0; l < rec.n_layers; ++l) {
      auto heads = nlohmann::json::array();
      for (int h = 0; h < rec.n_heads; ++h) {
        auto queries = nlohmann::json::array();
        for (int q = 0; q < n; ++q) {
          auto row = nlohmann::json::array();
          for (int k = 0; k < n; ++k) row.push_back(rec.at(l, h, q, k));
          queries.push_back(std::move(row));
        }
        heads.push_back(std::move(queries));
      }
      layers.push_back(std::move(heads));
    }
    j["weights"] = std::move(layers);
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::vector<int> subtokens_in_span(const AttentionRecord& rec,
                                          int char_start, int char_end) {
  std::vector<int> out;
  for (int i = 0; i < rec.size(); ++i) {
    auto [s, e] = rec.offsets[i];
    if (std::max(s, char_start) < std::min(e, char_end)) out.push_back(i);
  }
  return out;
}

}  // namespace detail

// Attention between a name span and a pronoun span at one head: the mean
// over the spans' subtoken pairs, where each pair's value sums the raw
// weights between all occurrences of the two subtoken strings in the
// snippet. Occurrence summing controls for attention spreading over repeated
// mentions of an entity.
inline double span_attention(const AttentionRecord& rec, HeadId head,
                             std::pair<int, int> name_span,
                             std::pair<int, int> pronoun_span) {
  if (head.layer < 0 || head.layer >= rec.n_layers || head.head < 0 ||
      head.head >= rec.n_heads) {
    throw std::invalid_argument("attention head out of range");
  }
  auto name_subs =
      detail::subtokens_in_span(rec, name_span.first, name_span.second);
  auto pron_subs =
      detail::subtokens_in_span(rec, pronoun_span.first, pronoun_span.second);
  if (name_subs.empty() || pron_subs.empty()) {
    throw AlignmentError("record " + rec.id +
                         ": span aligns to zero subtokens");
  }
  std::map<std::string, std::vector<int>> occurrences;
  for (int i = 0; i < rec.size(); ++i) {
    occurrences[rec.subtokens[i]].push_back(i);
  }
  std::map<std::pair<std::string, std::string>, double> cache;
  double total = 0.0;
  for (int i : name_subs) {
    for (int j : pron_subs) {
      auto key = std::pair(rec.subtokens[i], rec.subtokens[j]);
      auto it = cache.find(key);
      if (it == cache.end()) {
        double sum = 0.0;
        for (int qi : occurrences[key.first]) {
          for (int kj : occurrences[key.second]) {
            sum += rec.at(head.layer, head.head, qi, kj);
          }
        }
        it = cache.emplace(key, sum).first;
      }
      total += it->second;
    }
  }
  return total /
         (static_cast<double>(name_subs.size()) *
          static_cast<double>(pron_subs.size()));
}

// The candidate attending most to the pronoun at one head; ties go to the
// earliest offset.
inline Resolution resolve_single_head(const AttentionRecord& rec, HeadId head,
                                      const std::vector<Mention>& cands,
                                      const Mention& pronoun,
                                      const Document& doc) {
  Resolution r;
  if (cands.empty()) return r;
  auto char_span = [&](const Mention& m) {
    return std::pair(span_char_start(doc, span_of(m)),
                     span_char_end(doc, span_of(m)));
  };
  auto pron_span = char_span(pronoun);
  const Mention* best = nullptr;
  double best_score = 0.0;
  for (const Mention& m : cands) {
    double score = span_attention(rec, head, char_span(m), pron_span);
    bool better =
        !best || score > best_score ||
        (score == best_score &&
         flat_begin(doc, span_of(m)) < flat_begin(doc, span_of(*best)));
    if (better) {
      best = &m;
      best_score = score;
    }
  }
  r.selected = *best;
  return r;
}

// Per-head selections for every head on the L x H grid, row-major.
inline std::vector<std::optional<Mention>> all_head_selections(
    const AttentionRecord& rec, const std::vector<Mention>& cands,
    const Mention& pronoun, const Document& doc) {
  std::vector<std::optional<Mention>> out;
  out.reserve(static_cast<std::size_t>(rec.n_layers) * rec.n_heads);
  for (int l = 0; l < rec.n_layers; ++l) {
    for (int h = 0; h < rec.n_heads; ++h) {
      Resolution r = resolve_single_head(rec, {l, h}, cands, pronoun, doc);
      out.push_back(r.selected);
    }
  }
  return out;
}

// One boolean per head: true when the candidate surface overlaps that head's
// selection as a token-boundary substring.
inline std::vector<std::uint8_t> head_features(
    const Document& doc,
    const std::vector<std::optional<Mention>>& per_head_selection,
    const Mention& candidate) {
  std::string surface = mention_text(doc, candidate);
  std::vector<std::uint8_t> bits;
  bits.reserve(per_head_selection.size());
  for (const auto& sel : per_head_selection) {
    bool hit = sel && surfaces_overlap(surface, mention_text(doc, *sel));
    bits.push_back(hit ? 1 : 0);
  }
  return bits;
}

// Scores every candidate by the forest's positive vote fraction over its
// selected head features and keeps the argmax; ties go to the earliest
// offset.
inline Resolution resolve_multi(
    const ForestModel& model, const Document& doc,
    const std::vector<Mention>& cands,
    const std::vector<std::optional<Mention>>& per_head_selection) {
  Resolution r;
  if (cands.empty()) return r;
  const Mention* best = nullptr;
  double best_score = -1.0;
  for (const Mention& m : cands) {
    std::vector<std::uint8_t> full = head_features(doc, per_head_selection, m);
    std::vector<std::uint8_t> restricted;
    restricted.reserve(model.selected_features.size());
    for (int f : model.selected_features) restricted.push_back(full.at(f));
    double score = model.vote_fraction(restricted);
    bool better =
        !best || score > best_score ||
        (score == best_score &&
         flat_begin(doc, span_of(m)) < flat_begin(doc, span_of(*best)));
    if (better) {
      best = &m;
      best_score = score;
    }
  }
  r.selected = *best;
  return r;
}

}  // namespace apc
