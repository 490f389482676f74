#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apc/error.hpp"
#include "apc/records.hpp"

namespace apc {

enum class RaterLabel { NameA, NameB, Neither, Both, NotSure };
inline constexpr int kRaterLabelCount = 5;
inline constexpr int kRatersPerItem = 3;

inline std::string_view rater_label_name(RaterLabel l) {
  switch (l) {
    case RaterLabel::NameA: return "A";
    case RaterLabel::NameB: return "B";
    case RaterLabel::Neither: return "NEITHER";
    case RaterLabel::Both: return "BOTH";
    default: return "NOT-SURE";
  }
}

inline std::optional<RaterLabel> rater_label_from_name(std::string_view s) {
  std::string u = to_lower(s);
  std::erase(u, '_');
  std::erase(u, '-');
  if (u == "a" || u == "namea") return RaterLabel::NameA;
  if (u == "b" || u == "nameb") return RaterLabel::NameB;
  if (u == "neither") return RaterLabel::Neither;
  if (u == "both") return RaterLabel::Both;
  if (u == "notsure") return RaterLabel::NotSure;
  return std::nullopt;
}

// Majority label among exactly three raters; nullopt when all three differ.
inline std::optional<RaterLabel> consensus(
    const std::vector<RaterLabel>& labels) {
  if (labels.size() != kRatersPerItem) {
    throw std::invalid_argument("consensus requires exactly three labels");
  }
  for (RaterLabel candidate : labels) {
    int votes = 0;
    for (RaterLabel l : labels) {
      if (l == candidate) ++votes;
    }
    if (votes >= 2) return candidate;
  }
  return std::nullopt;
}

// Fleiss (1971) kappa over an item-by-category tally matrix where every row
// sums to n_raters.
inline double fleiss_kappa(const std::vector<std::vector<int>>& counts,
                           int n_raters) {
  if (counts.size() < 2) {
    throw std::invalid_argument("fleiss_kappa requires at least two items");
  }
  if (n_raters < 2) {
    throw std::invalid_argument("fleiss_kappa requires at least two raters");
  }
  const std::size_t n_items = counts.size();
  const std::size_t n_cats = counts.front().size();
  std::vector<double> category_mass(n_cats, 0.0);
  double mean_item_agreement = 0.0;
  for (const auto& row : counts) {
    if (row.size() != n_cats) {
      throw std::invalid_argument("fleiss_kappa rows differ in width");
    }
    int row_sum = 0;
    double pairs = 0.0;
    for (std::size_t j = 0; j < n_cats; ++j) {
      int c = row[j];
      if (c < 0) throw std::invalid_argument("negative tally");
      row_sum += c;
      pairs += static_cast<double>(c) * (c - 1);
      category_mass[j] += c;
    }
    if (row_sum != n_raters) {
      throw std::invalid_argument("fleiss_kappa row does not sum to n_raters");
    }
    mean_item_agreement +=
        pairs / (static_cast<double>(n_raters) * (n_raters - 1));
  }
  mean_item_agreement /= static_cast<double>(n_items);
  double chance = 0.0;
  for (double mass : category_mass) {
    double p = mass / (static_cast<double>(n_items) * n_raters);
    chance += p * p;
  }
  if (1.0 - chance == 0.0) return 1.0;  // all mass in one category
  return (mean_item_agreement - chance) / (1.0 - chance);
}

struct AgreementStats {
  double kappa = 0.0;
  double full_agreement_fraction = 0.0;
  double two_of_three_fraction = 0.0;
  int no_consensus_count = 0;
  int item_count = 0;
};

inline AgreementStats agreement_stats(
    const std::vector<std::array<RaterLabel, kRatersPerItem>>& ratings) {
  AgreementStats stats;
  stats.item_count = static_cast<int>(ratings.size());
  std::vector<std::vector<int>> tally;
  tally.reserve(ratings.size());
  int full = 0, partial = 0;
  for (const auto& item : ratings) {
    std::vector<int> row(kRaterLabelCount, 0);
    for (RaterLabel l : item) ++row[static_cast<int>(l)];
    int top = *std::max_element(row.begin(), row.end());
    if (top == kRatersPerItem) {
      ++full;
    } else if (top == 2) {
      ++partial;
    } else {
      ++stats.no_consensus_count;
    }
    tally.push_back(std::move(row));
  }
  stats.kappa = fleiss_kappa(tally, kRatersPerItem);
  stats.full_agreement_fraction =
      static_cast<double>(full) / static_cast<double>(ratings.size());
  stats.two_of_three_fraction =
      static_cast<double>(partial) / static_cast<double>(ratings.size());
  return stats;
}

// ---------------------------------------------------------------------------
// Diversity sampling.

// Ratios are integer weight vectors; caps are absolute counts.
struct SamplerTargets {
  std::array<int, 2> gender = {1, 1};        // masculine : feminine
  std::array<int, 3> pattern = {6, 1, 1};    // final : medial : initial
  std::array<int, 2> page_entity = {1, 1};   // mentioned : not mentioned
  std::array<int, 2> label = {1, 1};         // NameA : NameB
  int per_page_gender_cap = 3;
  int per_page_form_cap = 1;
};

struct Shortfall {
  std::string stratum;
  long target = 0;
  long achieved = 0;
};

struct SampleSelection {
  std::vector<std::size_t> selected;  // pool indices, ascending
  std::vector<Shortfall> shortfalls;
};

// Stratum key of one pool item. `label` stays empty when sampling happens
// before annotation.
struct SampleKey {
  std::string page;
  Gender gender = Gender::Unknown;
  PatternKind pattern = PatternKind::FinalPro;
  bool page_entity = false;
  std::optional<RaterLabel> label;
};

namespace detail {

// Seeded pick of `quota` indices; keeps everything when quota covers the
// bucket, so already-balanced pools pass through unchanged.
inline std::vector<std::size_t> pick(std::vector<std::size_t> bucket,
                                     std::size_t quota, std::mt19937_64& rng) {
  if (quota >= bucket.size()) return bucket;
  std::shuffle(bucket.begin(), bucket.end(), rng);
  bucket.resize(quota);
  std::sort(bucket.begin(), bucket.end());
  return bucket;
}

// Largest per-cell quotas in exact `weights` proportion given cell
// capacities; cells at zero capacity are excluded from the ratio (a ratio
// over one remaining cell constrains nothing) and reported by the caller.
inline std::vector<long> ratio_quotas(const std::vector<long>& capacity,
                                      const std::vector<int>& weights) {
  std::vector<long> quota(capacity.size(), 0);
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < capacity.size(); ++i) {
    if (capacity[i] > 0 && weights[i] > 0) live.push_back(i);
  }
  if (live.empty()) return quota;
  if (live.size() == 1) {
    quota[live.front()] = capacity[live.front()];
    return quota;
  }
  long unit = -1;
  for (std::size_t i : live) {
    long u = capacity[i] / weights[i];
    if (unit < 0 || u < unit) unit = u;
  }
  for (std::size_t i : live) quota[i] = unit * weights[i];
  return quota;
}

}  // namespace detail

// Stratified sub-sample of a pool. Honors, in priority order: the
// per-page-gender cap, gender ratio, pattern ratio, page-entity ratio per
// (gender, pattern) cell, and label ratio when labels are present. All
// selection is deterministic under `seed`, ratios are met exactly among
// non-empty strata (the rest is reported, never silently unbalanced), and an
// already-balanced pool returns itself.
inline SampleSelection sample_diverse_keys(const std::vector<SampleKey>& pool,
                                           const SamplerTargets& targets,
                                           std::uint64_t seed) {
  SampleSelection result;
  if (pool.empty()) return result;
  std::mt19937_64 rng(seed);

  // Per-page-gender cap.
  std::vector<bool> alive(pool.size(), false);
  {
    std::map<std::pair<std::string, Gender>, std::vector<std::size_t>> pages;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      pages[{pool[i].page, pool[i].gender}].push_back(i);
    }
    for (auto& [key, bucket] : pages) {
      std::size_t cap = static_cast<std::size_t>(targets.per_page_gender_cap);
      for (std::size_t i : detail::pick(bucket, cap, rng)) alive[i] = true;
    }
  }

  auto gender_slot = [](Gender g) { return g == Gender::Masculine ? 0 : 1; };
  auto pattern_slot = [](PatternKind k) { return static_cast<int>(k); };

  // Joint gender x pattern cells.
  std::array<std::array<std::vector<std::size_t>, 3>, 2> cells;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!alive[i]) continue;
    cells[gender_slot(pool[i].gender)][pattern_slot(pool[i].pattern)]
        .push_back(i);
  }

  // Capacity of each gender under its internal pattern ratio.
  std::array<std::vector<long>, 2> pattern_quota;
  std::vector<long> gender_capacity(2, 0);
  for (int g = 0; g < 2; ++g) {
    std::vector<long> cap(3, 0);
    for (int p = 0; p < 3; ++p) cap[p] = static_cast<long>(cells[g][p].size());
    pattern_quota[g] = detail::ratio_quotas(
        cap, {targets.pattern[0], targets.pattern[1], targets.pattern[2]});
    for (long q : pattern_quota[g]) gender_capacity[g] += q;
  }

  // Gender ratio across the two capacities, then re-derive pattern quotas
  // within each gender for its (possibly reduced) share. The rescale stays
  // in integer arithmetic so exact ratios survive.
  std::vector<long> gender_take = detail::ratio_quotas(
      gender_capacity, {targets.gender[0], targets.gender[1]});
  for (int g = 0; g < 2; ++g) {
    if (gender_take[g] == gender_capacity[g]) continue;
    std::vector<long> cap(3, 0);
    for (int p = 0; p < 3; ++p) {
      cap[p] = gender_capacity[g] > 0
                   ? pattern_quota[g][p] * gender_take[g] / gender_capacity[g]
                   : 0;
    }
    pattern_quota[g] = detail::ratio_quotas(
        cap, {targets.pattern[0], targets.pattern[1], targets.pattern[2]});
  }

  static const char* kGenderNames[2] = {"M", "F"};
  static const char* kPatternNames[3] = {"FinalPro", "MedialPro",
                                         "InitialPro"};
  for (int g = 0; g < 2; ++g) {
    if (gender_capacity[g] == 0 && gender_take[1 - g] > 0) {
      result.shortfalls.push_back({std::string("gender=") + kGenderNames[g],
                                   gender_take[1 - g], 0});
    }
  }

  // Within each cell: page-entity halves, then label halves, then seeded
  // selection.
  for (int g = 0; g < 2; ++g) {
    long realized_total = 0;
    for (long q : pattern_quota[g]) realized_total += q;
    for (int p = 0; p < 3; ++p) {
      long q = pattern_quota[g][p];
      const auto& cell = cells[g][p];
      std::string stratum = std::string("gender=") + kGenderNames[g] +
                            "/pattern=" + kPatternNames[p];
      if (cell.empty()) {
        if (realized_total > 0) {
          int weight_sum =
              targets.pattern[0] + targets.pattern[1] + targets.pattern[2];
          long ideal = (realized_total * targets.pattern[p] + weight_sum / 2) /
                       weight_sum;
          if (ideal > 0) result.shortfalls.push_back({stratum, ideal, 0});
        }
        continue;
      }
      if (q == 0) continue;

      std::array<std::vector<std::size_t>, 2> sides;
      for (std::size_t i : cell) {
        sides[pool[i].page_entity ? 0 : 1].push_back(i);
      }
      std::vector<long> side_cap = {static_cast<long>(sides[0].size()),
                                    static_cast<long>(sides[1].size())};
      // Even split with spill: a scarce side yields its remainder to the
      // other so the (higher-priority) cell quota stays filled; the
      // page-entity deviation is reported instead of cutting the quota.
      int pe_sum = targets.page_entity[0] + targets.page_entity[1];
      long want0 = (q * targets.page_entity[0] + pe_sum / 2) / pe_sum;
      long take0 = std::min(want0, side_cap[0]);
      long take1 = std::min(q - take0, side_cap[1]);
      take0 = std::min(side_cap[0], q - take1);
      if (take0 + 1 < want0) {
        result.shortfalls.push_back(
            {stratum + "/page_entity=true", want0, take0});
      }
      if (take1 + 1 < q - want0) {
        result.shortfalls.push_back(
            {stratum + "/page_entity=false", q - want0, take1});
      }
      const long takes[2] = {take0, take1};
      for (int side = 0; side < 2; ++side) {
        long k = takes[side];
        if (k <= 0) continue;
        // Label ratio binds only over labeled items; unlabeled items and, if
        // need be, surplus labeled ones fill the quota, with the imbalance
        // reported.
        std::vector<std::size_t> a_items, b_items, free_items;
        for (std::size_t i : sides[side]) {
          if (pool[i].label == RaterLabel::NameA) {
            a_items.push_back(i);
          } else if (pool[i].label == RaterLabel::NameB) {
            b_items.push_back(i);
          } else {
            free_items.push_back(i);
          }
        }
        long pairs = std::min({static_cast<long>(a_items.size()),
                               static_cast<long>(b_items.size()), k / 2});
        long free_take = std::min(k - 2 * pairs,
                                  static_cast<long>(free_items.size()));
        long surplus = k - 2 * pairs - free_take;
        long extra_a = std::min(surplus,
                                static_cast<long>(a_items.size()) - pairs);
        long extra_b = std::min(surplus - extra_a,
                                static_cast<long>(b_items.size()) - pairs);
        long label_gap = extra_a > extra_b ? extra_a - extra_b
                                           : extra_b - extra_a;
        if ((!a_items.empty() || !b_items.empty()) && label_gap > 1) {
          result.shortfalls.push_back(
              {stratum +
                   (side == 0 ? "/page_entity=true" : "/page_entity=false") +
                   "/label=" + (extra_a < extra_b ? "A" : "B"),
               k / 2, pairs + std::min(extra_a, extra_b)});
        }
        auto take_a =
            detail::pick(a_items, static_cast<std::size_t>(pairs + extra_a),
                         rng);
        auto take_b =
            detail::pick(b_items, static_cast<std::size_t>(pairs + extra_b),
                         rng);
        auto take_free =
            detail::pick(free_items, static_cast<std::size_t>(free_take), rng);
        for (std::size_t i : take_a) result.selected.push_back(i);
        for (std::size_t i : take_b) result.selected.push_back(i);
        for (std::size_t i : take_free) result.selected.push_back(i);
      }
    }
  }
  std::sort(result.selected.begin(), result.selected.end());
  return result;
}

inline SampleKey candidate_key(const CandidateRecord& r) {
  return {r.doc_id, r.gender, r.pattern, r.page_entity, std::nullopt};
}

inline SampleSelection sample_diverse(const std::vector<CandidateRecord>& pool,
                                      const SamplerTargets& targets,
                                      std::uint64_t seed,
                                      const std::vector<std::optional<RaterLabel>>*
                                          labels = nullptr) {
  std::vector<SampleKey> keys;
  keys.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    SampleKey k = candidate_key(pool[i]);
    if (labels) k.label = (*labels)[i];
    keys.push_back(std::move(k));
  }
  return sample_diverse_keys(keys, targets, seed);
}

// ---------------------------------------------------------------------------
// Final filtering after annotation.

// Drops no-consensus, Both and Not-Sure items, keeps at most
// `per_page_form_cap` examples per document per pronoun form, restores exact
// gender parity by discarding from the surplus gender (chosen uniformly at
// random under `seed`), and converts consensus labels to pair booleans.
inline std::vector<ExampleRecord> final_filter(
    const std::vector<CandidateRecord>& candidates,
    const std::vector<std::optional<RaterLabel>>& labels,
    const SamplerTargets& targets, std::uint64_t seed) {
  if (candidates.size() != labels.size()) {
    throw std::invalid_argument("one label per candidate required");
  }
  struct Survivor {
    const CandidateRecord* rec;
    RaterLabel label;
  };
  std::vector<Survivor> survivors;
  std::map<std::pair<std::string, std::string>, int> per_form;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!labels[i]) continue;
    RaterLabel l = *labels[i];
    if (l == RaterLabel::Both || l == RaterLabel::NotSure) continue;
    auto key = std::pair(candidates[i].doc_id, to_lower(candidates[i].pronoun));
    if (++per_form[key] > targets.per_page_form_cap) continue;
    survivors.push_back({&candidates[i], l});
  }

  std::vector<std::size_t> masc, fem;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    (survivors[i].rec->gender == Gender::Masculine ? masc : fem).push_back(i);
  }
  std::vector<bool> keep(survivors.size(), true);
  auto& surplus = masc.size() >= fem.size() ? masc : fem;
  std::size_t excess = surplus.size() - std::min(masc.size(), fem.size());
  if (excess > 0) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> shuffled = surplus;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t k = 0; k < excess; ++k) keep[shuffled[k]] = false;
  }

  std::vector<ExampleRecord> out;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    if (!keep[i]) continue;
    const CandidateRecord& c = *survivors[i].rec;
    ExampleRecord r;
    r.id = c.id;
    r.text = c.text;
    r.pronoun = c.pronoun;
    r.pronoun_offset = c.pronoun_offset;
    r.name_a = c.name_a;
    r.a_offset = c.a_offset;
    r.a_coref = survivors[i].label == RaterLabel::NameA;
    r.name_b = c.name_b;
    r.b_offset = c.b_offset;
    r.b_coref = survivors[i].label == RaterLabel::NameB;
    r.url = c.url;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rater label file: ID plus one column per rater.

inline std::map<std::string, std::array<RaterLabel, kRatersPerItem>>
read_rater_labels(std::string_view bytes) {
  std::map<std::string, std::array<RaterLabel, kRatersPerItem>> out;
  detail::for_each_row(
      bytes, "ID\tR1\tR2\tR3", 4,
      [&](std::size_t line, const std::vector<std::string_view>& c) {
        std::array<RaterLabel, kRatersPerItem> row{};
        for (int k = 0; k < kRatersPerItem; ++k) {
          auto l = rater_label_from_name(c[k + 1]);
          if (!l) {
            throw ParseError(line, "unknown rater label '" +
                                       std::string(c[k + 1]) + "'");
          }
          row[k] = *l;
        }
        if (!out.emplace(std::string(c[0]), row).second) {
          throw ParseError(line,
                           "duplicate label row for '" + std::string(c[0]) +
                               "'");
        }
      });
  return out;
}

inline std::string write_rater_labels(
    const std::map<std::string, std::array<RaterLabel, kRatersPerItem>>&
        labels) {
  std::string out = "ID\tR1\tR2\tR3\n";
  for (const auto& [id, row] : labels) {
    out += id;
    for (RaterLabel l : row) {
      out += '\t';
      out += rater_label_name(l);
    }
    out += '\n';
  }
  return out;
}

inline std::string write_shortfalls(const std::vector<Shortfall>& rows) {
  std::string out = "Stratum\tTarget\tAchieved\n";
  for (const Shortfall& s : rows) {
    out += s.stratum;
    out += '\t';
    out += std::to_string(s.target);
    out += '\t';
    out += std::to_string(s.achieved);
    out += '\n';
  }
  return out;
}

}  // namespace apc
