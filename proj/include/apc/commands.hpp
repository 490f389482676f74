#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "apc/attention.hpp"
#include "apc/chi2.hpp"
#include "apc/conllu.hpp"
#include "apc/curation.hpp"
#include "apc/error.hpp"
#include "apc/forest.hpp"
#include "apc/records.hpp"
#include "apc/resolvers.hpp"
#include "apc/scorer.hpp"
#include "apc/split.hpp"

// File-to-file pipeline commands. Each command is a pure transformation of
// its input files given the seed; output ordering is canonical (sorted by
// example id) so repeated runs are byte-identical.

namespace apc::cmd {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// Locates the parsed document an example came from: by id prefix (longest
// match, since document ids may themselves contain dashes), then by a
// unique URL match, then by exact snippet text.
inline const Document& find_document(const std::vector<Document>& docs,
                                     const ExampleRecord& ex) {
  const Document* by_prefix = nullptr;
  for (const Document& d : docs) {
    if (ex.id == d.id || ex.id.rfind(d.id + "-", 0) == 0) {
      if (!by_prefix || d.id.size() > by_prefix->id.size()) by_prefix = &d;
    }
  }
  if (by_prefix) return *by_prefix;
  const Document* by_url = nullptr;
  if (!ex.url.empty()) {
    for (const Document& d : docs) {
      if (d.url == ex.url) {
        if (by_url) {
          by_url = nullptr;
          break;
        }
        by_url = &d;
      }
    }
  }
  if (by_url) return *by_url;
  for (const Document& d : docs) {
    if (d.text == ex.text) return d;
  }
  throw AlignmentError("example " + ex.id + ": no matching document");
}

// corpus file -> candidates TSV
inline void extract(const std::string& corpus_path,
                    const std::string& out_path) {
  std::vector<Document> docs = parse_corpus(read_file(corpus_path));
  std::vector<CandidateRecord> records;
  for (const Document& doc : docs) {
    int serial = 0;
    for (const CandidateContext& c : extract_candidates(doc)) {
      records.push_back(to_candidate_record(c, serial++));
    }
  }
  write_file(out_path, write_candidates(records));
}

// candidates + rater labels -> examples TSV + agreement report
inline void curate(const std::string& candidates_path,
                   const std::string& labels_path,
                   const std::string& out_path,
                   const std::string& report_path, std::uint64_t seed,
                   const SamplerTargets& targets = {}) {
  std::vector<CandidateRecord> cands =
      read_candidates(read_file(candidates_path));
  auto labels = read_rater_labels(read_file(labels_path));

  std::vector<std::array<RaterLabel, kRatersPerItem>> ratings;
  std::vector<std::optional<RaterLabel>> verdicts;
  ratings.reserve(cands.size());
  verdicts.reserve(cands.size());
  for (const CandidateRecord& c : cands) {
    auto it = labels.find(c.id);
    if (it == labels.end()) {
      throw ValidationError("no rater labels for candidate '" + c.id + "'");
    }
    ratings.push_back(it->second);
    verdicts.push_back(consensus(
        {it->second[0], it->second[1], it->second[2]}));
  }

  std::vector<ExampleRecord> examples =
      final_filter(cands, verdicts, targets, seed);
  std::sort(examples.begin(), examples.end(),
            [](const ExampleRecord& a, const ExampleRecord& b) {
              return a.id < b.id;
            });
  write_file(out_path, write_examples(examples));

  std::ostringstream report;
  report << "Measure\tValue\n";
  if (ratings.size() >= 2) {
    AgreementStats stats = agreement_stats(ratings);
    report << "items\t" << stats.item_count << "\n";
    report << "kappa\t" << stats.kappa << "\n";
    report << "full_agreement\t" << stats.full_agreement_fraction << "\n";
    report << "two_of_three\t" << stats.two_of_three_fraction << "\n";
    report << "no_consensus\t" << stats.no_consensus_count << "\n";
  } else {
    // Chance-corrected agreement is undefined below two items.
    report << "items\t" << ratings.size() << "\n";
    report << "kappa\tNA\n";
  }
  report << "examples\t" << examples.size() << "\n";
  if (report_path.empty()) {
    std::cout << report.str();
  } else {
    write_file(report_path, report.str());
  }
}

namespace detail {

inline bool looks_like_examples_file(std::string_view bytes) {
  for (std::string_view raw : apc::split(bytes, '\n')) {
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    return line == apc::detail::kExampleHeader;
  }
  return false;
}

// Stratum key of a labeled example: the pattern comes from the textual
// order of the three spans, the balancing label from the pair booleans. The
// page-entity flag is not recorded in the examples format, so that
// dimension is inert here.
inline SampleKey example_key(const ExampleRecord& ex) {
  SampleKey key;
  key.page = !ex.url.empty() ? ex.url : ex.id;
  key.gender = pronoun_form_gender(to_lower(ex.pronoun));
  if (key.gender == Gender::Unknown) {
    throw ValidationError("record " + ex.id + ": pronoun '" + ex.pronoun +
                          "' is not a gendered non-reflexive form");
  }
  int first = std::min(ex.a_offset, ex.b_offset);
  int second = std::max(ex.a_offset, ex.b_offset);
  if (ex.pronoun_offset > second) {
    key.pattern = PatternKind::FinalPro;
  } else if (ex.pronoun_offset < first) {
    key.pattern = PatternKind::InitialPro;
  } else {
    key.pattern = PatternKind::MedialPro;
  }
  key.page_entity = false;
  if (ex.a_coref) {
    key.label = RaterLabel::NameA;
  } else if (ex.b_coref) {
    key.label = RaterLabel::NameB;
  } else {
    key.label = RaterLabel::Neither;
  }
  return key;
}

}  // namespace detail

// candidate or example pool -> balanced pool + shortfall report. The input
// kind is sniffed from the header, so sampling can run on raw extraction
// output or on a curated example set.
inline void sample(const std::string& pool_path, const std::string& out_path,
                   const std::string& report_path, std::uint64_t seed,
                   const SamplerTargets& targets = {}) {
  std::string bytes = read_file(pool_path);
  SampleSelection sel;
  if (detail::looks_like_examples_file(bytes)) {
    std::vector<ExampleRecord> pool = read_examples(bytes);
    std::vector<SampleKey> keys;
    keys.reserve(pool.size());
    for (const ExampleRecord& ex : pool) {
      keys.push_back(detail::example_key(ex));
    }
    sel = sample_diverse_keys(keys, targets, seed);
    std::vector<ExampleRecord> kept;
    kept.reserve(sel.selected.size());
    for (std::size_t i : sel.selected) kept.push_back(pool[i]);
    write_file(out_path, write_examples(kept));
  } else {
    std::vector<CandidateRecord> pool = read_candidates(bytes);
    sel = sample_diverse(pool, targets, seed);
    std::vector<CandidateRecord> kept;
    kept.reserve(sel.selected.size());
    for (std::size_t i : sel.selected) kept.push_back(pool[i]);
    write_file(out_path, write_candidates(kept));
  }
  std::string report = write_shortfalls(sel.shortfalls);
  if (report_path.empty()) {
    std::cout << report;
  } else {
    write_file(report_path, report);
  }
}

// examples -> <prefix>-development/-test/-validation TSVs, URL-disjoint
inline void split(const std::string& examples_path,
                  const std::string& out_prefix, std::size_t dev_size,
                  std::size_t test_size) {
  std::vector<ExampleRecord> examples = read_examples(read_file(examples_path));
  SplitResult result = split_by_url(examples, dev_size, test_size);
  write_file(out_prefix + "-development.tsv", write_examples(result.dev));
  write_file(out_prefix + "-test.tsv", write_examples(result.test));
  write_file(out_prefix + "-validation.tsv",
             write_examples(result.validation));
  auto note = [&](const char* name, std::size_t want, std::size_t got) {
    if (want != got) {
      std::cerr << "note: " << name << " split has " << got
                << " examples (requested " << want << "; URL groups are "
                << "never separated)\n";
    }
  };
  note("development", dev_size, result.dev.size());
  note("test", test_size, result.test.size());
}

struct ResolveOptions {
  Strategy strategy = Strategy::Random;
  Mode mode = Mode::Standard;
  Setting setting = Setting::SnippetContext;
  std::uint64_t seed = 0;
  std::string attention_path;        // transformer strategies
  HeadId head = {3, 7};              // transformer-single
  std::string train_examples_path;   // transformer-multi
  std::string train_attention_path;  // transformer-multi
  int chi2_k = 3;
  int n_trees = 100;
};

namespace detail {

struct AttentionIndex {
  std::map<std::string, AttentionRecord> by_id;

  const AttentionRecord& get(const std::string& id) const {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ValidationError("no attention record for example '" + id + "'");
    }
    return it->second;
  }
};

inline AttentionIndex load_attention_file(const std::string& path) {
  AttentionIndex index;
  for (AttentionRecord& rec : load_attention(read_file(path))) {
    std::string id = rec.id;
    if (!index.by_id.emplace(id, std::move(rec)).second) {
      throw ValidationError("duplicate attention record '" + id + "'");
    }
  }
  return index;
}

// Feature rows and gold labels for the multi-head classifier: one row per
// (example, candidate), the label marking whether the candidate aligns with
// a gold coreferent name.
inline void multi_training_data(const std::vector<ExampleRecord>& examples,
                                const std::vector<Document>& docs,
                                const AttentionIndex& attention, Mode mode,
                                std::vector<std::vector<std::uint8_t>>& rows,
                                std::vector<std::uint8_t>& labels) {
  for (const ExampleRecord& ex : examples) {
    const Document& doc = find_document(docs, ex);
    AlignedExample aligned = align_example(ex, doc);
    std::vector<Mention> cands = candidate_antecedents(aligned, doc, mode);
    const AttentionRecord& rec = attention.get(ex.id);
    auto selections =
        all_head_selections(rec, cands, aligned.pronoun, doc);
    for (const Mention& cand : cands) {
      rows.push_back(head_features(doc, selections, cand));
      auto [a, b] = align_to_pair(mention_text(doc, cand), ex.name_a,
                                  ex.name_b);
      bool gold = (a && ex.a_coref) || (b && ex.b_coref);
      labels.push_back(gold ? 1 : 0);
    }
  }
}

}  // namespace detail

// examples + corpus [+ attention] -> predictions TSV
inline void resolve(const std::string& examples_path,
                    const std::string& corpus_path,
                    const std::string& out_path, const ResolveOptions& opt) {
  ResolverConfig cfg{opt.strategy, opt.mode, opt.setting, opt.seed};
  validate_config(cfg);
  std::vector<ExampleRecord> examples = read_examples(read_file(examples_path));
  std::sort(examples.begin(), examples.end(),
            [](const ExampleRecord& a, const ExampleRecord& b) {
              return a.id < b.id;
            });
  std::vector<Document> docs = parse_corpus(read_file(corpus_path));

  std::optional<detail::AttentionIndex> attention;
  ForestModel model;
  bool is_transformer = opt.strategy == Strategy::TransformerSingle ||
                        opt.strategy == Strategy::TransformerMulti;
  if (is_transformer) {
    if (opt.attention_path.empty()) {
      throw std::invalid_argument(
          "transformer strategies require an attention file");
    }
    attention = detail::load_attention_file(opt.attention_path);
  }
  if (opt.strategy == Strategy::TransformerMulti) {
    if (opt.train_examples_path.empty() || opt.train_attention_path.empty()) {
      throw std::invalid_argument(
          "transformer-multi requires training examples and their attention "
          "records");
    }
    std::vector<ExampleRecord> train =
        read_examples(read_file(opt.train_examples_path));
    detail::AttentionIndex train_attention =
        detail::load_attention_file(opt.train_attention_path);
    std::vector<std::vector<std::uint8_t>> rows;
    std::vector<std::uint8_t> labels;
    detail::multi_training_data(train, docs, train_attention, opt.mode, rows,
                                labels);
    if (rows.empty()) {
      throw ValidationError("no training rows for transformer-multi");
    }
    std::vector<int> picked = chi2_select(rows, labels, opt.chi2_k);
    std::vector<std::vector<std::uint8_t>> restricted;
    restricted.reserve(rows.size());
    for (const auto& row : rows) {
      std::vector<std::uint8_t> r;
      r.reserve(picked.size());
      for (int f : picked) r.push_back(row[static_cast<std::size_t>(f)]);
      restricted.push_back(std::move(r));
    }
    model = fit_forest(restricted, labels, opt.n_trees, opt.seed);
    model.selected_features = picked;
  }

  std::mt19937_64 rng(opt.seed);
  PredictionMap predictions;
  for (const ExampleRecord& ex : examples) {
    const Document& doc = find_document(docs, ex);
    AlignedExample aligned = align_example(ex, doc);
    std::vector<Mention> cands = candidate_antecedents(aligned, doc, opt.mode);
    Resolution r;
    if (opt.strategy == Strategy::TransformerSingle) {
      const AttentionRecord& rec = attention->get(ex.id);
      r = resolve_single_head(rec, opt.head, cands, aligned.pronoun, doc);
    } else if (opt.strategy == Strategy::TransformerMulti) {
      const AttentionRecord& rec = attention->get(ex.id);
      auto selections = all_head_selections(rec, cands, aligned.pronoun, doc);
      r = resolve_multi(model, doc, cands, selections);
    } else {
      r = resolve_heuristic(cfg, ex, aligned, cands, doc, rng);
      predictions[ex.id] = {r.a_pred, r.b_pred};
      continue;
    }
    std::optional<std::string> surface;
    if (r.selected) surface = mention_text(doc, *r.selected);
    auto [a, b] = align_to_pair(surface, ex.name_a, ex.name_b);
    predictions[ex.id] = {a, b};
  }
  write_file(out_path, write_predictions(predictions));
}

// examples + predictions -> score report (TSV, optional JSON)
inline ScoreReport score(const std::string& examples_path,
                         const std::string& predictions_path,
                         const std::string& out_path,
                         const std::string& json_path) {
  std::vector<ExampleRecord> examples = read_examples(read_file(examples_path));
  PredictionMap predictions = read_predictions(read_file(predictions_path));
  GenderedConfusion counts = confusion_from_pairs(examples, predictions);
  ScoreReport report = make_report(counts);
  if (report.missing_predictions > 0) {
    std::cerr << "warning: " << report.missing_predictions
              << " example(s) had no prediction and scored as "
              << "(FALSE, FALSE)\n";
  }
  std::string tsv = report_tsv(report);
  if (out_path.empty()) {
    std::cout << tsv;
  } else {
    write_file(out_path, tsv);
  }
  if (!json_path.empty()) {
    write_file(json_path, report_json(report).dump(2) + "\n");
  }
  return report;
}

// examples + four prediction files -> difficulty histogram
inline DifficultyHistogram analyze(const std::string& examples_path,
                                   const std::vector<std::string>&
                                       prediction_paths,
                                   const std::string& out_path) {
  std::vector<ExampleRecord> examples = read_examples(read_file(examples_path));
  std::vector<PredictionMap> systems;
  systems.reserve(prediction_paths.size());
  for (const std::string& path : prediction_paths) {
    systems.push_back(read_predictions(read_file(path)));
  }
  DifficultyHistogram hist = difficulty_buckets(examples, systems);
  std::string tsv = difficulty_tsv(hist);
  if (out_path.empty()) {
    std::cout << tsv;
  } else {
    write_file(out_path, tsv);
  }
  return hist;
}

}  // namespace apc::cmd
