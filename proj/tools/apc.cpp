// apc: build ambiguous-pronoun challenge sets from annotated corpora and
// evaluate resolvers on them.
//
//   apc extract  --input corpus.conllu --output candidates.tsv
//   apc curate   --input candidates.tsv --labels ratings.tsv \
//                --output examples.tsv --seed 7
//   apc sample   --input candidates.tsv --output balanced.tsv --seed 7
//   apc split    --input examples.tsv --output corpus --dev-size 40 \
//                --test-size 40
//   apc resolve  --input examples.tsv --corpus corpus.conllu \
//                --strategy parallelism --output predictions.tsv
//   apc score    --input examples.tsv --predictions predictions.tsv
//   apc analyze  --input examples.tsv --predictions p1.tsv ... (4 files)

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apc/commands.hpp"

namespace {

apc::Strategy parse_strategy(const std::string& s) {
  if (s == "random") return apc::Strategy::Random;
  if (s == "token-distance") return apc::Strategy::TokenDistance;
  if (s == "topical") return apc::Strategy::TopicalEntity;
  if (s == "syntactic") return apc::Strategy::SyntacticDistance;
  if (s == "parallelism") return apc::Strategy::Parallelism;
  if (s == "url") return apc::Strategy::Url;
  if (s == "transformer-single") return apc::Strategy::TransformerSingle;
  if (s == "transformer-multi") return apc::Strategy::TransformerMulti;
  throw CLI::ValidationError("--strategy", "unknown strategy '" + s + "'");
}

apc::HeadId parse_head(const std::string& s) {
  auto parts = apc::split(s, ':');
  if (parts.size() == 2) {
    auto l = apc::detail::parse_int(parts[0]);
    auto h = apc::detail::parse_int(parts[1]);
    if (l && h) return {*l, *h};
  }
  throw CLI::ValidationError("--head", "expected LAYER:HEAD, e.g. 3:7");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ambiguous-pronoun challenge set toolkit"};
  app.require_subcommand(1);
  app.set_config("--config")->description(
      "key=value file with one [section] per subcommand; flags override it");

  std::string input, output, corpus, labels, attention, report, json_path;
  std::vector<std::string> predictions;
  std::string strategy = "random", mode = "standard", setting = "snippet";
  std::string head = "3:7", train_examples, train_attention;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t dev_size = 0, test_size = 0;
  int chi2_k = 3, n_trees = 100;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "64-bit seed for any random choice")
        ->each([&](const std::string&) { seed_given = true; });
  };

  auto* cmd_extract =
      app.add_subcommand("extract", "corpus file -> candidate contexts TSV");
  cmd_extract->add_option("--input", input, "annotated corpus file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_extract->add_option("--output", output, "candidates TSV")->required();

  auto* cmd_curate = app.add_subcommand(
      "curate", "candidates + rater labels -> examples TSV + agreement "
                "report");
  cmd_curate->add_option("--input", input, "candidates TSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_curate->add_option("--labels", labels, "rater labels TSV (ID R1 R2 R3)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_curate->add_option("--output", output, "examples TSV")->required();
  cmd_curate->add_option("--report", report,
                         "agreement report path (default: stdout)");
  add_seed(cmd_curate);

  auto* cmd_sample = app.add_subcommand(
      "sample", "candidate pool -> diversity-balanced pool + shortfall "
                "report");
  cmd_sample->add_option("--input", input, "candidates TSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_sample->add_option("--output", output, "balanced candidates TSV")
      ->required();
  cmd_sample->add_option("--report", report,
                         "shortfall report path (default: stdout)");
  add_seed(cmd_sample);

  auto* cmd_split = app.add_subcommand(
      "split", "examples -> URL-disjoint development/test/validation files");
  cmd_split->add_option("--input", input, "examples TSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_split->add_option("--output", output, "output path prefix")->required();
  cmd_split->add_option("--dev-size", dev_size, "development size")
      ->required();
  cmd_split->add_option("--test-size", test_size, "test size")->required();
  add_seed(cmd_split);

  auto* cmd_resolve = app.add_subcommand(
      "resolve", "examples + corpus [+ attention] -> predictions TSV");
  cmd_resolve->add_option("--input", input, "examples TSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_resolve->add_option("--corpus", corpus, "annotated corpus file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_resolve->add_option("--output", output, "predictions TSV")->required();
  cmd_resolve->add_option("--strategy", strategy,
                          "random|token-distance|topical|syntactic|"
                          "parallelism|url|transformer-single|"
                          "transformer-multi");
  cmd_resolve->add_option("--mode", mode, "standard|gold-two-mention");
  cmd_resolve->add_option("--setting", setting, "snippet|page");
  cmd_resolve->add_option("--attention", attention,
                          "attention records (JSON lines)");
  cmd_resolve->add_option("--head", head,
                          "layer:head for transformer-single");
  cmd_resolve->add_option("--train-examples", train_examples,
                          "labeled examples for transformer-multi training");
  cmd_resolve->add_option("--train-attention", train_attention,
                          "attention records for the training examples");
  cmd_resolve->add_option("--chi2-k", chi2_k,
                          "head features kept by chi-squared selection");
  cmd_resolve->add_option("--trees", n_trees, "trees in the ensemble");
  add_seed(cmd_resolve);

  auto* cmd_score =
      app.add_subcommand("score", "examples + predictions -> score report");
  cmd_score->add_option("--input", input, "examples TSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_score->add_option("--predictions", predictions, "predictions TSV")
      ->required()
      ->expected(1)
      ->check(CLI::ExistingFile);
  cmd_score->add_option("--output", output, "report TSV (default: stdout)");
  cmd_score->add_option("--json", json_path, "machine-readable report path");

  auto* cmd_analyze = app.add_subcommand(
      "analyze", "examples + four prediction files -> difficulty histogram");
  cmd_analyze->add_option("--input", input, "examples TSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_analyze
      ->add_option("--predictions", predictions,
                   "four prediction TSVs, one per system")
      ->required()
      ->expected(4)
      ->check(CLI::ExistingFile);
  cmd_analyze->add_option("--output", output,
                          "histogram TSV (default: stdout)");

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->fallthrough(true);  // lets --config follow the subcommand
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_extract->parsed()) {
      apc::cmd::extract(input, output);
    } else if (cmd_curate->parsed()) {
      if (!seed_given) {
        throw std::invalid_argument("curate requires --seed");
      }
      apc::cmd::curate(input, labels, output, report, seed);
    } else if (cmd_sample->parsed()) {
      if (!seed_given) {
        throw std::invalid_argument("sample requires --seed");
      }
      apc::cmd::sample(input, output, report, seed);
    } else if (cmd_split->parsed()) {
      apc::cmd::split(input, output, dev_size, test_size);
    } else if (cmd_resolve->parsed()) {
      apc::cmd::ResolveOptions opt;
      opt.strategy = parse_strategy(strategy);
      if (mode == "standard") {
        opt.mode = apc::Mode::Standard;
      } else if (mode == "gold-two-mention") {
        opt.mode = apc::Mode::GoldTwoMention;
      } else {
        throw std::invalid_argument("unknown mode '" + mode + "'");
      }
      if (setting == "snippet") {
        opt.setting = apc::Setting::SnippetContext;
      } else if (setting == "page") {
        opt.setting = apc::Setting::PageContext;
      } else {
        throw std::invalid_argument("unknown setting '" + setting + "'");
      }
      bool needs_seed = opt.strategy == apc::Strategy::Random ||
                        opt.strategy == apc::Strategy::TransformerMulti;
      if (needs_seed && !seed_given) {
        throw std::invalid_argument("this strategy requires --seed");
      }
      opt.seed = seed;
      opt.attention_path = attention;
      opt.head = parse_head(head);
      opt.train_examples_path = train_examples;
      opt.train_attention_path = train_attention;
      opt.chi2_k = chi2_k;
      opt.n_trees = n_trees;
      apc::cmd::resolve(input, corpus, output, opt);
    } else if (cmd_score->parsed()) {
      apc::cmd::score(input, predictions.at(0), output, json_path);
    } else if (cmd_analyze->parsed()) {
      apc::cmd::analyze(input, predictions, output);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
