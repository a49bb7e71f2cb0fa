#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aspecteval/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"aspect extraction and sentiment evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(aspecteval::kToolVersion));

  aspecteval::RunConfig config;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--theta", config.theta, "similarity threshold in [0, 1]")
        ->envname("ASPECTEVAL_THETA")
        ->capture_default_str();
    cmd->add_option("--backend", config.backend,
                    "exact | char-ngram | embedding[:MODEL] | oracle:FILE")
        ->envname("ASPECTEVAL_BACKEND")
        ->capture_default_str();
    cmd->add_option("--provider-url", config.provider_url, "embedding service base URL")
        ->envname("ASPECTEVAL_PROVIDER_URL");
    cmd->add_option("--cache", config.cache_path, "embedding cache file (JSON Lines)")
        ->envname("ASPECTEVAL_CACHE");
    cmd->add_option("--seed", config.seed, "random seed")
        ->envname("ASPECTEVAL_SEED")
        ->capture_default_str();
    cmd->add_option("--iterations", config.iterations, "bootstrap iterations")
        ->envname("ASPECTEVAL_ITERATIONS")
        ->capture_default_str();
    cmd->add_option("--jobs", config.jobs, "worker threads")
        ->envname("ASPECTEVAL_JOBS")
        ->capture_default_str();
    cmd->add_option("--format", config.format,
                    "corpus format: canonical | semeval-xml | twitter-triple | sport-json")
        ->envname("ASPECTEVAL_FORMAT")
        ->capture_default_str();
    cmd->add_option("--out", config.out, "output path prefix")
        ->envname("ASPECTEVAL_OUT")
        ->capture_default_str();
    cmd->add_option("--conflicting", config.conflicting,
                    "conflicting polarity handling: neutral | keep")
        ->envname("ASPECTEVAL_CONFLICTING")
        ->capture_default_str();
  };

  std::string gold, predictions, predictions_b, source, dest, ratings;
  std::vector<std::string> prediction_files;

  CLI::App* evaluate = app.add_subcommand("evaluate", "score predictions against a gold corpus");
  evaluate->add_option("gold", gold, "gold corpus file")->required();
  evaluate->add_option("predictions", predictions, "prediction file (JSON Lines)")->required();
  add_common(evaluate);

  CLI::App* compare =
      app.add_subcommand("compare", "paired bootstrap significance test between two systems");
  compare->add_option("gold", gold, "gold corpus file")->required();
  compare->add_option("predictions_a", predictions, "first system's predictions")->required();
  compare->add_option("predictions_b", predictions_b, "second system's predictions")->required();
  add_common(compare);

  CLI::App* sweep = app.add_subcommand("sweep", "audit matched pairs across a theta grid");
  sweep->add_option("gold", gold, "gold corpus file")->required();
  sweep->add_option("predictions", prediction_files, "one or more prediction files")->required();
  sweep->add_option("--grid", config.grid, "begin:end:step or comma-separated thetas")
      ->envname("ASPECTEVAL_GRID")
      ->capture_default_str();
  add_common(sweep);

  CLI::App* kappa = app.add_subcommand("kappa", "Fleiss' kappa over an item,rater,value CSV");
  kappa->add_option("ratings", ratings, "ratings CSV")->required();
  kappa->add_option("--bins", config.bins, "none | quartiles | comma-separated edges")
      ->envname("ASPECTEVAL_BINS")
      ->capture_default_str();
  add_common(kappa);

  CLI::App* convert = app.add_subcommand("convert", "convert a corpus to the canonical format");
  convert->add_option("source", source, "source corpus file")->required();
  convert->add_option("dest", dest, "canonical JSON Lines output")->required();
  add_common(convert);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help/--version exit 0; every usage problem is a validation error.
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (evaluate->parsed()) return aspecteval::run_evaluate(config, gold, predictions);
  if (compare->parsed()) return aspecteval::run_compare(config, gold, predictions, predictions_b);
  if (sweep->parsed()) return aspecteval::run_sweep(config, gold, prediction_files);
  if (kappa->parsed()) return aspecteval::run_kappa(config, ratings);
  if (convert->parsed()) return aspecteval::run_convert(config, source, dest);
  return 2;
}
