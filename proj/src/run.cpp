#include "aspecteval/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aspecteval/data_io.hpp"
#include "aspecteval/detail/csv.hpp"
#include "aspecteval/detail/sha256.hpp"
#include "aspecteval/metrics.hpp"
#include "aspecteval/similarity.hpp"
#include "aspecteval/stats.hpp"

namespace aspecteval {

namespace {

using nlohmann::ordered_json;

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

ordered_json config_json(const RunConfig& config) {
  ordered_json j;
  j["theta"] = config.theta;
  j["backend"] = config.backend;
  j["provider_url"] = config.provider_url;
  j["cache"] = config.cache_path;
  j["seed"] = config.seed;
  j["iterations"] = config.iterations;
  j["grid"] = config.grid;
  j["jobs"] = config.jobs;
  j["format"] = config.format;
  j["conflicting"] = config.conflicting;
  j["bins"] = config.bins;
  return j;
}

ordered_json tool_json() {
  return ordered_json{{"name", kToolName}, {"version", kToolVersion}};
}

ordered_json input_json(const std::string& path) {
  return ordered_json{{"path", path}, {"sha256", detail::sha256_hex_file(path)}};
}

ordered_json macro_json(const MacroScores& macro) {
  ordered_json j;
  j["precision"] = macro.precision;
  j["recall"] = macro.recall;
  j["f1"] = macro.f1;
  j["f1_harmonic"] = macro.f1_harmonic;
  return j;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Error::Kind::parse_error, "cannot write " + path);
  }
  out << body;
}

ConflictingPolicy conflicting_policy(const RunConfig& config) {
  if (config.conflicting == "neutral") return ConflictingPolicy::fold_to_neutral;
  if (config.conflicting == "keep") return ConflictingPolicy::keep;
  throw Error(Error::Kind::invalid_config,
              "--conflicting must be 'neutral' or 'keep', got " + config.conflicting);
}

BackendConfig backend_config(const RunConfig& config) {
  BackendConfig backend;
  backend.spec = config.backend;
  backend.provider_url = config.provider_url;
  backend.cache_path = config.cache_path;
  return backend;
}

CorpusFormat corpus_format(const RunConfig& config) {
  auto format = parse_format(config.format);
  if (!format) {
    throw Error(Error::Kind::invalid_config, "unknown corpus format: " + config.format);
  }
  return *format;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case Error::Kind::provider_unreachable:
    case Error::Kind::provider_dimension_changed:
    case Error::Kind::missing_embedding:
      return 3;
    default:
      return 2;
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const Error& e) {
    std::cerr << kToolName << ": error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << kToolName << ": error: " << e.what() << "\n";
    return 2;
  }
}

std::string system_name(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

BinSpec parse_bins(const std::string& spec) {
  BinSpec bins;
  if (spec == "none") {
    bins.mode = BinSpec::Mode::none;
    return bins;
  }
  if (spec == "quartiles") {
    bins.mode = BinSpec::Mode::quartiles;
    return bins;
  }
  bins.mode = BinSpec::Mode::explicit_edges;
  std::string token;
  std::istringstream stream(spec);
  while (std::getline(stream, token, ',')) {
    try {
      bins.edges.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw Error(Error::Kind::invalid_config, "bad bin edge: " + token);
    }
  }
  return bins;
}

}  // namespace

std::vector<Theta> parse_grid(const std::string& spec) {
  std::vector<double> values;
  if (spec.find(':') != std::string::npos) {
    double begin = 0, end = 0, step = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &begin, &end, &step) != 3 || step <= 0) {
      throw Error(Error::Kind::invalid_config, "grid spec must be begin:end:step, got " + spec);
    }
    long count = std::lround((end - begin) / step);
    if (count < 0 || std::fabs(begin + count * step - end) > 1e-9) {
      throw Error(Error::Kind::invalid_config, "grid step does not divide the interval: " + spec);
    }
    for (long i = 0; i <= count; ++i) {
      // Interpolating toward the exact endpoint avoids drift past 1.
      values.push_back(count == 0 ? begin
                                  : begin + (end - begin) * static_cast<double>(i) / count);
    }
  } else {
    std::string token;
    std::istringstream stream(spec);
    while (std::getline(stream, token, ',')) {
      try {
        values.push_back(std::stod(token));
      } catch (const std::exception&) {
        throw Error(Error::Kind::invalid_config, "bad grid value: " + token);
      }
    }
  }
  std::vector<Theta> grid;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0.0 || values[i] > 1.0 || (i > 0 && values[i] <= values[i - 1])) {
      throw Error(Error::Kind::invalid_config,
                  "grid must be strictly increasing within (0, 1]: " + spec);
    }
    grid.emplace_back(values[i]);
  }
  if (grid.empty()) {
    throw Error(Error::Kind::invalid_config, "empty grid: " + spec);
  }
  return grid;
}

int run_evaluate(const RunConfig& config, const std::string& gold_path,
                 const std::string& predictions_path) {
  return guarded([&] {
    auto corpus = load_corpus(gold_path, corpus_format(config));
    auto predictions = load_predictions(predictions_path);
    auto scorer = make_scorer(backend_config(config));
    EvaluationReport report = macro_evaluate(corpus, predictions, Theta(config.theta), *scorer,
                                             conflicting_policy(config), config.jobs);

    ordered_json j;
    j["tool"] = tool_json();
    j["config"] = config_json(config);
    j["inputs"] = {{"gold", input_json(gold_path)}, {"predictions", input_json(predictions_path)}};
    j["documents"] = corpus.size();
    j["warnings"] = report.warnings;
    j["extraction"] = {{"generalized", macro_json(report.macro_generalized)},
                       {"exact_match", macro_json(report.macro_exact)}};
    ordered_json classes;
    for (const auto& [polarity, scores] : report.asc.per_class) {
      classes[to_string(polarity)] = {{"tp", scores.tp},       {"fp", scores.fp},
                                      {"fn", scores.fn},       {"precision", scores.precision},
                                      {"recall", scores.recall}, {"f1", scores.f1}};
    }
    j["asc"] = {{"classes", classes},
                {"macro_over_classes",
                 {{"precision", report.asc.macro_precision},
                  {"recall", report.asc.macro_recall},
                  {"f1", report.asc.macro_f1}}},
                {"document_macro", macro_json(report.asc.document_macro)}};
    write_text(config.out + ".json", j.dump(2) + "\n");

    std::string csv =
        "doc_id,gold_count,detected_count,matched,precision,recall,f1,"
        "exact_matched,exact_precision,exact_recall,exact_f1,"
        "asc_correct,asc_precision,asc_recall,asc_f1\n";
    for (size_t d = 0; d < report.generalized.size(); ++d) {
      const DocScores& g = report.generalized[d];
      const DocScores& e = report.exact[d];
      const DocScores& a = report.asc.per_document[d];
      csv += detail::csv_escape(g.doc_id) + "," + std::to_string(g.gold_count) + "," +
             std::to_string(g.detected_count) + "," + std::to_string(g.matched) + "," +
             fmt(g.precision) + "," + fmt(g.recall) + "," + fmt(g.f1) + "," +
             std::to_string(e.matched) + "," + fmt(e.precision) + "," + fmt(e.recall) + "," +
             fmt(e.f1) + "," + std::to_string(a.matched) + "," + fmt(a.precision) + "," +
             fmt(a.recall) + "," + fmt(a.f1) + "\n";
    }
    write_text(config.out + ".csv", csv);

    std::cout << "documents: " << corpus.size() << "\n"
              << "generalized (theta=" << fmt(config.theta) << ", backend=" << report.backend_id
              << "): P=" << fmt(report.macro_generalized.precision)
              << " R=" << fmt(report.macro_generalized.recall)
              << " F1=" << fmt(report.macro_generalized.f1) << "\n"
              << "exact match: P=" << fmt(report.macro_exact.precision)
              << " R=" << fmt(report.macro_exact.recall)
              << " F1=" << fmt(report.macro_exact.f1) << "\n"
              << "asc macro over classes: P=" << fmt(report.asc.macro_precision)
              << " R=" << fmt(report.asc.macro_recall) << " F1=" << fmt(report.asc.macro_f1)
              << "\n"
              << "wrote " << config.out << ".json and " << config.out << ".csv\n";
  });
}

int run_compare(const RunConfig& config, const std::string& gold_path,
                const std::string& predictions_a, const std::string& predictions_b) {
  return guarded([&] {
    auto corpus = load_corpus(gold_path, corpus_format(config));
    auto scorer = make_scorer(backend_config(config));
    auto policy = conflicting_policy(config);
    Theta theta(config.theta);

    auto f1_vector = [&](const std::string& path) {
      auto predictions = load_predictions(path);
      EvaluationReport report =
          macro_evaluate(corpus, predictions, theta, *scorer, policy, config.jobs);
      std::vector<double> scores;
      scores.reserve(report.generalized.size());
      for (const auto& doc : report.generalized) scores.push_back(doc.f1);
      return scores;
    };
    std::vector<double> scores_a = f1_vector(predictions_a);
    std::vector<double> scores_b = f1_vector(predictions_b);
    BootstrapResult result =
        paired_bootstrap(scores_a, scores_b, config.iterations, config.seed, config.jobs);
    const double alpha = 0.05;

    ordered_json j;
    j["tool"] = tool_json();
    j["config"] = config_json(config);
    j["inputs"] = {{"gold", input_json(gold_path)},
                   {"predictions_a", input_json(predictions_a)},
                   {"predictions_b", input_json(predictions_b)}};
    j["metric"] = "extraction_f1_generalized";
    j["observed_delta"] = result.observed_delta;
    j["p_value"] = result.p_value;
    j["iterations"] = result.iterations;
    j["seed"] = result.seed;
    j["alpha"] = alpha;
    j["significant"] = result.p_value < alpha;
    write_text(config.out + ".json", j.dump(2) + "\n");

    std::cout << "observed delta (A - B): " << fmt(result.observed_delta) << "\n"
              << "p-value: " << fmt(result.p_value) << " (" << result.iterations
              << " iterations, seed " << result.seed << ")\n"
              << (result.p_value < alpha ? "significant" : "not significant") << " at alpha "
              << fmt(alpha) << "\n"
              << "wrote " << config.out << ".json\n";
  });
}

int run_sweep(const RunConfig& config, const std::string& gold_path,
              const std::vector<std::string>& prediction_paths) {
  return guarded([&] {
    auto corpus = load_corpus(gold_path, corpus_format(config));
    auto scorer = make_scorer(backend_config(config));
    std::vector<SystemPredictions> systems;
    for (const auto& path : prediction_paths) {
      systems.push_back(SystemPredictions{system_name(path), load_predictions(path)});
    }
    std::vector<Theta> grid = parse_grid(config.grid);
    SweepResult result = theta_sweep(corpus, systems, grid, *scorer, config.jobs);

    std::string rows = "theta,matched_total,nonexact_union,exact_total\n";
    for (const auto& row : result.rows) {
      rows += fmt(row.theta) + "," + std::to_string(row.matched_total) + "," +
              std::to_string(row.nonexact_union) + "," + std::to_string(row.exact_total) + "\n";
    }
    write_text(config.out + ".csv", rows);

    std::string pairs = "theta,system,doc_id,detected,gold,similarity\n";
    for (const auto& pair : result.pairs) {
      pairs += fmt(pair.theta) + "," + detail::csv_escape(pair.system) + "," +
               detail::csv_escape(pair.doc_id) + "," + detail::csv_escape(pair.detected) + "," +
               detail::csv_escape(pair.gold) + "," + fmt(pair.similarity) + "\n";
    }
    write_text(config.out + "_pairs.csv", pairs);

    std::cout << "swept " << grid.size() << " thresholds over " << systems.size()
              << " system(s); wrote " << config.out << ".csv and " << config.out
              << "_pairs.csv\n";
  });
}

int run_kappa(const RunConfig& config, const std::string& ratings_path) {
  return guarded([&] {
    std::ifstream in(ratings_path);
    if (!in) {
      throw Error(Error::Kind::parse_error, "cannot open " + ratings_path);
    }
    std::vector<RatingRecord> records;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto fields = detail::split_csv_line(line);
      if (fields.size() != 3) {
        throw Error(Error::Kind::parse_error,
                    ratings_path + ":" + std::to_string(lineno) + ": expected item,rater,value");
      }
      if (lineno == 1 && fields[0] == "item") continue;  // header
      records.push_back(RatingRecord{fields[0], fields[1], fields[2]});
    }
    RatingsTable table = build_ratings_table(records, parse_bins(config.bins));
    KappaResult result = fleiss_kappa(table);

    ordered_json j;
    j["tool"] = tool_json();
    j["config"] = config_json(config);
    j["inputs"] = {{"ratings", input_json(ratings_path)}};
    j["items"] = table.items.size();
    j["raters"] = table.raters;
    j["categories"] = table.categories;
    j["kappa"] = result.kappa;
    j["degenerate_agreement"] = result.degenerate_agreement;
    write_text(config.out + ".json", j.dump(2) + "\n");

    std::cout << "fleiss kappa: " << fmt(result.kappa)
              << (result.degenerate_agreement ? " (degenerate: single category)" : "") << "\n"
              << "wrote " << config.out << ".json\n";
  });
}

int run_convert(const RunConfig& config, const std::string& source_path,
                const std::string& dest_path) {
  return guarded([&] {
    auto corpus = convert(source_path, corpus_format(config), dest_path);
    CorpusSummary summary = summarize(corpus);
    ordered_json j;
    j["source"] = source_path;
    j["format"] = to_string(corpus_format(config));
    j["dest"] = dest_path;
    j["documents"] = summary.documents;
    j["aspects"] = summary.aspects;
    j["unique_aspects"] = summary.unique_aspects;
    j["positive"] = summary.positive;
    j["negative"] = summary.negative;
    j["neutral"] = summary.neutral;
    j["conflicting"] = summary.conflicting;
    j["implicit_aspects"] = summary.implicit_aspects;
    j["implicit_rate"] = summary.implicit_rate();
    std::cout << j.dump(2) << "\n";
  });
}

}  // namespace aspecteval
