// decepshap: split, featurize, train, evaluate and explain hybrid deception
// models from the command line.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 internal error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decepshap/error.hpp"
#include "decepshap/io.hpp"
#include "decepshap/pipeline.hpp"

namespace {

using namespace decepshap;
namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct Paths {
  std::string dis, partner;
  std::string input, output;
  std::string model, instances, background;
  std::string name = "model";
  std::string method = "tree";
};

void add_train_options(CLI::App& sub, PipelineConfig& cfg) {
  sub.add_option("--rounds", cfg.train.num_rounds, "Boosting rounds")->capture_default_str();
  sub.add_option("--depth", cfg.train.max_depth, "Maximum tree depth")->capture_default_str();
  sub.add_option("--lr", cfg.train.learning_rate, "Learning rate in (0, 1]")
      ->capture_default_str();
  sub.add_option("--lambda", cfg.train.lambda, "L2 leaf regularization")->capture_default_str();
  sub.add_option("--gamma", cfg.train.gamma, "Minimum split gain")->capture_default_str();
  sub.add_option("--min-child-weight", cfg.train.min_child_weight,
                 "Minimum hessian sum per child")
      ->capture_default_str();
}

void add_explain_options(CLI::App& sub, PipelineConfig& cfg, Paths& p) {
  sub.add_option("--method", p.method, "Shapley algorithm")
      ->check(CLI::IsMember({"exact", "tree"}))
      ->capture_default_str();
  sub.add_option("--background-cap", cfg.background_cap,
                 "Use at most this many background rows")
      ->capture_default_str();
}

// Finds --config in argv before the real parse, so file values can become
// option defaults that explicit flags still override.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

void apply_config(CLI::App& app, const std::string& path) {
  const auto values = parse_key_value_config(read_file(path));
  for (const auto& [key, value] : values) {
    bool matched = false;
    auto apply = [&](CLI::App& a) {
      if (auto* opt = a.get_option_no_throw("--" + key)) {
        opt->default_val(value);
        matched = true;
      }
    };
    apply(app);
    for (auto* sub : app.get_subcommands({})) apply(*sub);
    if (!matched) throw UsageError("unknown config key \"" + key + "\"");
  }
}

int run(int argc, char** argv) {
  PipelineConfig cfg;
  Paths p;
  std::string out_dir = cfg.out_dir.string();
  std::string lexicon_dir = cfg.lexicon_dir.string();
  std::string corpus_dir = cfg.corpus_dir.string();
  std::string config_path;

  CLI::App app{"Explainable gradient-boosted deception detection"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--seed", cfg.seed, "Seed for split sampling")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--lexicon-dir", lexicon_dir, "Directory of lexicon files")
      ->capture_default_str();
  app.add_option("--config", config_path, "Flat key = value configuration file");

  auto* split = app.add_subcommand("split", "Build a hybrid train/test split");
  split->add_option("--dis", p.dis, "Disinformation corpus (JSONL)")->required();
  split->add_option("--partner", p.partner, "Partner corpus (JSONL)")->required();
  split->add_option("--train", cfg.train_size, "Training set size")->capture_default_str();
  split->add_option("--test", cfg.test_size, "Test set size")->capture_default_str();

  auto* featurize = app.add_subcommand("featurize", "Write the feature matrix of a corpus");
  featurize->add_option("--input", p.input, "Corpus (JSONL)")->required();
  featurize->add_option("--output", p.output, "Feature CSV (default <out-dir>/features.csv)");

  auto* train_cmd = app.add_subcommand("train", "Train a boosted tree classifier");
  train_cmd->add_option("--input", p.input, "Training data (JSONL corpus or feature CSV)")
      ->required();
  add_train_options(*train_cmd, cfg);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on a test set");
  evaluate_cmd->add_option("--model", p.model, "Model JSON")->required();
  evaluate_cmd->add_option("--input", p.input, "Test data (JSONL corpus or feature CSV)")
      ->required();
  evaluate_cmd->add_option("--name", p.name, "Row name in the results table")
      ->capture_default_str();

  auto* explain_cmd = app.add_subcommand("explain", "Shapley explanations and reports");
  explain_cmd->add_option("--model", p.model, "Model JSON")->required();
  explain_cmd->add_option("--instances", p.instances, "Instances to explain")->required();
  explain_cmd->add_option("--background", p.background, "Background data")->required();
  add_explain_options(*explain_cmd, cfg, p);

  auto* run_all_cmd = app.add_subcommand("run-all", "Reproduce the four hybrid models");
  run_all_cmd->add_option("--corpus-dir", corpus_dir, "Directory of bundled corpora")
      ->capture_default_str();
  run_all_cmd->add_option("--train", cfg.train_size, "Training set size")->capture_default_str();
  run_all_cmd->add_option("--test", cfg.test_size, "Test set size")->capture_default_str();
  add_train_options(*run_all_cmd, cfg);
  add_explain_options(*run_all_cmd, cfg, p);

  try {
    if (const auto path = find_config_path(argc, argv); !path.empty()) apply_config(app, path);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  cfg.out_dir = out_dir;
  cfg.lexicon_dir = lexicon_dir;
  cfg.corpus_dir = corpus_dir;
  cfg.method = p.method == "exact" ? ShapMethod::kExact : ShapMethod::kTree;
  cfg.validate();

  if (split->parsed()) {
    const auto s = run_split(p.dis, p.partner, cfg);
    std::cout << "train: " << s.train << " documents -> " << (cfg.out_dir / "train.jsonl").string()
              << "\ntest: " << s.test << " documents -> " << (cfg.out_dir / "test.jsonl").string()
              << "\n";
  } else if (featurize->parsed()) {
    const fs::path output = p.output.empty() ? cfg.out_dir / "features.csv" : fs::path(p.output);
    const auto rows = run_featurize(p.input, output, cfg);
    std::cout << rows << " rows -> " << output.string() << "\n";
  } else if (train_cmd->parsed()) {
    const double loss = run_train(p.input, cfg);
    std::cout << "final training loss: " << format_double(loss) << "\n";
  } else if (evaluate_cmd->parsed()) {
    const auto report = run_evaluate(p.model, p.input, p.name, cfg);
    const std::vector<NamedReport> rows{{p.name, report}};
    std::cout << report_table(rows) << "AUC: " << format_double(report.auc) << "\n";
  } else if (explain_cmd->parsed()) {
    const auto summary = run_explain(p.model, p.instances, p.background, cfg);
    std::cout << "top features:";
    for (std::size_t k = 0; k < 3 && k < summary.ranking.size(); ++k) {
      std::cout << " " << summary.ranking[k].feature;
    }
    std::cout << "\n";
  } else if (run_all_cmd->parsed()) {
    const auto result = run_all(cfg);
    std::cout << result.table;
    for (const auto& m : result.models) {
      std::cout << m.name << " top features:";
      for (std::size_t k = 0; k < 3 && k < m.summary.ranking.size(); ++k) {
        std::cout << " " << m.summary.ranking[k].feature;
      }
      std::cout << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const decepshap::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const decepshap::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
