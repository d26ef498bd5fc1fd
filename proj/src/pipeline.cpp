#include "decepshap/pipeline.hpp"

#include <cstdio>

#include "decepshap/error.hpp"
#include "decepshap/io.hpp"
#include "json.hpp"

namespace decepshap {

namespace fs = std::filesystem;

namespace {

std::string loss_csv(const std::vector<double>& losses) {
  std::string out = "round,loss\n";
  for (std::size_t r = 0; r < losses.size(); ++r) {
    out += std::to_string(r + 1) + "," + format_double(losses[r]) + "\n";
  }
  return out;
}

std::string indexed_name(const char* prefix, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03zu%s", prefix, i, ext);
  return buf;
}

Dataset load_csv_dataset(const fs::path& path) {
  const auto table = parse_numeric_csv(read_file(path));
  if (table.header.size() < 2 || table.header.back() != "label") {
    throw DataError(path.string() + ": feature CSV needs a trailing `label` column");
  }
  Dataset d;
  d.feature_names.assign(table.header.begin(), table.header.end() - 1);
  d.features = FeatureMatrix(d.feature_names.size());
  for (const auto& row : table.rows) {
    const double label = row.back();
    if (label != 0.0 && label != 1.0) throw DataError(path.string() + ": labels must be 0 or 1");
    d.features.append_row(std::span<const double>(row).first(row.size() - 1));
    d.labels.push_back(static_cast<int>(label));
  }
  return d;
}

void check_columns(const TreeEnsemble& model, const Dataset& data, const fs::path& path) {
  if (model.feature_names != data.feature_names) {
    throw DataError(path.string() + ": columns do not match the model's feature names");
  }
}

}  // namespace

void PipelineConfig::validate() const {
  train.validate();
  if (train_size == 0 || test_size == 0) throw UsageError("train and test sizes must be positive");
  if (background_cap == 0) throw UsageError("background cap must be positive");
}

Dataset featurize_to_dataset(const Corpus& corpus, const Featurizer& featurizer) {
  auto fc = featurize_corpus(corpus, featurizer);
  return {feature_names(), std::move(fc.features), std::move(fc.labels)};
}

Dataset load_dataset(const fs::path& path, const PipelineConfig& cfg) {
  if (path.extension() == ".csv") return load_csv_dataset(path);
  const auto corpus = load_corpus(path, Source::kSYN);
  const Featurizer featurizer(LexiconSet::load(cfg.lexicon_dir));
  return featurize_to_dataset(corpus, featurizer);
}

SplitSummary run_split(const fs::path& dis, const fs::path& partner, const PipelineConfig& cfg) {
  cfg.validate();
  const auto dis_corpus = load_corpus(dis, Source::kDIS);
  const auto partner_corpus = load_corpus(partner, Source::kSYN);
  const auto split =
      make_hybrid_split(dis_corpus, partner_corpus, cfg.train_size, cfg.test_size, cfg.seed);
  OutputBatch batch;
  batch.add(cfg.out_dir / "train.jsonl", to_jsonl(split.train));
  batch.add(cfg.out_dir / "test.jsonl", to_jsonl(split.test));
  batch.commit();
  return {split.train.size(), split.test.size()};
}

std::size_t run_featurize(const fs::path& input, const fs::path& output,
                          const PipelineConfig& cfg) {
  const auto corpus = load_corpus(input, Source::kSYN);
  const Featurizer featurizer(LexiconSet::load(cfg.lexicon_dir));
  const auto fc = featurize_corpus(corpus, featurizer);
  write_file_atomic(output, features_to_csv(fc));
  return fc.labels.size();
}

double run_train(const fs::path& train_path, const PipelineConfig& cfg) {
  cfg.validate();
  auto data = load_dataset(train_path, cfg);
  auto result = train(data.features, data.labels, cfg.train, data.feature_names);
  OutputBatch batch;
  batch.add(cfg.out_dir / "model.json", model_to_json(result.model));
  batch.add(cfg.out_dir / "loss.csv", loss_csv(result.round_loss));
  batch.commit();
  return result.round_loss.back();
}

MetricsReport run_evaluate(const fs::path& model_path, const fs::path& test_path,
                           const std::string& name, const PipelineConfig& cfg) {
  const auto model = load_model(model_path);
  const auto data = load_dataset(test_path, cfg);
  check_columns(model, data, test_path);
  auto report = evaluate(model, data.features, data.labels);
  const std::vector<NamedReport> rows{{name, report}};
  OutputBatch batch;
  batch.add(cfg.out_dir / "metrics.json", metrics_to_json(report));
  batch.add(cfg.out_dir / "roc.csv", roc_to_csv(report));
  batch.add(cfg.out_dir / "table3.txt", report_table(rows));
  batch.commit();
  return report;
}

void add_explain_outputs(OutputBatch& batch, const fs::path& dir,
                         const std::vector<Explanation>& explanations,
                         const GlobalSummary& summary) {
  batch.add(dir / "summary.json", summary_to_json(summary));
  for (std::size_t i = 0; i < explanations.size(); ++i) {
    batch.add(dir / "explanations" / indexed_name("instance", i, ".json"),
              explanation_to_json(explanations[i]));
    batch.add(dir / "waterfall" / indexed_name("instance", i, ".json"),
              waterfall_to_json(waterfall(explanations[i])));
  }
  // Each of the two top-ranked features against every other feature.
  const std::size_t top = std::min<std::size_t>(2, summary.ranking.size());
  for (std::size_t k = 0; k < top; ++k) {
    const auto& primary = summary.ranking[k].feature;
    for (const auto& name : explanations.front().feature_names) {
      if (name == primary) continue;
      batch.add(dir / "interactions" / (primary + "__" + name + ".csv"),
                interaction_to_csv(interaction_report(explanations, primary, name)));
    }
  }
}

GlobalSummary run_explain(const fs::path& model_path, const fs::path& instances_path,
                          const fs::path& background_path, const PipelineConfig& cfg) {
  cfg.validate();
  const auto model = load_model(model_path);
  const auto instances = load_dataset(instances_path, cfg);
  const auto background = load_dataset(background_path, cfg);
  check_columns(model, instances, instances_path);
  check_columns(model, background, background_path);
  if (instances.features.rows() == 0) throw DataError("no instances to explain");

  const auto bg = background.features.head(cfg.background_cap);
  const auto explanations = explain_all(model, instances.features, bg, cfg.method);
  auto summary = global_summary(explanations);
  OutputBatch batch;
  add_explain_outputs(batch, cfg.out_dir, explanations, summary);
  batch.commit();
  return summary;
}

const std::vector<HybridModelSpec>& hybrid_models() {
  static const std::vector<HybridModelSpec> models{
      {"DIS+EN", "syn_en.jsonl", Source::kEN},
      {"DIS+FB", "syn_fb.jsonl", Source::kFB},
      {"DIS+NEG", "syn_neg.jsonl", Source::kNEG},
      {"DIS+POS", "syn_pos.jsonl", Source::kPOS},
  };
  return models;
}

RunAllResult run_all(const PipelineConfig& cfg) {
  cfg.validate();
  const Featurizer featurizer(LexiconSet::load(cfg.lexicon_dir));
  const auto dis = load_corpus(cfg.corpus_dir / "syn_dis.jsonl", Source::kDIS);

  RunAllResult result;
  OutputBatch batch;
  std::vector<NamedReport> rows;
  nlohmann::ordered_json overview = nlohmann::ordered_json::array();

  for (const auto& entry : hybrid_models()) {
    const auto partner = load_corpus(cfg.corpus_dir / entry.partner_file, entry.partner_source);
    const auto split = make_hybrid_split(dis, partner, cfg.train_size, cfg.test_size, cfg.seed);
    const auto train_data = featurize_to_dataset(split.train, featurizer);
    const auto test_data = featurize_to_dataset(split.test, featurizer);

    auto trained = train(train_data.features, train_data.labels, cfg.train,
                         train_data.feature_names);
    auto metrics = evaluate(trained.model, test_data.features, test_data.labels);
    const auto bg = train_data.features.head(cfg.background_cap);
    const auto explanations = explain_all(trained.model, test_data.features, bg, cfg.method);
    auto summary = global_summary(explanations);

    const fs::path dir = cfg.out_dir / entry.name;
    batch.add(dir / "train.jsonl", to_jsonl(split.train));
    batch.add(dir / "test.jsonl", to_jsonl(split.test));
    batch.add(dir / "model.json", model_to_json(trained.model));
    batch.add(dir / "loss.csv", loss_csv(trained.round_loss));
    batch.add(dir / "metrics.json", metrics_to_json(metrics));
    batch.add(dir / "roc.csv", roc_to_csv(metrics));
    add_explain_outputs(batch, dir, explanations, summary);

    nlohmann::ordered_json top3 = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < 3 && k < summary.ranking.size(); ++k) {
      top3.push_back(summary.ranking[k].feature);
    }
    overview.push_back({{"model", entry.name},
                        {"accuracy", metrics.accuracy},
                        {"precision", metrics.weighted.precision},
                        {"recall", metrics.weighted.recall},
                        {"f1", metrics.weighted.f1},
                        {"auc", metrics.auc},
                        {"top3", top3}});

    rows.emplace_back(entry.name, metrics);
    result.models.push_back(
        {entry.name, std::move(metrics), std::move(summary), std::move(trained.round_loss)});
  }

  result.table = report_table(rows);
  batch.add(cfg.out_dir / "table3.txt", result.table);
  batch.add(cfg.out_dir / "run_all.json", overview.dump(1) + "\n");
  batch.commit();
  return result;
}

}  // namespace decepshap
