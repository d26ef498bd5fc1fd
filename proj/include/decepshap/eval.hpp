#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "decepshap/gbm.hpp"
#include "decepshap/matrix.hpp"

namespace decepshap {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0, 0) origin
};

// Class 1 (truthful) is the positive class for the confusion counts and ROC.
struct MetricsReport {
  double accuracy = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::array<ClassMetrics, 2> per_class{};
  AveragedMetrics weighted;  // per-class values weighted by support
  AveragedMetrics macro;
  std::vector<RocPoint> roc;
  double auc = 0.0;
};

// Hard predictions use margin >= 0 as class 1. Tied margins form a single
// diagonal ROC segment; AUC is the trapezoidal area.
MetricsReport evaluate_margins(std::span<const double> margins, std::span<const int> labels);
MetricsReport evaluate(const TreeEnsemble& model, const FeatureMatrix& X,
                       std::span<const int> labels);

using NamedReport = std::pair<std::string, MetricsReport>;

// Model / Accuracy / Precision / Recall / F1 rows, accuracy as a whole
// percentage and the weighted averages to two decimals.
std::string report_table(std::span<const NamedReport> reports);

std::string metrics_to_json(const MetricsReport& report);
std::string roc_to_csv(const MetricsReport& report);

}  // namespace decepshap
