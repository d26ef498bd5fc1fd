#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decepshap/gbm.hpp"
#include "decepshap/matrix.hpp"

namespace decepshap {

// Shapley attribution of one prediction, in margin (log-odds) units.
// Efficiency: sum(phi) + base_value == fx up to rounding.
struct Explanation {
  std::vector<std::string> feature_names;
  std::vector<double> phi;
  double base_value = 0.0;  // mean background margin, E[f(x)]
  double fx = 0.0;          // predict_margin(x)
  std::vector<double> feature_values;
};

enum class ShapMethod { kExact, kTree };

// Enumerates every coalition S of features. The coalition value is the
// interventional expectation: the mean margin over background rows with the
// features in S replaced by x's values. Cost is O(2^n * |background| * trees),
// so n is capped at 24.
Explanation shapley_exact(const TreeEnsemble& model, std::span<const double> x,
                          const FeatureMatrix& background);

// Same quantity as shapley_exact, computed per background row by walking each
// tree once and crediting every reachable leaf to the features that decide
// whether the hybrid input reaches it.
Explanation shapley_tree(const TreeEnsemble& model, std::span<const double> x,
                         const FeatureMatrix& background);

Explanation explain(const TreeEnsemble& model, std::span<const double> x,
                    const FeatureMatrix& background, ShapMethod method);

std::vector<Explanation> explain_all(const TreeEnsemble& model, const FeatureMatrix& instances,
                                     const FeatureMatrix& background, ShapMethod method);

struct RankedFeature {
  std::string feature;
  std::size_t index = 0;
  double mean_abs_phi = 0.0;
};

struct GlobalSummary {
  std::vector<RankedFeature> ranking;  // descending mean |phi|, ties in column order
};

GlobalSummary global_summary(std::span<const Explanation> explanations);
GlobalSummary global_summary(const TreeEnsemble& model, const FeatureMatrix& instances,
                             const FeatureMatrix& background,
                             ShapMethod method = ShapMethod::kTree);

struct WaterfallStep {
  std::string feature;
  double value = 0.0;
  double phi = 0.0;
  double running_total = 0.0;
};

struct WaterfallReport {
  double base_value = 0.0;
  std::vector<WaterfallStep> steps;  // descending |phi|, ties in column order
  double fx = 0.0;
};

WaterfallReport waterfall(const Explanation& e);

struct InteractionRecord {
  double primary_value = 0.0;
  double phi_primary = 0.0;
  double coloring_value = 0.0;
};

struct InteractionReport {
  std::string primary;
  std::string coloring;
  std::vector<InteractionRecord> records;  // one per explanation, input order
};

// Throws UsageError for a feature name the explanations do not carry.
InteractionReport interaction_report(std::span<const Explanation> explanations,
                                     std::string_view primary, std::string_view coloring);

std::string_view direction(double phi);

std::string explanation_to_json(const Explanation& e);
std::string summary_to_json(const GlobalSummary& s);
std::string waterfall_to_json(const WaterfallReport& w);
std::string interaction_to_csv(const InteractionReport& r);

}  // namespace decepshap
