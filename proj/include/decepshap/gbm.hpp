#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "decepshap/matrix.hpp"

namespace decepshap {

struct TrainConfig {
  int num_rounds = 100;
  int max_depth = 3;
  double learning_rate = 0.3;
  double lambda = 1.0;  // L2 penalty on leaf weights
  double gamma = 0.0;   // minimum split gain
  double min_child_weight = 1.0;
  std::uint64_t seed = 0;

  // Throws UsageError when a field is out of range.
  void validate() const;
};

// Flat node storage; children are indices into Tree::nodes. Internal nodes
// route `x[feature] < threshold` to the left child, everything else (ties
// included) to the right.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf = 0.0;   // post-shrinkage weight, leaves only
  double cover = 0.0;  // sum of hessians routed here

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at index 0

  // No bounds or finiteness checks; callers validate inputs once.
  double value(std::span<const double> x) const {
    const TreeNode* n = &nodes[0];
    while (!n->is_leaf()) {
      n = &nodes[static_cast<std::size_t>(x[static_cast<std::size_t>(n->feature)] < n->threshold
                                              ? n->left
                                              : n->right)];
    }
    return n->leaf;
  }

  int depth() const;
};

struct TreeEnsemble {
  std::vector<std::string> feature_names;
  double base_score = 0.0;
  double learning_rate = 0.3;
  std::vector<Tree> trees;

  std::size_t num_features() const { return feature_names.size(); }
};

struct TrainingResult {
  TreeEnsemble model;
  std::vector<double> round_loss;  // mean training log-loss after each round
};

// Logistic loss in margin space: log(1 + e^m) - y m.
double logistic_loss(double margin, int label);
double mean_logistic_loss(std::span<const double> margins, std::span<const int> labels);
double sigmoid(double margin);

struct GradientPair {
  double grad;
  double hess;
};
// First and second derivative of logistic_loss with respect to the margin.
GradientPair logistic_gradient(double margin, int label);

// Exact greedy boosting. Feature names default to f0..f{n-1} when empty.
TrainingResult train(const FeatureMatrix& X, std::span<const int> y, const TrainConfig& cfg,
                     std::vector<std::string> feature_names = {});

// base_score plus the leaf reached in every tree. Throws DataError on a
// width mismatch or a non-finite input.
double predict_margin(const TreeEnsemble& model, std::span<const double> x);
// Same as predict_margin without input validation.
double predict_margin_unchecked(const TreeEnsemble& model, std::span<const double> x);
double predict_proba(const TreeEnsemble& model, std::span<const double> x);
int predict_class(const TreeEnsemble& model, std::span<const double> x);

std::string model_to_json(const TreeEnsemble& model);
TreeEnsemble model_from_json(std::string_view text);
void save_model(const TreeEnsemble& model, const std::filesystem::path& path);
TreeEnsemble load_model(const std::filesystem::path& path);

inline constexpr int kModelSchemaVersion = 1;

namespace detail {

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;

  bool valid() const { return feature >= 0; }
};

// Midpoint between neighbouring sorted values that keeps `lo` on the left.
double split_threshold(double lo, double hi);

double split_gain(double gl, double hl, double gr, double hr, double lambda, double gamma);

// Highest-gain split of `rows` over every feature, ties resolved toward the
// lower feature index and then the lower threshold. Returns an invalid
// candidate when no split has positive gain.
SplitCandidate find_best_split(const FeatureMatrix& X, std::span<const std::size_t> rows,
                               std::span<const double> grad, std::span<const double> hess,
                               const TrainConfig& cfg);

}  // namespace detail

}  // namespace decepshap
