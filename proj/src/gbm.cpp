#include "decepshap/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "decepshap/error.hpp"
#include "decepshap/io.hpp"
#include "json.hpp"

namespace decepshap {

using json = nlohmann::ordered_json;

void TrainConfig::validate() const {
  if (num_rounds < 1) throw UsageError("num_rounds must be at least 1");
  if (max_depth < 1) throw UsageError("max_depth must be at least 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw UsageError("learning_rate must be in (0, 1]");
  }
  if (!(lambda >= 0.0)) throw UsageError("lambda must be non-negative");
  if (!(gamma >= 0.0)) throw UsageError("gamma must be non-negative");
  if (!(min_child_weight >= 0.0)) throw UsageError("min_child_weight must be non-negative");
}

int Tree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

double sigmoid(double m) {
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

namespace {

double softplus(double m) { return m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m)); }

}  // namespace

// log(1 + e^m) - y m, written as softplus(-m) for y = 1 to avoid cancellation.
double logistic_loss(double m, int y) { return y == 1 ? softplus(-m) : softplus(m); }

double mean_logistic_loss(std::span<const double> margins, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) total += logistic_loss(margins[i], labels[i]);
  return total / static_cast<double>(margins.size());
}

GradientPair logistic_gradient(double m, int y) {
  const double p = sigmoid(m);
  return {p - static_cast<double>(y), p * (1.0 - p)};
}

namespace detail {

double split_threshold(double lo, double hi) {
  const double t = (lo + hi) / 2.0;
  return lo < t ? t : hi;
}

double split_gain(double gl, double hl, double gr, double hr, double lambda, double gamma) {
  const double g = gl + gr;
  const double h = hl + hr;
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda)) - gamma;
}

SplitCandidate find_best_split(const FeatureMatrix& X, std::span<const std::size_t> rows,
                               std::span<const double> grad, std::span<const double> hess,
                               const TrainConfig& cfg) {
  double G = 0.0, H = 0.0;
  for (auto i : rows) {
    G += grad[i];
    H += hess[i];
  }

  SplitCandidate best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f = 0; f < X.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = X(a, f), vb = X(b, f);
      return va < vb || (va == vb && a < b);
    });
    double gl = 0.0, hl = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      gl += grad[order[k]];
      hl += hess[order[k]];
      const double lo = X(order[k], f), hi = X(order[k + 1], f);
      if (lo == hi) continue;
      const double gr = G - gl, hr = H - hl;
      if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) continue;
      const double gain =
          0.5 * (gl * gl / (hl + cfg.lambda) + gr * gr / (hr + cfg.lambda) -
                 G * G / (H + cfg.lambda)) -
          cfg.gamma;
      // Strict comparison keeps the earliest (feature, threshold) on ties.
      if (gain > best.gain) {
        best = {static_cast<int>(f), split_threshold(lo, hi), gain};
      }
    }
  }
  return best;
}

}  // namespace detail

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& X, std::span<const double> grad, std::span<const double> hess,
              const TrainConfig& cfg)
      : X_(X), grad_(grad), hess_(hess), cfg_(cfg) {}

  Tree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    detail::SplitCandidate split;
    if (depth < cfg_.max_depth) {
      split = detail::find_best_split(X_, rows, grad_, hess_, cfg_);
    }
    if (!split.valid()) {
      double G = 0.0, H = 0.0;
      for (auto i : rows) {
        G += grad_[i];
        H += hess_[i];
      }
      auto& leaf = tree_.nodes[static_cast<std::size_t>(id)];
      leaf.leaf = -G / (H + cfg_.lambda) * cfg_.learning_rate;
      leaf.cover = H;
      return id;
    }

    std::vector<std::size_t> left, right;
    const auto f = static_cast<std::size_t>(split.feature);
    for (auto i : rows) (X_(i, f) < split.threshold ? left : right).push_back(i);
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    node.cover = tree_.nodes[static_cast<std::size_t>(l)].cover +
                 tree_.nodes[static_cast<std::size_t>(r)].cover;
    return id;
  }

  const FeatureMatrix& X_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  const TrainConfig& cfg_;
  Tree tree_;
};

void check_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
}

}  // namespace

TrainingResult train(const FeatureMatrix& X, std::span<const int> y, const TrainConfig& cfg,
                     std::vector<std::string> feature_names) {
  cfg.validate();
  const std::size_t n = X.rows();
  if (n == 0) throw DataError("training set is empty");
  if (y.size() != n) throw DataError("feature rows and labels differ in length");
  check_finite(X.data());
  std::size_t pos = 0;
  for (int label : y) {
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
    pos += static_cast<std::size_t>(label);
  }
  if (pos == 0 || pos == n) throw DataError("training labels contain a single class");
  if (feature_names.empty()) {
    for (std::size_t j = 0; j < X.cols(); ++j) feature_names.push_back("f" + std::to_string(j));
  }
  if (feature_names.size() != X.cols()) {
    throw DataError("feature name count does not match matrix width");
  }

  TrainingResult result;
  auto& model = result.model;
  model.feature_names = std::move(feature_names);
  model.learning_rate = cfg.learning_rate;
  model.base_score = std::clamp(
      std::log(static_cast<double>(pos) / static_cast<double>(n - pos)), -10.0, 10.0);

  std::vector<double> margins(n, model.base_score);
  std::vector<double> grad(n), hess(n);
  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

  for (int round = 0; round < cfg.num_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto gp = logistic_gradient(margins[i], y[i]);
      grad[i] = gp.grad;
      hess[i] = gp.hess;
    }
    Tree tree = TreeBuilder(X, grad, hess, cfg).build(all_rows);
    for (std::size_t i = 0; i < n; ++i) margins[i] += tree.value(X.row(i));
    model.trees.push_back(std::move(tree));
    result.round_loss.push_back(mean_logistic_loss(margins, y));
  }
  return result;
}

double predict_margin_unchecked(const TreeEnsemble& model, std::span<const double> x) {
  double m = model.base_score;
  for (const auto& t : model.trees) m += t.value(x);
  return m;
}

double predict_margin(const TreeEnsemble& model, std::span<const double> x) {
  if (x.size() != model.num_features()) {
    throw DataError("expected " + std::to_string(model.num_features()) + " features, got " +
                    std::to_string(x.size()));
  }
  check_finite(x);
  return predict_margin_unchecked(model, x);
}

double predict_proba(const TreeEnsemble& model, std::span<const double> x) {
  return sigmoid(predict_margin(model, x));
}

int predict_class(const TreeEnsemble& model, std::span<const double> x) {
  return predict_margin(model, x) >= 0.0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json node_to_json(const Tree& tree, int id) {
  const auto& n = tree.nodes[static_cast<std::size_t>(id)];
  json out;
  if (n.is_leaf()) {
    out["leaf"] = n.leaf;
    out["cover"] = n.cover;
    return out;
  }
  out["feature"] = n.feature;
  out["threshold"] = n.threshold;
  out["cover"] = n.cover;
  out["left"] = node_to_json(tree, n.left);
  out["right"] = node_to_json(tree, n.right);
  return out;
}

double finite_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw SchemaError(std::string("model file: missing numeric field \"") + key + "\"");
  }
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw SchemaError(std::string("model file: non-finite \"") + key + "\"");
  return v;
}

int node_from_json(const json& j, Tree& tree, std::size_t num_features, int depth) {
  if (!j.is_object()) throw SchemaError("model file: tree node must be an object");
  if (depth > 64) throw SchemaError("model file: tree too deep");
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  TreeNode node;
  node.cover = finite_number(j, "cover");
  if (node.cover < 0) throw SchemaError("model file: negative cover");
  if (j.contains("leaf")) {
    node.leaf = finite_number(j, "leaf");
  } else {
    if (!j.contains("feature") || !j["feature"].is_number_integer()) {
      throw SchemaError("model file: internal node needs an integer \"feature\"");
    }
    const auto f = j["feature"].get<long long>();
    if (f < 0 || static_cast<std::size_t>(f) >= num_features) {
      throw SchemaError("model file: feature index out of range");
    }
    node.feature = static_cast<int>(f);
    node.threshold = finite_number(j, "threshold");
    if (!j.contains("left") || !j.contains("right")) {
      throw SchemaError("model file: internal node needs both children");
    }
    node.left = node_from_json(j["left"], tree, num_features, depth + 1);
    node.right = node_from_json(j["right"], tree, num_features, depth + 1);
  }
  tree.nodes[static_cast<std::size_t>(id)] = node;
  return id;
}

}  // namespace

std::string model_to_json(const TreeEnsemble& model) {
  json out;
  out["version"] = kModelSchemaVersion;
  out["base_score"] = model.base_score;
  out["learning_rate"] = model.learning_rate;
  out["feature_names"] = model.feature_names;
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));
  out["trees"] = std::move(trees);
  return out.dump(1) + "\n";
}

TreeEnsemble model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("model file: top level must be an object");
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    throw SchemaError("model file: missing schema version");
  }
  if (j["version"].get<long long>() != kModelSchemaVersion) {
    throw SchemaError("model file: schema version " + j["version"].dump() + " is not supported (expected " +
                      std::to_string(kModelSchemaVersion) + ")");
  }
  TreeEnsemble model;
  model.base_score = finite_number(j, "base_score");
  model.learning_rate = finite_number(j, "learning_rate");
  if (!(model.learning_rate > 0 && model.learning_rate <= 1)) {
    throw SchemaError("model file: learning_rate outside (0, 1]");
  }
  if (!j.contains("feature_names") || !j["feature_names"].is_array()) {
    throw SchemaError("model file: missing feature_names");
  }
  for (const auto& name : j["feature_names"]) {
    if (!name.is_string()) throw SchemaError("model file: feature names must be strings");
    model.feature_names.push_back(name.get<std::string>());
  }
  if (!j.contains("trees") || !j["trees"].is_array()) {
    throw SchemaError("model file: missing trees");
  }
  for (const auto& t : j["trees"]) {
    Tree tree;
    node_from_json(t, tree, model.num_features(), 0);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

void save_model(const TreeEnsemble& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model));
}

TreeEnsemble load_model(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

}  // namespace decepshap
