#include "decepshap/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <thread>

#include "decepshap/error.hpp"
#include "decepshap/io.hpp"
#include "json.hpp"

namespace decepshap {

using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxExactFeatures = 24;

void validate_inputs(const TreeEnsemble& model, std::span<const double> x,
                     const FeatureMatrix& background) {
  const std::size_t n = model.num_features();
  if (x.size() != n) {
    throw DataError("instance has " + std::to_string(x.size()) + " features, model expects " +
                    std::to_string(n));
  }
  if (background.rows() == 0) throw DataError("background set is empty");
  if (background.cols() != n) throw DataError("background width does not match the model");
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("non-finite instance value");
  }
  for (double v : background.data()) {
    if (!std::isfinite(v)) throw DataError("non-finite background value");
  }
}

// Sum of leaf values without the base score.
double tree_sum(const TreeEnsemble& model, std::span<const double> x) {
  double m = 0.0;
  for (const auto& t : model.trees) m += t.value(x);
  return m;
}

// The base score is added after averaging so a constant model yields it exactly.
double mean_background_margin(const TreeEnsemble& model, const FeatureMatrix& background) {
  double total = 0.0;
  for (std::size_t r = 0; r < background.rows(); ++r) total += tree_sum(model, background.row(r));
  return model.base_score + total / static_cast<double>(background.rows());
}

std::uint32_t used_features(const TreeEnsemble& model) {
  std::uint32_t used = 0;
  for (const auto& t : model.trees) {
    for (const auto& n : t.nodes) {
      if (!n.is_leaf()) used |= std::uint32_t{1} << n.feature;
    }
  }
  return used;
}

Explanation make_explanation(const TreeEnsemble& model, std::span<const double> x) {
  Explanation e;
  e.feature_names = model.feature_names;
  e.phi.assign(model.num_features(), 0.0);
  e.feature_values.assign(x.begin(), x.end());
  e.fx = predict_margin_unchecked(model, x);
  return e;
}

// Mean margin over the background with the masked features taken from x.
double coalition_value(const TreeEnsemble& model, std::span<const double> x,
                       const FeatureMatrix& background, std::uint32_t mask,
                       std::vector<double>& hybrid) {
  const std::size_t n = x.size();
  double total = 0.0;
  for (std::size_t r = 0; r < background.rows(); ++r) {
    const auto b = background.row(r);
    for (std::size_t f = 0; f < n; ++f) hybrid[f] = (mask >> f) & 1u ? x[f] : b[f];
    total += tree_sum(model, hybrid);
  }
  return model.base_score + total / static_cast<double>(background.rows());
}

// (a-1)! b! / (a+b)!, the Shapley weight of a required feature in a game
// whose payoff needs `a` features present and `b` features absent.
class UnanimityWeights {
 public:
  explicit UnanimityWeights(std::size_t max_players) : size_(max_players + 1) {
    table_.assign(size_ * size_, 0.0);
    for (std::size_t a = 1; a < size_; ++a) {
      for (std::size_t b = 0; a + b < size_; ++b) {
        // 1 / (a * C(a+b, b)), with the binomial built as a running product.
        double binom = 1.0;
        for (std::size_t k = 1; k <= b; ++k) {
          binom = binom * static_cast<double>(a + k) / static_cast<double>(k);
        }
        table_[a * size_ + b] = 1.0 / (static_cast<double>(a) * binom);
      }
    }
  }

  double operator()(std::size_t a, std::size_t b) const { return table_[a * size_ + b]; }

 private:
  std::size_t size_;
  std::vector<double> table_;
};

class TreePathExplainer {
 public:
  TreePathExplainer(std::span<const double> x, std::size_t num_features,
                    const UnanimityWeights& weights)
      : x_(x), weights_(weights), side_(num_features, Side::kFree) {}

  // Adds this tree's contribution for background row z into phi.
  void accumulate(const Tree& tree, std::span<const double> z, std::span<double> phi) {
    z_ = z;
    phi_ = phi;
    recurse(tree, 0);
  }

 private:
  enum class Side : std::uint8_t { kFree, kFromX, kFromZ };

  void recurse(const Tree& tree, int id) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
    if (node.is_leaf()) {
      if (path_.empty()) return;
      const std::size_t a = from_x_, b = path_.size() - from_x_;
      for (auto f : path_) {
        if (side_[f] == Side::kFromX) {
          phi_[f] += weights_(a, b) * node.leaf;
        } else {
          phi_[f] -= weights_(b, a) * node.leaf;
        }
      }
      return;
    }
    const auto f = static_cast<std::size_t>(node.feature);
    const bool x_left = x_[f] < node.threshold;
    const bool z_left = z_[f] < node.threshold;
    const int x_child = x_left ? node.left : node.right;
    const int z_child = z_left ? node.left : node.right;

    if (x_left == z_left) {
      recurse(tree, x_child);
    } else if (side_[f] == Side::kFromX) {
      recurse(tree, x_child);
    } else if (side_[f] == Side::kFromZ) {
      recurse(tree, z_child);
    } else {
      path_.push_back(f);
      side_[f] = Side::kFromX;
      ++from_x_;
      recurse(tree, x_child);
      --from_x_;
      side_[f] = Side::kFromZ;
      recurse(tree, z_child);
      side_[f] = Side::kFree;
      path_.pop_back();
    }
  }

  std::span<const double> x_;
  std::span<const double> z_;
  std::span<double> phi_;
  const UnanimityWeights& weights_;
  std::vector<Side> side_;
  std::vector<std::size_t> path_;
  std::size_t from_x_ = 0;
};

}  // namespace

Explanation shapley_exact(const TreeEnsemble& model, std::span<const double> x,
                          const FeatureMatrix& background) {
  validate_inputs(model, x, background);
  const std::size_t n = model.num_features();
  if (n > kMaxExactFeatures) {
    throw DataError("exact enumeration supports at most 24 features");
  }
  Explanation e = make_explanation(model, x);
  if (n == 0) {
    e.base_value = e.fx;
    return e;
  }

  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  const std::uint32_t used = used_features(model);
  std::vector<double> value(std::size_t{full} + 1, 0.0);

  // A coalition's value depends only on the features the trees test, so
  // v(S) = v(S & used) and features outside every tree get exactly zero.
  // Workers fill disjoint slots, so the result does not depend on the thread
  // count.
  const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  auto fill = [&](unsigned w) {
    std::vector<double> hybrid(n);
    for (std::uint32_t mask = w; mask < full; mask += workers) {
      if ((mask & ~used) == 0 && mask != used) {
        value[mask] = coalition_value(model, x, background, mask, hybrid);
      }
    }
  };
  if (workers == 1 || full < 1024) {
    for (unsigned w = 0; w < workers; ++w) fill(w);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(fill, w);
    for (auto& t : pool) t.join();
  }
  value[0] = mean_background_margin(model, background);
  value[used] = e.fx;
  e.base_value = value[0];
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if ((mask & ~used) != 0) value[mask] = value[mask & used];
  }

  // |S|!(n-|S|-1)!/n! via w(0) = 1/n, w(s) = w(s-1) * s / (n-s).
  std::vector<double> weight(n);
  weight[0] = 1.0 / static_cast<double>(n);
  for (std::size_t s = 1; s < n; ++s) {
    weight[s] = weight[s - 1] * static_cast<double>(s) / static_cast<double>(n - s);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << i;
    double total = 0.0;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      total += weight[s] * (value[mask | bit] - value[mask]);
    }
    e.phi[i] = total;
  }
  return e;
}

Explanation shapley_tree(const TreeEnsemble& model, std::span<const double> x,
                         const FeatureMatrix& background) {
  validate_inputs(model, x, background);
  Explanation e = make_explanation(model, x);
  e.base_value = mean_background_margin(model, background);

  int max_depth = 0;
  for (const auto& t : model.trees) max_depth = std::max(max_depth, t.depth());
  const UnanimityWeights weights(static_cast<std::size_t>(max_depth));
  TreePathExplainer walker(x, model.num_features(), weights);

  for (std::size_t r = 0; r < background.rows(); ++r) {
    for (const auto& tree : model.trees) walker.accumulate(tree, background.row(r), e.phi);
  }
  for (auto& p : e.phi) p /= static_cast<double>(background.rows());
  return e;
}

Explanation explain(const TreeEnsemble& model, std::span<const double> x,
                    const FeatureMatrix& background, ShapMethod method) {
  return method == ShapMethod::kExact ? shapley_exact(model, x, background)
                                      : shapley_tree(model, x, background);
}

std::vector<Explanation> explain_all(const TreeEnsemble& model, const FeatureMatrix& instances,
                                     const FeatureMatrix& background, ShapMethod method) {
  std::vector<Explanation> out;
  out.reserve(instances.rows());
  for (std::size_t i = 0; i < instances.rows(); ++i) {
    out.push_back(explain(model, instances.row(i), background, method));
  }
  return out;
}

GlobalSummary global_summary(std::span<const Explanation> explanations) {
  if (explanations.empty()) throw DataError("cannot summarize an empty set of explanations");
  const auto& names = explanations.front().feature_names;
  std::vector<double> mean(names.size(), 0.0);
  for (const auto& e : explanations) {
    if (e.phi.size() != names.size()) throw DataError("explanations differ in width");
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += std::abs(e.phi[i]);
  }
  GlobalSummary s;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    s.ranking.push_back({names[i], i, mean[i] / static_cast<double>(explanations.size())});
  }
  std::stable_sort(s.ranking.begin(), s.ranking.end(),
                   [](const RankedFeature& a, const RankedFeature& b) {
                     return a.mean_abs_phi > b.mean_abs_phi;
                   });
  return s;
}

GlobalSummary global_summary(const TreeEnsemble& model, const FeatureMatrix& instances,
                             const FeatureMatrix& background, ShapMethod method) {
  if (instances.rows() == 0) throw DataError("cannot summarize an empty corpus");
  const auto explanations = explain_all(model, instances, background, method);
  return global_summary(explanations);
}

WaterfallReport waterfall(const Explanation& e) {
  if (e.phi.size() != e.feature_names.size() || e.phi.size() != e.feature_values.size()) {
    throw DataError("explanation fields differ in width");
  }
  std::vector<std::size_t> order(e.phi.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(e.phi[a]) > std::abs(e.phi[b]);
  });

  WaterfallReport w;
  w.base_value = e.base_value;
  w.fx = e.fx;
  double running = e.base_value;
  for (auto i : order) {
    running += e.phi[i];
    w.steps.push_back({e.feature_names[i], e.feature_values[i], e.phi[i], running});
  }
  return w;
}

InteractionReport interaction_report(std::span<const Explanation> explanations,
                                     std::string_view primary, std::string_view coloring) {
  InteractionReport r{std::string(primary), std::string(coloring), {}};
  auto index_of = [](const Explanation& e, std::string_view name) {
    const auto it = std::find(e.feature_names.begin(), e.feature_names.end(), name);
    if (it == e.feature_names.end()) {
      throw UsageError("unknown feature name \"" + std::string(name) + "\"");
    }
    return static_cast<std::size_t>(it - e.feature_names.begin());
  };
  for (const auto& e : explanations) {
    const auto p = index_of(e, primary);
    const auto c = index_of(e, coloring);
    r.records.push_back({e.feature_values[p], e.phi[p], e.feature_values[c]});
  }
  return r;
}

std::string_view direction(double phi) {
  if (phi > 0) return "positive";
  if (phi < 0) return "negative";
  return "zero";
}

std::string explanation_to_json(const Explanation& e) {
  json out;
  out["feature_names"] = e.feature_names;
  out["phi"] = e.phi;
  out["base_value"] = e.base_value;
  out["fx"] = e.fx;
  out["feature_values"] = e.feature_values;
  return out.dump(1) + "\n";
}

std::string summary_to_json(const GlobalSummary& s) {
  json ranking = json::array();
  for (const auto& r : s.ranking) {
    ranking.push_back({{"feature", r.feature}, {"mean_abs_phi", r.mean_abs_phi}});
  }
  json out;
  out["ranking"] = std::move(ranking);
  return out.dump(1) + "\n";
}

std::string waterfall_to_json(const WaterfallReport& w) {
  json steps = json::array();
  for (const auto& s : w.steps) {
    steps.push_back({{"feature", s.feature},
                     {"value", s.value},
                     {"phi", s.phi},
                     {"running_total", s.running_total},
                     {"direction", direction(s.phi)}});
  }
  json out;
  out["base_value"] = w.base_value;
  out["steps"] = std::move(steps);
  out["fx"] = w.fx;
  return out.dump(1) + "\n";
}

std::string interaction_to_csv(const InteractionReport& r) {
  std::string out = "primary_value,phi_primary,coloring_value\n";
  for (const auto& rec : r.records) {
    out += format_double(rec.primary_value);
    out += ',';
    out += format_double(rec.phi_primary);
    out += ',';
    out += format_double(rec.coloring_value);
    out += '\n';
  }
  return out;
}

}  // namespace decepshap
