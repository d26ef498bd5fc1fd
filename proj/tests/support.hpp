#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "decepshap/gbm.hpp"
#include "decepshap/io.hpp"
#include "decepshap/matrix.hpp"
#include "json.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DECEPSHAP_TEST_FIXTURES) / name;
}

inline nlohmann::json load_json(const std::string& name) {
  return nlohmann::json::parse(decepshap::read_file(fixture(name)));
}

// "a/b" fractions from hand-computed fixtures, or a plain number.
inline double rational(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  const auto s = v.get<std::string>();
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

// A fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("decepshap_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline decepshap::FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t rows,
                                              std::size_t cols, int levels = 0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> d(0, levels > 0 ? levels - 1 : 0);
  decepshap::FeatureMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = levels > 0 ? d(rng) : u(rng);
  }
  return m;
}

// Grows one random tree of the given depth over `n` features. Thresholds are
// drawn from the same range as random_matrix, so both branches are reachable.
inline void grow(std::mt19937_64& rng, decepshap::Tree& tree, std::size_t node, int depth,
                 std::size_t n, int levels) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::bernoulli_distribution stop(0.2);
  if (depth == 0 || (node != 0 && stop(rng))) {
    tree.nodes[node].leaf = u(rng);
    tree.nodes[node].cover = 1.0;
    return;
  }
  auto& nd = tree.nodes[node];
  nd.feature = static_cast<int>(pick(rng));
  nd.threshold = levels > 0 ? std::uniform_int_distribution<int>(1, levels - 1)(rng) - 0.5
                            : u(rng) * 0.9;
  const auto left = tree.nodes.size();
  tree.nodes.resize(left + 2);
  tree.nodes[node].left = static_cast<int>(left);
  tree.nodes[node].right = static_cast<int>(left + 1);
  grow(rng, tree, left, depth - 1, n, levels);
  grow(rng, tree, left + 1, depth - 1, n, levels);
  tree.nodes[node].cover = tree.nodes[left].cover + tree.nodes[left + 1].cover;
}

// Random ensemble; `levels` > 0 makes thresholds fall between small integers so
// integer-valued inputs produce ties and shared paths.
inline decepshap::TreeEnsemble random_model(std::mt19937_64& rng, std::size_t n,
                                            std::size_t trees, int max_depth, int levels = 0) {
  decepshap::TreeEnsemble m;
  for (std::size_t j = 0; j < n; ++j) m.feature_names.push_back("f" + std::to_string(j));
  m.base_score = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  std::uniform_int_distribution<int> depth(1, max_depth);
  for (std::size_t t = 0; t < trees; ++t) {
    decepshap::Tree tree;
    tree.nodes.resize(1);
    grow(rng, tree, 0, depth(rng), n, levels);
    m.trees.push_back(std::move(tree));
  }
  return m;
}

inline decepshap::TreeNode split_node(int feature, double threshold, int left, int right) {
  decepshap::TreeNode n;
  n.feature = feature;
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return n;
}

inline decepshap::TreeNode leaf_node(double weight, double cover = 1.0) {
  decepshap::TreeNode n;
  n.leaf = weight;
  n.cover = cover;
  return n;
}

}  // namespace testing
