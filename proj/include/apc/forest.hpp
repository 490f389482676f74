#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace apc {

// Extremely randomized trees over boolean features: each node draws a random
// unused feature and splits on it, growing until pure or out of features.
// With so small a feature space the randomness lives entirely in feature
// order, which is all the ensemble needs to decorrelate.

struct ForestNode {
  int feature = -1;      // -1 marks a leaf
  int child[2] = {-1, -1};  // indexed by feature value
  std::uint8_t leaf_value = 0;
};

struct ForestTree {
  std::vector<ForestNode> nodes;  // nodes[0] is the root

  std::uint8_t predict(const std::vector<std::uint8_t>& features) const {
    int cur = 0;
    while (nodes[cur].feature >= 0) {
      std::uint8_t v = features.at(nodes[cur].feature);
      cur = nodes[cur].child[v ? 1 : 0];
    }
    return nodes[cur].leaf_value;
  }
};

struct ForestModel {
  std::vector<ForestTree> trees;
  std::vector<int> selected_features;  // indices into the full feature vector
  std::uint64_t seed = 0;
  int n_trees = 0;

  // Fraction of trees voting for the positive class.
  double vote_fraction(const std::vector<std::uint8_t>& features) const {
    if (trees.empty()) return 0.0;
    int votes = 0;
    for (const ForestTree& t : trees) votes += t.predict(features);
    return static_cast<double>(votes) / static_cast<double>(trees.size());
  }

  bool predict(const std::vector<std::uint8_t>& features) const {
    return vote_fraction(features) > 0.5;
  }
};

namespace detail {

inline std::uint8_t majority(const std::vector<std::size_t>& samples,
                             const std::vector<std::uint8_t>& labels) {
  std::size_t pos = 0;
  for (std::size_t i : samples) pos += labels[i] ? 1 : 0;
  return pos * 2 > samples.size() ? 1 : 0;
}

inline int grow_node(ForestTree& tree,
                     const std::vector<std::vector<std::uint8_t>>& rows,
                     const std::vector<std::uint8_t>& labels,
                     const std::vector<std::size_t>& samples,
                     std::vector<int> remaining, std::mt19937_64& rng) {
  int node_index = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  bool pure = true;
  for (std::size_t i : samples) {
    if (labels[i] != labels[samples.front()]) {
      pure = false;
      break;
    }
  }
  if (pure || remaining.empty()) {
    tree.nodes[node_index].leaf_value = majority(samples, labels);
    return node_index;
  }

  std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
  std::size_t slot = pick(rng);
  int feature = remaining[slot];
  remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(slot));
  // Random orientation: which branch is grown first. Purely a tie between
  // equivalent trees, but it is the randomness the method calls for.
  std::uint8_t first = static_cast<std::uint8_t>(rng() & 1);

  std::vector<std::size_t> split[2];
  for (std::size_t i : samples) {
    split[rows[i][feature] ? 1 : 0].push_back(i);
  }
  std::uint8_t parent_majority = majority(samples, labels);
  tree.nodes[node_index].feature = feature;

  for (int step = 0; step < 2; ++step) {
    std::uint8_t value = step == 0 ? first : 1 - first;
    int child;
    if (split[value].empty()) {
      child = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes[child].leaf_value = parent_majority;
    } else {
      child = grow_node(tree, rows, labels, split[value], remaining, rng);
    }
    tree.nodes[node_index].child[value] = child;
  }
  return node_index;
}

}  // namespace detail

inline ForestModel fit_forest(const std::vector<std::vector<std::uint8_t>>& rows,
                              const std::vector<std::uint8_t>& labels,
                              int n_trees, std::uint64_t seed) {
  if (rows.empty() || rows.size() != labels.size()) {
    throw std::invalid_argument("fit_forest requires one label per row");
  }
  if (n_trees <= 0) throw std::invalid_argument("n_trees must be positive");
  const int n_features = static_cast<int>(rows.front().size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n_features) {
      throw std::invalid_argument("ragged feature matrix");
    }
  }
  ForestModel model;
  model.seed = seed;
  model.n_trees = n_trees;
  model.selected_features.resize(n_features);
  for (int f = 0; f < n_features; ++f) model.selected_features[f] = f;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> all(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) all[i] = i;
  std::vector<int> features(n_features);
  for (int f = 0; f < n_features; ++f) features[f] = f;

  model.trees.reserve(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    ForestTree tree;
    detail::grow_node(tree, rows, labels, all, features, rng);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace apc
