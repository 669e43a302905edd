#include <algorithm>
#include <tuple>

#include "aspect/catg_eval.hpp"
#include "aspect/error.hpp"

namespace aspect::catg_eval {

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorKind::DimensionMismatch, "similarity matrix shape mismatch");
  }
}

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

namespace {

// Kuhn's augmenting-path search from pred row `r`.
bool augment(const SimilarityMatrix& sim, double threshold, std::size_t r,
             std::vector<char>& visited, std::vector<std::ptrdiff_t>& gold_owner) {
  for (std::size_t c = 0; c < sim.cols(); ++c) {
    if (visited[c] || !(sim(r, c) >= threshold)) continue;
    visited[c] = 1;
    if (gold_owner[c] < 0 ||
        augment(sim, threshold, static_cast<std::size_t>(gold_owner[c]), visited, gold_owner)) {
      gold_owner[c] = static_cast<std::ptrdiff_t>(r);
      return true;
    }
  }
  return false;
}

}  // namespace

std::size_t max_bipartite_matching(const SimilarityMatrix& sim, double threshold) {
  std::vector<std::ptrdiff_t> gold_owner(sim.cols(), -1);
  std::vector<char> visited(sim.cols());
  std::size_t matched = 0;
  for (std::size_t r = 0; r < sim.rows(); ++r) {
    std::fill(visited.begin(), visited.end(), 0);
    if (augment(sim, threshold, r, visited, gold_owner)) ++matched;
  }
  return matched;
}

std::size_t greedy_matching(const SimilarityMatrix& sim, double threshold) {
  struct Edge {
    double s;
    std::size_t r, c;
  };
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < sim.rows(); ++r) {
    for (std::size_t c = 0; c < sim.cols(); ++c) {
      if (sim(r, c) >= threshold) edges.push_back({sim(r, c), r, c});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.s != b.s) return a.s > b.s;
    return std::tie(a.r, a.c) < std::tie(b.r, b.c);
  });
  std::vector<char> pred_used(sim.rows()), gold_used(sim.cols());
  std::size_t matched = 0;
  for (const auto& e : edges) {
    if (pred_used[e.r] || gold_used[e.c]) continue;
    pred_used[e.r] = gold_used[e.c] = 1;
    ++matched;
  }
  return matched;
}

std::size_t match_count(const SimilarityMatrix& sim, const MatchConfig& cfg) {
  cfg.validate();
  return cfg.matching == Matching::greedy ? greedy_matching(sim, cfg.threshold)
                                          : max_bipartite_matching(sim, cfg.threshold);
}

}  // namespace aspect::catg_eval
