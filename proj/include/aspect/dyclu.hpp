#pragma once

// Dynamic clustering (DyClu) with adaptive cluster size and similarity
// threshold, optionally over text embeddings augmented with aspect-term
// features, plus NMI scoring against gold cluster labels.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aspect/corpus.hpp"
#include "aspect/embedding.hpp"
#include "json.hpp"

namespace aspect::dyclu {

/// Hard ceiling on the adaptive threshold.
inline constexpr double kDefaultThetaMax = 0.9;

struct DyCluConfig {
  std::size_t gamma0 = 10;   // initial top-k size
  double theta0 = 0.55;      // initial similarity threshold
  double theta_max = kDefaultThetaMax;
  std::size_t delta = 5;     // top-k increment per iteration
  double k1 = 0.01;          // threshold growth: min(sqrt(k1 * (k + k2)), theta_max)
  double k2 = 20.0;
  bool use_cat_augmentation = false;
  bool trivial_filter = false;

  void validate() const;
};

/// Threshold after growing the candidate set to `gamma` points.
double grown_threshold(const DyCluConfig& cfg, std::size_t gamma);

struct Cluster {
  std::string centroid_id;
  std::vector<std::string> member_ids;  // by descending similarity to centroid
  std::vector<double> similarities;     // parallel to member_ids
  double ranking_score = 0.0;
  double threshold = 0.0;               // final adaptive threshold for this seed
  std::size_t top_k = 0;                // final candidate-set size
  std::size_t iterations = 0;           // growth steps taken
};

struct ClusterSet {
  std::vector<Cluster> clusters;                 // ranking_score descending
  std::map<std::string, std::size_t> partition;  // id -> index of first cluster holding it
  std::vector<std::string> trivial_ids;

  /// Members per cluster after each comment is kept only by its highest-ranked
  /// cluster; parallel to `clusters`, possibly empty entries.
  std::vector<std::vector<std::string>> assigned_members() const;
};

struct Point {
  std::string id;
  embedding::EmbeddingVector vector;
};

/// Ranking score of a cluster: |S| times the mean member similarity to the
/// centroid, i.e. the sum of those similarities.
double ranking_score(std::span<const double> member_similarities);

/// One cluster per seed point, ranked; ties in score break by lower centroid
/// id. Requires unit-norm vectors of equal dimension and unique ids.
ClusterSet dyclu_cluster(std::span<const Point> points, const DyCluConfig& cfg,
                         std::size_t workers = 0);

using Labels = std::map<std::string, std::string>;

/// NMI = I(U;V) / ((H(U) + H(V)) / 2) with natural logarithms. Two
/// single-cluster labelings score 1; a single-cluster labeling against a
/// non-trivial one scores 0. Throws IdMismatch if id sets differ.
double nmi(const Labels& pred, const Labels& gold);

/// Labels from a partition: cluster index rendered as a string.
Labels partition_labels(const ClusterSet& clusters);

enum class CatSource { predicted, gold };

/// Text embedding, or with augmentation the normalized concatenation of the
/// text embedding and the mean-pooled aspect-term embeddings.
embedding::EmbeddingVector build_representation(const corpus::Comment& comment,
                                                const embedding::EmbeddingProvider& provider,
                                                const DyCluConfig& cfg,
                                                CatSource source = CatSource::predicted);

struct ClusterOutcome {
  ClusterSet clusters;
  std::optional<double> nmi;        // absent when nothing could be scored
  std::size_t trivial_excluded = 0;
  std::size_t scored = 0;           // comments entering the NMI
};

/// Filters Trivial comments (no aspect terms) when configured, builds
/// representations and clusters. No scoring.
ClusterOutcome cluster_corpus(const corpus::Corpus& corpus,
                              const embedding::EmbeddingProvider& provider,
                              const DyCluConfig& cfg, CatSource source = CatSource::predicted);

/// cluster_corpus plus NMI against comment_cluster labels over the clustered
/// comments that carry a label. Throws NoGoldLabels when no comment has one.
ClusterOutcome cluster_and_score(const corpus::Corpus& corpus,
                                 const embedding::EmbeddingProvider& provider,
                                 const DyCluConfig& cfg, CatSource source = CatSource::predicted);

nlohmann::ordered_json to_json(const ClusterOutcome& outcome, const DyCluConfig& cfg);

}  // namespace aspect::dyclu
