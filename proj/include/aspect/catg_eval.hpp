#pragma once

// Scoring of predicted aspect terms against gold terms. Two terms match when
// the cosine similarity of their embeddings reaches the threshold; each
// predicted term matches at most one gold term and vice versa.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aspect/corpus.hpp"
#include "aspect/embedding.hpp"
#include "json.hpp"

namespace aspect::catg_eval {

/// Default similarity threshold for a match.
inline constexpr double kDefaultThreshold = 0.7;

enum class Matching { max_bipartite, greedy };

Matching parse_matching(std::string_view name);
std::string_view to_string(Matching matching);

struct MatchConfig {
  double threshold = kDefaultThreshold;
  Matching matching = Matching::max_bipartite;

  void validate() const;  // threshold in (0, 1]
};

/// Row-major |pred| x |gold| similarity table.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  SimilarityMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// Size of a maximum one-to-one matching over pairs with similarity >= threshold.
std::size_t max_bipartite_matching(const SimilarityMatrix& sim, double threshold);

/// Greedy one-to-one matching: eligible pairs by descending similarity, ties
/// by lower pred index, then lower gold index.
std::size_t greedy_matching(const SimilarityMatrix& sim, double threshold);

std::size_t match_count(const SimilarityMatrix& sim, const MatchConfig& cfg);

struct MatchCounts {
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  MatchCounts& operator+=(const MatchCounts& other) noexcept {
    matched += other.matched;
    predicted += other.predicted;
    gold += other.gold;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

MatchCounts match_comment(const corpus::AspectTerms& pred, const corpus::AspectTerms& gold,
                          const embedding::EmbeddingProvider& provider,
                          const MatchConfig& cfg);

/// Precision, recall and F1 derived from summed counts. Each is 0 when its
/// denominator is 0.
struct MatchStats {
  std::size_t matched = 0;
  std::size_t predicted_total = 0;
  std::size_t gold_total = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const MatchStats&, const MatchStats&) = default;
};

MatchStats stats_from_counts(const MatchCounts& counts);

/// Whether prediction and gold lists are empty, tallied per comment.
struct EmptinessConfusion {
  std::size_t both_empty = 0;
  std::size_t pred_empty_only = 0;
  std::size_t gold_empty_only = 0;
  std::size_t neither_empty = 0;

  friend bool operator==(const EmptinessConfusion&, const EmptinessConfusion&) = default;
};

struct CommentMatch {
  std::string id;
  corpus::Language language;
  MatchCounts counts;

  friend bool operator==(const CommentMatch&, const CommentMatch&) = default;
};

struct MatchReport {
  MatchStats overall;
  std::map<corpus::Language, MatchStats> per_language;  // languages present only
  EmptinessConfusion emptiness;
  std::vector<CommentMatch> comments;  // corpus order

  friend bool operator==(const MatchReport&, const MatchReport&) = default;
};

/// Micro-averaged scores: counts are summed over comments, then P/R/F1 are
/// computed once overall and once per language. Throws MissingPredictions if
/// any comment lacks pred_cats.
MatchReport evaluate_corpus(const corpus::Corpus& corpus,
                            const embedding::EmbeddingProvider& provider,
                            const MatchConfig& cfg, std::size_t workers = 0);

/// Re-aggregates per-comment counts, e.g. for a subsample.
MatchStats aggregate(std::span<const CommentMatch> comments);

enum class CatSource { gold, pred };

/// Number of comments per aspect-term count.
std::map<std::size_t, std::size_t> cat_count_histogram(const corpus::Corpus& corpus,
                                                       CatSource source);

/// Comments whose term count is <= k.
std::size_t cumulative_at_most(const std::map<std::size_t, std::size_t>& histogram,
                               std::size_t k);

struct SweepRow {
  std::size_t size = 0;
  std::uint64_t seed = 0;
  double f1 = 0.0;
};

/// F1 on seeded uniform subsamples (without replacement) of each size.
std::vector<SweepRow> scale_sweep(const corpus::Corpus& corpus,
                                  const embedding::EmbeddingProvider& provider,
                                  const MatchConfig& cfg, std::span<const std::size_t> sizes,
                                  std::span<const std::uint64_t> seeds);

/// Same sweep over already-scored comments.
std::vector<SweepRow> scale_sweep(std::span<const CommentMatch> scored,
                                  std::span<const std::size_t> sizes,
                                  std::span<const std::uint64_t> seeds);

/// Indices of a uniform `size`-subset of [0, population), via a partial
/// Fisher-Yates shuffle driven by mt19937_64. Platform independent.
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t size,
                                                    std::uint64_t seed);

nlohmann::ordered_json to_json(const MatchReport& report, bool per_language,
                               bool per_comment);
MatchReport match_report_from_json(const nlohmann::json& j);

}  // namespace aspect::catg_eval
