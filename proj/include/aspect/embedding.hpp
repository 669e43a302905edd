#pragma once

// Embedding providers and the vector operations used by matching and
// clustering. Every provider returns L2-normalized vectors.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aspect::embedding {

/// Finite real vector of fixed, positive dimension.
class EmbeddingVector {
 public:
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Euclidean norm, accumulated in index order.
  double norm() const noexcept;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

/// Returns v / |v|; throws ZeroVector for the zero vector.
EmbeddingVector normalized(const EmbeddingVector& v);

/// Cosine similarity clamped to [-1, 1]. Dot product and norms accumulate in
/// index-ascending order, so the result does not depend on operand order.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

/// Concatenation (a, b) rescaled to unit norm.
EmbeddingVector concat_normalize(const EmbeddingVector& a, const EmbeddingVector& b);

/// Component-wise mean followed by L2 normalization.
EmbeddingVector mean_pool(std::span<const EmbeddingVector> vectors);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// One unit-norm vector per input, in input order. Throws EmptyInput for an
  /// empty batch or an empty text. Safe to call from several threads.
  virtual std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) const = 0;

  virtual std::size_t dim() const noexcept = 0;
};

/// Offline embedder: a signed bag of hashed character 3-grams.
///
/// The text is lowercased and NFC-normalized, then every window of three
/// consecutive code points is hashed with 64-bit FNV-1a (offset basis XOR
/// `seed`). The hash selects bucket `h % dim` and the sign comes from bit 63.
/// Texts shorter than three code points contribute one gram, the whole text.
/// If the signed counts cancel to zero, bucket `fnv1a(text) % dim` is set to 1.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dim, std::uint64_t seed = 0);

  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) const override;
  std::size_t dim() const noexcept override { return dim_; }

  EmbeddingVector embed(const std::string& text) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

enum class ProviderKind { deterministic_local, remote };

struct EmbeddingProviderConfig {
  ProviderKind kind = ProviderKind::deterministic_local;
  std::size_t dim = 384;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  std::chrono::milliseconds timeout{30000};
  std::size_t batch_size = 64;
  std::size_t max_retries = 2;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on a zero dim or batch size, or a remote config
  /// without endpoint and model name.
  void validate() const;
};

/// Client for an embedding server speaking
///   POST {"model": "...", "texts": [...]}  ->  {"vectors": [[...], ...]}
/// Returned vectors are checked against the configured dim and normalized.
/// Connection failures and 5xx replies are retried up to max_retries times.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(EmbeddingProviderConfig config);

  std::vector<EmbeddingVector> embed_batch(
      std::span<const std::string> texts) const override;
  std::size_t dim() const noexcept override { return config_.dim; }

 private:
  std::vector<EmbeddingVector> request(std::span<const std::string> texts) const;

  EmbeddingProviderConfig config_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config);

}  // namespace aspect::embedding
