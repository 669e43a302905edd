#include "aspect/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>

#include "aspect/error.hpp"
#include "aspect/text.hpp"

namespace aspect::embedding {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "embedding vector must have positive dimension");
  }
  for (double x : values_) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::InvalidArgument, "embedding vector has a NaN or Inf component");
    }
  }
}

double EmbeddingVector::norm() const noexcept {
  double sum = 0.0;
  for (double x : values_) sum += x * x;
  return std::sqrt(sum);
}

EmbeddingVector normalized(const EmbeddingVector& v) {
  const double n = v.norm();
  if (n == 0.0) throw Error(ErrorKind::ZeroVector, "cannot normalize a zero vector");
  std::vector<double> out(v.values().begin(), v.values().end());
  for (double& x : out) x /= n;
  return EmbeddingVector(std::move(out));
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "cosine_similarity: dims " + std::to_string(u.dim()) + " and " +
                    std::to_string(v.dim()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) {
    throw Error(ErrorKind::ZeroVector, "cosine_similarity: zero-vector operand");
  }
  // sqrt(uu) * sqrt(vv) is commutative, so swapping operands is exact.
  const double s = dot / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(s, -1.0, 1.0);
}

EmbeddingVector concat_normalize(const EmbeddingVector& a, const EmbeddingVector& b) {
  std::vector<double> joined;
  joined.reserve(a.dim() + b.dim());
  joined.insert(joined.end(), a.values().begin(), a.values().end());
  joined.insert(joined.end(), b.values().begin(), b.values().end());
  return normalized(EmbeddingVector(std::move(joined)));
}

EmbeddingVector mean_pool(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) throw Error(ErrorKind::EmptyInput, "mean_pool of an empty list");
  const std::size_t dim = vectors.front().dim();
  std::vector<double> sum(dim, 0.0);
  for (const auto& v : vectors) {
    if (v.dim() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "mean_pool: vectors differ in dimension");
    }
    for (std::size_t i = 0; i < dim; ++i) sum[i] += v[i];
  }
  const auto count = static_cast<double>(vectors.size());
  for (double& x : sum) x /= count;
  return normalized(EmbeddingVector(std::move(sum)));
}

// ---------------------------------------------------------------------------

HashingEmbedder::HashingEmbedder(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidArgument, "embedder dim must be positive");
}

EmbeddingVector HashingEmbedder::embed(const std::string& text) const {
  if (text.empty()) throw Error(ErrorKind::EmptyInput, "cannot embed an empty text");
  const std::string folded = text::fold_nfc(text);
  const std::vector<std::string> cps = text::code_points(folded);
  const std::uint64_t basis = text::kFnvOffsetBasis ^ seed_;

  std::vector<double> counts(dim_, 0.0);
  auto add_gram = [&](std::string_view gram) {
    const std::uint64_t h = text::fnv1a64(gram, basis);
    counts[h % dim_] += (h >> 63) ? -1.0 : 1.0;
  };
  if (cps.size() < 3) {
    add_gram(folded);
  } else {
    std::string gram;
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
      gram.clear();
      gram += cps[i];
      gram += cps[i + 1];
      gram += cps[i + 2];
      add_gram(gram);
    }
  }

  double sq = 0.0;
  for (double c : counts) sq += c * c;
  if (sq == 0.0) {
    counts[text::fnv1a64(folded, basis) % dim_] = 1.0;
    return EmbeddingVector(std::move(counts));
  }
  const double n = std::sqrt(sq);
  for (double& c : counts) c /= n;
  return EmbeddingVector(std::move(counts));
}

std::vector<EmbeddingVector> HashingEmbedder::embed_batch(
    std::span<const std::string> texts) const {
  if (texts.empty()) throw Error(ErrorKind::EmptyInput, "embed_batch of an empty list");
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

// ---------------------------------------------------------------------------

void EmbeddingProviderConfig::validate() const {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "embedding dim must be positive");
  if (batch_size == 0) throw Error(ErrorKind::InvalidArgument, "batch size must be positive");
  if (kind == ProviderKind::remote) {
    if (!endpoint || endpoint->empty()) {
      throw Error(ErrorKind::InvalidArgument, "remote embedder requires an endpoint");
    }
    if (!model_name || model_name->empty()) {
      throw Error(ErrorKind::InvalidArgument, "remote embedder requires a model name");
    }
  }
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config) {
  config.validate();
  if (config.kind == ProviderKind::remote) return std::make_unique<RemoteEmbedder>(config);
  return std::make_unique<HashingEmbedder>(config.dim, config.seed);
}

}  // namespace aspect::embedding
