#include "aspect/dyclu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "aspect/error.hpp"
#include "aspect/parallel.hpp"
#include "aspect/simd/kernels.hpp"

namespace aspect::dyclu {

using embedding::EmbeddingVector;

void DyCluConfig::validate() const {
  if (gamma0 < 1) throw Error(ErrorKind::InvalidArgument, "gamma0 must be at least 1");
  if (delta < 1) throw Error(ErrorKind::InvalidArgument, "delta must be at least 1");
  if (!(theta0 > 0.0 && theta0 < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "theta0 must lie in (0, 1)");
  }
  if (!(theta_max > 0.0 && theta_max <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "theta_max must lie in (0, 1]");
  }
  if (theta0 > theta_max) throw Error(ErrorKind::InvalidArgument, "theta0 exceeds theta_max");
  if (!(k1 > 0.0) || !std::isfinite(k1)) throw Error(ErrorKind::InvalidArgument, "k1 must be positive");
  if (!(k2 >= 0.0) || !std::isfinite(k2)) throw Error(ErrorKind::InvalidArgument, "k2 must be non-negative");
}

double grown_threshold(const DyCluConfig& cfg, std::size_t gamma) {
  return std::min(std::sqrt(cfg.k1 * (static_cast<double>(gamma) + cfg.k2)), cfg.theta_max);
}

double ranking_score(std::span<const double> member_similarities) {
  if (member_similarities.empty()) return 0.0;
  double sum = 0.0;
  for (double s : member_similarities) sum += s;
  const auto size = static_cast<double>(member_similarities.size());
  return size * (sum / size);
}

std::vector<std::vector<std::string>> ClusterSet::assigned_members() const {
  std::vector<std::vector<std::string>> out(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (const auto& id : clusters[i].member_ids) {
      auto it = partition.find(id);
      if (it != partition.end() && it->second == i) out[i].push_back(id);
    }
  }
  return out;
}

namespace {

void check_points(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "dyclu_cluster needs at least one point");
  const std::size_t dim = points.front().vector.dim();
  std::unordered_set<std::string> ids;
  for (const auto& p : points) {
    if (p.vector.dim() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "points differ in dimension");
    }
    if (!ids.insert(p.id).second) {
      throw Error(ErrorKind::DuplicateId, "duplicate point id \"" + p.id + "\"");
    }
    if (std::abs(p.vector.norm() - 1.0) > 1e-6) {
      throw Error(ErrorKind::InvalidArgument, "point \"" + p.id + "\" is not unit norm");
    }
  }
}

Cluster grow_cluster(std::size_t seed, std::span<const Point> points,
                     std::span<const double> matrix, std::size_t dim, const DyCluConfig& cfg) {
  const std::size_t n = points.size();
  std::vector<double> sims(n);
  simd::dot_rows(matrix.subspan(seed * dim, dim), matrix, dim, sims);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(sims[j])) {
      throw Error(ErrorKind::InvalidSimilarity,
                  "NaN similarity between \"" + points[seed].id + "\" and \"" + points[j].id + "\"");
    }
    sims[j] = std::clamp(sims[j], -1.0, 1.0);
  }
  sims[seed] = 1.0;

  // Descending similarity; the seed leads its ties, then lower id.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    if ((a == seed) != (b == seed)) return a == seed;
    return points[a].id < points[b].id;
  });

  std::size_t gamma = std::min(cfg.gamma0, n);
  double theta = cfg.theta0;
  std::size_t iterations = 0;
  while (sims[order[gamma - 1]] > theta && gamma < n) {
    gamma = std::min(n, gamma + cfg.delta);
    theta = grown_threshold(cfg, gamma);
    ++iterations;
  }

  Cluster cluster;
  cluster.centroid_id = points[seed].id;
  cluster.threshold = theta;
  cluster.top_k = gamma;
  cluster.iterations = iterations;
  for (std::size_t r = 0; r < gamma; ++r) {
    const std::size_t j = order[r];
    if (sims[j] >= theta) {
      cluster.member_ids.push_back(points[j].id);
      cluster.similarities.push_back(sims[j]);
    }
  }
  cluster.ranking_score = ranking_score(cluster.similarities);
  return cluster;
}

}  // namespace

ClusterSet dyclu_cluster(std::span<const Point> points, const DyCluConfig& cfg,
                         std::size_t workers) {
  cfg.validate();
  check_points(points);
  const std::size_t n = points.size();
  const std::size_t dim = points.front().vector.dim();

  std::vector<double> matrix(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(points[i].vector.values().begin(), points[i].vector.values().end(),
              matrix.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }

  ClusterSet result;
  result.clusters.resize(n);
  parallel_for(n, workers, [&](std::size_t seed) {
    result.clusters[seed] = grow_cluster(seed, points, matrix, dim, cfg);
  });

  std::sort(result.clusters.begin(), result.clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.ranking_score != b.ranking_score) return a.ranking_score > b.ranking_score;
    return a.centroid_id < b.centroid_id;
  });

  for (std::size_t i = 0; i < result.clusters.size(); ++i) {
    for (const auto& id : result.clusters[i].member_ids) result.partition.try_emplace(id, i);
  }
  return result;
}

Labels partition_labels(const ClusterSet& clusters) {
  Labels labels;
  for (const auto& [id, index] : clusters.partition) labels[id] = std::to_string(index);
  return labels;
}

double nmi(const Labels& pred, const Labels& gold) {
  if (pred.size() != gold.size()) {
    throw Error(ErrorKind::IdMismatch, "label maps cover different ids");
  }
  if (pred.empty()) throw Error(ErrorKind::EmptyInput, "nmi of empty labelings");

  std::map<std::string, std::size_t> pred_index, gold_index;
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  auto pit = pred.begin();
  auto git = gold.begin();
  for (; pit != pred.end(); ++pit, ++git) {
    if (pit->first != git->first) {
      throw Error(ErrorKind::IdMismatch, "label maps cover different ids");
    }
    const auto u = pred_index.try_emplace(pit->second, pred_index.size()).first->second;
    const auto v = gold_index.try_emplace(git->second, gold_index.size()).first->second;
    joint[{u, v}] += 1.0;
  }

  const auto total = static_cast<double>(pred.size());
  std::vector<double> a(pred_index.size(), 0.0), b(gold_index.size(), 0.0);
  for (const auto& [cell, count] : joint) {
    a[cell.first] += count;
    b[cell.second] += count;
  }
  auto entropy = [total](const std::vector<double>& marginal) {
    double h = 0.0;
    for (double m : marginal) {
      const double p = m / total;
      h -= p * std::log(p);
    }
    return h;
  };
  const double hu = entropy(a);
  const double hv = entropy(b);
  const bool u_trivial = a.size() == 1;
  const bool v_trivial = b.size() == 1;
  if (u_trivial && v_trivial) return 1.0;
  if (u_trivial || v_trivial) return 0.0;

  double mi = 0.0;
  for (const auto& [cell, count] : joint) {
    mi += count / total * std::log(total * count / (a[cell.first] * b[cell.second]));
  }
  return std::clamp(mi / ((hu + hv) / 2.0), 0.0, 1.0);
}

// ---------------------------------------------------------------------------

namespace {

const corpus::AspectTerms* cats_for(const corpus::Comment& c, CatSource source) {
  if (source == CatSource::gold) return &c.gold_cats;
  return c.pred_cats ? &*c.pred_cats : nullptr;
}

const corpus::AspectTerms& require_cats(const corpus::Comment& c, CatSource source) {
  const auto* cats = cats_for(c, source);
  if (!cats) {
    throw Error(ErrorKind::MissingPredictions, "comment \"" + c.id + "\" has no pred_cats");
  }
  return *cats;
}

[[noreturn]] void no_terms(const corpus::Comment& c) {
  throw Error(ErrorKind::InvalidArgument,
              "comment \"" + c.id + "\" has no aspect terms; filter Trivial comments first");
}

}  // namespace

EmbeddingVector build_representation(const corpus::Comment& comment,
                                     const embedding::EmbeddingProvider& provider,
                                     const DyCluConfig& cfg, CatSource source) {
  const std::vector<std::string> text{comment.text};
  auto text_vec = provider.embed_batch(text).front();
  if (!cfg.use_cat_augmentation) return text_vec;
  const auto& cats = require_cats(comment, source);
  if (cats.empty()) no_terms(comment);
  std::vector<std::string> terms;
  for (const auto& t : cats) terms.push_back(t.text());
  const auto cat_vecs = provider.embed_batch(terms);
  return embedding::concat_normalize(text_vec, embedding::mean_pool(cat_vecs));
}

ClusterOutcome cluster_corpus(const corpus::Corpus& corpus,
                              const embedding::EmbeddingProvider& provider,
                              const DyCluConfig& cfg, CatSource source) {
  cfg.validate();
  ClusterOutcome outcome;
  std::vector<const corpus::Comment*> selected;
  for (const auto& c : corpus.comments) {
    if (cfg.trivial_filter && require_cats(c, source).empty()) {
      outcome.clusters.trivial_ids.push_back(c.id);
      continue;
    }
    selected.push_back(&c);
  }
  outcome.trivial_excluded = outcome.clusters.trivial_ids.size();
  if (selected.empty()) return outcome;

  std::vector<std::string> texts;
  texts.reserve(selected.size());
  for (const auto* c : selected) texts.push_back(c->text);
  const auto text_vecs = provider.embed_batch(texts);

  std::unordered_map<std::string, EmbeddingVector> term_vecs;
  if (cfg.use_cat_augmentation) {
    std::set<std::string> unique;
    for (const auto* c : selected) {
      const auto& cats = require_cats(*c, source);
      if (cats.empty()) no_terms(*c);
      for (const auto& t : cats) unique.insert(t.text());
    }
    std::vector<std::string> terms(unique.begin(), unique.end());
    auto vecs = provider.embed_batch(terms);
    for (std::size_t i = 0; i < terms.size(); ++i) term_vecs.emplace(terms[i], std::move(vecs[i]));
  }

  std::vector<Point> points;
  points.reserve(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    auto rep = text_vecs[i];
    if (cfg.use_cat_augmentation) {
      std::vector<EmbeddingVector> cat_vecs;
      for (const auto& t : require_cats(*selected[i], source)) cat_vecs.push_back(term_vecs.at(t.text()));
      rep = embedding::concat_normalize(rep, embedding::mean_pool(cat_vecs));
    }
    points.push_back({selected[i]->id, std::move(rep)});
  }

  auto trivial = std::move(outcome.clusters.trivial_ids);
  outcome.clusters = dyclu_cluster(points, cfg);
  outcome.clusters.trivial_ids = std::move(trivial);
  return outcome;
}

ClusterOutcome cluster_and_score(const corpus::Corpus& corpus,
                                 const embedding::EmbeddingProvider& provider,
                                 const DyCluConfig& cfg, CatSource source) {
  const bool any_label = std::any_of(corpus.comments.begin(), corpus.comments.end(),
                                     [](const corpus::Comment& c) { return c.comment_cluster.has_value(); });
  if (!any_label) throw Error(ErrorKind::NoGoldLabels, "no comment carries a comment_cluster label");

  ClusterOutcome outcome = cluster_corpus(corpus, provider, cfg, source);
  Labels pred, gold;
  for (const auto& c : corpus.comments) {
    if (!c.comment_cluster) continue;
    auto it = outcome.clusters.partition.find(c.id);
    if (it == outcome.clusters.partition.end()) continue;
    pred[c.id] = std::to_string(it->second);
    gold[c.id] = *c.comment_cluster;
  }
  outcome.scored = pred.size();
  if (!pred.empty()) outcome.nmi = nmi(pred, gold);
  return outcome;
}

nlohmann::ordered_json to_json(const ClusterOutcome& outcome, const DyCluConfig& cfg) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["config"] = {{"gamma0", cfg.gamma0},
                 {"theta0", cfg.theta0},
                 {"theta_max", cfg.theta_max},
                 {"delta", cfg.delta},
                 {"k1", cfg.k1},
                 {"k2", cfg.k2},
                 {"augment", cfg.use_cat_augmentation},
                 {"trivial_filter", cfg.trivial_filter}};
  const auto assigned = outcome.clusters.assigned_members();
  ordered_json clusters = ordered_json::array();
  for (std::size_t i = 0; i < outcome.clusters.clusters.size(); ++i) {
    const auto& c = outcome.clusters.clusters[i];
    clusters.push_back({{"rank", i},
                        {"centroid", c.centroid_id},
                        {"score", c.ranking_score},
                        {"threshold", c.threshold},
                        {"top_k", c.top_k},
                        {"members", c.member_ids},
                        {"assigned", assigned[i]}});
  }
  j["clusters"] = std::move(clusters);
  j["nmi"] = outcome.nmi ? ordered_json(*outcome.nmi) : ordered_json(nullptr);
  j["scored"] = outcome.scored;
  j["trivial_excluded"] = outcome.trivial_excluded;
  j["trivial_ids"] = outcome.clusters.trivial_ids;
  return j;
}

}  // namespace aspect::dyclu
