#include "aspect/catg_eval.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "aspect/error.hpp"
#include "aspect/parallel.hpp"

namespace aspect::catg_eval {

using corpus::AspectTerms;
using corpus::Language;
using embedding::EmbeddingVector;

Matching parse_matching(std::string_view name) {
  if (name == "max_bipartite") return Matching::max_bipartite;
  if (name == "greedy") return Matching::greedy;
  throw Error(ErrorKind::InvalidArgument, "unknown matching \"" + std::string(name) + "\"");
}

std::string_view to_string(Matching matching) {
  return matching == Matching::greedy ? "greedy" : "max_bipartite";
}

void MatchConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "threshold must lie in (0, 1]");
  }
}

namespace {

using TermTable = std::unordered_map<std::string, EmbeddingVector>;

TermTable embed_terms(const std::set<std::string>& terms,
                      const embedding::EmbeddingProvider& provider) {
  TermTable table;
  if (terms.empty()) return table;
  std::vector<std::string> texts(terms.begin(), terms.end());
  auto vectors = provider.embed_batch(texts);
  if (vectors.size() != texts.size()) {
    throw Error(ErrorKind::SchemaMismatch, "provider returned the wrong number of vectors");
  }
  for (std::size_t i = 0; i < texts.size(); ++i) table.emplace(texts[i], std::move(vectors[i]));
  return table;
}

MatchCounts match_with_table(const AspectTerms& pred, const AspectTerms& gold,
                             const TermTable& table, const MatchConfig& cfg) {
  MatchCounts counts{0, pred.size(), gold.size()};
  if (pred.empty() || gold.empty()) return counts;
  SimilarityMatrix sim(pred.size(), gold.size());
  for (std::size_t r = 0; r < pred.size(); ++r) {
    const auto& u = table.at(pred[r].text());
    for (std::size_t c = 0; c < gold.size(); ++c) {
      sim(r, c) = embedding::cosine_similarity(u, table.at(gold[c].text()));
    }
  }
  counts.matched = match_count(sim, cfg);
  return counts;
}

}  // namespace

MatchCounts match_comment(const AspectTerms& pred, const AspectTerms& gold,
                          const embedding::EmbeddingProvider& provider,
                          const MatchConfig& cfg) {
  cfg.validate();
  if (pred.empty() || gold.empty()) return {0, pred.size(), gold.size()};
  std::set<std::string> terms;
  for (const auto& t : pred) terms.insert(t.text());
  for (const auto& t : gold) terms.insert(t.text());
  return match_with_table(pred, gold, embed_terms(terms, provider), cfg);
}

MatchStats stats_from_counts(const MatchCounts& c) {
  MatchStats s;
  s.matched = c.matched;
  s.predicted_total = c.predicted;
  s.gold_total = c.gold;
  s.precision = c.predicted ? static_cast<double>(c.matched) / static_cast<double>(c.predicted) : 0.0;
  s.recall = c.gold ? static_cast<double>(c.matched) / static_cast<double>(c.gold) : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

MatchStats aggregate(std::span<const CommentMatch> comments) {
  MatchCounts total;
  for (const auto& c : comments) total += c.counts;
  return stats_from_counts(total);
}

MatchReport evaluate_corpus(const corpus::Corpus& corpus,
                            const embedding::EmbeddingProvider& provider,
                            const MatchConfig& cfg, std::size_t workers) {
  cfg.validate();
  std::set<std::string> terms;
  for (const auto& c : corpus.comments) {
    if (!c.pred_cats) {
      throw Error(ErrorKind::MissingPredictions, "comment \"" + c.id + "\" has no pred_cats");
    }
    for (const auto& t : *c.pred_cats) terms.insert(t.text());
    for (const auto& t : c.gold_cats) terms.insert(t.text());
  }
  const TermTable table = embed_terms(terms, provider);

  MatchReport report;
  report.comments.resize(corpus.comments.size());
  parallel_for(corpus.comments.size(), workers, [&](std::size_t i) {
    const auto& c = corpus.comments[i];
    report.comments[i] = {c.id, c.language, match_with_table(*c.pred_cats, c.gold_cats, table, cfg)};
  });

  MatchCounts overall;
  std::map<Language, MatchCounts> by_language;
  for (const auto& cm : report.comments) {
    overall += cm.counts;
    by_language[cm.language] += cm.counts;
    const bool pred_empty = cm.counts.predicted == 0;
    const bool gold_empty = cm.counts.gold == 0;
    if (pred_empty && gold_empty) ++report.emptiness.both_empty;
    else if (pred_empty) ++report.emptiness.pred_empty_only;
    else if (gold_empty) ++report.emptiness.gold_empty_only;
    else ++report.emptiness.neither_empty;
  }
  report.overall = stats_from_counts(overall);
  for (const auto& [lang, counts] : by_language) report.per_language[lang] = stats_from_counts(counts);
  return report;
}

std::map<std::size_t, std::size_t> cat_count_histogram(const corpus::Corpus& corpus,
                                                       CatSource source) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& c : corpus.comments) {
    if (source == CatSource::gold) {
      ++hist[c.gold_cats.size()];
    } else {
      if (!c.pred_cats) {
        throw Error(ErrorKind::MissingPredictions, "comment \"" + c.id + "\" has no pred_cats");
      }
      ++hist[c.pred_cats->size()];
    }
  }
  return hist;
}

std::size_t cumulative_at_most(const std::map<std::size_t, std::size_t>& histogram,
                               std::size_t k) {
  std::size_t total = 0;
  for (const auto& [count, freq] : histogram) {
    if (count > k) break;
    total += freq;
  }
  return total;
}

namespace {

// Unbiased draw from [0, bound) by rejection; std distributions are not
// portable across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t size,
                                                    std::uint64_t seed) {
  if (size > population) {
    throw Error(ErrorKind::InvalidArgument,
                "sample size " + std::to_string(size) + " exceeds population " +
                    std::to_string(population));
  }
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const auto j = i + static_cast<std::size_t>(bounded(rng, population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(size);
  return idx;
}

std::vector<SweepRow> scale_sweep(std::span<const CommentMatch> scored,
                                  std::span<const std::size_t> sizes,
                                  std::span<const std::uint64_t> seeds) {
  for (std::size_t size : sizes) {
    if (size > scored.size()) {
      throw Error(ErrorKind::InvalidArgument,
                  "sweep size " + std::to_string(size) + " exceeds corpus size " +
                      std::to_string(scored.size()));
    }
  }
  std::vector<SweepRow> rows;
  rows.reserve(sizes.size() * seeds.size());
  for (std::size_t size : sizes) {
    for (std::uint64_t seed : seeds) {
      MatchCounts total;
      for (std::size_t i : sample_without_replacement(scored.size(), size, seed)) {
        total += scored[i].counts;
      }
      rows.push_back({size, seed, stats_from_counts(total).f1});
    }
  }
  return rows;
}

std::vector<SweepRow> scale_sweep(const corpus::Corpus& corpus,
                                  const embedding::EmbeddingProvider& provider,
                                  const MatchConfig& cfg, std::span<const std::size_t> sizes,
                                  std::span<const std::uint64_t> seeds) {
  for (std::size_t size : sizes) {
    if (size > corpus.comments.size()) {
      throw Error(ErrorKind::InvalidArgument,
                  "sweep size " + std::to_string(size) + " exceeds corpus size " +
                      std::to_string(corpus.comments.size()));
    }
  }
  const MatchReport report = evaluate_corpus(corpus, provider, cfg);
  return scale_sweep(report.comments, sizes, seeds);
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json stats_json(const MatchStats& s) {
  return {{"matched", s.matched},     {"predicted_total", s.predicted_total},
          {"gold_total", s.gold_total}, {"precision", s.precision},
          {"recall", s.recall},       {"f1", s.f1}};
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorKind::SchemaMismatch, std::string("report lacks \"") + key + "\"");
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::SchemaMismatch, std::string("report field \"") + key + "\" has the wrong type");
  }
}

MatchStats stats_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::SchemaMismatch, "report stats must be an object");
  MatchStats s;
  s.matched = field<std::size_t>(j, "matched");
  s.predicted_total = field<std::size_t>(j, "predicted_total");
  s.gold_total = field<std::size_t>(j, "gold_total");
  s.precision = field<double>(j, "precision");
  s.recall = field<double>(j, "recall");
  s.f1 = field<double>(j, "f1");
  return s;
}

}  // namespace

nlohmann::ordered_json to_json(const MatchReport& report, bool per_language, bool per_comment) {
  nlohmann::ordered_json j = stats_json(report.overall);
  j["emptiness"] = {{"both_empty", report.emptiness.both_empty},
                    {"pred_empty_only", report.emptiness.pred_empty_only},
                    {"gold_empty_only", report.emptiness.gold_empty_only},
                    {"neither_empty", report.emptiness.neither_empty}};
  if (per_language) {
    nlohmann::ordered_json langs = nlohmann::ordered_json::object();
    for (const auto& [lang, stats] : report.per_language) {
      langs[std::string(corpus::to_string(lang))] = stats_json(stats);
    }
    j["per_language"] = std::move(langs);
  }
  if (per_comment) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& c : report.comments) {
      rows.push_back({{"id", c.id},
                      {"lang", std::string(corpus::to_string(c.language))},
                      {"matched", c.counts.matched},
                      {"predicted", c.counts.predicted},
                      {"gold", c.counts.gold}});
    }
    j["comments"] = std::move(rows);
  }
  return j;
}

MatchReport match_report_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::SchemaMismatch, "report must be a JSON object");
  MatchReport report;
  report.overall = stats_from_json(j);
  if (auto it = j.find("emptiness"); it != j.end()) {
    report.emptiness.both_empty = field<std::size_t>(*it, "both_empty");
    report.emptiness.pred_empty_only = field<std::size_t>(*it, "pred_empty_only");
    report.emptiness.gold_empty_only = field<std::size_t>(*it, "gold_empty_only");
    report.emptiness.neither_empty = field<std::size_t>(*it, "neither_empty");
  }
  if (auto it = j.find("per_language"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorKind::SchemaMismatch, "per_language must be an object");
    for (const auto& [code, stats] : it->items()) {
      Language lang;
      try {
        lang = corpus::parse_language(code);
      } catch (const Error&) {
        throw Error(ErrorKind::SchemaMismatch, "unknown language in report: " + code);
      }
      report.per_language[lang] = stats_from_json(stats);
    }
  }
  if (auto it = j.find("comments"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorKind::SchemaMismatch, "comments must be an array");
    for (const auto& row : *it) {
      CommentMatch cm;
      cm.id = field<std::string>(row, "id");
      try {
        cm.language = corpus::parse_language(field<std::string>(row, "lang"));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::SchemaMismatch) throw;
        throw Error(ErrorKind::SchemaMismatch, "unknown language in report comment");
      }
      cm.counts = {field<std::size_t>(row, "matched"), field<std::size_t>(row, "predicted"),
                   field<std::size_t>(row, "gold")};
      report.comments.push_back(std::move(cm));
    }
  }
  return report;
}

}  // namespace aspect::catg_eval
