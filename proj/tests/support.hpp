#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "aspect/catg_eval.hpp"
#include "aspect/corpus.hpp"
#include "aspect/dyclu.hpp"
#include "aspect/embedding.hpp"

namespace testsupport {

namespace fs = std::filesystem;

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("aspect-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (auto& x : v) {
      x = g(rng);
      n2 += x * x;
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : v) x *= inv;
  return v;
}

/// Maximum matching by enumerating every injective assignment of pred rows
/// to gold columns (or "unmatched").
inline std::size_t exhaustive_matching(const aspect::catg_eval::SimilarityMatrix& sim,
                                       double threshold) {
  const std::size_t rows = sim.rows(), cols = sim.cols();
  std::vector<bool> used(cols, false);
  std::size_t best = 0;
  auto rec = [&](auto&& self, std::size_t r, std::size_t count) -> void {
    if (r == rows) {
      best = std::max(best, count);
      return;
    }
    self(self, r + 1, count);
    for (std::size_t c = 0; c < cols; ++c) {
      if (!used[c] && sim(r, c) >= threshold) {
        used[c] = true;
        self(self, r + 1, count + 1);
        used[c] = false;
      }
    }
  };
  rec(rec, 0, 0);
  return best;
}

/// NMI from an explicit contingency table, arithmetic-mean normalization.
/// Written independently of the library version: entropy via counts,
/// mutual information via the expanded formula sum n_ij/N log(N n_ij / a_i b_j).
inline double contingency_nmi(const std::vector<std::string>& u,
                              const std::vector<std::string>& v) {
  std::map<std::string, std::size_t> ui, vi;
  for (const auto& x : u) ui.emplace(x, ui.size());
  for (const auto& x : v) vi.emplace(x, vi.size());
  std::vector<std::vector<double>> table(ui.size(), std::vector<double>(vi.size(), 0.0));
  for (std::size_t k = 0; k < u.size(); ++k) table[ui[u[k]]][vi[v[k]]] += 1.0;
  const double n = static_cast<double>(u.size());
  std::vector<double> a(ui.size(), 0.0), b(vi.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      a[i] += table[i][j];
      b[j] += table[i][j];
    }
  auto entropy = [n](const std::vector<double>& m) {
    double h = 0.0;
    for (double c : m)
      if (c > 0) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double hu = entropy(a), hv = entropy(b);
  double mi = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (table[i][j] > 0) mi += (table[i][j] / n) * std::log(n * table[i][j] / (a[i] * b[j]));
  if (hu == 0.0 && hv == 0.0) return 1.0;
  if (hu == 0.0 || hv == 0.0) return 0.0;
  return mi / ((hu + hv) / 2.0);
}

/// Two well-separated blobs of unit vectors in `dim` dimensions.
struct Blobs {
  std::vector<aspect::dyclu::Point> points;
  aspect::dyclu::Labels labels;
};

inline Blobs two_blobs(std::uint64_t seed, std::size_t per_blob = 20, std::size_t dim = 16,
                       double noise = 0.05) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  Blobs out;
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      std::vector<double> v(dim, 0.0);
      v[b] = 1.0;
      for (auto& x : v) x += g(rng);
      const std::string id = "b" + std::to_string(b) + "-" + std::to_string(i);
      out.points.push_back({id, aspect::embedding::normalized(aspect::embedding::EmbeddingVector(v))});
      out.labels[id] = "blob" + std::to_string(b);
    }
  }
  return out;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "lah",     "memang",  "betul",  "saya",    "rasa",   "kita",    "semua",   "orang",
      "really",  "think",   "people", "always",  "never",  "today",   "maybe",   "whatever",
      "ya",      "gak",     "udah",   "banget",  "aja",    "kok",     "sih",     "dong",
      "haha",    "lol",     "wkwk",   "hmm",     "ok",     "nah",     "well",    "yeah",
      "time",    "thing",   "again",  "better",  "worse",  "same",    "other",   "enough",
      "kalau",   "tapi",    "sebab",  "sudah",   "belum",  "boleh",   "tak",     "nak"};
  return words;
}

/// Noisy comments grouped into topics. Texts are random filler, so their
/// embeddings carry almost no topic signal; every comment of a topic shares
/// the topic's aspect terms, except for a fraction of Trivial comments with
/// none.
inline aspect::corpus::Corpus shared_cat_corpus(std::uint64_t seed, std::size_t topics = 4,
                                                std::size_t per_topic = 20,
                                                double trivial_rate = 0.2) {
  static const std::vector<std::vector<std::string>> topic_terms = {
      {"fuel subsidy", "petrol price"},   {"vaccine booster", "antibody"},
      {"housing loan", "interest rate"},  {"football league", "coach"},
      {"flood relief", "monsoon"},        {"exam results", "school"}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> word(0, filler_words().size() - 1);
  std::uniform_int_distribution<std::size_t> len(6, 12);
  std::bernoulli_distribution trivial(trivial_rate);
  aspect::corpus::Corpus c;
  c.name = "shared-cat-" + std::to_string(seed);
  for (std::size_t t = 0; t < topics; ++t) {
    for (std::size_t i = 0; i < per_topic; ++i) {
      aspect::corpus::Comment cm;
      cm.id = "t" + std::to_string(t) + "-" + std::to_string(i);
      cm.language = aspect::corpus::Language::EN;
      const std::size_t n = len(rng);
      for (std::size_t w = 0; w < n; ++w) {
        if (w) cm.text += ' ';
        cm.text += filler_words()[word(rng)];
      }
      const auto terms = aspect::corpus::make_terms(topic_terms[t % topic_terms.size()]);
      cm.gold_cats = terms;
      cm.pred_cats = trivial(rng) ? aspect::corpus::AspectTerms{} : terms;
      cm.comment_cluster = "topic" + std::to_string(t);
      c.comments.push_back(std::move(cm));
    }
  }
  return c;
}

/// Comments with gold terms and noisy predictions: each gold term is copied,
/// perturbed, or dropped, and unrelated terms are sometimes added.
inline aspect::corpus::Corpus noisy_prediction_corpus(std::uint64_t seed, std::size_t size) {
  static const std::vector<std::string> vocab = {
      "fuel subsidy", "petrol price", "vaccine",   "booster",   "antibody",  "housing",
      "interest rate", "coach",       "league",    "flood",     "monsoon",   "exam",
      "school fees",  "minister",     "parliament", "tax",      "inflation", "rice",
      "bus fare",     "train",        "hospital",  "nurse",     "police",    "court"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<std::size_t> count(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  aspect::corpus::Corpus c;
  c.name = "noisy-" + std::to_string(seed);
  for (std::size_t i = 0; i < size; ++i) {
    aspect::corpus::Comment cm;
    cm.id = "c" + std::to_string(i);
    cm.language = aspect::corpus::kAllLanguages[i % 4];
    cm.text = "comment " + std::to_string(i);
    std::set<std::string> gold, pred;
    const std::size_t k = count(rng);
    while (gold.size() < k) gold.insert(vocab[pick(rng)]);
    for (const auto& g : gold) {
      const double r = u(rng);
      if (r < 0.5) pred.insert(g);
      else if (r < 0.7) pred.insert(g + "s");
    }
    if (u(rng) < 0.6) pred.insert(vocab[pick(rng)]);
    cm.gold_cats = aspect::corpus::make_terms({gold.begin(), gold.end()});
    cm.pred_cats = aspect::corpus::make_terms({pred.begin(), pred.end()});
    c.comments.push_back(std::move(cm));
  }
  return c;
}

inline double variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return s / static_cast<double>(xs.size() - 1);
}

/// Reference per-language split sizes.
struct SplitCounts {
  std::size_t en, cn, ms, id;
};
inline constexpr SplitCounts kFinetuneCounts{809, 693, 524, 331};
inline constexpr SplitCounts kTestCounts{1223, 814, 576, 387};

/// JSONL text with the given number of comments per language.
inline std::string split_fixture_jsonl(const SplitCounts& counts) {
  std::string out;
  std::size_t next = 0;
  auto emit = [&](const char* lang, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      out += R"({"id":"x)" + std::to_string(next++) + R"(","lang":")" + lang +
             R"(","text":"t","gold_cats":["term"]})" + "\n";
    }
  };
  emit("EN", counts.en);
  emit("CN", counts.cn);
  emit("MS", counts.ms);
  emit("ID", counts.id);
  return out;
}

}  // namespace testsupport
