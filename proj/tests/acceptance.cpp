// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aspect/catg_eval.hpp"
#include "aspect/corpus.hpp"
#include "aspect/dyclu.hpp"
#include "aspect/embedding.hpp"
#include "aspect/error.hpp"
#include "aspect/llm_gen.hpp"
#include "aspect/preference.hpp"
#include "aspect/report.hpp"
#include "support.hpp"

using namespace aspect;
namespace ts = testsupport;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --- 1: F1 arithmetic -------------------------------------------------------

struct PrintedRow {
  const char* method;
  double p, r, f1;  // percentages as printed
};

constexpr PrintedRow kOverallRows[] = {
    {"SeaLion2", 19.5, 39.0, 26.0},          {"SeaLion2 ft", 21.9, 45.9, 29.7},
    {"SeaLion2 DPO", 22.4, 46.6, 30.3},      {"SeaLion2 DPO lim", 22.8, 46.7, 30.6},
    {"SeaLLM2", 7.5, 14.7, 9.9},             {"SeaLLM2 ft", 23.1, 47.6, 31.1},
    {"SeaLLM2 DPO", 26.6, 47.8, 34.2},       {"SeaLLM2 DPO lim", 27.2, 45.7, 34.1},
    {"GPT4", 30.0, 40.9, 34.6}};

// Whether some (P, R) inside the rounding cells of the printed values yields an
// F1 inside the printed F1 cell. Dense grid search over the cells.
bool printed_row_consistent(const PrintedRow& row) {
  for (int i = -50; i <= 50; ++i) {
    for (int j = -50; j <= 50; ++j) {
      const double p = row.p + 0.001 * i, r = row.r + 0.001 * j;
      const double f = 2 * p * r / (p + r);
      if (std::abs(f - row.f1) <= 0.05) return true;
    }
  }
  return false;
}

Outcome check_f1_arithmetic() {
  Outcome o{true, {}};
  std::size_t checked = 0, inconsistent = 0;
  for (const auto& row : kOverallRows) {
    // Counts whose precision and recall land on the printed values.
    catg_eval::MatchCounts counts;
    counts.matched = static_cast<std::size_t>(std::llround(row.p * 1000));
    counts.predicted = 100000;
    counts.gold = static_cast<std::size_t>(std::llround(counts.matched / (row.r / 100.0)));
    const auto stats = catg_eval::stats_from_counts(counts);
    const bool p_ok = report::format_percent(stats.precision) ==
                      report::format_percent(row.p / 100.0);
    const bool r_ok = report::format_percent(stats.recall) == report::format_percent(row.r / 100.0);
    if (!p_ok || !r_ok) {
      o.pass = false;
      o.detail += std::string(" bad-counts:") + row.method;
      continue;
    }
    if (!printed_row_consistent(row)) {
      ++inconsistent;
      std::cerr << "  note: printed row " << row.method << " is internally inconsistent\n";
      continue;
    }
    ++checked;
    const double f1 = stats.f1 * 100.0;
    if (std::abs(f1 - row.f1) > 0.05) {
      o.pass = false;
      o.detail += std::string(" ") + row.method + "=" + std::to_string(f1);
    }
  }
  o.detail = std::to_string(checked) + " rows reproduced, " + std::to_string(inconsistent) +
             " inconsistent" + o.detail;
  return o;
}

// --- 2: split counts ---------------------------------------------------------

Outcome check_split_counts() {
  ts::TempDir dir("acc-split");
  const auto ft_path = dir / "finetune.jsonl";
  const auto test_path = dir / "test.jsonl";
  std::ofstream(ft_path) << ts::split_fixture_jsonl(ts::kFinetuneCounts);
  std::ofstream(test_path) << ts::split_fixture_jsonl(ts::kTestCounts);
  const auto ft = corpus::split_stats(corpus::load_corpus(ft_path, corpus::Split::finetune));
  const auto te = corpus::split_stats(corpus::load_corpus(test_path, corpus::Split::test));
  auto matches = [](const corpus::SplitStats& s, const ts::SplitCounts& c) {
    using corpus::Language;
    return s.counts.at(Language::EN) == c.en && s.counts.at(Language::CN) == c.cn &&
           s.counts.at(Language::MS) == c.ms && s.counts.at(Language::ID) == c.id;
  };
  const bool pass =
      ft.total == 2357 && te.total == 3000 && matches(ft, ts::kFinetuneCounts) &&
      matches(te, ts::kTestCounts);
  return {pass, "totals " + std::to_string(ft.total) + " / " + std::to_string(te.total)};
}

// --- 3: DPO math -------------------------------------------------------------

Outcome check_dpo() {
  double worst_ln2 = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const preference::DpoConfig cfg{0.05 * k};
    const preference::PreferenceExample ex{"c", -3.0, -3.0, -7.5, -7.5};
    worst_ln2 = std::max(worst_ln2, std::abs(preference::dpo_loss({&ex, 1}, cfg) - std::log(2.0)));
  }

  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> logp(-20.0, -0.01);
  std::uniform_real_distribution<double> beta(0.05, 1.0);
  double worst_rel = 0.0;
  const double h = 1e-5;
  for (int n = 0; n < 1000; ++n) {
    preference::PreferenceExample ex{"c", logp(rng), logp(rng), logp(rng), logp(rng)};
    const preference::DpoConfig cfg{beta(rng)};
    const auto g = preference::dpo_grad({&ex, 1}, cfg).front();
    auto loss_at = [&](double pref, double rej) {
      auto e = ex;
      e.logp_policy_preferred = pref;
      e.logp_policy_rejected = rej;
      return preference::dpo_loss({&e, 1}, cfg);
    };
    const double fd_pref =
        (loss_at(ex.logp_policy_preferred + h, ex.logp_policy_rejected) -
         loss_at(ex.logp_policy_preferred - h, ex.logp_policy_rejected)) / (2 * h);
    const double fd_rej =
        (loss_at(ex.logp_policy_preferred, ex.logp_policy_rejected + h) -
         loss_at(ex.logp_policy_preferred, ex.logp_policy_rejected - h)) / (2 * h);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
    worst_rel = std::max({worst_rel, rel(g.preferred, fd_pref), rel(g.rejected, fd_rej)});
  }

  double worst_shift = 0.0;
  for (int n = 0; n < 1000; ++n) {
    preference::PreferenceExample ex{"c", logp(rng), logp(rng), logp(rng), logp(rng)};
    const preference::DpoConfig cfg{beta(rng)};
    const double base = preference::dpo_loss({&ex, 1}, cfg);
    const double c = -std::uniform_real_distribution<double>(0.0, 5.0)(rng);
    auto a = ex;  // same shift to a policy and its reference
    a.logp_policy_preferred += c;
    a.logp_ref_preferred += c;
    auto b = ex;  // same shift to both completions under the policy
    b.logp_policy_preferred += c;
    b.logp_policy_rejected += c;
    worst_shift = std::max({worst_shift, std::abs(preference::dpo_loss({&a, 1}, cfg) - base),
                            std::abs(preference::dpo_loss({&b, 1}, cfg) - base)});
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "|L0-ln2|=%.2e grad rel=%.2e shift=%.2e", worst_ln2, worst_rel,
                worst_shift);
  return {worst_ln2 <= 1e-12 && worst_rel <= 1e-6 && worst_shift <= 1e-12, buf};
}

// --- 4: matching oracle --------------------------------------------------------

catg_eval::SimilarityMatrix random_matrix(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(0, 6);
  std::uniform_int_distribution<int> level(-10, 10);  // coarse values create ties
  const std::size_t r = size(rng), c = size(rng);
  catg_eval::SimilarityMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = level(rng) / 10.0;
  return m;
}

Outcome check_matching() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> th(0.05, 1.0);
  std::size_t oracle_fail = 0, mono_fail = 0;
  for (int n = 0; n < 500; ++n) {
    const auto m = random_matrix(rng);
    const double t = th(rng);
    if (catg_eval::max_bipartite_matching(m, t) != ts::exhaustive_matching(m, t)) ++oracle_fail;
  }
  for (int n = 0; n < 1000; ++n) {
    const auto m = random_matrix(rng);
    double a = th(rng), b = th(rng);
    if (a > b) std::swap(a, b);
    if (catg_eval::max_bipartite_matching(m, a) < catg_eval::max_bipartite_matching(m, b) ||
        catg_eval::greedy_matching(m, a) < catg_eval::greedy_matching(m, b))
      ++mono_fail;
  }
  return {oracle_fail == 0 && mono_fail == 0,
          "oracle mismatches " + std::to_string(oracle_fail) + "/500, monotonicity violations " +
              std::to_string(mono_fail) + "/1000"};
}

// --- 5: DyClu properties ---------------------------------------------------------

Outcome check_dyclu() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(1, 300);
  std::uniform_int_distribution<std::size_t> dims(2, 24);
  const dyclu::DyCluConfig cfg;
  std::size_t bound_fail = 0, theta_fail = 0, sound_fail = 0;
  for (int d = 0; d < 200; ++d) {
    const std::size_t n = size(rng), dim = dims(rng);
    std::vector<dyclu::Point> pts;
    std::vector<std::vector<double>> raw;
    for (std::size_t i = 0; i < n; ++i) {
      raw.push_back(ts::random_unit(rng, dim));
      pts.push_back({"p" + std::to_string(i), embedding::EmbeddingVector(raw.back())});
    }
    const auto set = dyclu::dyclu_cluster(pts, cfg, 1);
    const std::size_t bound =
        n > cfg.gamma0 ? (n - cfg.gamma0 + cfg.delta - 1) / cfg.delta : 0;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[pts[i].id] = i;
    for (const auto& cl : set.clusters) {
      if (cl.iterations > bound) ++bound_fail;
      if (cl.threshold > 0.9) ++theta_fail;
      const auto& q = raw[index.at(cl.centroid_id)];
      std::vector<double> sims(n);
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) s += q[k] * raw[i][k];
        sims[i] = std::clamp(s, -1.0, 1.0);
      }
      sims[index.at(cl.centroid_id)] = 1.0;
      std::vector<double> sorted = sims;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      const double kth = sorted[std::min(cl.top_k, n) - 1];
      std::set<std::string> members(cl.member_ids.begin(), cl.member_ids.end());
      bool ok = cl.member_ids.size() <= cl.top_k && members.count(cl.centroid_id) == 1;
      for (std::size_t i = 0; i < n && ok; ++i) {
        const bool in = members.count(pts[i].id) > 0;
        if (in && (sims[i] < cl.threshold - 1e-9 || sims[i] < kth - 1e-9)) ok = false;
        if (!in && sims[i] >= cl.threshold + 1e-9 && sims[i] > kth + 1e-9) ok = false;
      }
      if (!ok) ++sound_fail;
    }
  }
  const auto blobs = ts::two_blobs(5);
  const auto set = dyclu::dyclu_cluster(blobs.points, cfg, 1);
  auto labels = dyclu::partition_labels(set);
  const double blob_nmi = dyclu::nmi(labels, blobs.labels);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "bound violations %zu, theta>0.9 %zu, unsound clusters %zu, two-blob NMI %.6f",
                bound_fail, theta_fail, sound_fail, blob_nmi);
  return {bound_fail == 0 && theta_fail == 0 && sound_fail == 0 && blob_nmi == 1.0, buf};
}

// --- 6: augmentation direction ----------------------------------------------------

Outcome check_augmentation() {
  const embedding::HashingEmbedder embedder(384);
  dyclu::DyCluConfig plain;
  dyclu::DyCluConfig augmented = plain;
  augmented.use_cat_augmentation = true;
  augmented.trivial_filter = true;
  std::size_t wins = 0;
  double sum_plain = 0.0, sum_aug = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto c = ts::shared_cat_corpus(seed);
    const double a = *dyclu::cluster_and_score(c, embedder, plain).nmi;
    const double b = *dyclu::cluster_and_score(c, embedder, augmented).nmi;
    sum_plain += a;
    sum_aug += b;
    if (b >= a) ++wins;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "augmented >= plain in %zu/100 (mean NMI %.3f vs %.3f)", wins,
                sum_aug / 100, sum_plain / 100);
  return {wins >= 95, buf};
}

// --- 7: NMI correctness -------------------------------------------------------------

Outcome check_nmi() {
  dyclu::Labels a, constant, varied;
  for (int i = 0; i < 12; ++i) {
    const auto id = "i" + std::to_string(i);
    a[id] = std::to_string(i % 3);
    constant[id] = "only";
    varied[id] = std::to_string(i % 4);
  }
  const double identity = dyclu::nmi(a, a);
  const double degenerate = dyclu::nmi(constant, varied);
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<std::size_t> size(2, 80);
  std::uniform_int_distribution<int> kdist(1, 8);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const std::size_t m = size(rng);
    const int ku = kdist(rng), kv = kdist(rng);
    dyclu::Labels u, v;
    std::vector<std::string> uu, vv;
    for (std::size_t i = 0; i < m; ++i) {
      const auto id = "x" + std::to_string(i);
      u[id] = "u" + std::to_string(std::uniform_int_distribution<int>(0, ku - 1)(rng));
      v[id] = "v" + std::to_string(std::uniform_int_distribution<int>(0, kv - 1)(rng));
    }
    for (const auto& [id, lab] : u) {
      uu.push_back(lab);
      vv.push_back(v.at(id));
    }
    worst = std::max(worst, std::abs(dyclu::nmi(u, v) - ts::contingency_nmi(uu, vv)));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "identity %.12f, constant-vs-varied %.12f, oracle diff %.2e",
                identity, degenerate, worst);
  return {std::abs(identity - 1.0) <= 1e-12 && degenerate == 0.0 && worst <= 1e-10, buf};
}

// --- 8: parser totality ------------------------------------------------------------

struct ParserCase {
  const char* response;
  std::vector<std::string> cats;
  corpus::Polarity polarity;
};

const std::vector<ParserCase>& worked_cases() {
  using corpus::Polarity;
  static const std::vector<ParserCase> cases = {
      {"Bn nak sgt slangor tu bukanya apa..terliur tgk s'gor negeri plg maju hasil negeri "
       "billion2 tapi um ... zaman dedulu masa bn pegang bolehlah sakau sikit "
       "[ATs: BN, hasil negara, rizab Selangor, fed gomen | EP: N]",
       {"BN", "hasil negara", "rizab Selangor", "fed gomen"}, Polarity::N},
      {"kansss..meleleh air liur bn slangor nak merompak duit hasil negeri tapi apakan daya "
       "tak dapat.. [ATs: rizab selangor, merompak wang | EP: N]",
       {"rizab selangor", "merompak wang"}, Polarity::N},
      {"The best actor goes to... Kesian owner moto. JPJ Dah nampak. takpe kasi chan lepas tu "
       "lepas GE claim balik. [ATs: motorcycle owner, JPJ | EP: C]",
       {"motorcycle owner", "JPJ"}, Polarity::C},
      {"Kimarkkkk ko ler jamal tongkol  [ATs: Jamal | EP: N]", {"Jamal"}, Polarity::N},
      {"太假了……我家那里几乎每人都中了只是没人统计而已 [ATs: 新冠统计 | EP: N]", {"新冠统计"},
       Polarity::N},
      {"刚才浙江日增100万转到这条新闻成2983起，真的是太不要脸了，还零死亡，现在就我们那里殡仪馆"
       "死人都全部放在地上，殡仪馆24小时工作。 [ATs: 网络新闻, 浙江新增病例, 死亡率 | EP: N]",
       {"网络新闻", "浙江新增病例", "死亡率"}, Polarity::N},
      {"呵呵。。。。两声应该明白啥意思 [ATs: NA | EP: C]", {}, Polarity::C},
      {"jumlah nuklir yang dimilik sekutu NATO, China dan Rusia lebih dari cukup untuk bikin "
       "bumi kiamat [ATs: NATO, Tiongkok, Rusia, senjata nuklir | EP: N]",
       {"NATO", "Tiongkok", "Rusia", "senjata nuklir"}, Polarity::N},
      {"@kampret.strez booster gak ngaruh utk org yg udah kena + di vaksin. itu dari riset "
       "empiris dari israel bbrp bulan lalu.  [ATs: Efek booster, penelitian di Israel | EP: C]",
       {"Efek booster", "penelitian di Israel"}, Polarity::C},
      {"kalau di Indonesia kebalik yah di beberapa daerah ada yg maksa kapir pake jilbab dgn "
       "alasan t0l0l pula macam biar gak digigit nyamuk  [AT: Indonesia, hijab, nyamuk | EP: C]",
       {"Indonesia", "hijab", "nyamuk"}, Polarity::C},
      {"What it says is that food banks are used to providing support for those in the poorest "
       "10% of the population but now that segment is creeping up so that more people are "
       "needing help. [ATs: food bank, poor singaporeans | EP: N]",
       {"food bank", "poor singaporeans"}, Polarity::N},
      {"Actually, most [people have savings - in the form of CPF]. [ATs: CPF savings | EP: P]",
       {"CPF savings"}, Polarity::P},
      {"And yet every 2 or 3 cars on the road is either bmw or merc [ATs: NA | EP: C]", {},
       Polarity::C},
  };
  return cases;
}

std::string fuzz_string(std::mt19937_64& rng) {
  static const std::vector<std::string> atoms = {
      "[",   "]",    "|",   ":",    ",",   ", ", " ",   "ATs", "AT",  "EP",  "N",   "P",
      "C",   "X",    "NA",  "\n",   "\r",  "\t", "a",   "term", "新冠", "ü",   "\xff", "\xc3",
      "[ATs:", "| EP:", "EP: N]", "EP: Q]", "[AT:", "||", "[[", "]]", "\0", "  "};
  std::uniform_int_distribution<std::size_t> len(0, 40);
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  std::string s;
  if (byte(rng) < 128) {
    // Near-valid group wrapped in junk.
    static const char* heads[] = {"[ATs:", "[AT:", "[ATs :", "[ ATs:", "[ATS:"};
    static const char* labels[] = {"N", "P", "C", " N ", "Q", "", "NP"};
    std::uniform_int_distribution<std::size_t> terms(0, 8), h(0, 4), l(0, 6);
    for (std::size_t i = 0, k = len(rng) / 4; i < k; ++i) s += atoms[pick(rng)];
    s += heads[h(rng)];
    for (std::size_t i = 0, k = terms(rng); i < k; ++i) {
      if (i) s += ", ";
      s += byte(rng) < 200 ? "t" + std::to_string(byte(rng) % 7) : atoms[pick(rng)];
    }
    s += " | EP: ";
    s += labels[l(rng)];
    s += "]";
    for (std::size_t i = 0, k = len(rng) / 8; i < k; ++i) s += atoms[pick(rng)];
    return s;
  }
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (byte(rng) < 32) s += static_cast<char>(byte(rng));
    else s += atoms[pick(rng)];
  }
  return s;
}

Outcome check_parser() {
  std::size_t example_fail = 0;
  for (const auto& c : worked_cases()) {
    try {
      const auto parsed = llm_gen::parse_annotation(c.response);
      std::vector<std::string> got;
      for (const auto& t : parsed.annotation.cats) got.push_back(t.text());
      if (got != c.cats || parsed.annotation.polarity != c.polarity) ++example_fail;
    } catch (const std::exception&) {
      ++example_fail;
    }
  }
  std::mt19937_64 rng(4242);
  std::size_t parsed = 0, typed_errors = 0, other = 0;
  for (int n = 0; n < 100000; ++n) {
    const auto s = fuzz_string(rng);
    try {
      const auto p = llm_gen::parse_annotation(s);
      if (p.annotation.cats.size() > corpus::kMaxAspectTerms) ++other;
      ++parsed;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseFailure || e.kind() == ErrorKind::UnknownPolarity)
        ++typed_errors;
      else
        ++other;
    } catch (...) {
      ++other;
    }
  }
  return {example_fail == 0 && other == 0,
          std::to_string(worked_cases().size() - example_fail) + "/" +
              std::to_string(worked_cases().size()) + " examples exact; fuzz 100000: " +
              std::to_string(parsed) + " parsed, " + std::to_string(typed_errors) +
              " typed errors, " + std::to_string(other) + " unexpected"};
}

// --- 9: scale sweep -------------------------------------------------------------------

Outcome check_sweep() {
  const auto c = ts::noisy_prediction_corpus(2024, 500);
  const embedding::HashingEmbedder embedder(384);
  const auto rep = catg_eval::evaluate_corpus(c, embedder, catg_eval::MatchConfig{});
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 30; ++s) seeds.push_back(s);
  const std::vector<std::size_t> sizes = {50, 450};
  const auto rows = catg_eval::scale_sweep(rep.comments, sizes, seeds);
  std::vector<double> small, large;
  for (const auto& r : rows) (r.size == 50 ? small : large).push_back(r.f1);
  const double vs = ts::variance(small), vl = ts::variance(large);
  char buf[160];
  std::snprintf(buf, sizeof buf, "var(F1) at 10%% = %.3e, at 90%% = %.3e (30 seeds)", vs, vl);
  return {vl <= vs, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 F1 arithmetic reproduction", check_f1_arithmetic},
      {"2 split count reproduction", check_split_counts},
      {"3 DPO loss, gradient and shift invariance", check_dpo},
      {"4 matching oracle and threshold monotonicity", check_matching},
      {"5 DyClu termination, ceiling, soundness, two blobs", check_dyclu},
      {"6 aspect-term augmentation direction", check_augmentation},
      {"7 NMI correctness", check_nmi},
      {"8 parser totality and worked examples", check_parser},
      {"9 scale-sweep variance", check_sweep},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << o.detail << "]\n";
    std::cout.flush();
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
