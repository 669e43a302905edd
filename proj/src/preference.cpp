#include "aspect/preference.hpp"

#include <cmath>
#include <ostream>
#include <set>
#include <unordered_map>

#include "aspect/error.hpp"
#include "aspect/llm_gen.hpp"
#include "aspect/text.hpp"
#include "json.hpp"

namespace aspect::preference {

void PreferenceExample::validate() const {
  for (double lp : {logp_policy_preferred, logp_ref_preferred, logp_policy_rejected,
                    logp_ref_rejected}) {
    if (!std::isfinite(lp) || lp > 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "log-probabilities must be finite and <= 0 (context \"" + context_id + "\")");
    }
  }
}

void DpoConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  }
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double neg_log_sigmoid(double x) noexcept {
  // -log(1 / (1 + e^-x)) = log1p(e^-x)
  if (x >= 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

double preference_margin(const PreferenceExample& ex, const DpoConfig& cfg) noexcept {
  const double pref = ex.logp_policy_preferred - ex.logp_ref_preferred;
  const double rej = ex.logp_policy_rejected - ex.logp_ref_rejected;
  return cfg.beta * (pref - rej);
}

namespace {

void check_batch(std::span<const PreferenceExample> batch, const DpoConfig& cfg) {
  cfg.validate();
  if (batch.empty()) throw Error(ErrorKind::EmptyInput, "empty preference batch");
  for (const auto& ex : batch) ex.validate();
}

}  // namespace

double dpo_loss(std::span<const PreferenceExample> batch, const DpoConfig& cfg) {
  check_batch(batch, cfg);
  double sum = 0.0;
  for (const auto& ex : batch) sum += neg_log_sigmoid(preference_margin(ex, cfg));
  return sum / static_cast<double>(batch.size());
}

std::vector<PolicyGradient> dpo_grad(std::span<const PreferenceExample> batch,
                                     const DpoConfig& cfg) {
  check_batch(batch, cfg);
  const auto n = static_cast<double>(batch.size());
  std::vector<PolicyGradient> grads;
  grads.reserve(batch.size());
  for (const auto& ex : batch) {
    // d/da [-log sigmoid(a)] = -(1 - sigmoid(a)) = -sigmoid(-a)
    const double weight = cfg.beta * sigmoid(-preference_margin(ex, cfg)) / n;
    grads.push_back({-weight, weight});
  }
  return grads;
}

std::string serialize_terms(const corpus::AspectTerms& terms) {
  if (terms.empty()) return std::string(corpus::kNoAspectSentinel);
  std::vector<std::string> parts;
  parts.reserve(terms.size());
  for (const auto& t : terms) parts.push_back(t.text());
  return text::join(parts, ", ");
}

PreferenceSet build_preference_set(const corpus::Corpus& human, const corpus::Corpus& machine) {
  std::unordered_map<std::string, const corpus::Comment*> by_id;
  for (const auto& c : machine.comments) by_id.emplace(c.id, &c);
  if (by_id.size() != human.comments.size()) {
    throw Error(ErrorKind::IdMismatch, "human and machine corpora differ in size");
  }

  PreferenceSet set;
  for (const auto& h : human.comments) {
    auto it = by_id.find(h.id);
    if (it == by_id.end()) {
      throw Error(ErrorKind::IdMismatch, "id \"" + h.id + "\" missing from machine corpus");
    }
    const auto& m = *it->second;
    if (!m.pred_cats) {
      throw Error(ErrorKind::MissingPredictions, "machine comment \"" + m.id + "\" has no pred_cats");
    }
    const std::set<corpus::AspectTerm> chosen(h.gold_cats.begin(), h.gold_cats.end());
    const std::set<corpus::AspectTerm> rejected(m.pred_cats->begin(), m.pred_cats->end());
    if (chosen == rejected) {
      ++set.skipped_identical;
      continue;
    }
    set.records.push_back({h.id, llm_gen::instruction_prompt(h), serialize_terms(h.gold_cats),
                           serialize_terms(*m.pred_cats)});
  }
  return set;
}

void write_preferences(const PreferenceSet& set, std::ostream& out) {
  for (const auto& r : set.records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["prompt"] = r.prompt;
    j["chosen"] = r.chosen;
    j["rejected"] = r.rejected;
    out << j.dump() << '\n';
  }
}

}  // namespace aspect::preference
