#pragma once

// DPO objective over sequence log-probabilities, its analytic gradient, and
// export of human-vs-machine preference pairs for an external trainer.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "aspect/corpus.hpp"

namespace aspect::preference {

/// Log-probabilities of the preferred (z) and rejected (z') completions for
/// one context c under the policy being trained and the frozen reference.
struct PreferenceExample {
  std::string context_id;
  double logp_policy_preferred = 0.0;
  double logp_ref_preferred = 0.0;
  double logp_policy_rejected = 0.0;
  double logp_ref_rejected = 0.0;

  void validate() const;  // all finite and <= 0
};

struct DpoConfig {
  double beta = 0.1;

  void validate() const;  // beta > 0
};

/// Logistic function, evaluated without overflow for any finite x.
double sigmoid(double x) noexcept;

/// -log(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x) noexcept;

/// beta * ((policy_pref - ref_pref) - (policy_rej - ref_rej)).
double preference_margin(const PreferenceExample& ex, const DpoConfig& cfg) noexcept;

/// Mean over the batch of -log sigmoid(margin). Throws EmptyInput.
double dpo_loss(std::span<const PreferenceExample> batch, const DpoConfig& cfg);

/// dL/d logp_policy_preferred and dL/d logp_policy_rejected for one example.
/// Reference log-probabilities are frozen and have zero gradient.
struct PolicyGradient {
  double preferred = 0.0;
  double rejected = 0.0;
};

std::vector<PolicyGradient> dpo_grad(std::span<const PreferenceExample> batch,
                                     const DpoConfig& cfg);

/// Trainer-facing record; log-probabilities are computed by the trainer.
struct PreferenceRecord {
  std::string id;
  std::string prompt;
  std::string chosen;
  std::string rejected;

  friend bool operator==(const PreferenceRecord&, const PreferenceRecord&) = default;
};

struct PreferenceSet {
  std::vector<PreferenceRecord> records;
  std::size_t skipped_identical = 0;
};

/// Terms joined by ", " in annotation order; "NA" when empty.
std::string serialize_terms(const corpus::AspectTerms& terms);

/// Pairs human gold_cats (chosen) with machine pred_cats (rejected) per id,
/// in the human corpus order. Ids whose two term sets coincide are skipped
/// and counted. Throws IdMismatch unless both corpora cover the same ids,
/// MissingPredictions if a machine comment lacks pred_cats.
PreferenceSet build_preference_set(const corpus::Corpus& human, const corpus::Corpus& machine);

void write_preferences(const PreferenceSet& set, std::ostream& out);

}  // namespace aspect::preference
