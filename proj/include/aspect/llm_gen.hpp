#pragma once

// Aspect-term generation through a chat-completion service: prompt
// templates, response parsing, a record/replay cache and the batch driver.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aspect/corpus.hpp"

namespace aspect::llm_gen {

inline constexpr std::string_view kPlaceholder = "{comment}";
inline constexpr std::string_view kLimitPhrase = "1 or 2 aspect terms";

struct PromptTemplate {
  corpus::Language language = corpus::Language::EN;
  std::string body;
  bool limit_variant = false;

  /// Exactly one placeholder; limit variants must ask for 1 or 2 terms.
  void validate() const;
};

/// Few-shot annotation prompt used to request terms from a general chat
/// model, one per language.
PromptTemplate annotation_template(corpus::Language language);

/// The 30 short aspect-term descriptions used to vary instruction prompts.
/// These are locally written stand-ins.
std::span<const std::string_view> cat_descriptions();

/// Instruction prompt used for fine-tuning data. `limit_variant` asks the
/// model for only one or two terms.
PromptTemplate instruction_template(corpus::Language language, std::size_t description_index,
                                    bool limit_variant);

/// Instruction prompt for a comment, with the description picked by
/// fnv1a(id) % 30 so that the choice is varied but reproducible.
std::string instruction_prompt(const corpus::Comment& comment, bool limit_variant = false);

/// Substitutes the comment text for the placeholder. Throws LanguageMismatch.
std::string render_prompt(const PromptTemplate& tmpl, const corpus::Comment& comment);

struct Annotation {
  corpus::AspectTerms cats;  // at most five
  corpus::Polarity polarity = corpus::Polarity::C;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct ParsedAnnotation {
  Annotation annotation;
  bool truncated = false;     // more than five terms were given
  bool deduplicated = false;  // repeated terms were dropped
};

/// Extracts the last "[ATs: <terms> | EP: <N|P|C>]" group ("AT:" is also
/// accepted). Terms are split on ", "; "NA" means no terms. Total over any
/// input: throws ParseFailure when no group is present and UnknownPolarity
/// when the last group carries another EP label, and never anything else.
ParsedAnnotation parse_annotation(std::string_view response);

/// "[ATs: a, b | EP: N]", or "[ATs: NA | EP: C]" without terms.
std::string format_annotation(const Annotation& annotation);

// ---------------------------------------------------------------------------

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Single-turn completion. Must be safe to call concurrently. Throws
  /// Transport (retryable) or RemoteRejected (auth, quota; not retryable).
  virtual std::string complete(const std::string& prompt) = 0;
  virtual std::string model() const = 0;
};

struct ChatClientConfig {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;
  std::optional<std::string> api_key;
  std::chrono::milliseconds timeout{60000};
  double temperature = 0.0;
};

/// JSON chat-completions client:
///   {"model", "messages": [{"role": "user", "content": ...}], "temperature"}
///   -> choices[0].message.content
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(ChatClientConfig config);
  std::string complete(const std::string& prompt) override;
  std::string model() const override { return config_.model; }

 private:
  ChatClientConfig config_;
};

/// Append-only JSONL record of responses keyed by (model, prompt, attempt).
/// Replaying a recorded session needs no network access.
class ResponseCache {
 public:
  /// Loads existing entries if the file exists; later writes append to it.
  explicit ResponseCache(std::filesystem::path path);
  /// In-memory cache with no backing file.
  ResponseCache() = default;

  std::optional<std::string> lookup(const std::string& model, const std::string& prompt,
                                    std::size_t attempt) const;
  void store(const std::string& model, const std::string& prompt, std::size_t attempt,
             const std::string& response);
  std::size_t size() const;

 private:
  static std::string key(const std::string& model, const std::string& prompt,
                         std::size_t attempt);

  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
};

struct GenerateOptions {
  bool limit_variant = false;
  std::size_t retries = 2;      // extra attempts after the first
  std::size_t concurrency = 4;  // requests in flight
  ResponseCache* cache = nullptr;
};

struct GenerationFailure {
  std::string id;
  std::string reason;
  std::size_t attempts = 0;
};

struct GenerateResult {
  corpus::Corpus corpus;  // input with pred_cats and polarity filled
  std::vector<GenerationFailure> failures;
  std::size_t network_calls = 0;
  std::size_t truncated = 0;
};

/// Annotates every comment. A comment whose responses never parse gets empty
/// pred_cats and a failure record; transport errors that outlast the retries
/// and rejected requests propagate.
GenerateResult generate_cats(const corpus::Corpus& corpus, ChatClient& client,
                             const GenerateOptions& options);

}  // namespace aspect::llm_gen
