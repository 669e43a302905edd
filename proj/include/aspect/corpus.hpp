#pragma once

// Annotated multilingual comment corpus: data model, JSONL storage and
// per-language split statistics.

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aspect::corpus {

enum class Language { EN, CN, MS, ID };

inline constexpr std::array<Language, 4> kAllLanguages = {
    Language::EN, Language::CN, Language::MS, Language::ID};

/// Parses "EN", "CN", "MS" or "ID"; anything else throws UnknownLanguage.
Language parse_language(std::string_view code);
std::string_view to_string(Language lang);

/// Emotional polarity label: negative, positive, neutral.
enum class Polarity { N, P, C };

/// Accepts exactly "N", "P" or "C"; throws UnknownPolarity otherwise.
Polarity parse_polarity(std::string_view code);
std::string_view to_string(Polarity polarity);

/// Maximum number of gold aspect terms per comment.
inline constexpr std::size_t kMaxAspectTerms = 5;

/// Sentinel used by annotators and prompts for "no aspect terms".
inline constexpr std::string_view kNoAspectSentinel = "NA";

/// A trimmed, non-empty aspect term. The "NA" sentinel is not a term; an
/// absent annotation is an empty list.
class AspectTerm {
 public:
  explicit AspectTerm(std::string_view text);

  const std::string& text() const noexcept { return text_; }

  friend bool operator==(const AspectTerm&, const AspectTerm&) = default;
  friend auto operator<=>(const AspectTerm&, const AspectTerm&) = default;

 private:
  std::string text_;
};

using AspectTerms = std::vector<AspectTerm>;

/// Builds a term list, rejecting duplicates and "NA" entries.
AspectTerms make_terms(const std::vector<std::string>& texts);

struct Comment {
  std::string id;
  Language language = Language::EN;
  std::string text;
  AspectTerms gold_cats;
  std::optional<AspectTerms> pred_cats;
  std::optional<Polarity> polarity;
  std::optional<std::string> article_cluster;
  std::optional<std::string> comment_cluster;

  friend bool operator==(const Comment&, const Comment&) = default;
};

enum class Split { finetune, test, unsplit };

Split parse_split(std::string_view name);
std::string_view to_string(Split split);

struct Corpus {
  std::string name;
  std::vector<Comment> comments;
  Split split = Split::unsplit;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Checks every comment and corpus-level invariant; throws aspect::Error.
void validate(const Corpus& corpus);

/// Reads a JSONL corpus. Errors carry the 1-based line number and one of
/// MalformedRecord, DuplicateId, TooManyAspectTerms, UnknownLanguage or
/// InvalidRecord.
Corpus read_corpus(std::istream& in, std::string name = {},
                   Split split = Split::unsplit);
Corpus load_corpus(const std::filesystem::path& path,
                   Split split = Split::unsplit);

/// Writes one record per line with keys in schema order.
void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Serializes a single comment exactly as write_corpus does.
std::string to_jsonl_record(const Comment& comment);

struct SplitStats {
  std::map<Language, std::size_t> counts;  // always holds all four languages
  std::size_t total = 0;

  friend bool operator==(const SplitStats&, const SplitStats&) = default;
};

SplitStats split_stats(const Corpus& corpus);

}  // namespace aspect::corpus
