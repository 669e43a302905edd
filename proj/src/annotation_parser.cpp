#include <set>

#include "aspect/error.hpp"
#include "aspect/llm_gen.hpp"
#include "aspect/text.hpp"

namespace aspect::llm_gen {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string_view skip_space(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

bool consume(std::string_view& s, std::string_view token) {
  if (!s.starts_with(token)) return false;
  s.remove_prefix(token.size());
  return true;
}

struct Group {
  std::string_view terms;
  std::string polarity;
};

// Matches "AT[s] : <terms> | EP : <label>" (the text between the brackets).
std::optional<Group> match_group(std::string_view inner) {
  std::string_view s = skip_space(inner);
  if (!consume(s, "AT")) return std::nullopt;
  consume(s, "s");
  s = skip_space(s);
  if (!consume(s, ":")) return std::nullopt;
  const auto bar = s.rfind('|');
  if (bar == std::string_view::npos) return std::nullopt;
  std::string_view tail = skip_space(s.substr(bar + 1));
  if (!consume(tail, "EP")) return std::nullopt;
  tail = skip_space(tail);
  if (!consume(tail, ":")) return std::nullopt;
  return Group{s.substr(0, bar), text::trim(tail)};
}

}  // namespace

ParsedAnnotation parse_annotation(std::string_view response) {
  for (std::size_t open = response.rfind('['); open != std::string_view::npos;
       open = open == 0 ? std::string_view::npos : response.rfind('[', open - 1)) {
    const auto close = response.find(']', open + 1);
    if (close == std::string_view::npos) continue;
    const auto inner = response.substr(open + 1, close - open - 1);
    if (inner.find('[') != std::string_view::npos) continue;
    const auto group = match_group(inner);
    if (!group) continue;

    ParsedAnnotation parsed;
    if (group->polarity == "N" || group->polarity == "P" || group->polarity == "C") {
      parsed.annotation.polarity = corpus::parse_polarity(group->polarity);
    } else {
      throw Error(ErrorKind::UnknownPolarity,
                  "unknown EP label \"" + group->polarity + "\"");
    }

    std::set<std::string> seen;
    for (const auto& raw : text::split(group->terms, ", ")) {
      std::string term = text::trim(raw);
      if (term.empty() || term == corpus::kNoAspectSentinel) continue;
      if (!seen.insert(term).second) {
        parsed.deduplicated = true;
        continue;
      }
      if (parsed.annotation.cats.size() == corpus::kMaxAspectTerms) {
        parsed.truncated = true;
        continue;
      }
      parsed.annotation.cats.emplace_back(term);
    }
    return parsed;
  }
  throw Error(ErrorKind::ParseFailure, "no [ATs: ... | EP: ...] group in response");
}

std::string format_annotation(const Annotation& annotation) {
  std::vector<std::string> parts;
  for (const auto& t : annotation.cats) parts.push_back(t.text());
  const std::string terms =
      parts.empty() ? std::string(corpus::kNoAspectSentinel) : text::join(parts, ", ");
  return "[ATs: " + terms + " | EP: " + std::string(corpus::to_string(annotation.polarity)) + "]";
}

}  // namespace aspect::llm_gen
