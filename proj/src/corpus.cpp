#include "aspect/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "aspect/error.hpp"
#include "aspect/text.hpp"
#include "json.hpp"

namespace aspect::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

Language parse_language(std::string_view code) {
  if (code == "EN") return Language::EN;
  if (code == "CN") return Language::CN;
  if (code == "MS") return Language::MS;
  if (code == "ID") return Language::ID;
  throw Error(ErrorKind::UnknownLanguage,
              "unknown language code \"" + std::string(code) + "\"");
}

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::EN: return "EN";
    case Language::CN: return "CN";
    case Language::MS: return "MS";
    case Language::ID: return "ID";
  }
  return "?";
}

Polarity parse_polarity(std::string_view code) {
  if (code == "N") return Polarity::N;
  if (code == "P") return Polarity::P;
  if (code == "C") return Polarity::C;
  throw Error(ErrorKind::UnknownPolarity,
              "unknown polarity \"" + std::string(code) + "\"");
}

std::string_view to_string(Polarity polarity) {
  switch (polarity) {
    case Polarity::N: return "N";
    case Polarity::P: return "P";
    case Polarity::C: return "C";
  }
  return "?";
}

AspectTerm::AspectTerm(std::string_view text) : text_(text::trim(text)) {
  if (text_.empty()) {
    throw Error(ErrorKind::InvalidRecord, "empty aspect term");
  }
  if (text_ == kNoAspectSentinel) {
    throw Error(ErrorKind::InvalidRecord,
                "\"NA\" is not an aspect term; use an empty list");
  }
}

AspectTerms make_terms(const std::vector<std::string>& texts) {
  AspectTerms terms;
  terms.reserve(texts.size());
  std::set<std::string> seen;
  for (const auto& t : texts) {
    AspectTerm term(t);
    if (!seen.insert(term.text()).second) {
      throw Error(ErrorKind::InvalidRecord,
                  "duplicate aspect term \"" + term.text() + "\"");
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

Split parse_split(std::string_view name) {
  if (name == "finetune") return Split::finetune;
  if (name == "test") return Split::test;
  if (name == "unsplit") return Split::unsplit;
  throw Error(ErrorKind::InvalidArgument,
              "unknown split \"" + std::string(name) + "\"");
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::finetune: return "finetune";
    case Split::test: return "test";
    case Split::unsplit: return "unsplit";
  }
  return "?";
}

void validate(const Corpus& corpus) {
  std::unordered_set<std::string> ids;
  for (const auto& c : corpus.comments) {
    if (c.id.empty()) throw Error(ErrorKind::InvalidRecord, "empty comment id");
    if (!ids.insert(c.id).second) {
      throw Error(ErrorKind::DuplicateId, "duplicate id \"" + c.id + "\"");
    }
    if (c.text.empty()) {
      throw Error(ErrorKind::InvalidRecord, "empty text for id \"" + c.id + "\"");
    }
    if (c.gold_cats.size() > kMaxAspectTerms) {
      throw Error(ErrorKind::TooManyAspectTerms,
                  "too many aspect terms for id \"" + c.id + "\"");
    }
    auto check_unique = [&](const AspectTerms& terms) {
      std::set<std::string> seen;
      for (const auto& t : terms) {
        if (!seen.insert(t.text()).second) {
          throw Error(ErrorKind::InvalidRecord,
                      "duplicate aspect term \"" + t.text() + "\" for id \"" +
                          c.id + "\"");
        }
      }
    };
    check_unique(c.gold_cats);
    if (c.pred_cats) check_unique(*c.pred_cats);
  }
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "id",        "lang",     "text",            "gold_cats",
      "pred_cats", "polarity", "article_cluster", "comment_cluster"};
  return keys;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::MalformedRecord, what);
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing key \"") + key + "\"");
  return *it;
}

std::string require_string(const json& value, const char* key) {
  if (!value.is_string()) malformed(std::string("\"") + key + "\" must be a string");
  return value.get<std::string>();
}

const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

AspectTerms parse_terms(const json& value, const char* key, bool enforce_limit) {
  if (value.is_string()) {
    if (value.get<std::string>() != kNoAspectSentinel) {
      malformed(std::string("\"") + key + "\" must be a list or \"NA\"");
    }
    return {};
  }
  if (!value.is_array()) {
    malformed(std::string("\"") + key + "\" must be a list or \"NA\"");
  }
  std::vector<std::string> texts;
  for (const auto& item : value) {
    if (!item.is_string()) {
      malformed(std::string("\"") + key + "\" entries must be strings");
    }
    texts.push_back(item.get<std::string>());
  }
  if (enforce_limit && texts.size() > kMaxAspectTerms) {
    throw Error(ErrorKind::TooManyAspectTerms,
                "too many aspect terms (" + std::to_string(texts.size()) +
                    " > " + std::to_string(kMaxAspectTerms) + ")");
  }
  return make_terms(texts);
}

Comment parse_record(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) malformed("record must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!known_keys().contains(key)) malformed("unknown key \"" + key + "\"");
  }

  Comment c;
  c.id = require_string(require(obj, "id"), "id");
  if (c.id.empty()) throw Error(ErrorKind::InvalidRecord, "empty comment id");
  c.language = parse_language(require_string(require(obj, "lang"), "lang"));
  c.text = require_string(require(obj, "text"), "text");
  if (c.text.empty()) throw Error(ErrorKind::InvalidRecord, "empty text");
  c.gold_cats = parse_terms(require(obj, "gold_cats"), "gold_cats", true);
  if (const json* v = optional_field(obj, "pred_cats")) {
    c.pred_cats = parse_terms(*v, "pred_cats", false);
  }
  if (const json* v = optional_field(obj, "polarity")) {
    c.polarity = parse_polarity(require_string(*v, "polarity"));
  }
  if (const json* v = optional_field(obj, "article_cluster")) {
    c.article_cluster = require_string(*v, "article_cluster");
  }
  if (const json* v = optional_field(obj, "comment_cluster")) {
    c.comment_cluster = require_string(*v, "comment_cluster");
  }
  return c;
}

ordered_json terms_to_json(const AspectTerms& terms) {
  if (terms.empty()) return std::string(kNoAspectSentinel);
  ordered_json arr = ordered_json::array();
  for (const auto& t : terms) arr.push_back(t.text());
  return arr;
}

}  // namespace

Corpus read_corpus(std::istream& in, std::string name, Split split) {
  Corpus corpus{std::move(name), {}, split};
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      Comment c = parse_record(line);
      if (!ids.insert(c.id).second) {
        throw Error(ErrorKind::DuplicateId, "duplicate id \"" + c.id + "\"");
      }
      corpus.comments.push_back(std::move(c));
    } catch (const Error& e) {
      if (e.line()) throw;
      throw Error(e.kind(), e.what(), line_no);
    }
  }
  if (in.bad()) throw Error(ErrorKind::Io, "read failure");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_corpus(in, path.stem().string(), split);
}

std::string to_jsonl_record(const Comment& c) {
  ordered_json obj;
  obj["id"] = c.id;
  obj["lang"] = std::string(to_string(c.language));
  obj["text"] = c.text;
  obj["gold_cats"] = terms_to_json(c.gold_cats);
  obj["pred_cats"] = c.pred_cats ? terms_to_json(*c.pred_cats) : ordered_json(nullptr);
  obj["polarity"] = c.polarity ? ordered_json(std::string(to_string(*c.polarity)))
                               : ordered_json(nullptr);
  obj["article_cluster"] =
      c.article_cluster ? ordered_json(*c.article_cluster) : ordered_json(nullptr);
  obj["comment_cluster"] =
      c.comment_cluster ? ordered_json(*c.comment_cluster) : ordered_json(nullptr);
  return obj.dump(-1, ' ', false, ordered_json::error_handler_t::strict);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  validate(corpus);
  for (const auto& c : corpus.comments) out << to_jsonl_record(c) << '\n';
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_corpus(corpus, out);
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

SplitStats split_stats(const Corpus& corpus) {
  SplitStats stats;
  for (Language lang : kAllLanguages) stats.counts[lang] = 0;
  for (const auto& c : corpus.comments) ++stats.counts[c.language];
  stats.total = corpus.comments.size();
  return stats;
}

}  // namespace aspect::corpus
