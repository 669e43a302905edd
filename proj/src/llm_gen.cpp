#include "aspect/llm_gen.hpp"

#include <thread>

#include "aspect/error.hpp"
#include "aspect/http.hpp"
#include "aspect/parallel.hpp"
#include "httplib.h"
#include "json.hpp"

namespace aspect::llm_gen {

using nlohmann::json;

HttpChatClient::HttpChatClient(ChatClientConfig config) : config_(std::move(config)) {
  if (config_.model.empty()) throw Error(ErrorKind::InvalidArgument, "chat model name is required");
  http::parse_endpoint(config_.endpoint);
}

std::string HttpChatClient::complete(const std::string& prompt) {
  const auto endpoint = http::parse_endpoint(config_.endpoint);
  httplib::Client client(endpoint.origin);
  const auto secs = config_.timeout.count() / 1000;
  const auto usecs = (config_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (config_.api_key) headers.emplace("Authorization", "Bearer " + *config_.api_key);

  json body = {{"model", config_.model},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
               {"temperature", config_.temperature}};
  auto res = client.Post(endpoint.path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::Transport, "chat request failed: " + httplib::to_string(res.error()),
                std::nullopt, true);
  }
  if (res->status >= 500) {
    throw Error(ErrorKind::Transport,
                "chat server returned " + std::to_string(res->status) + ": " + res->body,
                std::nullopt, true);
  }
  if (res->status != 200) {
    // Auth and quota errors are reported with the server's own message.
    throw Error(ErrorKind::RemoteRejected,
                "chat server returned " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    const json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, std::string("unexpected chat reply: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      entries_[key(j.at("model").get<std::string>(), j.at("prompt").get<std::string>(),
                   j.at("attempt").get<std::size_t>())] = j.at("response").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::SchemaMismatch, std::string("bad cache entry: ") + e.what(), line_no);
    }
  }
}

std::string ResponseCache::key(const std::string& model, const std::string& prompt,
                               std::size_t attempt) {
  return model + '\x1f' + std::to_string(attempt) + '\x1f' + prompt;
}

std::optional<std::string> ResponseCache::lookup(const std::string& model,
                                                 const std::string& prompt,
                                                 std::size_t attempt) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key(model, prompt, attempt));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::store(const std::string& model, const std::string& prompt,
                          std::size_t attempt, const std::string& response) {
  std::lock_guard lock(mutex_);
  if (!entries_.emplace(key(model, prompt, attempt), response).second) return;
  if (!path_) return;
  std::ofstream out(*path_, std::ios::binary | std::ios::app);
  nlohmann::ordered_json j;
  j["model"] = model;
  j["prompt"] = prompt;
  j["attempt"] = attempt;
  j["response"] = response;
  out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  if (!out) throw Error(ErrorKind::Io, "cannot append to cache " + path_->string());
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------------------

GenerateResult generate_cats(const corpus::Corpus& corpus, ChatClient& client,
                             const GenerateOptions& options) {
  GenerateResult result;
  result.corpus = corpus;
  const std::size_t n = corpus.comments.size();
  std::vector<std::optional<GenerationFailure>> failures(n);
  std::vector<char> truncated(n, 0);
  std::atomic<std::size_t> calls{0};
  const std::string model = client.model();

  parallel_for(n, options.concurrency, [&](std::size_t i) {
    auto& comment = result.corpus.comments[i];
    const std::string prompt =
        options.limit_variant ? instruction_prompt(comment, true)
                              : render_prompt(annotation_template(comment.language), comment);
    std::string last_reason;
    const std::size_t attempts = options.retries + 1;
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
      std::optional<std::string> response;
      if (options.cache) response = options.cache->lookup(model, prompt, attempt);
      if (!response) {
        try {
          ++calls;
          response = client.complete(prompt);
        } catch (const Error& e) {
          if (!e.retryable() || attempt + 1 == attempts) throw;
          last_reason = e.what();
          continue;
        }
        if (options.cache) options.cache->store(model, prompt, attempt, *response);
      }
      try {
        const ParsedAnnotation parsed = parse_annotation(*response);
        comment.pred_cats = parsed.annotation.cats;
        comment.polarity = parsed.annotation.polarity;
        truncated[i] = parsed.truncated;
        return;
      } catch (const Error& e) {
        last_reason = e.what();
      }
    }
    comment.pred_cats = corpus::AspectTerms{};
    failures[i] = GenerationFailure{comment.id, last_reason, attempts};
  });

  for (auto& f : failures) {
    if (f) result.failures.push_back(std::move(*f));
  }
  for (char t : truncated) result.truncated += t ? 1 : 0;
  result.network_calls = calls.load();
  return result;
}

}  // namespace aspect::llm_gen
