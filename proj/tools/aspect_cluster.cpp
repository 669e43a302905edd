// aspect-cluster: command-line front end for the evaluation, clustering,
// generation and preference-export stages.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "aspect/catg_eval.hpp"
#include "aspect/corpus.hpp"
#include "aspect/dyclu.hpp"
#include "aspect/embedding.hpp"
#include "aspect/error.hpp"
#include "aspect/llm_gen.hpp"
#include "aspect/manifest.hpp"
#include "aspect/preference.hpp"
#include "aspect/report.hpp"
#include "aspect/text.hpp"

namespace fs = std::filesystem;
using namespace aspect;

namespace {

struct EmbedOptions {
  std::string kind = "deterministic";
  std::string endpoint;
  std::string model;
  std::size_t dim = 384;
  std::uint64_t seed = 0;
  std::size_t batch = 64;
  double timeout_s = 30.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--embedder", kind, "Embedding provider")
        ->check(CLI::IsMember({"deterministic", "remote"}))
        ->capture_default_str();
    cmd->add_option("--embed-endpoint", endpoint,
                    "Embedding server URL (falls back to $ASPECT_EMBED_ENDPOINT)");
    cmd->add_option("--embed-model", model, "Embedding model name for the remote provider");
    cmd->add_option("--embed-dim", dim, "Embedding dimension")->capture_default_str();
    cmd->add_option("--embed-seed", seed, "Hash seed of the deterministic embedder")
        ->capture_default_str();
    cmd->add_option("--embed-batch", batch, "Texts per remote request")->capture_default_str();
    cmd->add_option("--embed-timeout", timeout_s, "Remote timeout in seconds")->capture_default_str();
  }

  embedding::EmbeddingProviderConfig config() const {
    embedding::EmbeddingProviderConfig cfg;
    cfg.kind = kind == "remote" ? embedding::ProviderKind::remote
                                : embedding::ProviderKind::deterministic_local;
    cfg.dim = dim;
    cfg.seed = seed;
    cfg.batch_size = batch;
    cfg.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
    std::string url = endpoint;
    if (url.empty()) {
      if (const char* env = std::getenv("ASPECT_EMBED_ENDPOINT")) url = env;
    }
    if (!url.empty()) cfg.endpoint = url;
    if (!model.empty()) cfg.model_name = model;
    return cfg;
  }

  void record(RunManifest& m) const {
    auto cfg = config();
    m.config["embedder"] = kind;
    m.config["embed_dim"] = std::to_string(dim);
    m.config["embed_seed"] = std::to_string(seed);
    if (cfg.endpoint) m.config["embed_endpoint"] = *cfg.endpoint;
    if (cfg.model_name) m.config["embed_model"] = *cfg.model_name;
  }
};

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : text::split(spec, ",")) {
    const std::string p = text::trim(part);
    if (p.empty()) continue;
    try {
      if (auto dots = p.find(".."); dots != std::string::npos) {
        const auto lo = std::stoull(p.substr(0, dots));
        const auto hi = std::stoull(p.substr(dots + 2));
        if (hi < lo) throw Error(ErrorKind::InvalidArgument, "empty seed range " + p);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      } else {
        seeds.push_back(std::stoull(p));
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidArgument, "bad seed list \"" + spec + "\"");
    }
  }
  if (seeds.empty()) throw Error(ErrorKind::InvalidArgument, "no seeds given");
  return seeds;
}

std::vector<std::size_t> parse_sizes(const std::string& spec) {
  std::vector<std::size_t> sizes;
  for (const auto& part : text::split(spec, ",")) {
    const std::string p = text::trim(part);
    if (p.empty()) continue;
    try {
      sizes.push_back(std::stoull(p));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidArgument, "bad size list \"" + spec + "\"");
    }
  }
  if (sizes.empty()) throw Error(ErrorKind::InvalidArgument, "no sizes given");
  return sizes;
}

void emit(const std::string& content, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path);
}

/// Writes the manifest to `explicit_path`, else next to `output`, else to stderr.
void finish(RunManifest& m, const std::string& explicit_path, const std::string& output) {
  m.finished = std::chrono::system_clock::now();
  if (!explicit_path.empty()) {
    write_manifest(m, explicit_path);
  } else if (!output.empty() && output != "-") {
    write_manifest(m, output + ".manifest.json");
  } else {
    std::cerr << to_json(m).dump() << '\n';
  }
}

RunManifest start(const std::string& command) {
  RunManifest m;
  m.command = command;
  m.tool_version = std::string(tool_version());
  m.started = std::chrono::system_clock::now();
  return m;
}

std::string histogram_json_key(std::size_t k) { return std::to_string(k); }

nlohmann::ordered_json histogram_json(const std::map<std::size_t, std::size_t>& h) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : h) j[histogram_json_key(k)] = v;
  return j;
}

std::pair<std::string, std::string> labelled_path(const std::string& arg) {
  if (auto eq = arg.find('='); eq != std::string::npos) {
    return {arg.substr(0, eq), arg.substr(eq + 1)};
  }
  return {fs::path(arg).stem().string(), arg};
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SchemaMismatch, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aspect-cluster: aspect-term evaluation and comment clustering"};
  app.require_subcommand(1);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "Where to write the run manifest");

  // validate -----------------------------------------------------------------
  auto* validate_cmd = app.add_subcommand("validate", "Check a corpus file and print split statistics");
  std::string v_corpus, v_split = "unsplit", v_out;
  validate_cmd->add_option("--corpus", v_corpus, "Corpus JSONL")->required();
  validate_cmd->add_option("--split", v_split, "Split label")
      ->check(CLI::IsMember({"finetune", "test", "unsplit"}))
      ->capture_default_str();
  validate_cmd->add_option("--out", v_out, "Statistics JSON (default stdout)");

  // generate -----------------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("generate", "Annotate comments through a chat-completion endpoint");
  std::string g_corpus, g_out, g_endpoint, g_model, g_cache, g_failures;
  bool g_limit = false;
  std::size_t g_concurrency = 4, g_retries = 2;
  double g_timeout = 60.0;
  gen_cmd->add_option("--corpus", g_corpus, "Input corpus JSONL")->required();
  gen_cmd->add_option("--out", g_out, "Annotated corpus JSONL")->required();
  gen_cmd->add_option("--endpoint", g_endpoint, "Chat-completions URL")->required();
  gen_cmd->add_option("--model", g_model, "Model name")->required();
  gen_cmd->add_flag("--limit-prompt", g_limit, "Ask for only 1 or 2 aspect terms");
  gen_cmd->add_option("--cache", g_cache, "Response cache JSONL (record and replay)");
  gen_cmd->add_option("--concurrency", g_concurrency, "Requests in flight")->capture_default_str();
  gen_cmd->add_option("--retries", g_retries, "Extra attempts per comment")->capture_default_str();
  gen_cmd->add_option("--timeout", g_timeout, "Request timeout in seconds")->capture_default_str();
  gen_cmd->add_option("--failures", g_failures, "Failure log JSONL (default <out>.failures.jsonl)");

  // eval ---------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Score predicted aspect terms against gold terms");
  std::string e_corpus, e_report, e_matching = "max_bipartite";
  double e_threshold = catg_eval::kDefaultThreshold;
  bool e_per_language = false, e_per_comment = false;
  EmbedOptions e_embed;
  eval_cmd->add_option("--corpus", e_corpus, "Corpus JSONL with pred_cats")->required();
  eval_cmd->add_option("--threshold", e_threshold, "Cosine similarity needed for a match")
      ->capture_default_str();
  eval_cmd->add_option("--matching", e_matching, "Matching strategy")
      ->check(CLI::IsMember({"max_bipartite", "greedy"}))
      ->capture_default_str();
  eval_cmd->add_option("--report", e_report, "Report JSON (default stdout)");
  eval_cmd->add_flag("--per-language", e_per_language, "Add the per-language breakdown");
  eval_cmd->add_flag("--per-comment", e_per_comment, "Add per-comment counts");
  e_embed.add_to(eval_cmd);

  // sweep --------------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "F1 over seeded subsamples of increasing size");
  std::string s_corpus, s_sizes, s_seeds = "1..10", s_out, s_matching = "max_bipartite";
  double s_threshold = catg_eval::kDefaultThreshold;
  EmbedOptions s_embed;
  sweep_cmd->add_option("--corpus", s_corpus, "Corpus JSONL with pred_cats")->required();
  sweep_cmd->add_option("--sizes", s_sizes, "Comma-separated sample sizes")->required();
  sweep_cmd->add_option("--seeds", s_seeds, "Seeds: list and/or ranges, e.g. 1..10")
      ->capture_default_str();
  sweep_cmd->add_option("--threshold", s_threshold, "Cosine similarity needed for a match")
      ->capture_default_str();
  sweep_cmd->add_option("--matching", s_matching, "Matching strategy")
      ->check(CLI::IsMember({"max_bipartite", "greedy"}))
      ->capture_default_str();
  sweep_cmd->add_option("--out", s_out, "CSV size,seed,f1 (default stdout)");
  s_embed.add_to(sweep_cmd);

  // prefs --------------------------------------------------------------------
  auto* prefs_cmd = app.add_subcommand("prefs", "Export human-vs-machine preference pairs");
  std::string p_human, p_machine, p_out;
  prefs_cmd->add_option("--human", p_human, "Corpus with human gold_cats")->required();
  prefs_cmd->add_option("--machine", p_machine, "Corpus with machine pred_cats")->required();
  prefs_cmd->add_option("--out", p_out, "Preference JSONL (default stdout)");

  // cluster ------------------------------------------------------------------
  auto* cluster_cmd = app.add_subcommand("cluster", "Dynamic clustering of comments");
  std::string c_corpus, c_out;
  bool c_oracle = false, c_score = false;
  dyclu::DyCluConfig c_cfg;
  EmbedOptions c_embed;
  cluster_cmd->add_option("--corpus", c_corpus, "Corpus JSONL")->required();
  cluster_cmd->add_flag("--augment", c_cfg.use_cat_augmentation, "Append aspect-term features");
  cluster_cmd->add_flag("--trivial-filter", c_cfg.trivial_filter, "Drop comments without aspect terms");
  cluster_cmd->add_flag("--oracle-cats", c_oracle, "Use gold_cats instead of pred_cats");
  cluster_cmd->add_option("--gamma0", c_cfg.gamma0, "Initial top-k size")->capture_default_str();
  cluster_cmd->add_option("--delta", c_cfg.delta, "Top-k increment")->capture_default_str();
  cluster_cmd->add_option("--theta0", c_cfg.theta0, "Initial similarity threshold")->capture_default_str();
  cluster_cmd->add_option("--k1", c_cfg.k1, "Threshold growth factor")->capture_default_str();
  cluster_cmd->add_option("--k2", c_cfg.k2, "Threshold growth offset")->capture_default_str();
  cluster_cmd->add_option("--theta-max", c_cfg.theta_max, "Threshold ceiling")->capture_default_str();
  cluster_cmd->add_option("--out", c_out, "Clusters JSON (default stdout)");
  cluster_cmd->add_flag("--score", c_score, "Compute NMI against comment_cluster labels");
  c_embed.add_to(cluster_cmd);

  // report -------------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Render eval and cluster outputs as tables");
  std::vector<std::string> r_evals, r_clusters;
  std::string r_format = "text", r_out;
  report_cmd->add_option("--eval", r_evals, "Eval report JSON, optionally LABEL=PATH");
  report_cmd->add_option("--clusters", r_clusters, "Cluster output JSON, optionally LABEL=PATH");
  report_cmd->add_option("--format", r_format, "Output format")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  report_cmd->add_option("--out", r_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*validate_cmd) {
      auto m = start("validate");
      m.config["split"] = v_split;
      m.add_input(v_corpus);
      const auto corpus = corpus::load_corpus(v_corpus, corpus::parse_split(v_split));
      const auto stats = corpus::split_stats(corpus);
      nlohmann::ordered_json j;
      j["corpus"] = corpus.name;
      j["split"] = std::string(corpus::to_string(corpus.split));
      j["total"] = stats.total;
      nlohmann::ordered_json counts;
      for (auto lang : corpus::kAllLanguages) counts[std::string(corpus::to_string(lang))] = stats.counts.at(lang);
      j["counts"] = counts;
      emit(j.dump(2) + "\n", v_out);
      finish(m, manifest_path, v_out);
    } else if (*gen_cmd) {
      auto m = start("generate");
      m.config = {{"endpoint", g_endpoint},         {"model", g_model},
                  {"limit_prompt", g_limit ? "true" : "false"},
                  {"retries", std::to_string(g_retries)},
                  {"concurrency", std::to_string(g_concurrency)}};
      m.add_input(g_corpus);
      const auto corpus = corpus::load_corpus(g_corpus);
      llm_gen::ChatClientConfig cc;
      cc.endpoint = g_endpoint;
      cc.model = g_model;
      cc.timeout = std::chrono::milliseconds(static_cast<long long>(g_timeout * 1000));
      if (const char* key = std::getenv("ASPECT_LLM_API_KEY")) cc.api_key = key;
      llm_gen::HttpChatClient client(cc);
      std::optional<llm_gen::ResponseCache> cache;
      if (!g_cache.empty()) {
        if (fs::exists(g_cache)) m.add_input(g_cache);
        cache.emplace(g_cache);
      }
      llm_gen::GenerateOptions opts{g_limit, g_retries, g_concurrency, cache ? &*cache : nullptr};
      const auto result = llm_gen::generate_cats(corpus, client, opts);
      corpus::write_corpus(result.corpus, fs::path(g_out));
      const std::string failures_path = g_failures.empty() ? g_out + ".failures.jsonl" : g_failures;
      std::ostringstream failures;
      for (const auto& f : result.failures) {
        nlohmann::ordered_json j;
        j["id"] = f.id;
        j["reason"] = f.reason;
        j["attempts"] = f.attempts;
        failures << j.dump() << '\n';
      }
      emit(failures.str(), failures_path);
      m.config["network_calls"] = std::to_string(result.network_calls);
      m.config["failures"] = std::to_string(result.failures.size());
      std::cerr << "annotated " << result.corpus.comments.size() << " comments, "
                << result.failures.size() << " failures, " << result.network_calls
                << " network calls\n";
      finish(m, manifest_path, g_out);
    } else if (*eval_cmd) {
      auto m = start("eval");
      catg_eval::MatchConfig cfg{e_threshold, catg_eval::parse_matching(e_matching)};
      m.config = {{"threshold", std::to_string(e_threshold)}, {"matching", e_matching}};
      e_embed.record(m);
      m.add_input(e_corpus);
      const auto corpus = corpus::load_corpus(e_corpus);
      const auto provider = embedding::make_provider(e_embed.config());
      const auto rep = catg_eval::evaluate_corpus(corpus, *provider, cfg);
      auto j = catg_eval::to_json(rep, e_per_language, e_per_comment);
      j["threshold"] = e_threshold;
      j["matching"] = e_matching;
      j["cat_histogram"] = {
          {"gold", histogram_json(catg_eval::cat_count_histogram(corpus, catg_eval::CatSource::gold))},
          {"pred", histogram_json(catg_eval::cat_count_histogram(corpus, catg_eval::CatSource::pred))}};
      emit(j.dump(2) + "\n", e_report);
      std::cerr << "P " << report::format_percent(rep.overall.precision) << "  R "
                << report::format_percent(rep.overall.recall) << "  F1 "
                << report::format_percent(rep.overall.f1) << '\n';
      finish(m, manifest_path, e_report);
    } else if (*sweep_cmd) {
      auto m = start("sweep");
      catg_eval::MatchConfig cfg{s_threshold, catg_eval::parse_matching(s_matching)};
      m.config = {{"threshold", std::to_string(s_threshold)}, {"matching", s_matching},
                  {"sizes", s_sizes}, {"seeds", s_seeds}};
      s_embed.record(m);
      m.add_input(s_corpus);
      const auto sizes = parse_sizes(s_sizes);
      const auto seeds = parse_seeds(s_seeds);
      const auto corpus = corpus::load_corpus(s_corpus);
      const auto provider = embedding::make_provider(s_embed.config());
      const auto rows = catg_eval::scale_sweep(corpus, *provider, cfg, sizes, seeds);
      std::ostringstream csv;
      csv << "size,seed,f1\n";
      csv.precision(17);
      for (const auto& r : rows) csv << r.size << ',' << r.seed << ',' << r.f1 << '\n';
      emit(csv.str(), s_out);
      finish(m, manifest_path, s_out);
    } else if (*prefs_cmd) {
      auto m = start("prefs");
      m.add_input(p_human);
      m.add_input(p_machine);
      const auto human = corpus::load_corpus(p_human);
      const auto machine = corpus::load_corpus(p_machine);
      const auto set = preference::build_preference_set(human, machine);
      std::ostringstream out;
      preference::write_preferences(set, out);
      emit(out.str(), p_out);
      m.config["records"] = std::to_string(set.records.size());
      m.config["skipped_identical"] = std::to_string(set.skipped_identical);
      std::cerr << set.records.size() << " preference pairs, " << set.skipped_identical
                << " identical annotations skipped\n";
      finish(m, manifest_path, p_out);
    } else if (*cluster_cmd) {
      auto m = start("cluster");
      m.config = {{"gamma0", std::to_string(c_cfg.gamma0)},
                  {"delta", std::to_string(c_cfg.delta)},
                  {"theta0", std::to_string(c_cfg.theta0)},
                  {"k1", std::to_string(c_cfg.k1)},
                  {"k2", std::to_string(c_cfg.k2)},
                  {"theta_max", std::to_string(c_cfg.theta_max)},
                  {"augment", c_cfg.use_cat_augmentation ? "true" : "false"},
                  {"trivial_filter", c_cfg.trivial_filter ? "true" : "false"},
                  {"oracle_cats", c_oracle ? "true" : "false"},
                  {"score", c_score ? "true" : "false"}};
      c_embed.record(m);
      m.add_input(c_corpus);
      const auto corpus = corpus::load_corpus(c_corpus);
      const auto provider = embedding::make_provider(c_embed.config());
      const auto source = c_oracle ? dyclu::CatSource::gold : dyclu::CatSource::predicted;
      const auto outcome = c_score ? dyclu::cluster_and_score(corpus, *provider, c_cfg, source)
                                   : dyclu::cluster_corpus(corpus, *provider, c_cfg, source);
      emit(dyclu::to_json(outcome, c_cfg).dump(2) + "\n", c_out);
      finish(m, manifest_path, c_out);
    } else if (*report_cmd) {
      auto m = start("report");
      m.config["format"] = r_format;
      const auto format = report::parse_format(r_format);
      std::vector<report::EvalRow> eval_rows;
      for (const auto& arg : r_evals) {
        auto [label, path] = labelled_path(arg);
        m.add_input(path);
        eval_rows.push_back({label, catg_eval::match_report_from_json(read_json(path))});
      }
      std::vector<report::ClusterRow> cluster_rows;
      for (const auto& arg : r_clusters) {
        auto [label, path] = labelled_path(arg);
        m.add_input(path);
        cluster_rows.push_back(report::cluster_row_from_json(label, read_json(path)));
      }
      std::string rendered;
      if (!eval_rows.empty()) rendered += report::render_eval_table(eval_rows, format);
      if (!cluster_rows.empty() || eval_rows.empty()) {
        if (!rendered.empty()) rendered += '\n';
        rendered += report::render_cluster_table(cluster_rows, format);
      }
      emit(rendered, r_out);
      finish(m, manifest_path, r_out);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
