#include "erckit/backend.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "erckit/error.hpp"
#include "erckit/records.hpp"
#include "erckit/rng.hpp"

namespace erckit {

using nlohmann::json;

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::MockEcho:
      return "mock_echo";
    case BackendKind::MockRule:
      return "mock_rule";
    case BackendKind::Http:
      return "http";
  }
  return "mock_echo";
}

BackendKind backend_kind_from_string(std::string_view name) {
  if (name == "mock_echo") return BackendKind::MockEcho;
  if (name == "mock_rule") return BackendKind::MockRule;
  if (name == "http") return BackendKind::Http;
  raise(ErrorKind::BadConfig, "unknown backend '" + std::string(name) + "'");
}

std::span<const std::pair<std::string_view, std::string_view>> rule_lexicon() {
  static const std::vector<std::pair<std::string_view, std::string_view>>
      lexicon = {
          {"happy", "joyful"},    {"glad", "joyful"},
          {"great", "joyful"},    {"wonderful", "joyful"},
          {"sad", "sad"},         {"cry", "sad"},
          {"miserable", "sad"},   {"angry", "mad"},
          {"furious", "mad"},     {"hate", "mad"},
          {"excit", "excited"},   {"thrill", "excited"},
          {"strong", "powerful"}, {"proud", "powerful"},
          {"surpris", "powerful"}, {"afraid", "fear"},
          {"scare", "fear"},      {"terrif", "fear"},
          {"worry", "fear"},      {"calm", "peaceful"},
          {"relax", "peaceful"},  {"gross", "disgust"},
          {"disgust", "disgust"},
      };
  return lexicon;
}

std::string rule_completion(std::string_view prompt_text) {
  // The utterance being classified is the last quoted span of the prompt;
  // fall back to scanning everything when there are no quotes.
  std::string_view segment = prompt_text;
  auto last = prompt_text.rfind('"');
  if (last != std::string_view::npos && last > 0) {
    auto first = prompt_text.rfind('"', last - 1);
    if (first != std::string_view::npos) {
      segment = prompt_text.substr(first + 1, last - first - 1);
    }
  }
  std::string haystack = lower(segment);
  for (const auto& [keyword, label] : rule_lexicon()) {
    if (haystack.find(keyword) != std::string::npos) {
      return std::string(label);
    }
  }
  return "neutral";
}

namespace {

struct SplitUrl {
  std::string base;
  std::string path;
};

SplitUrl split_url(const std::string& endpoint) {
  auto scheme = endpoint.find("://");
  std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = endpoint.find('/', host_start);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::string http_completion(const PromptSample& sample,
                            const BackendConfig& config) {
  if (config.endpoint.empty()) {
    raise(ErrorKind::BadConfig, "http backend needs an endpoint");
  }
  SplitUrl url = split_url(config.endpoint);
  httplib::Client client(url.base);
  client.set_connection_timeout(config.timeout_ms / 1000,
                                (config.timeout_ms % 1000) * 1000);
  client.set_read_timeout(config.timeout_ms / 1000,
                          (config.timeout_ms % 1000) * 1000);
  json payload{{"prompt", sample.input_text},
               {"max_new_tokens", config.max_new_tokens},
               {"temperature", config.temperature}};
  auto res = client.Post(url.path, payload.dump(), "application/json");
  if (!res) {
    raise(ErrorKind::Transport,
          config.endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    raise(ErrorKind::Transport,
          config.endpoint + ": HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body).at("text").get<std::string>();
  } catch (const json::exception& e) {
    raise(ErrorKind::Transport,
          config.endpoint + ": bad response: " + e.what());
  }
}

}  // namespace

std::string generate(const PromptSample& sample, const BackendConfig& config) {
  switch (config.kind) {
    case BackendKind::MockEcho:
      return sample.target_text.empty() ? sample.meta.gold
                                        : sample.target_text;
    case BackendKind::MockRule:
      return rule_completion(sample.input_text);
    case BackendKind::Http:
      return http_completion(sample, config);
  }
  raise(ErrorKind::BadConfig, "unhandled backend kind");
}

std::vector<std::string> generate_all(
    std::span<const PromptSample> samples, const BackendConfig& config,
    const std::function<void(std::size_t, const std::string&)>& on_result) {
  const std::size_t n = samples.size();
  std::vector<std::string> results;
  results.reserve(n);

  const bool parallel =
      config.kind == BackendKind::Http && config.concurrency > 1 && n > 1;
  if (!parallel) {
    for (std::size_t i = 0; i < n; ++i) {
      std::string completion = generate(samples[i], config);
      if (on_result) on_result(i, completion);
      results.push_back(std::move(completion));
    }
    return results;
  }

  std::vector<std::optional<std::string>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.concurrency), n);

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (stop.load()) return;
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          slots[i] = generate(samples[i], config);
        } catch (...) {
          errors[i] = std::current_exception();
          stop.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();

  std::exception_ptr earliest;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      earliest = errors[i];
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!slots[i].has_value()) {
      // Either this request failed or an earlier failure stopped the pool
      // before it was attempted; deliver everything before it, then raise.
      if (errors[i]) std::rethrow_exception(errors[i]);
      if (earliest) std::rethrow_exception(earliest);
      raise(ErrorKind::Transport, "request pool stopped unexpectedly");
    }
    if (on_result) on_result(i, *slots[i]);
    results.push_back(std::move(*slots[i]));
  }
  return results;
}

std::vector<PromptSample> export_stage1(const Corpus& corpus,
                                        std::uint64_t seed) {
  if (corpus.manifest.speaker_set.empty()) {
    raise(ErrorKind::BadManifest,
          "speaker identification needs the manifest speaker set");
  }
  std::vector<PromptSample> samples;
  for (const auto& conv : corpus.conversations) {
    if (conv.split != "train") continue;
    for (const auto& u : conv.utterances) {
      samples.push_back(
          build_speaker_prompt(conv, u.index, corpus.manifest.speaker_set));
    }
  }
  Rng rng = make_rng(seed, "stage1_shuffle");
  shuffle(samples, rng);
  return samples;
}

std::vector<PromptSample> export_stage2(const Corpus& corpus, WindowSpec spec,
                                        const RetrievalIndex& index,
                                        const Embedder& embedder, double alpha,
                                        std::uint64_t seed,
                                        Pairing train_pairing) {
  std::vector<PromptSample> samples;
  for (const auto& conv : corpus.conversations) {
    if (conv.split != "train") continue;
    for (const auto& u : conv.utterances) {
      const DomainEntry& hit =
          retrieve_top1(u, conv.dataset_id, index, embedder, train_pairing);
      samples.push_back(build_main_prompt(
          conv, u.index, spec, Demonstration{hit.text, hit.label},
          corpus.manifest.label_set));
      if (auto impact = build_impact_prompt(conv, u.index, spec,
                                            corpus.manifest.label_set, alpha)) {
        samples.push_back(std::move(*impact));
      }
    }
  }
  Rng rng = make_rng(seed, "stage2_shuffle");
  shuffle(samples, rng);
  return samples;
}

std::vector<PromptSample> apply_subset(std::vector<PromptSample> samples,
                                       const Subset& subset) {
  std::set<UttAddress> keep(subset.addresses.begin(), subset.addresses.end());
  std::vector<PromptSample> out;
  out.reserve(samples.size());
  for (auto& s : samples) {
    if (keep.count(
            UttAddress{s.meta.dataset, s.meta.conv_id, s.meta.index}) > 0) {
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<PromptSample> build_inference_samples(
    const Corpus& corpus, std::string_view split, WindowSpec spec,
    const RetrievalIndex* index, const Embedder* embedder, Pairing pairing) {
  if ((index == nullptr) != (embedder == nullptr)) {
    raise(ErrorKind::BadConfig,
          "demonstration retrieval needs both an index and an embedder");
  }
  std::vector<PromptSample> samples;
  for (const auto& conv : corpus.conversations) {
    if (conv.split != split) continue;
    for (const auto& u : conv.utterances) {
      std::optional<Demonstration> demo;
      if (index != nullptr) {
        const DomainEntry& hit =
            retrieve_top1(u, conv.dataset_id, *index, *embedder, pairing);
        demo = Demonstration{hit.text, hit.label};
      }
      samples.push_back(build_main_prompt(conv, u.index, spec, demo,
                                          corpus.manifest.label_set));
    }
  }
  return samples;
}

void write_samples(std::span<const PromptSample> samples, std::ostream& out,
                   std::string_view config_hash) {
  if (!config_hash.empty()) out << provenance_header("samples", config_hash);
  for (const auto& s : samples) {
    json row{{"task", std::string(to_string(s.task))},
             {"input", s.input_text},
             {"output", s.target_text},
             {"weight", s.loss_weight},
             {"meta",
              {{"dataset", s.meta.dataset},
               {"conv_id", s.meta.conv_id},
               {"index", s.meta.index},
               {"gold", s.meta.gold}}}};
    out << row.dump() << "\n";
  }
}

void save_samples(std::span<const PromptSample> samples,
                  const std::filesystem::path& path,
                  std::string_view config_hash) {
  std::ofstream out = open_output(path);
  write_samples(samples, out, config_hash);
}

std::vector<PromptSample> read_samples(std::istream& in) {
  std::vector<PromptSample> samples;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || is_comment_line(line)) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": " + e.what());
    }
    PromptSample s;
    try {
      s.task = task_from_string(doc.at("task").get<std::string>());
      s.input_text = doc.at("input").get<std::string>();
      s.target_text = doc.at("output").get<std::string>();
      s.loss_weight = doc.at("weight").get<double>();
      const json& meta = doc.at("meta");
      s.meta.dataset = meta.at("dataset").get<std::string>();
      s.meta.conv_id = meta.at("conv_id").get<std::string>();
      s.meta.index = meta.at("index").get<int>();
      s.meta.gold = meta.at("gold").get<std::string>();
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            "line " + std::to_string(line_no) + ": " + e.what());
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<PromptSample> load_samples(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_samples(in);
}

}  // namespace erckit
