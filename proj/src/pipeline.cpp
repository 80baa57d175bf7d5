#include "erckit/pipeline.hpp"

#include <algorithm>
#include <memory>

#include <json.hpp>

#include "erckit/error.hpp"
#include "erckit/hash.hpp"
#include "erckit/records.hpp"
#include "erckit/unify.hpp"

namespace erckit {

using nlohmann::json;

namespace {

json config_to_json(const RunConfig& config) {
  json doc;
  doc["seed"] = config.seed;
  doc["window"] = config.window;
  doc["alpha"] = config.alpha;
  doc["train_pairing"] = std::string(to_string(config.train_pairing));
  doc["infer_pairing"] = std::string(to_string(config.infer_pairing));
  doc["embedder"] = {{"kind", config.embedder.kind},
                     {"dim", config.embedder.dim},
                     {"path", config.embedder.path},
                     {"endpoint", config.embedder.endpoint}};
  doc["backend"] = {{"kind", std::string(to_string(config.backend.kind))},
                    {"endpoint", config.backend.endpoint},
                    {"max_new_tokens", config.backend.max_new_tokens},
                    {"temperature", config.backend.temperature},
                    {"timeout_ms", config.backend.timeout_ms},
                    {"concurrency", config.backend.concurrency}};
  doc["mix_strategy"] = config.mix_strategy;
  doc["mix_fraction"] = config.mix_fraction;
  doc["mix_single_dataset"] = config.mix_single_dataset;
  doc["unparseable_threshold"] = config.unparseable_threshold;
  return doc;
}

void validate_config(const RunConfig& config) {
  if (config.window < 0) {
    raise(ErrorKind::BadConfig, "window must be non-negative");
  }
  if (config.alpha < 0.0) {
    raise(ErrorKind::BadConfig, "alpha must be non-negative");
  }
  if (config.unparseable_threshold < 0.0 ||
      config.unparseable_threshold > 1.0) {
    raise(ErrorKind::BadConfig, "unparseable_threshold must lie in [0, 1]");
  }
  mix_strategy_from_string(config.mix_strategy);
  Fraction::parse(config.mix_fraction);
}

WindowSpec window_of(const RunConfig& config) {
  return WindowSpec{config.window, true};
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    raise(ErrorKind::BadConfig, path.string() + ": " + e.what());
  }
  RunConfig config;
  try {
    config.seed = doc.value("seed", std::uint64_t{0});
    config.window = doc.value("window", 12);
    config.alpha = doc.value("alpha", 0.1);
    config.train_pairing =
        pairing_from_string(doc.value("train_pairing", "same_label"));
    config.infer_pairing =
        pairing_from_string(doc.value("infer_pairing", "all_labels"));
    if (doc.contains("embedder")) {
      const json& e = doc["embedder"];
      config.embedder.kind = e.value("kind", "hashed_ngram");
      config.embedder.dim = e.value("dim", 256);
      config.embedder.path = e.value("path", "");
      config.embedder.endpoint = e.value("endpoint", "");
    }
    if (doc.contains("backend")) {
      const json& b = doc["backend"];
      config.backend.kind =
          backend_kind_from_string(b.value("kind", "mock_echo"));
      config.backend.endpoint = b.value("endpoint", "");
      config.backend.max_new_tokens = b.value("max_new_tokens", 16);
      config.backend.temperature = b.value("temperature", 0.0);
      config.backend.timeout_ms = b.value("timeout_ms", 30000);
      config.backend.concurrency = b.value("concurrency", 1);
    }
    config.mix_strategy = doc.value("mix_strategy", "ratio");
    config.mix_fraction = doc.value("mix_fraction", "1");
    config.mix_single_dataset = doc.value("mix_single_dataset", "");
    config.unparseable_threshold = doc.value("unparseable_threshold", 1.0);
  } catch (const json::exception& e) {
    raise(ErrorKind::BadConfig, path.string() + ": " + e.what());
  }
  validate_config(config);
  return config;
}

void RunConfig::save(const std::filesystem::path& path) const {
  write_text_file(path, config_to_json(*this).dump(2) + "\n");
}

std::string RunConfig::canonical_json() const {
  // nlohmann::json orders object keys, so dump() is canonical by itself.
  return config_to_json(*this).dump();
}

std::string RunConfig::hash() const { return to_hex(fnv1a64(canonical_json())); }

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
  if (config.kind == "hashed_ngram") {
    return std::make_unique<HashedNgramEmbedder>(config.dim);
  }
  if (config.kind == "vector_file") {
    if (config.path.empty()) {
      raise(ErrorKind::BadConfig, "vector_file embedder needs a path");
    }
    return std::make_unique<VectorFileEmbedder>(
        VectorFileEmbedder::load(config.path));
  }
  if (config.kind == "http") {
    if (config.endpoint.empty()) {
      raise(ErrorKind::BadConfig, "http embedder needs an endpoint");
    }
    return std::make_unique<HttpEmbedder>(config.endpoint, config.dim);
  }
  raise(ErrorKind::BadConfig,
        "unknown embedder kind '" + config.kind + "'");
}

std::string snapshot_config(const RunConfig& config,
                            const std::filesystem::path& out_dir) {
  validate_config(config);
  std::filesystem::create_directories(out_dir);
  config.save(out_dir / "config.json");
  return config.hash();
}

Corpus load_corpus(const std::filesystem::path& corpus_path,
                   const std::filesystem::path& manifest_path) {
  return ingest(corpus_path, DatasetManifest::load(manifest_path));
}

UnifyOutputs run_unify(const UnifyInputs& inputs) {
  if (inputs.corpus_paths.empty() ||
      inputs.corpus_paths.size() != inputs.manifest_paths.size()) {
    raise(ErrorKind::BadConfig,
          "unify needs matching corpus and manifest lists");
  }
  LabelMapping mapping = LabelMapping::load(inputs.mapping_path);
  std::vector<DatasetManifest> manifests;
  std::vector<Corpus> corpora;
  for (std::size_t i = 0; i < inputs.corpus_paths.size(); ++i) {
    manifests.push_back(DatasetManifest::load(inputs.manifest_paths[i]));
    corpora.push_back(ingest(inputs.corpus_paths[i], manifests.back()));
  }
  UnifyOutputs out;
  out.registry = build_registry(manifests);
  out.unified = unify_corpus(corpora, mapping, out.registry);
  return out;
}

RetrievalIndex run_build_index(const Corpus& corpus, const RunConfig& config,
                               std::span<const std::string> strip_names) {
  std::unique_ptr<Embedder> embedder = make_embedder(config.embedder);
  return build_domain_base(corpus, *embedder, config.seed, strip_names);
}

ScaleGrid run_scale_experiment(const Corpus& unified, const RunConfig& config,
                               const std::filesystem::path& out_dir) {
  std::string hash = snapshot_config(config, out_dir);
  std::filesystem::path subset_dir = out_dir / "subsets";

  std::vector<std::string> datasets;
  for (const auto& conv : unified.conversations) {
    if (conv.split != "train") continue;
    if (std::find(datasets.begin(), datasets.end(), conv.dataset_id) ==
        datasets.end()) {
      datasets.push_back(conv.dataset_id);
    }
  }

  ScaleGrid grid;
  for (const Fraction& fraction : default_fractions()) {
    ScaleGridRow row;
    row.fraction = fraction;

    MixPlan total{MixStrategy::Total, "", fraction, config.seed};
    Subset total_subset = sample_subset(unified, total);
    save_subset_manifest(total_subset,
                         subset_dir / (total.name() + ".jsonl"), hash);
    row.total_counts = total_subset.per_dataset;

    MixPlan ratio{MixStrategy::Ratio, "", fraction, config.seed};
    Subset ratio_subset = sample_subset(unified, ratio);
    save_subset_manifest(ratio_subset,
                         subset_dir / (ratio.name() + ".jsonl"), hash);
    row.ratio_counts = ratio_subset.per_dataset;

    for (const auto& dataset : datasets) {
      MixPlan single{MixStrategy::Single, dataset, fraction, config.seed};
      Subset single_subset = sample_subset(unified, single);
      save_subset_manifest(single_subset,
                           subset_dir / (single.name() + ".jsonl"), hash);
      row.single_counts[dataset] = single_subset.per_dataset[dataset];
    }
    grid.rows.push_back(std::move(row));
  }

  json doc;
  doc["config_hash"] = hash;
  doc["rows"] = json::array();
  for (const auto& row : grid.rows) {
    doc["rows"].push_back({{"fraction", row.fraction.str()},
                           {"total", row.total_counts},
                           {"ratio", row.ratio_counts},
                           {"single", row.single_counts}});
  }
  write_text_file(out_dir / "scale_grid.json", doc.dump(2) + "\n");
  return grid;
}

namespace {

struct SweepContext {
  std::unique_ptr<Embedder> embedder;
  RetrievalIndex index;
};

SweepContext sweep_context(const Corpus& corpus, const RunConfig& config) {
  SweepContext ctx;
  ctx.embedder = make_embedder(config.embedder);
  ctx.index = build_domain_base(corpus, *ctx.embedder, config.seed,
                                corpus.manifest.speaker_set);
  return ctx;
}

SweepRow evaluate_variant(const Corpus& corpus, const RunConfig& config,
                          const SweepContext& ctx, WindowSpec spec,
                          Pairing infer_pairing, std::string key) {
  std::vector<PromptSample> samples = build_inference_samples(
      corpus, "test", spec, &ctx.index, ctx.embedder.get(), infer_pairing);
  EvaluateOptions options;
  options.per_dataset = false;
  EvalReport report =
      evaluate_run(samples, config.backend, corpus.manifest.label_set,
                   options);
  return SweepRow{std::move(key), report.weighted_f1, report.total};
}

}  // namespace

std::vector<SweepRow> run_window_sweep(const Corpus& corpus,
                                       const RunConfig& config,
                                       const std::vector<int>& windows,
                                       const std::filesystem::path& out_dir) {
  if (windows.empty()) {
    raise(ErrorKind::BadConfig, "window sweep needs at least one window");
  }
  std::string hash = snapshot_config(config, out_dir);
  SweepContext ctx = sweep_context(corpus, config);
  std::vector<SweepRow> rows;
  for (int w : windows) {
    if (w < 0) raise(ErrorKind::BadConfig, "window must be non-negative");
    rows.push_back(evaluate_variant(corpus, config, ctx, WindowSpec{w, true},
                                    config.infer_pairing,
                                    "w=" + std::to_string(w)));
  }
  save_sweep_rows(rows, out_dir / "sweep_window.tsv", hash);
  return rows;
}

std::vector<SweepRow> run_alpha_sweep(const Corpus& corpus,
                                      const RunConfig& config,
                                      const std::vector<double>& alphas,
                                      const std::filesystem::path& out_dir) {
  if (alphas.empty()) {
    raise(ErrorKind::BadConfig, "alpha sweep needs at least one alpha");
  }
  std::string hash = snapshot_config(config, out_dir);
  SweepContext ctx = sweep_context(corpus, config);
  std::vector<SweepRow> rows;
  for (double alpha : alphas) {
    if (alpha < 0.0) {
      raise(ErrorKind::BadConfig, "alpha must be non-negative");
    }
    // The weight shows up in the training export, so each variant's stage-2
    // file is written alongside the score.
    std::vector<PromptSample> stage2 =
        export_stage2(corpus, window_of(config), ctx.index, *ctx.embedder,
                      alpha, config.seed, config.train_pairing);
    save_samples(stage2,
                 out_dir / ("stage2_alpha_" + format_double(alpha) + ".jsonl"),
                 hash);
    rows.push_back(evaluate_variant(corpus, config, ctx, window_of(config),
                                    config.infer_pairing,
                                    "alpha=" + format_double(alpha)));
  }
  save_sweep_rows(rows, out_dir / "sweep_alpha.tsv", hash);
  return rows;
}

std::vector<SweepRow> run_pairing_sweep(const Corpus& corpus,
                                        const RunConfig& config,
                                        const std::filesystem::path& out_dir) {
  std::string hash = snapshot_config(config, out_dir);
  SweepContext ctx = sweep_context(corpus, config);
  std::vector<SweepRow> rows;
  for (Pairing train : {Pairing::SameLabel, Pairing::AllLabels}) {
    std::vector<PromptSample> stage2 =
        export_stage2(corpus, window_of(config), ctx.index, *ctx.embedder,
                      config.alpha, config.seed, train);
    save_samples(stage2,
                 out_dir / ("stage2_train_" +
                            std::string(to_string(train)) + ".jsonl"),
                 hash);
    for (Pairing infer : {Pairing::SameLabel, Pairing::AllLabels}) {
      std::string key = "train=" + std::string(to_string(train)) +
                        ",infer=" + std::string(to_string(infer));
      rows.push_back(evaluate_variant(corpus, config, ctx, window_of(config),
                                      infer, std::move(key)));
    }
  }
  save_sweep_rows(rows, out_dir / "sweep_pairing.tsv", hash);
  return rows;
}

EvalReport run_end_to_end(const Corpus& corpus, const RunConfig& config,
                          const std::filesystem::path& out_dir,
                          std::span<const std::string> strip_names) {
  std::string hash = snapshot_config(config, out_dir);
  std::unique_ptr<Embedder> embedder = make_embedder(config.embedder);
  std::span<const std::string> names =
      strip_names.empty() ? std::span<const std::string>(
                                corpus.manifest.speaker_set)
                          : strip_names;

  RetrievalIndex index =
      build_domain_base(corpus, *embedder, config.seed, names);
  index.save(out_dir / "index.jsonl", hash);

  std::vector<PromptSample> stage1 = export_stage1(corpus, config.seed);
  std::vector<PromptSample> stage2 =
      export_stage2(corpus, window_of(config), index, *embedder, config.alpha,
                    config.seed, config.train_pairing);

  MixStrategy strategy = mix_strategy_from_string(config.mix_strategy);
  Fraction fraction = Fraction::parse(config.mix_fraction);
  if (strategy == MixStrategy::Single || fraction != Fraction{1, 1}) {
    MixPlan plan{strategy, config.mix_single_dataset, fraction, config.seed};
    Subset subset = sample_subset(corpus, plan);
    save_subset_manifest(subset, out_dir / "train_subset.jsonl", hash);
    stage1 = apply_subset(std::move(stage1), subset);
    stage2 = apply_subset(std::move(stage2), subset);
  }
  save_samples(stage1, out_dir / "train_stage1.jsonl", hash);
  save_samples(stage2, out_dir / "train_stage2.jsonl", hash);

  std::vector<PromptSample> inference = build_inference_samples(
      corpus, "test", window_of(config), &index, embedder.get(),
      config.infer_pairing);
  save_samples(inference, out_dir / "test_prompts.jsonl", hash);

  EvaluateOptions options;
  options.checkpoint = out_dir / "predictions.jsonl";
  options.per_dataset = true;
  options.config_hash = hash;
  EvalReport report = evaluate_run(inference, config.backend,
                                   corpus.manifest.label_set, options);

  if (report.total > 0) {
    double rate = static_cast<double>(report.unparseable) /
                  static_cast<double>(report.total);
    if (rate > config.unparseable_threshold) {
      raise(ErrorKind::UnparseableRun,
            "unparseable fraction " + format_double(rate) +
                " exceeds threshold " +
                format_double(config.unparseable_threshold));
    }
  }

  save_report_json(report, out_dir / "report.json", hash);
  std::ofstream text = open_output(out_dir / "report.txt");
  text << provenance_header("report", hash);
  write_report_text(report, text);
  return report;
}

void save_sweep_rows(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path,
                     std::string_view config_hash) {
  std::ofstream out = open_output(path);
  if (!config_hash.empty()) out << provenance_header("sweep", config_hash);
  out << "key\tweighted_f1\tsamples\n";
  for (const auto& row : rows) {
    out << row.key << "\t" << format_double(row.weighted_f1) << "\t"
        << row.samples << "\n";
  }
}

}  // namespace erckit
