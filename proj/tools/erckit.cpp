// Command line front end: every subcommand is a thin wrapper over the
// library's run layer, so scripted runs and tests share one code path.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erckit/backend.hpp"
#include "erckit/error.hpp"
#include "erckit/eval.hpp"
#include "erckit/fixtures.hpp"
#include "erckit/mixing.hpp"
#include "erckit/pipeline.hpp"
#include "erckit/records.hpp"
#include "erckit/retrieval.hpp"
#include "erckit/unify.hpp"

namespace {

using erckit::RunConfig;

// Shared run options. A --config file supplies the base; explicit flags
// override individual fields.
struct ConfigCli {
  CLI::App* cmd = nullptr;
  std::string config_path;
  std::uint64_t seed = 0;
  int window = 12;
  double alpha = 0.1;
  std::string train_pairing = "same_label";
  std::string infer_pairing = "all_labels";
  std::string embedder_kind = "hashed_ngram";
  int dim = 256;
  std::string embedder_path;
  std::string embedder_endpoint;
  std::string backend_kind = "mock_echo";
  std::string backend_endpoint;
  int max_new_tokens = 16;
  double temperature = 0.0;
  int timeout_ms = 30000;
  int concurrency = 1;
  std::string mix_strategy = "ratio";
  std::string mix_fraction = "1";
  std::string mix_single_dataset;
  double unparseable_threshold = 1.0;

  void attach(CLI::App* app) {
    cmd = app;
    app->add_option("--config", config_path, "Run configuration JSON file")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Deterministic run seed");
    app->add_option("--window", window,
                    "History turns rendered into each prompt");
    app->add_option("--alpha", alpha,
                    "Loss weight of emotion-impact training samples");
    app->add_option("--train-pairing", train_pairing,
                    "Demonstration pairing for training exports")
        ->check(CLI::IsMember({"same_label", "all_labels"}));
    app->add_option("--infer-pairing", infer_pairing,
                    "Demonstration pairing for inference prompts")
        ->check(CLI::IsMember({"same_label", "all_labels"}));
    app->add_option("--embedder", embedder_kind, "Embedder kind")
        ->check(CLI::IsMember({"hashed_ngram", "vector_file", "http"}));
    app->add_option("--dim", dim, "Embedding dimensionality");
    app->add_option("--vector-file", embedder_path,
                    "Vector dump for the vector_file embedder");
    app->add_option("--embedder-endpoint", embedder_endpoint,
                    "Endpoint for the http embedder");
    app->add_option("--backend", backend_kind, "Completion backend")
        ->check(CLI::IsMember({"mock_echo", "mock_rule", "http"}));
    app->add_option("--endpoint", backend_endpoint,
                    "Endpoint for the http backend");
    app->add_option("--max-new-tokens", max_new_tokens,
                    "Completion length limit sent to the backend");
    app->add_option("--temperature", temperature,
                    "Sampling temperature sent to the backend");
    app->add_option("--timeout-ms", timeout_ms, "HTTP timeout");
    app->add_option("--concurrency", concurrency,
                    "In-flight HTTP requests");
    app->add_option("--mix-strategy", mix_strategy,
                    "Training mix: total, ratio or single")
        ->check(CLI::IsMember({"total", "ratio", "single"}));
    app->add_option("--mix-fraction", mix_fraction,
                    "Training fraction, e.g. 1, 1/2, 1/64");
    app->add_option("--mix-single-dataset", mix_single_dataset,
                    "Dataset kept by the single strategy");
    app->add_option("--unparseable-threshold", unparseable_threshold,
                    "Fail runs whose unparseable fraction exceeds this");
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_path.empty()) c = RunConfig::load(config_path);
    if (cmd->count("--seed")) c.seed = seed;
    if (cmd->count("--window")) c.window = window;
    if (cmd->count("--alpha")) c.alpha = alpha;
    if (cmd->count("--train-pairing")) {
      c.train_pairing = erckit::pairing_from_string(train_pairing);
    }
    if (cmd->count("--infer-pairing")) {
      c.infer_pairing = erckit::pairing_from_string(infer_pairing);
    }
    if (cmd->count("--embedder")) c.embedder.kind = embedder_kind;
    if (cmd->count("--dim")) c.embedder.dim = dim;
    if (cmd->count("--vector-file")) c.embedder.path = embedder_path;
    if (cmd->count("--embedder-endpoint")) {
      c.embedder.endpoint = embedder_endpoint;
    }
    if (cmd->count("--backend")) {
      c.backend.kind = erckit::backend_kind_from_string(backend_kind);
    }
    if (cmd->count("--endpoint")) c.backend.endpoint = backend_endpoint;
    if (cmd->count("--max-new-tokens")) {
      c.backend.max_new_tokens = max_new_tokens;
    }
    if (cmd->count("--temperature")) c.backend.temperature = temperature;
    if (cmd->count("--timeout-ms")) c.backend.timeout_ms = timeout_ms;
    if (cmd->count("--concurrency")) c.backend.concurrency = concurrency;
    if (cmd->count("--mix-strategy")) c.mix_strategy = mix_strategy;
    if (cmd->count("--mix-fraction")) c.mix_fraction = mix_fraction;
    if (cmd->count("--mix-single-dataset")) {
      c.mix_single_dataset = mix_single_dataset;
    }
    if (cmd->count("--unparseable-threshold")) {
      c.unparseable_threshold = unparseable_threshold;
    }
    return c;
  }
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void print_stats(const erckit::Corpus& corpus) {
  std::cout << "dataset " << corpus.manifest.dataset_id << "\n";
  std::cout << "split  conversations  utterances  avg_turns\n";
  for (const auto& [name, s] : erckit::stats(corpus)) {
    std::cout << name << "  " << s.conversations << "  " << s.utterances
              << "  " << erckit::format_fixed(s.avg_utt, 2) << "\n";
  }
  for (const auto& [name, s] : erckit::stats(corpus)) {
    std::cout << "classes (" << name << "):";
    for (const auto& [label, count] : s.class_counts) {
      std::cout << " " << label << "=" << count;
    }
    std::cout << "\n";
  }
}

erckit::RetrievalIndex load_index_checked(const std::filesystem::path& path,
                                          const erckit::Embedder& embedder) {
  erckit::RetrievalIndex index = erckit::RetrievalIndex::load(path);
  if (index.embedder_id != embedder.id()) {
    erckit::raise(erckit::ErrorKind::BadConfig,
                  "index was built with embedder '" + index.embedder_id +
                      "', run is configured for '" + embedder.id() + "'");
  }
  return index;
}

std::vector<std::string> load_prediction_file(
    const std::filesystem::path& path, std::size_t expected) {
  std::ifstream in = erckit::open_input(path);
  std::vector<std::string> completions;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || erckit::is_comment_line(line)) continue;
    try {
      nlohmann::json doc = nlohmann::json::parse(line);
      completions.push_back(doc.at("completion").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      erckit::raise(erckit::ErrorKind::MalformedLine,
                    path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  if (completions.size() != expected) {
    erckit::raise(erckit::ErrorKind::LengthMismatch,
                  path.string() + " holds " +
                      std::to_string(completions.size()) +
                      " completions for " + std::to_string(expected) +
                      " prompts");
  }
  return completions;
}

void enforce_threshold(const erckit::EvalReport& report, double threshold) {
  if (report.total == 0) return;
  double rate = static_cast<double>(report.unparseable) /
                static_cast<double>(report.total);
  if (rate > threshold) {
    erckit::raise(erckit::ErrorKind::UnparseableRun,
                  "unparseable fraction " + erckit::format_double(rate) +
                      " exceeds threshold " +
                      erckit::format_double(threshold));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieval-templated pipeline for emotion recognition in "
               "conversations"};
  app.set_version_flag("--version", "erckit 0.1.0");
  app.require_subcommand(1);

  // ---- ingest ----
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "Validate a corpus file and report split statistics");
  std::string in_corpus, in_manifest, in_out;
  ConfigCli ingest_cfg;
  ingest_cmd->add_option("--corpus", in_corpus, "Corpus records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--manifest", in_manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", in_out,
                         "Re-serialize the validated corpus here");
  ingest_cfg.attach(ingest_cmd);
  ingest_cmd->callback([&] {
    RunConfig config = ingest_cfg.resolve();
    erckit::Corpus corpus = erckit::load_corpus(in_corpus, in_manifest);
    print_warnings(corpus.warnings);
    print_stats(corpus);
    if (!in_out.empty()) {
      erckit::save_corpus(corpus, in_out, config.hash());
      std::cout << "wrote " << in_out << "\n";
    }
  });

  // ---- unify ----
  auto* unify_cmd = app.add_subcommand(
      "unify", "Merge datasets into the unified label and speaker space");
  std::vector<std::string> u_corpora, u_manifests;
  std::string u_mapping, u_out_dir = "unified";
  ConfigCli unify_cfg;
  unify_cmd->add_option("--corpus", u_corpora, "Corpus files, one per dataset")
      ->required()
      ->check(CLI::ExistingFile);
  unify_cmd
      ->add_option("--manifest", u_manifests,
                   "Manifests, same order as --corpus")
      ->required()
      ->check(CLI::ExistingFile);
  unify_cmd->add_option("--mapping", u_mapping, "Label mapping TSV")
      ->required()
      ->check(CLI::ExistingFile);
  unify_cmd->add_option("--out-dir", u_out_dir, "Output directory");
  unify_cfg.attach(unify_cmd);
  unify_cmd->callback([&] {
    RunConfig config = unify_cfg.resolve();
    erckit::UnifyInputs inputs;
    for (const auto& p : u_corpora) inputs.corpus_paths.emplace_back(p);
    for (const auto& p : u_manifests) inputs.manifest_paths.emplace_back(p);
    inputs.mapping_path = u_mapping;
    erckit::UnifyOutputs out = erckit::run_unify(inputs);
    print_warnings(out.unified.warnings);
    std::filesystem::path dir = u_out_dir;
    erckit::save_corpus(out.unified, dir / "uime.jsonl", config.hash());
    out.unified.manifest.save(dir / "uime.manifest.json");
    out.registry.save(dir / "speaker_registry.json");
    print_stats(out.unified);
    std::cout << "speakers " << out.registry.total() << "\n";
    std::cout << "wrote " << (dir / "uime.jsonl").string() << "\n";
  });

  // ---- build-index ----
  auto* index_cmd = app.add_subcommand(
      "build-index", "Embed a balanced retrieval base over the train split");
  std::string bi_corpus, bi_manifest, bi_registry, bi_out = "index.jsonl";
  bool bi_no_strip = false;
  ConfigCli index_cfg;
  index_cmd->add_option("--corpus", bi_corpus, "Corpus records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  index_cmd->add_option("--manifest", bi_manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  index_cmd->add_option("--registry", bi_registry,
                        "Speaker registry JSON; its names are stripped "
                        "instead of the manifest speaker set");
  index_cmd->add_option("--out", bi_out, "Index output path");
  index_cmd->add_flag("--no-strip", bi_no_strip,
                      "Keep speaker names in indexed texts");
  index_cfg.attach(index_cmd);
  index_cmd->callback([&] {
    RunConfig config = index_cfg.resolve();
    erckit::Corpus corpus = erckit::load_corpus(bi_corpus, bi_manifest);
    print_warnings(corpus.warnings);
    std::vector<std::string> names;
    if (!bi_no_strip) {
      names = bi_registry.empty()
                  ? corpus.manifest.speaker_set
                  : erckit::SpeakerRegistry::load(bi_registry).all_names();
    }
    erckit::RetrievalIndex index =
        erckit::run_build_index(corpus, config, names);
    index.save(bi_out, config.hash());
    std::cout << "indexed " << index.entries.size() << " utterances ("
              << index.label_counts.size() << " labels, dim " << index.dim
              << ") -> " << bi_out << "\n";
  });

  // ---- build-prompts ----
  auto* prompts_cmd = app.add_subcommand(
      "build-prompts", "Render main-task prompts for one split");
  std::string bp_corpus, bp_manifest, bp_index, bp_split = "test", bp_out;
  ConfigCli prompts_cfg;
  prompts_cmd->add_option("--corpus", bp_corpus, "Corpus records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  prompts_cmd->add_option("--manifest", bp_manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  prompts_cmd->add_option("--index", bp_index,
                          "Retrieval index; omit to skip demonstrations")
      ->check(CLI::ExistingFile);
  prompts_cmd->add_option("--split", bp_split, "Which split to render")
      ->check(CLI::IsMember({"train", "val", "test"}));
  prompts_cmd->add_option("--out", bp_out, "Prompt samples output path")
      ->required();
  prompts_cfg.attach(prompts_cmd);
  prompts_cmd->callback([&] {
    RunConfig config = prompts_cfg.resolve();
    erckit::Corpus corpus = erckit::load_corpus(bp_corpus, bp_manifest);
    print_warnings(corpus.warnings);
    std::vector<erckit::PromptSample> samples;
    erckit::WindowSpec spec{config.window, true};
    if (bp_index.empty()) {
      samples = erckit::build_inference_samples(corpus, bp_split, spec,
                                                nullptr, nullptr);
    } else {
      auto embedder = erckit::make_embedder(config.embedder);
      erckit::RetrievalIndex index = load_index_checked(bp_index, *embedder);
      samples = erckit::build_inference_samples(
          corpus, bp_split, spec, &index, embedder.get(),
          config.infer_pairing);
    }
    erckit::save_samples(samples, bp_out, config.hash());
    std::cout << "wrote " << samples.size() << " prompts -> " << bp_out
              << "\n";
  });

  // ---- export-train ----
  auto* export_cmd = app.add_subcommand(
      "export-train", "Write the two-stage weighted training files");
  std::string et_corpus, et_manifest, et_index, et_out_dir = ".";
  std::string et_stage = "both";
  ConfigCli export_cfg;
  export_cmd->add_option("--corpus", et_corpus, "Corpus records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  export_cmd->add_option("--manifest", et_manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  export_cmd->add_option("--index", et_index,
                         "Retrieval index (needed for stage 2)")
      ->check(CLI::ExistingFile);
  export_cmd->add_option("--stage", et_stage, "1, 2 or both")
      ->check(CLI::IsMember({"1", "2", "both"}));
  export_cmd->add_option("--out-dir", et_out_dir, "Output directory");
  export_cfg.attach(export_cmd);
  export_cmd->callback([&] {
    RunConfig config = export_cfg.resolve();
    erckit::Corpus corpus = erckit::load_corpus(et_corpus, et_manifest);
    print_warnings(corpus.warnings);
    std::filesystem::path dir = et_out_dir;
    std::string hash = config.hash();

    erckit::MixStrategy strategy =
        erckit::mix_strategy_from_string(config.mix_strategy);
    erckit::Fraction fraction = erckit::Fraction::parse(config.mix_fraction);
    std::optional<erckit::Subset> subset;
    if (strategy == erckit::MixStrategy::Single ||
        fraction != erckit::Fraction{1, 1}) {
      erckit::MixPlan plan{strategy, config.mix_single_dataset, fraction,
                           config.seed};
      subset = erckit::sample_subset(corpus, plan);
      print_warnings(subset->warnings);
      erckit::save_subset_manifest(*subset, dir / "train_subset.jsonl", hash);
    }

    if (et_stage == "1" || et_stage == "both") {
      std::vector<erckit::PromptSample> stage1 =
          erckit::export_stage1(corpus, config.seed);
      if (subset) stage1 = erckit::apply_subset(std::move(stage1), *subset);
      erckit::save_samples(stage1, dir / "train_stage1.jsonl", hash);
      std::cout << "stage 1: " << stage1.size() << " samples -> "
                << (dir / "train_stage1.jsonl").string() << "\n";
    }
    if (et_stage == "2" || et_stage == "both") {
      if (et_index.empty()) {
        erckit::raise(erckit::ErrorKind::BadConfig,
                      "stage 2 needs --index for demonstration retrieval");
      }
      auto embedder = erckit::make_embedder(config.embedder);
      erckit::RetrievalIndex index = load_index_checked(et_index, *embedder);
      std::vector<erckit::PromptSample> stage2 = erckit::export_stage2(
          corpus, erckit::WindowSpec{config.window, true}, index, *embedder,
          config.alpha, config.seed, config.train_pairing);
      if (subset) stage2 = erckit::apply_subset(std::move(stage2), *subset);
      erckit::save_samples(stage2, dir / "train_stage2.jsonl", hash);
      std::cout << "stage 2: " << stage2.size() << " samples -> "
                << (dir / "train_stage2.jsonl").string() << "\n";
    }
  });

  // ---- infer ----
  auto* infer_cmd = app.add_subcommand(
      "infer", "Run the completion backend over rendered prompts");
  std::string if_prompts, if_out;
  ConfigCli infer_cfg;
  infer_cmd->add_option("--prompts", if_prompts, "Prompt samples (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  infer_cmd->add_option("--out", if_out, "Completions output path")
      ->required();
  infer_cfg.attach(infer_cmd);
  infer_cmd->callback([&] {
    RunConfig config = infer_cfg.resolve();
    std::vector<erckit::PromptSample> samples =
        erckit::load_samples(if_prompts);
    std::ofstream out = erckit::open_output(if_out);
    out << erckit::provenance_header("predictions", config.hash());
    out.flush();
    auto on_result = [&](std::size_t i, const std::string& completion) {
      nlohmann::json row{{"index", i},
                         {"address", samples[i].meta.address()},
                         {"completion", completion}};
      out << row.dump() << "\n";
      out.flush();
    };
    erckit::generate_all(samples, config.backend, on_result);
    std::cout << "wrote " << samples.size() << " completions -> " << if_out
              << "\n";
  });

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand(
      "eval", "Score completions with support-weighted F1");
  std::string ev_prompts, ev_manifest, ev_predictions, ev_checkpoint,
      ev_out_json;
  ConfigCli eval_cfg;
  eval_cmd->add_option("--prompts", ev_prompts, "Prompt samples (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd
      ->add_option("--manifest", ev_manifest,
                   "Manifest supplying the label set")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--predictions", ev_predictions,
                       "Stored completions; omit to query the backend")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--checkpoint", ev_checkpoint,
                       "Stream completions here while generating");
  eval_cmd->add_option("--out-json", ev_out_json, "Report JSON output path");
  eval_cfg.attach(eval_cmd);
  eval_cmd->callback([&] {
    RunConfig config = eval_cfg.resolve();
    erckit::DatasetManifest manifest =
        erckit::DatasetManifest::load(ev_manifest);
    std::vector<erckit::PromptSample> samples =
        erckit::load_samples(ev_prompts);
    erckit::EvalReport report;
    if (!ev_predictions.empty()) {
      std::vector<std::string> completions =
          load_prediction_file(ev_predictions, samples.size());
      report = erckit::score_completions(samples, completions,
                                         manifest.label_set);
    } else {
      erckit::EvaluateOptions options;
      if (!ev_checkpoint.empty()) options.checkpoint = ev_checkpoint;
      options.config_hash = config.hash();
      report = erckit::evaluate_run(samples, config.backend,
                                    manifest.label_set, options);
    }
    enforce_threshold(report, config.unparseable_threshold);
    erckit::write_report_text(report, std::cout);
    if (!ev_out_json.empty()) {
      erckit::save_report_json(report, ev_out_json, config.hash());
      std::cout << "wrote " << ev_out_json << "\n";
    }
  });

  // ---- scale-experiment ----
  auto* scale_cmd = app.add_subcommand(
      "scale-experiment",
      "Sample the full mixing grid and write subset manifests");
  std::string sc_corpus, sc_manifest, sc_out_dir = "scale";
  ConfigCli scale_cfg;
  scale_cmd->add_option("--corpus", sc_corpus, "Corpus records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  scale_cmd->add_option("--manifest", sc_manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  scale_cmd->add_option("--out-dir", sc_out_dir, "Output directory");
  scale_cfg.attach(scale_cmd);
  scale_cmd->callback([&] {
    RunConfig config = scale_cfg.resolve();
    erckit::Corpus corpus = erckit::load_corpus(sc_corpus, sc_manifest);
    print_warnings(corpus.warnings);
    erckit::ScaleGrid grid =
        erckit::run_scale_experiment(corpus, config, sc_out_dir);
    std::cout << "fraction  total  ratio  singles\n";
    for (const auto& row : grid.rows) {
      long total = 0, ratio = 0;
      for (const auto& [d, n] : row.total_counts) total += n;
      for (const auto& [d, n] : row.ratio_counts) ratio += n;
      std::cout << row.fraction.str() << "  " << total << "  " << ratio
                << " ";
      for (const auto& [d, n] : row.single_counts) {
        std::cout << " " << d << "=" << n;
      }
      std::cout << "\n";
    }
    std::cout << "wrote "
              << (std::filesystem::path(sc_out_dir) / "scale_grid.json")
                     .string()
              << "\n";
  });

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Re-run the pipeline across window, alpha or pairing variants");
  std::string sw_corpus, sw_manifest, sw_kind, sw_out_dir = "sweep";
  std::vector<int> sw_windows = {0, 1, 2, 4, 8, 12};
  std::vector<double> sw_alphas = {0.0, 0.05, 0.1, 0.2, 0.5, 1.0};
  ConfigCli sweep_cfg;
  sweep_cmd->add_option("--corpus", sw_corpus, "Corpus records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--manifest", sw_manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--kind", sw_kind, "window, alpha or pairing")
      ->required()
      ->check(CLI::IsMember({"window", "alpha", "pairing"}));
  sweep_cmd->add_option("--windows", sw_windows, "Window values to sweep")
      ->delimiter(',');
  sweep_cmd->add_option("--alphas", sw_alphas, "Alpha values to sweep")
      ->delimiter(',');
  sweep_cmd->add_option("--out-dir", sw_out_dir, "Output directory");
  sweep_cfg.attach(sweep_cmd);
  sweep_cmd->callback([&] {
    RunConfig config = sweep_cfg.resolve();
    erckit::Corpus corpus = erckit::load_corpus(sw_corpus, sw_manifest);
    print_warnings(corpus.warnings);
    std::vector<erckit::SweepRow> rows;
    if (sw_kind == "window") {
      rows = erckit::run_window_sweep(corpus, config, sw_windows, sw_out_dir);
    } else if (sw_kind == "alpha") {
      rows = erckit::run_alpha_sweep(corpus, config, sw_alphas, sw_out_dir);
    } else {
      rows = erckit::run_pairing_sweep(corpus, config, sw_out_dir);
    }
    std::cout << "key\tweighted_f1\tsamples\n";
    for (const auto& row : rows) {
      std::cout << row.key << "\t" << erckit::format_double(row.weighted_f1)
                << "\t" << row.samples << "\n";
    }
  });

  // ---- fixtures ----
  auto* fixtures_cmd = app.add_subcommand(
      "fixtures", "Write the bundled synthetic datasets and label mapping");
  std::string fx_out_dir, fx_set = "all";
  fixtures_cmd->add_option("--out-dir", fx_out_dir, "Output directory")
      ->required();
  fixtures_cmd->add_option("--set", fx_set, "benchmark, demo or all")
      ->check(CLI::IsMember({"benchmark", "demo", "all"}));
  fixtures_cmd->callback([&] {
    std::filesystem::path dir = fx_out_dir;
    if (fx_set == "benchmark" || fx_set == "all") {
      for (const auto& paths : erckit::write_benchmark_fixtures(dir)) {
        std::cout << "wrote " << paths.corpus.string() << "\n";
      }
      erckit::write_text_file(dir / "unified_label_mapping.tsv",
                              erckit::canonical_mapping_text());
      std::cout << "wrote " << (dir / "unified_label_mapping.tsv").string()
                << "\n";
    }
    if (fx_set == "demo" || fx_set == "all") {
      erckit::FixturePaths paths = erckit::write_rule_eval_fixture(dir);
      std::cout << "wrote " << paths.corpus.string() << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const erckit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
