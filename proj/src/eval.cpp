#include "erckit/eval.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <ostream>

#include <json.hpp>

#include "erckit/error.hpp"
#include "erckit/records.hpp"

namespace erckit {

using nlohmann::json;

std::optional<std::string> parse_prediction(
    std::string_view completion, std::span<const std::string> label_set) {
  std::string_view first_line = completion.substr(0, completion.find('\n'));
  std::string text = trim(first_line);
  while (!text.empty() &&
         std::ispunct(static_cast<unsigned char>(text.front()))) {
    text.erase(text.begin());
  }
  while (!text.empty() &&
         std::ispunct(static_cast<unsigned char>(text.back()))) {
    text.pop_back();
  }
  text = lower(trim(text));
  if (text.empty()) return std::nullopt;

  for (const auto& label : label_set) {
    if (lower(label) == text) return label;
  }

  const std::string* best = nullptr;
  std::size_t best_len = 0;
  bool tie = false;
  for (const auto& label : label_set) {
    std::string needle = lower(label);
    if (text.find(needle) == std::string::npos) continue;
    if (needle.size() > best_len) {
      best = &label;
      best_len = needle.size();
      tie = false;
    } else if (needle.size() == best_len) {
      tie = true;
    }
  }
  if (best == nullptr || tie) return std::nullopt;
  return *best;
}

EvalReport weighted_f1(
    std::span<const std::string> gold,
    std::span<const std::optional<std::string>> predictions,
    std::span<const std::string> label_set) {
  if (gold.size() != predictions.size()) {
    raise(ErrorKind::LengthMismatch,
          "got " + std::to_string(gold.size()) + " gold labels and " +
              std::to_string(predictions.size()) + " predictions");
  }
  std::map<std::string, std::size_t> label_index;
  for (std::size_t i = 0; i < label_set.size(); ++i) {
    label_index[label_set[i]] = i;
  }

  std::vector<long> tp(label_set.size(), 0), fp(label_set.size(), 0),
      fn(label_set.size(), 0), support(label_set.size(), 0);
  EvalReport report;
  report.total = static_cast<long>(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto git = label_index.find(gold[i]);
    if (git == label_index.end()) {
      raise(ErrorKind::UnknownLabel,
            "gold label '" + gold[i] + "' is outside the label set");
    }
    std::size_t g = git->second;
    support[g] += 1;
    if (!predictions[i].has_value()) {
      report.unparseable += 1;
      fn[g] += 1;  // never-correct reserved class: no false positive anywhere
      continue;
    }
    auto pit = label_index.find(*predictions[i]);
    if (pit == label_index.end()) {
      raise(ErrorKind::UnknownLabel,
            "prediction '" + *predictions[i] + "' is outside the label set");
    }
    std::size_t p = pit->second;
    if (p == g) {
      tp[g] += 1;
    } else {
      fn[g] += 1;
      fp[p] += 1;
    }
  }

  double weighted = 0.0;
  for (std::size_t i = 0; i < label_set.size(); ++i) {
    ClassScore score;
    score.label = label_set[i];
    score.support = support[i];
    long denom_p = tp[i] + fp[i];
    long denom_r = tp[i] + fn[i];
    score.precision =
        denom_p > 0 ? static_cast<double>(tp[i]) / denom_p : 0.0;
    score.recall = denom_r > 0 ? static_cast<double>(tp[i]) / denom_r : 0.0;
    score.f1 = (score.precision + score.recall) > 0.0
                   ? 2.0 * score.precision * score.recall /
                         (score.precision + score.recall)
                   : 0.0;
    weighted += score.f1 * static_cast<double>(score.support);
    report.per_class.push_back(std::move(score));
  }
  report.weighted_f1 =
      report.total > 0 ? weighted / static_cast<double>(report.total) : 0.0;
  return report;
}

EvalReport score_completions(std::span<const PromptSample> samples,
                             std::span<const std::string> completions,
                             std::span<const std::string> label_set,
                             bool per_dataset) {
  if (samples.size() != completions.size()) {
    raise(ErrorKind::LengthMismatch,
          "got " + std::to_string(samples.size()) + " samples and " +
              std::to_string(completions.size()) + " completions");
  }
  std::vector<std::string> gold;
  std::vector<std::optional<std::string>> predictions;
  gold.reserve(samples.size());
  predictions.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    gold.push_back(samples[i].meta.gold);
    predictions.push_back(parse_prediction(completions[i], label_set));
  }
  EvalReport report = weighted_f1(gold, predictions, label_set);

  if (per_dataset) {
    std::vector<std::string> dataset_order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto& group = groups[samples[i].meta.dataset];
      if (group.empty()) dataset_order.push_back(samples[i].meta.dataset);
      group.push_back(i);
    }
    if (dataset_order.size() > 1) {
      for (const auto& dataset : dataset_order) {
        std::vector<std::string> sub_gold;
        std::vector<std::optional<std::string>> sub_pred;
        for (std::size_t i : groups[dataset]) {
          sub_gold.push_back(gold[i]);
          sub_pred.push_back(predictions[i]);
        }
        report.per_dataset.emplace_back(
            dataset, weighted_f1(sub_gold, sub_pred, label_set));
      }
    }
  }
  return report;
}

EvalReport evaluate_run(std::span<const PromptSample> samples,
                        const BackendConfig& backend,
                        std::span<const std::string> label_set,
                        const EvaluateOptions& options) {
  std::ofstream checkpoint;
  if (!options.checkpoint.empty()) {
    checkpoint = open_output(options.checkpoint);
    if (!options.config_hash.empty()) {
      checkpoint << provenance_header("checkpoint", options.config_hash);
      checkpoint.flush();
    }
  }
  auto on_result = [&](std::size_t i, const std::string& completion) {
    if (!checkpoint.is_open()) return;
    json row{{"index", i},
             {"address", samples[i].meta.address()},
             {"completion", completion}};
    checkpoint << row.dump() << "\n";
    checkpoint.flush();
  };

  std::vector<std::string> completions =
      generate_all(samples, backend, on_result);
  return score_completions(samples, completions, label_set,
                           options.per_dataset);
}

namespace {

void write_report_block(const EvalReport& report, std::ostream& out,
                        const std::string& heading) {
  if (!heading.empty()) out << "[" << heading << "]\n";
  std::size_t width = 8;
  for (const auto& c : report.per_class) {
    width = std::max(width, c.label.size());
  }
  out << "label";
  out << std::string(width - 5 + 2, ' ');
  out << "precision  recall  f1      support\n";
  for (const auto& c : report.per_class) {
    out << c.label << std::string(width - c.label.size() + 2, ' ')
        << format_fixed(c.precision, 4) << "     " << format_fixed(c.recall, 4)
        << "  " << format_fixed(c.f1, 4) << "  " << c.support << "\n";
  }
  out << "weighted_f1 " << format_fixed(report.weighted_f1, 4) << "  (n="
      << report.total << ", unparseable=" << report.unparseable << ")\n";
}

json report_to_json(const EvalReport& report) {
  json doc;
  doc["weighted_f1"] = report.weighted_f1;
  doc["total"] = report.total;
  doc["unparseable"] = report.unparseable;
  doc["per_class"] = json::array();
  for (const auto& c : report.per_class) {
    doc["per_class"].push_back({{"label", c.label},
                                {"precision", c.precision},
                                {"recall", c.recall},
                                {"f1", c.f1},
                                {"support", c.support}});
  }
  if (!report.per_dataset.empty()) {
    json sub = json::object();
    for (const auto& [dataset, dataset_report] : report.per_dataset) {
      sub[dataset] = report_to_json(dataset_report);
    }
    doc["per_dataset"] = sub;
  }
  return doc;
}

}  // namespace

void write_report_text(const EvalReport& report, std::ostream& out) {
  write_report_block(report, out, "");
  for (const auto& [dataset, dataset_report] : report.per_dataset) {
    out << "\n";
    write_report_block(dataset_report, out, dataset);
  }
}

void save_report_json(const EvalReport& report,
                      const std::filesystem::path& path,
                      std::string_view config_hash) {
  json doc = report_to_json(report);
  if (!config_hash.empty()) doc["config_hash"] = std::string(config_hash);
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace erckit
