#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erckit/corpus.hpp"

namespace erckit {

enum class Task { Main, SpeakerId, EmotionImpact };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

struct WindowSpec {
  int w = 12;                   // history turns rendered into the prompt
  bool include_current = true;  // main task: yes; emotion impact: no
};

struct SampleMeta {
  std::string dataset;
  std::string conv_id;
  int index = 0;
  std::string gold;

  std::string address() const;
  bool operator==(const SampleMeta&) const = default;
};

struct PromptSample {
  Task task = Task::Main;
  std::string input_text;
  std::string target_text;
  double loss_weight = 1.0;
  SampleMeta meta;

  bool operator==(const PromptSample&) const = default;
};

/// Retrieved demonstration rendered into the main prompt.
struct Demonstration {
  std::string text;
  std::string label;
};

/// History slice for position `index`: ends at the current utterance when
/// `include_current`, at the previous one otherwise. Short prefixes truncate.
std::span<const Utterance> extract_history(const Conversation& conversation,
                                           int index, WindowSpec spec);

// The prompt is the literal concatenation of its parts, exposed separately
// so tests can reassemble it. All strings are frozen by golden files.
std::string main_instruction();
std::string speaker_token(const Utterance& utterance);
std::string history_block(std::span<const Utterance> history);
std::string main_label_statement(const Utterance& utterance,
                                 std::span<const std::string> label_set);
std::string demonstration_block(const Demonstration& demo);
std::string impact_label_statement(const Utterance& utterance,
                                   std::span<const std::string> label_set);

PromptSample build_main_prompt(const Conversation& conversation, int index,
                               WindowSpec spec,
                               const std::optional<Demonstration>& demo,
                               std::span<const std::string> label_set);

PromptSample build_speaker_prompt(const Conversation& conversation, int index,
                                  std::span<const std::string> speaker_set);

/// Empty optional at index 0: there is no history to predict from, the
/// caller drops the sample.
std::optional<PromptSample> build_impact_prompt(
    const Conversation& conversation, int index, WindowSpec spec,
    std::span<const std::string> label_set, double alpha);

}  // namespace erckit
