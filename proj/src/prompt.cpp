#include "erckit/prompt.hpp"

#include "erckit/error.hpp"

namespace erckit {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::Main:
      return "main";
    case Task::SpeakerId:
      return "speaker_id";
    case Task::EmotionImpact:
      return "emotion_impact";
  }
  return "main";
}

Task task_from_string(std::string_view name) {
  if (name == "main") return Task::Main;
  if (name == "speaker_id") return Task::SpeakerId;
  if (name == "emotion_impact") return Task::EmotionImpact;
  raise(ErrorKind::BadConfig, "unknown task '" + std::string(name) + "'");
}

std::string SampleMeta::address() const {
  return dataset + "/" + conv_id + "/" + std::to_string(index);
}

namespace {

std::string join(std::span<const std::string> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += values[i];
  }
  return out;
}

const Utterance& utterance_at(const Conversation& conversation, int index) {
  if (index < 0 ||
      index >= static_cast<int>(conversation.utterances.size())) {
    raise(ErrorKind::BadConfig,
          "utterance index " + std::to_string(index) +
              " out of range for conversation '" + conversation.id + "'");
  }
  return conversation.utterances[static_cast<std::size_t>(index)];
}

}  // namespace

std::span<const Utterance> extract_history(const Conversation& conversation,
                                           int index, WindowSpec spec) {
  utterance_at(conversation, index);  // bounds check
  if (spec.w < 0) {
    raise(ErrorKind::BadConfig, "history window must be non-negative");
  }
  int end = spec.include_current ? index + 1 : index;
  int want = spec.include_current ? spec.w + 1 : spec.w;
  int begin = end - want;
  if (begin < 0) begin = 0;
  return std::span<const Utterance>(conversation.utterances)
      .subspan(static_cast<std::size_t>(begin),
               static_cast<std::size_t>(end - begin));
}

std::string main_instruction() {
  return "Now you are an expert of sentiment and emotional analysis. "
         "The following conversation noted between '### ###' involves "
         "several speakers.";
}

std::string speaker_token(const Utterance& utterance) {
  return "Speaker_" + utterance.speaker;
}

std::string history_block(std::span<const Utterance> history) {
  std::string out = "###\n";
  for (const auto& u : history) {
    out += speaker_token(u);
    out += ": \"";
    out += u.text;
    out += "\"\n";
  }
  out += "###\n";
  return out;
}

std::string main_label_statement(const Utterance& utterance,
                                 std::span<const std::string> label_set) {
  return "Please select the emotional label of <" + speaker_token(utterance) +
         ": \"" + utterance.text + "\"> from <" + join(label_set) + ">:";
}

std::string demonstration_block(const Demonstration& demo) {
  return "\nHere is a similar example:\n" + demo.text + "\n" + demo.label;
}

std::string impact_label_statement(const Utterance& utterance,
                                   std::span<const std::string> label_set) {
  return "Based on the above historical utterances, the next utterance is "
         "spoken by <" +
         speaker_token(utterance) +
         ">, please predict the emotion states of <" +
         speaker_token(utterance) + "> from <" + join(label_set) + ">:";
}

PromptSample build_main_prompt(const Conversation& conversation, int index,
                               WindowSpec spec,
                               const std::optional<Demonstration>& demo,
                               std::span<const std::string> label_set) {
  const Utterance& current = utterance_at(conversation, index);
  spec.include_current = true;
  PromptSample sample;
  sample.task = Task::Main;
  sample.input_text = main_instruction() + "\n" +
                      history_block(extract_history(conversation, index,
                                                    spec)) +
                      main_label_statement(current, label_set);
  if (demo) sample.input_text += demonstration_block(*demo);
  sample.target_text = current.emotion;
  sample.loss_weight = 1.0;
  sample.meta = SampleMeta{conversation.dataset_id, conversation.id, index,
                           current.emotion};
  return sample;
}

PromptSample build_speaker_prompt(const Conversation& conversation, int index,
                                  std::span<const std::string> speaker_set) {
  const Utterance& current = utterance_at(conversation, index);
  PromptSample sample;
  sample.task = Task::SpeakerId;
  sample.input_text =
      "Now you are an expert of sentiment and emotional analysis. "
      "Please select the Speaker label of the utterance <Speaker: \"" +
      current.text + "\"> from <" + join(speaker_set) + ">:";
  sample.target_text = current.speaker;
  sample.loss_weight = 1.0;
  sample.meta = SampleMeta{conversation.dataset_id, conversation.id, index,
                           current.speaker};
  return sample;
}

std::optional<PromptSample> build_impact_prompt(
    const Conversation& conversation, int index, WindowSpec spec,
    std::span<const std::string> label_set, double alpha) {
  const Utterance& current = utterance_at(conversation, index);
  if (index == 0) return std::nullopt;
  spec.include_current = false;
  PromptSample sample;
  sample.task = Task::EmotionImpact;
  sample.input_text = main_instruction() + "\n" +
                      history_block(extract_history(conversation, index,
                                                    spec)) +
                      impact_label_statement(current, label_set);
  sample.target_text = current.emotion;
  sample.loss_weight = alpha;
  sample.meta = SampleMeta{conversation.dataset_id, conversation.id, index,
                           current.emotion};
  return sample;
}

}  // namespace erckit
