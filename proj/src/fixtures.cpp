#include "erckit/fixtures.hpp"

#include <array>
#include <cstdio>
#include <map>
#include <span>
#include <string_view>

#include "erckit/error.hpp"
#include "erckit/rng.hpp"
#include "erckit/unify.hpp"

namespace erckit {

namespace {

constexpr std::uint64_t kFixtureSeed = 7;

struct SplitShape {
  std::string_view name;
  long conversations;
  long utterances;
};

struct DatasetShape {
  std::string_view id;
  std::vector<std::string> labels;
  std::vector<std::string> speakers;
  std::vector<SplitShape> splits;
  int max_cast;  // speakers per conversation drawn from [2, max_cast]
};

const DatasetShape& shape_for(const std::string& dataset_id) {
  static const std::vector<DatasetShape> shapes = {
      {"iemocap",
       {"happy", "sad", "neutral", "angry", "excited", "scared"},
       {"Amber", "Brian", "Carla", "Derek", "Elena", "Felix", "Grace", "Hugo",
        "Irene", "Jonas"},
       {{"train", 108, 5163}, {"val", 12, 647}, {"test", 31, 1623}},
       2},
      {"meld",
       {"joyful", "sad", "neutral", "angry", "surprise", "fear", "disgust"},
       {"Kara", "Liam", "Mona", "Nolan", "Opal",  "Pavel", "Quinn", "Rosa",
        "Sam",  "Tess", "Umar", "Vera",  "Wade",  "Xena",  "Yuri",  "Zoe",
        "Abel", "Bree", "Cole", "Dina",  "Emil",  "Faye",  "Gil",   "Hana"},
       {{"train", 1038, 9989}, {"val", 114, 1109}, {"test", 280, 2610}},
       4},
      {"emorynlp",
       {"joyful", "sad", "neutral", "mad", "powerful", "frustrated",
        "peaceful"},
       {"Iris", "Jack", "Kyle", "Lena", "Marc", "Nina", "Omar", "Pia", "Ralf",
        "Sara", "Theo", "Uma", "Vik", "Wren", "Yale", "Zara", "Arlo", "Bess"},
       {{"train", 713, 9934}, {"val", 99, 1344}, {"test", 85, 1328}},
       4},
      {"uimedemo",
       unified_labels(),
       {"Noor", "Pete", "Rhea", "Saul", "Tova", "Wes"},
       {{"train", 15, 90}, {"test", 10, 60}},
       3},
  };
  for (const auto& s : shapes) {
    if (s.id == dataset_id) return s;
  }
  raise(ErrorKind::BadConfig, "no fixture named '" + dataset_id + "'");
}

// Phrase banks keyed by the unified emotion each phrase signals. Every
// non-neutral phrase carries exactly one keyword the rule-based mock
// recognizes, so generated corpora give rule runs a stable above-chance
// score without being trivially separable.
const std::map<std::string_view, std::vector<std::string_view>>& phrase_banks() {
  static const std::map<std::string_view, std::vector<std::string_view>> banks =
      {
          {"joyful",
           {"I am so happy today.", "I'm glad you came by.",
            "That was wonderful news.", "This turned out great."}},
          {"sad",
           {"This is so sad.", "I just want to cry.",
            "What a miserable afternoon."}},
          {"neutral",
           {"We can talk about it later.", "The meeting starts at noon.",
            "Please pass me the folder.", "I will check the schedule.",
            "The bus leaves in ten minutes."}},
          {"mad",
           {"I am angry about the delay.", "She was furious with the referee.",
            "I hate this plan."}},
          {"excited",
           {"I am really excited for the trip!",
            "What a thrill that ride was."}},
          {"powerful",
           {"I feel strong and proud today.",
            "Everyone was so surprised by the result."}},
          {"fear",
           {"I am afraid of the dark hallway.", "That noise scared me badly.",
            "The storm was terrifying.", "I worry about the deadline."}},
          {"peaceful",
           {"Stay calm, everything is fine.", "I feel relaxed out here."}},
          {"disgust",
           {"That smell was gross.", "How disgusting was that?"}},
      };
  return banks;
}

// Which bank a dataset-local label draws its on-label phrases from.
std::string_view bank_for(std::string_view dataset_id, std::string_view label) {
  if (dataset_id == "iemocap") {
    if (label == "happy") return "joyful";
    if (label == "angry") return "mad";
    if (label == "scared") return "fear";
    return label;  // sad, neutral, excited
  }
  if (dataset_id == "meld") {
    if (label == "angry") return "mad";
    if (label == "surprise") return "powerful";
    return label;  // joyful, sad, neutral, fear, disgust
  }
  if (dataset_id == "emorynlp") {
    if (label == "frustrated") return "fear";
    return label;  // joyful, sad, neutral, mad, powerful, peaceful
  }
  return label;  // uimedemo speaks the unified space directly
}

std::string make_text(const DatasetShape& shape, std::string_view label,
                      Rng& rng) {
  const auto& banks = phrase_banks();
  const auto& unified = unified_labels();
  std::string_view bank_key = bank_for(shape.id, label);

  std::uint64_t roll = bounded(rng, 100);
  if (roll >= 55) {
    if (roll < 70) {
      // Misleading: a phrase signalling some other emotion.
      std::size_t own = 0;
      for (std::size_t i = 0; i < unified.size(); ++i) {
        if (unified[i] == bank_key) own = i;
      }
      std::size_t other =
          (own + 1 + bounded(rng, unified.size() - 1)) % unified.size();
      bank_key = unified[other];
    } else {
      bank_key = "neutral";
    }
  }
  const auto& bank = banks.at(bank_key);
  std::string text{bank[bounded(rng, bank.size())]};

  if (bounded(rng, 100) < 10) {
    const std::string& name =
        shape.speakers[bounded(rng, shape.speakers.size())];
    if (bounded(rng, 2) == 0) {
      text = name + ", listen: " + text;
    } else {
      text += " Right, " + name + "?";
    }
  }
  return text;
}

std::vector<long> conversation_lengths(const SplitShape& split, Rng& rng) {
  long base = split.utterances / split.conversations;
  long extra = split.utterances - base * split.conversations;
  std::vector<long> lengths(static_cast<std::size_t>(split.conversations),
                            base);
  for (long i = 0; i < extra; ++i) lengths[static_cast<std::size_t>(i)] += 1;
  // Shift single turns between conversations so lengths vary while the
  // split totals stay exact and every conversation keeps at least two turns.
  for (std::size_t move = 0; move < lengths.size(); ++move) {
    std::size_t from = bounded(rng, lengths.size());
    std::size_t to = bounded(rng, lengths.size());
    if (from != to && lengths[from] > 2) {
      lengths[from] -= 1;
      lengths[to] += 1;
    }
  }
  return lengths;
}

void append_split(Corpus& corpus, const DatasetShape& shape,
                  const SplitShape& split) {
  Rng rng = make_rng(kFixtureSeed, std::string("fixture/") +
                                       std::string(shape.id) + "/" +
                                       std::string(split.name));
  std::vector<long> lengths = conversation_lengths(split, rng);
  const std::size_t n_labels = shape.labels.size();
  long label_counter = 0;

  for (std::size_t c = 0; c < lengths.size(); ++c) {
    char id_buf[64];
    std::snprintf(id_buf, sizeof(id_buf), "%s_%s_%04zu",
                  std::string(shape.id).c_str(),
                  std::string(split.name).c_str(), c);
    Conversation conv;
    conv.id = id_buf;
    conv.dataset_id = std::string(shape.id);
    conv.split = std::string(split.name);

    std::size_t len = static_cast<std::size_t>(lengths[c]);
    std::size_t cast_size = 2;
    if (shape.max_cast > 2) {
      cast_size = 2 + static_cast<std::size_t>(
                          bounded(rng, static_cast<std::uint64_t>(
                                           shape.max_cast - 1)));
    }
    if (cast_size > len) cast_size = len;
    std::vector<std::size_t> cast =
        sample_indices(shape.speakers.size(), cast_size, rng);

    for (std::size_t u = 0; u < len; ++u) {
      std::size_t speaker_idx =
          (u < cast.size()) ? cast[u] : cast[bounded(rng, cast.size())];
      std::size_t label_idx;
      if (label_counter < static_cast<long>(2 * n_labels)) {
        label_idx = static_cast<std::size_t>(label_counter) % n_labels;
      } else {
        label_idx = bounded(rng, n_labels);
      }
      ++label_counter;
      const std::string& label = shape.labels[label_idx];
      conv.utterances.push_back(Utterance{
          conv.id, static_cast<int>(u), shape.speakers[speaker_idx],
          make_text(shape, label, rng), label});
    }
    corpus.conversations.push_back(std::move(conv));
  }
}

Corpus build(const std::string& dataset_id) {
  const DatasetShape& shape = shape_for(dataset_id);
  Corpus corpus;
  corpus.manifest.dataset_id = std::string(shape.id);
  corpus.manifest.label_set = shape.labels;
  corpus.manifest.speaker_set = shape.speakers;
  for (const auto& split : shape.splits) {
    corpus.manifest.declared_splits[std::string(split.name)] =
        SplitSizes{split.conversations, split.utterances};
    append_split(corpus, shape, split);
  }
  return corpus;
}

FixturePaths write_fixture(const Corpus& corpus,
                           const std::filesystem::path& dir) {
  FixturePaths paths;
  paths.corpus = dir / (corpus.manifest.dataset_id + ".jsonl");
  paths.manifest = dir / (corpus.manifest.dataset_id + ".manifest.json");
  save_corpus(corpus, paths.corpus);
  corpus.manifest.save(paths.manifest);
  return paths;
}

}  // namespace

Corpus make_benchmark_fixture(const std::string& dataset_id) {
  if (dataset_id == "uimedemo") {
    raise(ErrorKind::BadConfig,
          "uimedemo is the rule-eval fixture, not a benchmark");
  }
  return build(dataset_id);
}

Corpus make_rule_eval_fixture() { return build("uimedemo"); }

std::vector<FixturePaths> write_benchmark_fixtures(
    const std::filesystem::path& dir) {
  std::vector<FixturePaths> out;
  for (const auto& id : benchmark_dataset_ids()) {
    out.push_back(write_fixture(make_benchmark_fixture(id), dir));
  }
  return out;
}

FixturePaths write_rule_eval_fixture(const std::filesystem::path& dir) {
  return write_fixture(make_rule_eval_fixture(), dir);
}

}  // namespace erckit
