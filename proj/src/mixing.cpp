#include "erckit/mixing.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "erckit/error.hpp"
#include "erckit/records.hpp"
#include "erckit/rng.hpp"

namespace erckit {

using nlohmann::json;

std::string Fraction::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Fraction Fraction::parse(std::string_view text) {
  std::string s = trim(text);
  Fraction f;
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      f.num = std::stol(s);
      f.den = 1;
    } else {
      f.num = std::stol(s.substr(0, slash));
      f.den = std::stol(s.substr(slash + 1));
    }
  } catch (const std::exception&) {
    raise(ErrorKind::BadConfig, "bad fraction '" + std::string(text) + "'");
  }
  if (f.num < 1 || f.den < 1 || f.num > f.den) {
    raise(ErrorKind::BadConfig,
          "fraction must lie in (0, 1], got '" + std::string(text) + "'");
  }
  long g = std::gcd(f.num, f.den);
  f.num /= g;
  f.den /= g;
  return f;
}

std::vector<Fraction> default_fractions() {
  return {{1, 1}, {1, 2}, {1, 4}, {1, 8}, {1, 16}, {1, 32}, {1, 64}};
}

std::string_view to_string(MixStrategy strategy) {
  switch (strategy) {
    case MixStrategy::Total:
      return "total";
    case MixStrategy::Ratio:
      return "ratio";
    case MixStrategy::Single:
      return "single";
  }
  return "ratio";
}

MixStrategy mix_strategy_from_string(std::string_view name) {
  if (name == "total") return MixStrategy::Total;
  if (name == "ratio") return MixStrategy::Ratio;
  if (name == "single") return MixStrategy::Single;
  raise(ErrorKind::BadConfig,
        "unknown mix strategy '" + std::string(name) + "'");
}

std::string MixPlan::name() const {
  std::string frac = fraction.str();
  std::replace(frac.begin(), frac.end(), '/', '-');
  std::string out{to_string(strategy)};
  if (strategy == MixStrategy::Single) out += "_" + single_dataset;
  return out + "_" + frac;
}

std::string UttAddress::str() const {
  return dataset + "/" + conv_id + "/" + std::to_string(index);
}

namespace {

struct TrainPool {
  std::vector<std::string> dataset_order;
  std::map<std::string, std::vector<UttAddress>> by_dataset;
  std::vector<UttAddress> merged;  // corpus order
};

TrainPool collect_train(const Corpus& corpus) {
  TrainPool pool;
  for (const auto& conv : corpus.conversations) {
    if (conv.split != "train") continue;
    auto& bucket = pool.by_dataset[conv.dataset_id];
    if (bucket.empty()) pool.dataset_order.push_back(conv.dataset_id);
    for (const auto& u : conv.utterances) {
      UttAddress addr{conv.dataset_id, conv.id, u.index};
      bucket.push_back(addr);
      pool.merged.push_back(std::move(addr));
    }
  }
  if (pool.merged.empty()) {
    raise(ErrorKind::EmptyClass, "train split has no utterances to sample");
  }
  return pool;
}

std::vector<UttAddress> draw(const std::vector<UttAddress>& from, long count,
                             Rng& rng) {
  std::vector<std::size_t> picks =
      sample_indices(from.size(), static_cast<std::size_t>(count), rng);
  std::vector<UttAddress> out;
  out.reserve(picks.size());
  for (std::size_t p : picks) out.push_back(from[p]);
  return out;
}

}  // namespace

Subset sample_subset(const Corpus& corpus, const MixPlan& plan) {
  TrainPool pool = collect_train(corpus);
  Subset subset;
  subset.plan = plan;

  auto warn_if_empty = [&](const std::string& dataset, long target) {
    if (target == 0) {
      subset.warnings.push_back("fraction " + plan.fraction.str() +
                                " yields no utterances from dataset '" +
                                dataset + "'");
    }
  };

  switch (plan.strategy) {
    case MixStrategy::Ratio: {
      for (const auto& dataset : pool.dataset_order) {
        const auto& bucket = pool.by_dataset[dataset];
        long target = plan.fraction.floor_of(static_cast<long>(bucket.size()));
        warn_if_empty(dataset, target);
        Rng rng = make_rng(plan.seed, "mix/" + plan.name() + "/" + dataset);
        for (auto& addr : draw(bucket, target, rng)) {
          subset.addresses.push_back(std::move(addr));
        }
        subset.per_dataset[dataset] = target;
      }
      break;
    }
    case MixStrategy::Total: {
      long target = 0;
      for (const auto& dataset : pool.dataset_order) {
        target += plan.fraction.floor_of(
            static_cast<long>(pool.by_dataset[dataset].size()));
      }
      Rng rng = make_rng(plan.seed, "mix/" + plan.name());
      subset.addresses = draw(pool.merged, target, rng);
      for (const auto& addr : subset.addresses) {
        subset.per_dataset[addr.dataset] += 1;
      }
      for (const auto& dataset : pool.dataset_order) {
        subset.per_dataset.try_emplace(dataset, 0);
        warn_if_empty(dataset, subset.per_dataset[dataset]);
      }
      break;
    }
    case MixStrategy::Single: {
      auto it = pool.by_dataset.find(plan.single_dataset);
      if (plan.single_dataset.empty() || it == pool.by_dataset.end()) {
        raise(ErrorKind::BadConfig,
              "single-dataset mixing needs a dataset present in the train "
              "split, got '" +
                  plan.single_dataset + "'");
      }
      long target = plan.fraction.floor_of(static_cast<long>(it->second.size()));
      warn_if_empty(plan.single_dataset, target);
      Rng rng = make_rng(plan.seed, "mix/" + plan.name());
      subset.addresses = draw(it->second, target, rng);
      subset.per_dataset[plan.single_dataset] = target;
      break;
    }
  }
  return subset;
}

std::vector<MixPlan> plan_grid(std::span<const Fraction> fractions,
                               std::span<const MixStrategy> strategies,
                               std::uint64_t seed) {
  std::vector<MixPlan> plans;
  for (const auto& strategy : strategies) {
    for (const auto& fraction : fractions) {
      MixPlan plan;
      plan.strategy = strategy;
      plan.fraction = fraction;
      plan.seed = seed;
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

void save_subset_manifest(const Subset& subset,
                          const std::filesystem::path& path,
                          std::string_view config_hash) {
  std::ofstream out = open_output(path);
  if (!config_hash.empty()) out << provenance_header("subset", config_hash);
  json header;
  header["strategy"] = std::string(to_string(subset.plan.strategy));
  if (subset.plan.strategy == MixStrategy::Single) {
    header["single_dataset"] = subset.plan.single_dataset;
  }
  header["fraction"] = subset.plan.fraction.str();
  header["seed"] = subset.plan.seed;
  header["per_dataset"] = subset.per_dataset;
  header["warnings"] = subset.warnings;
  out << header.dump() << "\n";
  for (const auto& addr : subset.addresses) {
    json row{{"dataset", addr.dataset},
             {"conv_id", addr.conv_id},
             {"index", addr.index}};
    out << row.dump() << "\n";
  }
}

Subset load_subset_manifest(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  Subset subset;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || is_comment_line(line)) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!header_seen) {
        subset.plan.strategy = mix_strategy_from_string(
            doc.at("strategy").get<std::string>());
        subset.plan.single_dataset = doc.value("single_dataset", "");
        subset.plan.fraction =
            Fraction::parse(doc.at("fraction").get<std::string>());
        subset.plan.seed = doc.at("seed").get<std::uint64_t>();
        subset.per_dataset =
            doc.at("per_dataset").get<std::map<std::string, long>>();
        subset.warnings =
            doc.value("warnings", std::vector<std::string>{});
        header_seen = true;
        continue;
      }
      subset.addresses.push_back(UttAddress{
          doc.at("dataset").get<std::string>(),
          doc.at("conv_id").get<std::string>(), doc.at("index").get<int>()});
    } catch (const json::exception& e) {
      raise(ErrorKind::MalformedLine,
            path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) {
    raise(ErrorKind::MalformedLine, path.string() + ": empty subset manifest");
  }
  return subset;
}

}  // namespace erckit
