#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "erckit/corpus.hpp"

namespace erckit {

/// Exact rational in (0, 1]; floors are computed in integer arithmetic.
struct Fraction {
  long num = 1;
  long den = 1;

  long floor_of(long n) const { return num * n / den; }
  std::string str() const;
  static Fraction parse(std::string_view text);

  auto operator<=>(const Fraction&) const = default;
};

/// The paper's scaling grid: 1, 1/2, 1/4, 1/8, 1/16, 1/32, 1/64.
std::vector<Fraction> default_fractions();

enum class MixStrategy { Total, Ratio, Single };

std::string_view to_string(MixStrategy strategy);
MixStrategy mix_strategy_from_string(std::string_view name);

struct MixPlan {
  MixStrategy strategy = MixStrategy::Ratio;
  std::string single_dataset;  // Single only
  Fraction fraction;
  std::uint64_t seed = 0;

  std::string name() const;  // e.g. "ratio_1-2", "single_MELD_1-4"
};

struct UttAddress {
  std::string dataset;
  std::string conv_id;
  int index = 0;

  std::string str() const;
  auto operator<=>(const UttAddress&) const = default;
};

struct Subset {
  MixPlan plan;
  std::vector<UttAddress> addresses;         // seeded-shuffle output order
  std::map<std::string, long> per_dataset;   // contribution counts
  std::vector<std::string> warnings;
};

/// Seeded sampling without replacement over the train split.
///  - ratio: floor(f*N_d) per source dataset, concatenated;
///  - total: sum_d floor(f*N_d) from the merged pool;
///  - single: floor(f*N_d) from one dataset.
/// Both mixing strategies therefore land on the same final size.
Subset sample_subset(const Corpus& corpus, const MixPlan& plan);

std::vector<MixPlan> plan_grid(std::span<const Fraction> fractions,
                               std::span<const MixStrategy> strategies,
                               std::uint64_t seed);

void save_subset_manifest(const Subset& subset,
                          const std::filesystem::path& path,
                          std::string_view config_hash = {});
Subset load_subset_manifest(const std::filesystem::path& path);

}  // namespace erckit
