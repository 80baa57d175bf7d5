#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "erckit/corpus.hpp"

namespace erckit {

/// Speaker-stripped, embedded member of the retrieval domain base.
struct DomainEntry {
  int id = 0;
  std::string text;
  std::string label;
  std::string dataset;  // source address, used to exclude the query itself
  std::string conv_id;
  int index = 0;
  std::vector<float> vector;  // unit L2 norm
};

struct RetrievalIndex {
  std::vector<DomainEntry> entries;
  int dim = 0;
  std::string embedder_id;
  std::map<std::string, long> label_counts;  // equal per label after build

  void save(const std::filesystem::path& path,
            std::string_view config_hash = {}) const;
  static RetrievalIndex load(const std::filesystem::path& path);
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<float> embed(std::string_view text) const = 0;
  virtual int dim() const = 0;
  virtual std::string id() const = 0;
};

/// Default embedder: feature-hashed word unigram+bigram counts, signed
/// hashing, L2 normalized. Deterministic and dependency free; texts with no
/// tokens map to the first basis direction.
class HashedNgramEmbedder final : public Embedder {
 public:
  explicit HashedNgramEmbedder(int dim = 256);
  std::vector<float> embed(std::string_view text) const override;
  int dim() const override { return dim_; }
  std::string id() const override;

 private:
  int dim_;
};

/// Looks vectors up in a pre-dumped file keyed by the 16-hex-digit FNV-1a64
/// of the text (see README for the dump format). Missing keys are errors.
class VectorFileEmbedder final : public Embedder {
 public:
  static VectorFileEmbedder load(const std::filesystem::path& path);
  std::vector<float> embed(std::string_view text) const override;
  int dim() const override { return dim_; }
  std::string id() const override { return id_; }

 private:
  int dim_ = 0;
  std::string id_;
  std::map<std::string, std::vector<float>> vectors_;
};

/// POSTs {"text": ...} to `endpoint` and expects {"vector": [...]} back.
class HttpEmbedder final : public Embedder {
 public:
  HttpEmbedder(std::string endpoint, int dim, int timeout_ms = 30000);
  std::vector<float> embed(std::string_view text) const override;
  int dim() const override { return dim_; }
  std::string id() const override;

 private:
  std::string endpoint_;
  int dim_;
  int timeout_ms_;
};

double cosine(std::span<const float> a, std::span<const float> b);
void l2_normalize(std::vector<float>& v);

/// Case-insensitive whole-word removal of speaker names (replaced by
/// "someone") so domain entries carry no speaker identity.
std::string strip_speakers(std::string_view text,
                           std::span<const std::string> names);

/// Balanced domain base over the train split: every label downsampled to the
/// minimum class count (seeded, without replacement), texts speaker-stripped,
/// vectors embedded and normalized.
RetrievalIndex build_domain_base(const Corpus& corpus, const Embedder& embedder,
                                 std::uint64_t seed,
                                 std::span<const std::string> strip_names);
RetrievalIndex build_domain_base(const Corpus& corpus, const Embedder& embedder,
                                 std::uint64_t seed);

enum class Pairing { SameLabel, AllLabels };

std::string_view to_string(Pairing pairing);
Pairing pairing_from_string(std::string_view name);

struct QueryKey {
  std::string dataset;
  std::string conv_id;
  int index = 0;
};

/// Argmax cosine over the admissible subset; ties break toward the lowest
/// entry id; the query's own entry is never returned. K beyond 1 exists for
/// the harness only.
std::vector<const DomainEntry*> retrieve_top_k(
    std::span<const float> query_vector, const RetrievalIndex& index,
    Pairing pairing, const std::string& gold_label, const QueryKey* self,
    int k);

const DomainEntry& retrieve_top1(std::span<const float> query_vector,
                                 const RetrievalIndex& index, Pairing pairing,
                                 const std::string& gold_label,
                                 const QueryKey* self = nullptr);

/// Convenience wrapper embedding the bare utterance text.
const DomainEntry& retrieve_top1(const Utterance& query,
                                 const std::string& query_dataset,
                                 const RetrievalIndex& index,
                                 const Embedder& embedder, Pairing pairing);

}  // namespace erckit
