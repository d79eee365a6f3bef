#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hanbias/embedding.hpp"
#include "hanbias/rng.hpp"
#include "hanbias/train_kernel.hpp"
#include "hanbias/vocabulary.hpp"

namespace hanbias {

struct TrainConfig {
  std::int32_t dim = 300;
  std::int32_t window = 5;
  std::int32_t epochs = 5;
  std::uint64_t min_count = 8;
  std::int32_t threads = 12;
  std::int32_t negatives = 5;
  double initial_lr = 0.025;
  double subsample_t = 0.0;  // 0 disables frequent-word subsampling
  std::uint64_t seed = 1;
  /// Words trained without character composition (CWE mode only).
  std::vector<std::string> compose_optout;

  void validate() const;
};

/// Unigram distribution with counts raised to `power`, sampled in O(1) by
/// Walker's alias method. Probabilities are exact, not quantized.
class UnigramTable {
 public:
  explicit UnigramTable(const Vocabulary& vocab, double power = 0.75);

  std::int32_t sample(Rng& rng) const;

  /// Redraws while the sample equals `forbidden`. Throws for a one-word
  /// vocabulary, which cannot exclude anything.
  std::int32_t sample_excluding(Rng& rng, std::int32_t forbidden) const;

  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::int32_t> alias_;
};

/// Linear decay initial_lr * (1 - progress) with a floor of
/// initial_lr * 1e-4. progress must lie in [0, 1].
double lr_schedule(double progress, double initial_lr);

struct TrainMetrics {
  double loss_estimate = 0.0;   // mean sampled negative-sampling loss
  double tokens_per_sec = 0.0;
  std::uint64_t trained_tokens = 0;  // in-vocabulary tokens x epochs
};

/// Trains a model on `stream` with asynchronous (hogwild) SGD across up to
/// config.threads workers. Out-of-vocabulary tokens are skipped. With one
/// thread and a fixed seed the result is bit-reproducible.
EmbeddingModel train(const TokenStream& stream, Vocabulary vocab,
                     CharInventory chars, const TrainConfig& config, Mode mode,
                     TrainMetrics* metrics = nullptr);

/// Average of the context words' training-side representations (always the
/// composed form for CWE), at double precision.
std::vector<double> hidden_vector(const EmbeddingModel& model,
                                  std::span<const std::int32_t> context);

/// Applies one update to the model in place (float path of the templated
/// kernel).
void sgd_step(EmbeddingModel& model, const TrainingStep& step);

}  // namespace hanbias
