#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "hanbias/vocabulary.hpp"

namespace hanbias {

enum class Mode : std::uint8_t { kCbow = 0, kCwe = 1 };

std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

/// Which representation a lookup returns for a CWE model: the word/character
/// composition, or the raw word vector. CBOW models always return the word
/// vector.
enum class Lookup : std::uint8_t { kComposed = 0, kWordOnly = 1 };

/// Trained parameters: per-word input vectors, per-character vectors (CWE
/// only), and per-word output (context-prediction) vectors. Row-major float
/// matrices with one row per vocabulary/inventory entry. Immutable outside
/// the trainer.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;

  /// Fresh model ready for training: word/char rows uniform in
  /// [-0.5/dim, 0.5/dim] from `seed`, output rows zero.
  static EmbeddingModel init(Mode mode, std::int32_t dim, Vocabulary vocab,
                             CharInventory chars, std::uint64_t seed);

  Mode mode() const { return mode_; }
  std::int32_t dim() const { return dim_; }
  const Vocabulary& vocab() const { return vocab_; }
  const CharInventory& chars() const { return chars_; }
  const std::unordered_set<std::int32_t>& compose_optout() const {
    return compose_optout_;
  }
  void set_compose_optout(std::unordered_set<std::int32_t> ids) {
    compose_optout_ = std::move(ids);
  }

  std::span<const float> word_row(std::int32_t id) const {
    return {word_vectors_.data() + std::size_t(id) * dim_, std::size_t(dim_)};
  }
  std::span<const float> char_row(std::int32_t id) const {
    return {char_vectors_.data() + std::size_t(id) * dim_, std::size_t(dim_)};
  }
  std::span<const float> output_row(std::int32_t id) const {
    return {output_vectors_.data() + std::size_t(id) * dim_,
            std::size_t(dim_)};
  }

  std::span<float> mutable_words() { return word_vectors_; }
  std::span<float> mutable_chars() { return char_vectors_; }
  std::span<float> mutable_outputs() { return output_vectors_; }

  bool all_finite() const;

  static EmbeddingModel from_parts(Mode mode, std::int32_t dim,
                                   Vocabulary vocab, CharInventory chars,
                                   std::vector<float> word_vectors,
                                   std::vector<float> char_vectors,
                                   std::vector<float> output_vectors);

 private:
  Mode mode_ = Mode::kCbow;
  std::int32_t dim_ = 0;
  Vocabulary vocab_;
  CharInventory chars_;  // empty in CBOW mode
  std::vector<float> word_vectors_;
  std::vector<float> char_vectors_;
  std::vector<float> output_vectors_;
  std::unordered_set<std::int32_t> compose_optout_;
};

/// x_j = 1/2 (w_j + (1/N_j) sum_k c_k) for CWE; the word vector unchanged for
/// CBOW and for opted-out words. Throws on an invalid word id.
std::vector<double> compose(const EmbeddingModel& model, std::int32_t word_id);

/// The representation fed to bias scoring and analogy queries.
std::vector<double> word_representation(const EmbeddingModel& model,
                                        std::int32_t word_id,
                                        Lookup lookup = Lookup::kComposed);

double cosine(std::span<const double> u, std::span<const double> v);

struct Neighbor {
  std::int32_t word_id;
  double similarity;
};

/// Top-k vocabulary words by cosine against `query`, skipping ids in
/// `exclude`. Ties break toward the smaller word id. Words whose
/// representation has zero norm are never returned.
std::vector<Neighbor> nearest(const EmbeddingModel& model,
                              std::span<const double> query, std::size_t k,
                              const std::unordered_set<std::int32_t>& exclude,
                              Lookup lookup = Lookup::kComposed);

/// Writes `<base>.words.vec` (+ `<base>.chars.vec` in CWE mode) in the
/// conventional text layout and `<base>.bin` losslessly.
void save_model(const EmbeddingModel& model, const std::string& base_path);

void save_model_binary(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model_binary(const std::string& path);

void save_vectors_text(std::span<const float> matrix, std::int32_t dim,
                       const std::vector<std::string>& row_names,
                       const std::string& path);

/// Loads a text .vec file (and optional sibling chars file) into a model with
/// a synthesized vocabulary (unit counts) and zero output vectors.
EmbeddingModel load_model_text(const std::string& words_path,
                               const std::string& chars_path = "");

/// Sniffs the format: binary model files start with the magic bytes.
EmbeddingModel load_model(const std::string& path);

}  // namespace hanbias
