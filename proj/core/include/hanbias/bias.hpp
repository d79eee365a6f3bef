#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hanbias/embedding.hpp"

namespace hanbias {

/// Direction rep(he) - rep(she) onto which words are projected. Positive
/// projections lean male, negative female.
struct GenderDirection {
  std::vector<double> vector;
  std::string he_word;
  std::string she_word;
};

struct BiasRow {
  std::string word;
  std::int32_t word_id = -1;
  double score = 0.0;
};

struct BiasSummary {
  std::uint64_t n_positive = 0;
  std::uint64_t n_negative = 0;
  std::uint64_t n_zero = 0;
  double mean = 0.0;
};

/// Per-word projection scores plus summary statistics. `missing` keeps the
/// out-of-vocabulary inputs: rows.size() + missing.size() equals the word
/// list length.
struct BiasTable {
  std::vector<BiasRow> rows;
  std::vector<std::string> missing;
  BiasSummary summary;
};

inline constexpr const char* kDefaultHeWord = "\xe4\xbb\x96";   // 他
inline constexpr const char* kDefaultSheWord = "\xe5\xa5\xb9";  // 她

/// d = rep(he) - rep(she); with `normalize` each representation is scaled to
/// unit L2 norm first. Throws when a pronoun is out of vocabulary or the
/// direction is zero.
GenderDirection gender_direction(const EmbeddingModel& model,
                                 const std::string& he_word,
                                 const std::string& she_word, bool normalize,
                                 Lookup lookup = Lookup::kComposed);

/// Projection of the (optionally unit-normalized) representation on the
/// direction.
double bias_score(const EmbeddingModel& model, std::int32_t word_id,
                  const GenderDirection& direction, bool normalize,
                  Lookup lookup = Lookup::kComposed);

BiasTable bias_table(const EmbeddingModel& model,
                     const std::vector<std::string>& wordlist,
                     const GenderDirection& direction, bool normalize,
                     Lookup lookup = Lookup::kComposed);

BiasSummary summarize(const std::vector<BiasRow>& rows);

/// CSV: header "word,score", one row per word with 5-decimal scores, then a
/// trailing "# pos=...,neg=...,zero=...,mean=..." summary line. Missing words
/// are listed as "# oov=<word>" lines.
void save_bias_csv(const BiasTable& table, const std::string& path);
BiasTable load_bias_csv(const std::string& path);

}  // namespace hanbias
