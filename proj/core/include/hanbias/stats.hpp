#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hanbias/bias.hpp"

namespace hanbias {

struct LexiconEntry {
  std::string word;
  double score = 0.0;  // human score in [1,5]
  std::string raw;     // score exactly as written, for mirrored exports
};

/// Human-scored lexicon loaded from a UTF-8 TSV (word<TAB>score). A first
/// line that does not parse as a data row is treated as a header.
class Lexicon {
 public:
  static Lexicon load(const std::string& path);

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  const LexiconEntry* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>>
      index_;
};

/// Sample Pearson correlation, 64-bit arithmetic. Requires n >= 3 and two
/// non-constant series.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Two-tailed significance of r under the Student-t statistic with n-2
/// degrees of freedom. |r| = 1 returns 0 by convention.
double p_value(double r, std::size_t n);

/// Seeded permutation test: shuffle y, count |r_perm| >= |r_observed|,
/// return (hits + 1) / (shuffles + 1).
double permutation_p_value(const std::vector<double>& x,
                           const std::vector<double>& y,
                           std::size_t shuffles = 10000,
                           std::uint64_t seed = 1);

namespace detail {
/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
/// absolute accuracy well under 1e-10.
double reg_incomplete_beta(double a, double b, double x);
}  // namespace detail

struct GroupStats {
  std::string name;
  std::size_t n = 0;
  std::optional<double> r;  // absent when the group is too small or constant
  std::optional<double> p;
};

struct CorrelationReport {
  double threshold = 3.0;
  GroupStats full, below, above;
  std::uint64_t excluded_neutral = 0;  // human score exactly at threshold
};

struct CorrelateOptions {
  double threshold = 3.0;
  bool permutation = false;  // p via permutation test instead of Student-t
  std::size_t shuffles = 10000;
  std::uint64_t seed = 1;
};

/// Inner-join bias scores with the lexicon and correlate the full set plus
/// the strict below/above-threshold splits. Throws when fewer than 3 words
/// join; an under-sized or degenerate subset only loses its r/p.
CorrelationReport correlate(const BiasTable& bias, const Lexicon& lexicon,
                            const CorrelateOptions& options = {});

struct ScatterRow {
  std::string word;
  std::int32_t word_id = -1;
  std::string human_raw;
  double human_score = 0.0;
  double bias_score = 0.0;
};

struct ScatterData {
  std::vector<ScatterRow> rows;          // sorted by word id
  std::vector<std::string> skipped;      // lexicon words without a bias score
};

ScatterData scatter_rows(const BiasTable& bias, const Lexicon& lexicon);

/// CSV "word,human_score,bias_score"; human scores mirror the lexicon text.
/// Skipped words go to `skipped_path` (one per line) when it is non-empty.
void save_scatter_csv(const ScatterData& data, const std::string& path,
                      const std::string& skipped_path = "");

/// CSV "group,n,r,p" at full precision, NA for groups without statistics,
/// then a comment line with the threshold and the excluded count.
void save_correlation_csv(const CorrelationReport& report,
                          const std::string& path);

/// Aligned text table; r and p shown to 3 decimals.
std::string format_correlation_report(const CorrelationReport& report);

}  // namespace hanbias
