#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hanbias/embedding.hpp"

namespace hanbias {

enum class QuestionKind : std::uint8_t { kMorphological, kSemantic };

std::string_view kind_name(QuestionKind kind);

/// "a is to b as c is to expected", tagged with the section it came from.
struct AnalogyQuestion {
  std::string a, b, c, expected;
  std::string category;
  QuestionKind kind = QuestionKind::kMorphological;
};

/// Question file: sections headed ": <kind>/<category>" followed by lines of
/// four whitespace-separated words.
std::vector<AnalogyQuestion> load_questions(const std::string& path);

struct KindResult {
  std::uint64_t total = 0;
  std::uint64_t covered = 0;
  std::uint64_t correct = 0;
  /// correct/covered (micro) or the mean of category accuracies (macro);
  /// absent when no question is covered.
  std::optional<double> accuracy;
};

struct CategoryResult {
  std::string category;
  QuestionKind kind = QuestionKind::kMorphological;
  std::uint64_t total = 0;
  std::uint64_t covered = 0;
  std::uint64_t correct = 0;
};

struct AnalogyReport {
  std::vector<CategoryResult> categories;
  KindResult morphological;
  KindResult semantic;
  KindResult overall;  // pooled over all questions
  bool macro_averaged = false;

  double coverage() const {
    return overall.total ? double(overall.covered) / double(overall.total)
                         : 0.0;
  }
};

/// 3CosAdd: argmax over the vocabulary minus {a,b,c} of
/// cosine(rep(w), rep(b) - rep(a) + rep(c)); ties break toward the smaller
/// word id. Returns nullopt only for a degenerate zero target. Throws when a
/// query word is out of vocabulary.
std::optional<std::string> solve(const EmbeddingModel& model,
                                 const std::string& a, const std::string& b,
                                 const std::string& c,
                                 Lookup lookup = Lookup::kComposed);

/// Questions with any of their four words out of vocabulary count as
/// uncovered and stay out of the accuracy denominator.
AnalogyReport evaluate(const EmbeddingModel& model,
                       const std::vector<AnalogyQuestion>& questions,
                       Lookup lookup = Lookup::kComposed, bool macro = false);

/// CSV rows "kind,covered,total,correct,accuracy" for morphological,
/// semantic, overall; accuracy prints NA when undefined.
void save_analogy_csv(const AnalogyReport& report, const std::string& path);

/// Aligned text table; accuracies are shown as acc x 100.
std::string format_analogy_report(const AnalogyReport& report);

}  // namespace hanbias
