#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hanbias/corpus.hpp"

namespace hanbias {

struct VocabEntry {
  std::string word;
  std::uint64_t count = 0;
};

/// Word -> dense id map with occurrence counts. Ids start at 0 and are
/// assigned in descending count order, ties broken by byte-wise lexicographic
/// order of the word, so identical streams always yield identical tables.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Counts every token of `stream`, then keeps words with
  /// count >= min_count. Throws if nothing survives.
  static Vocabulary build(const TokenStream& stream, std::uint64_t min_count);

  std::optional<std::int32_t> id_of(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const VocabEntry& entry(std::int32_t id) const { return entries_[id]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<VocabEntry>& entries() const { return entries_; }

  /// All corpus tokens counted before the min_count filter.
  std::uint64_t total_tokens() const { return total_tokens_; }
  std::uint64_t min_count() const { return min_count_; }

  /// Text format: header "#total_tokens=<n> min_count=<m>", then one
  /// "word<TAB>count" line per word in id order.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  /// Rebuilds a vocabulary from entries already in id order (deserialization
  /// and synthetic models). `enforce_order` validates the id-order invariant;
  /// text .vec imports carry an external row order and skip it.
  static Vocabulary from_entries(std::vector<VocabEntry> entries,
                                 std::uint64_t total_tokens,
                                 std::uint64_t min_count,
                                 bool enforce_order = true);

 private:
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, std::int32_t, StringHash, std::equal_to<>>
      index_;
  std::uint64_t total_tokens_ = 0;
  std::uint64_t min_count_ = 1;
};

struct CharEntry {
  char32_t ch = 0;
  std::uint64_t count = 0;
};

/// Character inventory derived from a vocabulary: every character of every
/// retained word, with counts aggregated over word occurrences, plus each
/// word's ordered character-id list.
class CharInventory {
 public:
  CharInventory() = default;

  static CharInventory extract(const Vocabulary& vocab);

  std::size_t size() const { return chars_.size(); }
  bool empty() const { return chars_.empty(); }
  const CharEntry& entry(std::int32_t id) const { return chars_[id]; }
  const std::vector<CharEntry>& entries() const { return chars_; }
  std::optional<std::int32_t> id_of(char32_t ch) const {
    auto it = index_.find(ch);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Ordered character ids of word `word_id`; length equals the word's
  /// number of Unicode scalar values.
  const std::vector<std::int32_t>& word_chars(std::int32_t word_id) const {
    return per_word_chars_[word_id];
  }
  const std::vector<std::vector<std::int32_t>>& per_word_chars() const {
    return per_word_chars_;
  }

  static CharInventory from_parts(
      std::vector<CharEntry> chars,
      std::vector<std::vector<std::int32_t>> per_word_chars);

 private:
  std::vector<CharEntry> chars_;
  std::unordered_map<char32_t, std::int32_t> index_;
  std::vector<std::vector<std::int32_t>> per_word_chars_;
};

struct CorpusStats {
  std::uint64_t token_count = 0;
  std::uint64_t unique_word_count = 0;
};

/// Pass a null vocabulary for stats-only mode (e.g. when the min_count filter
/// left nothing); the unique-word count is then 0.
CorpusStats corpus_stats(const TokenStream& stream, const Vocabulary* vocab);

}  // namespace hanbias
