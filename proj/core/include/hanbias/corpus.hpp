#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace hanbias {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

using WordSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

/// Tokenized corpus: one token sequence per document. Tokens never contain
/// whitespace; empty documents are dropped by the builders below.
struct TokenStream {
  std::vector<std::vector<std::string>> documents;

  std::uint64_t token_count() const {
    std::uint64_t n = 0;
    for (const auto& d : documents) n += d.size();
    return n;
  }
};

/// Removes every span from '<' to the first following '>' (inclusive). An
/// unclosed '<' is removed to end of input. All other bytes pass through.
std::string strip_markup(std::string_view text);

/// Splits on runs of Unicode whitespace; empty pieces are dropped.
std::vector<std::string> tokenize_pretokenized(std::string_view line);

/// Forward maximum matching: at each position emit the longest lexicon word
/// that is a prefix of the remainder, falling back to the single character.
/// Concatenating the output reproduces the input exactly.
std::vector<std::string> segment_greedy(std::string_view text,
                                        const WordSet& lexicon);

/// Reads a corpus file (one document per line, whitespace-separated tokens).
TokenStream load_corpus_file(const std::string& path);

/// One document per line, tokens separated by single spaces.
void save_corpus_file(const TokenStream& stream, const std::string& path);

/// One word per line (surrounding whitespace ignored, blank lines skipped).
std::vector<std::string> load_wordlist(const std::string& path);

WordSet load_word_set(const std::string& path);

}  // namespace hanbias
