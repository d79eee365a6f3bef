#include "hanbias/corpus.hpp"

#include <algorithm>
#include <fstream>

#include "hanbias/error.hpp"
#include "hanbias/utf8.hpp"

namespace hanbias {

std::string strip_markup(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '<') {
      std::size_t close = text.find('>', i + 1);
      if (close == std::string_view::npos) break;  // unclosed tag: drop rest
      i = close + 1;
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

std::vector<std::string> tokenize_pretokenized(std::string_view line) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < line.size()) {
    std::size_t start = pos;
    char32_t cp = utf8::decode_next(line, pos);
    if (utf8::is_whitespace(cp)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.append(line.substr(start, pos - start));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> segment_greedy(std::string_view text,
                                        const WordSet& lexicon) {
  if (lexicon.empty()) throw Error("segment_greedy: empty lexicon");
  std::size_t max_word_cps = 1;
  for (const auto& w : lexicon)
    max_word_cps = std::max(max_word_cps, utf8::count_code_points(w));

  const auto offsets = utf8::code_point_offsets(text);
  const std::size_t n_cps = offsets.size() - 1;

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < n_cps) {
    std::size_t best_len = 1;
    for (std::size_t len = std::min(max_word_cps, n_cps - i); len > 1; --len) {
      std::string_view cand =
          text.substr(offsets[i], offsets[i + len] - offsets[i]);
      if (lexicon.contains(cand)) {
        best_len = len;
        break;
      }
    }
    // Single code points match the lexicon or fall back to themselves; either
    // way the emitted token is the same.
    tokens.emplace_back(
        text.substr(offsets[i], offsets[i + best_len] - offsets[i]));
    i += best_len;
  }
  return tokens;
}

TokenStream load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  TokenStream stream;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize_pretokenized(line);
    if (!tokens.empty()) stream.documents.push_back(std::move(tokens));
  }
  return stream;
}

void save_corpus_file(const TokenStream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file: " + path);
  for (const auto& doc : stream.documents) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (i) out << ' ';
      out << doc[i];
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

std::vector<std::string> load_wordlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word list: " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize_pretokenized(line);
    if (!tokens.empty()) words.push_back(std::move(tokens.front()));
  }
  return words;
}

WordSet load_word_set(const std::string& path) {
  WordSet set;
  for (auto& w : load_wordlist(path)) set.insert(std::move(w));
  return set;
}

}  // namespace hanbias
