#include "hanbias/vocabulary.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "hanbias/error.hpp"
#include "hanbias/utf8.hpp"

namespace hanbias {

Vocabulary Vocabulary::build(const TokenStream& stream,
                             std::uint64_t min_count) {
  if (min_count < 1) throw Error("build_vocabulary: min_count must be >= 1");

  std::unordered_map<std::string, std::uint64_t, StringHash, std::equal_to<>>
      counts;
  std::uint64_t total = 0;
  for (const auto& doc : stream.documents) {
    for (const auto& token : doc) {
      ++counts[token];
      ++total;
    }
  }

  std::vector<VocabEntry> entries;
  entries.reserve(counts.size());
  for (auto& [word, count] : counts) {
    if (count >= min_count) entries.push_back({word, count});
  }
  if (entries.empty())
    throw Error("build_vocabulary: no word reaches min_count=" +
                std::to_string(min_count));

  std::sort(entries.begin(), entries.end(),
            [](const VocabEntry& a, const VocabEntry& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.word < b.word;
            });

  return from_entries(std::move(entries), total, min_count);
}

Vocabulary Vocabulary::from_entries(std::vector<VocabEntry> entries,
                                    std::uint64_t total_tokens,
                                    std::uint64_t min_count,
                                    bool enforce_order) {
  Vocabulary v;
  v.entries_ = std::move(entries);
  v.total_tokens_ = total_tokens;
  v.min_count_ = min_count;
  v.index_.reserve(v.entries_.size());
  for (std::size_t i = 0; i < v.entries_.size(); ++i) {
    const auto& e = v.entries_[i];
    if (e.word.empty()) throw Error("vocabulary: empty word");
    if (enforce_order && i > 0) {
      const auto& prev = v.entries_[i - 1];
      if (prev.count < e.count ||
          (prev.count == e.count && prev.word >= e.word))
        throw Error("vocabulary: entries not in (count desc, word asc) order");
    }
    if (!v.index_.emplace(e.word, std::int32_t(i)).second)
      throw Error("vocabulary: duplicate word '" + e.word + "'");
  }
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocabulary file: " + path);
  out << "#total_tokens=" << total_tokens_ << " min_count=" << min_count_
      << '\n';
  for (const auto& e : entries_) out << e.word << '\t' << e.count << '\n';
  if (!out) throw Error("write failed: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error("vocabulary file is empty: " + path);

  std::uint64_t total = 0, min_count = 0;
  if (std::sscanf(line.c_str(), "#total_tokens=%llu min_count=%llu",
                  reinterpret_cast<unsigned long long*>(&total),
                  reinterpret_cast<unsigned long long*>(&min_count)) != 2)
    throw Error("vocabulary file: bad header line: " + line);

  std::vector<VocabEntry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw Error("vocabulary file: malformed line " + std::to_string(line_no));
    std::uint64_t count = 0;
    auto [ptr, ec] = std::from_chars(line.data() + tab + 1,
                                     line.data() + line.size(), count);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw Error("vocabulary file: bad count on line " +
                  std::to_string(line_no));
    entries.push_back({line.substr(0, tab), count});
  }
  if (entries.empty()) throw Error("vocabulary file has no entries: " + path);
  return from_entries(std::move(entries), total, min_count);
}

CharInventory CharInventory::extract(const Vocabulary& vocab) {
  if (vocab.empty()) throw Error("extract_characters: empty vocabulary");

  // Aggregate counts per character, one increment of the word's count per
  // character occurrence.
  std::map<char32_t, std::uint64_t> counts;
  std::vector<std::vector<char32_t>> word_cps(vocab.size());
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    const auto& e = vocab.entry(std::int32_t(w));
    word_cps[w] = utf8::decode(e.word);
    for (char32_t cp : word_cps[w]) counts[cp] += e.count;
  }

  std::vector<CharEntry> chars;
  chars.reserve(counts.size());
  for (auto [cp, count] : counts) chars.push_back({cp, count});
  std::sort(chars.begin(), chars.end(),
            [](const CharEntry& a, const CharEntry& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.ch < b.ch;
            });

  std::unordered_map<char32_t, std::int32_t> index;
  index.reserve(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i)
    index.emplace(chars[i].ch, std::int32_t(i));

  std::vector<std::vector<std::int32_t>> per_word(vocab.size());
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    per_word[w].reserve(word_cps[w].size());
    for (char32_t cp : word_cps[w]) per_word[w].push_back(index.at(cp));
  }

  CharInventory inv;
  inv.chars_ = std::move(chars);
  inv.index_ = std::move(index);
  inv.per_word_chars_ = std::move(per_word);
  return inv;
}

CharInventory CharInventory::from_parts(
    std::vector<CharEntry> chars,
    std::vector<std::vector<std::int32_t>> per_word_chars) {
  CharInventory inv;
  inv.chars_ = std::move(chars);
  for (std::size_t i = 0; i < inv.chars_.size(); ++i)
    if (!inv.index_.emplace(inv.chars_[i].ch, std::int32_t(i)).second)
      throw Error("char inventory: duplicate character");
  for (const auto& list : per_word_chars)
    for (std::int32_t id : list)
      if (id < 0 || std::size_t(id) >= inv.chars_.size())
        throw Error("char inventory: character id out of range");
  inv.per_word_chars_ = std::move(per_word_chars);
  return inv;
}

CorpusStats corpus_stats(const TokenStream& stream, const Vocabulary* vocab) {
  CorpusStats s;
  s.token_count = vocab ? vocab->total_tokens() : stream.token_count();
  s.unique_word_count = vocab ? vocab->size() : 0;
  return s;
}

}  // namespace hanbias
