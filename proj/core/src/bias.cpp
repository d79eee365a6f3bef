#include "hanbias/bias.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hanbias/error.hpp"

namespace hanbias {

namespace {

void normalize_l2(std::vector<double>& v, const std::string& what) {
  double norm_sq = 0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq == 0.0)
    throw Error("cannot normalize zero-norm representation of " + what);
  const double norm = std::sqrt(norm_sq);
  for (double& x : v) x /= norm;
}

std::vector<double> representation(const EmbeddingModel& model,
                                   std::int32_t id, bool normalize,
                                   Lookup lookup, const std::string& what) {
  auto rep = word_representation(model, id, lookup);
  if (normalize) normalize_l2(rep, what);
  return rep;
}

}  // namespace

GenderDirection gender_direction(const EmbeddingModel& model,
                                 const std::string& he_word,
                                 const std::string& she_word, bool normalize,
                                 Lookup lookup) {
  auto he_id = model.vocab().id_of(he_word);
  if (!he_id) throw Error("pronoun out of vocabulary: " + he_word);
  auto she_id = model.vocab().id_of(she_word);
  if (!she_id) throw Error("pronoun out of vocabulary: " + she_word);

  auto he = representation(model, *he_id, normalize, lookup, he_word);
  auto she = representation(model, *she_id, normalize, lookup, she_word);
  GenderDirection dir;
  dir.he_word = he_word;
  dir.she_word = she_word;
  dir.vector.resize(he.size());
  bool all_zero = true;
  for (std::size_t i = 0; i < he.size(); ++i) {
    dir.vector[i] = he[i] - she[i];
    if (dir.vector[i] != 0.0) all_zero = false;
  }
  if (all_zero)
    throw Error("zero gender direction: '" + he_word + "' and '" + she_word +
                "' have identical representations");
  return dir;
}

double bias_score(const EmbeddingModel& model, std::int32_t word_id,
                  const GenderDirection& direction, bool normalize,
                  Lookup lookup) {
  if (direction.vector.size() != std::size_t(model.dim()))
    throw Error("gender direction dimension does not match model");
  auto rep = representation(model, word_id, normalize, lookup,
                            model.vocab().entry(word_id).word);
  double score = 0;
  for (std::size_t i = 0; i < rep.size(); ++i)
    score += rep[i] * direction.vector[i];
  return score;
}

BiasSummary summarize(const std::vector<BiasRow>& rows) {
  BiasSummary s;
  double sum = 0;
  for (const auto& row : rows) {
    if (row.score > 0)
      ++s.n_positive;
    else if (row.score < 0)
      ++s.n_negative;
    else
      ++s.n_zero;  // exactly 0: totally neutral
    sum += row.score;
  }
  s.mean = rows.empty() ? 0.0 : sum / double(rows.size());
  return s;
}

BiasTable bias_table(const EmbeddingModel& model,
                     const std::vector<std::string>& wordlist,
                     const GenderDirection& direction, bool normalize,
                     Lookup lookup) {
  if (wordlist.empty()) throw Error("bias_table: empty word list");
  BiasTable table;
  for (const auto& word : wordlist) {
    auto id = model.vocab().id_of(word);
    if (!id) {
      table.missing.push_back(word);
      continue;
    }
    table.rows.push_back(
        {word, *id, bias_score(model, *id, direction, normalize, lookup)});
  }
  if (table.rows.empty())
    throw Error("bias_table: every word is out of vocabulary");
  table.summary = summarize(table.rows);
  return table;
}

void save_bias_csv(const BiasTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write bias csv: " + path);
  out << "word,score\n";
  char buf[64];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%.5f", row.score);
    out << row.word << ',' << buf << '\n';
  }
  for (const auto& word : table.missing) out << "# oov=" << word << '\n';
  const auto& s = table.summary;
  std::snprintf(buf, sizeof(buf), "%.5f", s.mean);
  out << "# pos=" << s.n_positive << ",neg=" << s.n_negative
      << ",zero=" << s.n_zero << ",mean=" << buf << '\n';
  if (!out) throw Error("write failed: " + path);
}

BiasTable load_bias_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open bias csv: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "word,score")
    throw Error("bias csv: missing 'word,score' header in " + path);

  BiasTable table;
  std::size_t line_no = 1;
  std::int32_t next_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# oov=", 0) == 0) {
      table.missing.push_back(line.substr(6));
      continue;
    }
    if (line[0] == '#') continue;  // summary line; recomputed below
    auto comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0)
      throw Error("bias csv: malformed line " + std::to_string(line_no));
    try {
      table.rows.push_back({line.substr(0, comma), next_id++,
                            std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      throw Error("bias csv: bad score on line " + std::to_string(line_no));
    }
  }
  if (table.rows.empty()) throw Error("bias csv has no rows: " + path);
  table.summary = summarize(table.rows);
  return table;
}

}  // namespace hanbias
