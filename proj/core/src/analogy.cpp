#include "hanbias/analogy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hanbias/error.hpp"

namespace hanbias {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(std::move(tok));
  return out;
}

// Per-word representations with reciprocal norms, so each query is one pass
// of dot products. inv_norm < 0 marks a zero vector that can never win.
struct ReprMatrix {
  std::size_t dim = 0;
  std::vector<double> values;    // vocab x dim
  std::vector<double> inv_norm;  // vocab
};

ReprMatrix build_reprs(const EmbeddingModel& model, Lookup lookup) {
  ReprMatrix m;
  m.dim = model.dim();
  const std::size_t n = model.vocab().size();
  m.values.resize(n * m.dim);
  m.inv_norm.resize(n);
  for (std::size_t w = 0; w < n; ++w) {
    auto rep = word_representation(model, std::int32_t(w), lookup);
    double sq = 0.0;
    for (std::size_t j = 0; j < m.dim; ++j) {
      m.values[w * m.dim + j] = rep[j];
      sq += rep[j] * rep[j];
    }
    m.inv_norm[w] = sq > 0.0 ? 1.0 / std::sqrt(sq) : -1.0;
  }
  return m;
}

// Highest cosine against `target`, skipping the three query ids. The target
// norm is a common positive factor, so plain scaled dot products suffice.
std::int32_t argmax_cosine(const ReprMatrix& m, const std::vector<double>& target,
                           std::int32_t ex0, std::int32_t ex1, std::int32_t ex2) {
  std::int32_t best = -1;
  double best_score = 0.0;
  const std::size_t n = m.inv_norm.size();
  for (std::size_t w = 0; w < n; ++w) {
    const auto id = std::int32_t(w);
    if (id == ex0 || id == ex1 || id == ex2) continue;
    if (m.inv_norm[w] < 0.0) continue;
    double dot = 0.0;
    const double* row = &m.values[w * m.dim];
    for (std::size_t j = 0; j < m.dim; ++j) dot += row[j] * target[j];
    const double score = dot * m.inv_norm[w];
    if (best < 0 || score > best_score) {
      best = id;
      best_score = score;
    }
  }
  return best;
}

std::optional<std::string> solve_with(const EmbeddingModel& model,
                                      const ReprMatrix& m, std::int32_t ia,
                                      std::int32_t ib, std::int32_t ic) {
  std::vector<double> target(m.dim);
  double sq = 0.0;
  for (std::size_t j = 0; j < m.dim; ++j) {
    target[j] = m.values[std::size_t(ib) * m.dim + j] -
                m.values[std::size_t(ia) * m.dim + j] +
                m.values[std::size_t(ic) * m.dim + j];
    sq += target[j] * target[j];
  }
  if (sq == 0.0) return std::nullopt;
  const std::int32_t best = argmax_cosine(m, target, ia, ib, ic);
  if (best < 0) return std::nullopt;
  return model.vocab().entry(best).word;
}

std::optional<double> micro_accuracy(std::uint64_t correct,
                                     std::uint64_t covered) {
  if (covered == 0) return std::nullopt;
  return double(correct) / double(covered);
}

void finish_kind(KindResult& kind,
                 const std::vector<CategoryResult>& categories,
                 QuestionKind which, bool macro) {
  if (!macro) {
    kind.accuracy = micro_accuracy(kind.correct, kind.covered);
    return;
  }
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& cat : categories) {
    if (cat.kind != which || cat.covered == 0) continue;
    sum += double(cat.correct) / double(cat.covered);
    ++used;
  }
  kind.accuracy =
      used ? std::optional<double>(sum / double(used)) : std::nullopt;
}

void append_csv_row(std::string& out, std::string_view label,
                    const KindResult& k) {
  char buf[160];
  if (k.accuracy) {
    std::snprintf(buf, sizeof(buf), "%.*s,%llu,%llu,%llu,%.17g\n",
                  int(label.size()), label.data(),
                  (unsigned long long)k.covered, (unsigned long long)k.total,
                  (unsigned long long)k.correct, *k.accuracy);
  } else {
    std::snprintf(buf, sizeof(buf), "%.*s,%llu,%llu,%llu,NA\n",
                  int(label.size()), label.data(),
                  (unsigned long long)k.covered, (unsigned long long)k.total,
                  (unsigned long long)k.correct);
  }
  out += buf;
}

}  // namespace

std::string_view kind_name(QuestionKind kind) {
  return kind == QuestionKind::kMorphological ? "morphological" : "semantic";
}

std::vector<AnalogyQuestion> load_questions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open question file: " + path);

  std::vector<AnalogyQuestion> questions;
  std::string line;
  std::string category;
  QuestionKind kind = QuestionKind::kMorphological;
  bool in_section = false;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    if (tokens.front().front() == ':') {
      // ": kind/category" — the colon may be glued to the kind.
      std::string head;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) head += ' ';
        head += tokens[i];
      }
      head.erase(0, head.find_first_not_of(": \t"));
      const auto slash = head.find('/');
      if (slash == std::string::npos)
        throw Error("section header without kind/category on line " +
                    std::to_string(line_no) + " of " + path);
      const std::string kind_str = head.substr(0, slash);
      category = head.substr(slash + 1);
      if (kind_str == "morphological") {
        kind = QuestionKind::kMorphological;
      } else if (kind_str == "semantic") {
        kind = QuestionKind::kSemantic;
      } else {
        throw Error("unknown question kind '" + kind_str + "' on line " +
                    std::to_string(line_no) + " of " + path);
      }
      if (category.empty())
        throw Error("empty category name on line " + std::to_string(line_no) +
                    " of " + path);
      in_section = true;
      continue;
    }

    if (!in_section)
      throw Error("question before any section header on line " +
                  std::to_string(line_no) + " of " + path);
    if (tokens.size() != 4)
      throw Error("expected 4 words on line " + std::to_string(line_no) +
                  " of " + path + ", got " + std::to_string(tokens.size()));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j)
        if (tokens[i] == tokens[j])
          throw Error("repeated word '" + tokens[i] + "' on line " +
                      std::to_string(line_no) + " of " + path);
    AnalogyQuestion q;
    q.a = std::move(tokens[0]);
    q.b = std::move(tokens[1]);
    q.c = std::move(tokens[2]);
    q.expected = std::move(tokens[3]);
    q.category = category;
    q.kind = kind;
    questions.push_back(std::move(q));
  }
  return questions;
}

std::optional<std::string> solve(const EmbeddingModel& model,
                                 const std::string& a, const std::string& b,
                                 const std::string& c, Lookup lookup) {
  const auto ia = model.vocab().id_of(a);
  const auto ib = model.vocab().id_of(b);
  const auto ic = model.vocab().id_of(c);
  if (!ia) throw Error("word not in vocabulary: " + a);
  if (!ib) throw Error("word not in vocabulary: " + b);
  if (!ic) throw Error("word not in vocabulary: " + c);
  const ReprMatrix m = build_reprs(model, lookup);
  return solve_with(model, m, *ia, *ib, *ic);
}

AnalogyReport evaluate(const EmbeddingModel& model,
                       const std::vector<AnalogyQuestion>& questions,
                       Lookup lookup, bool macro) {
  const ReprMatrix m = build_reprs(model, lookup);

  AnalogyReport report;
  report.macro_averaged = macro;
  // Keyed by (kind, category) in first-seen order.
  std::map<std::pair<int, std::string>, std::size_t> index;

  for (const auto& q : questions) {
    const auto key = std::make_pair(int(q.kind), q.category);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, report.categories.size()).first;
      report.categories.push_back(CategoryResult{q.category, q.kind, 0, 0, 0});
    }
    auto& cat = report.categories[it->second];
    auto& kind = q.kind == QuestionKind::kMorphological ? report.morphological
                                                        : report.semantic;
    ++cat.total;
    ++kind.total;
    ++report.overall.total;

    const auto ia = model.vocab().id_of(q.a);
    const auto ib = model.vocab().id_of(q.b);
    const auto ic = model.vocab().id_of(q.c);
    const auto id = model.vocab().id_of(q.expected);
    if (!ia || !ib || !ic || !id) continue;

    ++cat.covered;
    ++kind.covered;
    ++report.overall.covered;

    const auto answer = solve_with(model, m, *ia, *ib, *ic);
    if (answer && *answer == q.expected) {
      ++cat.correct;
      ++kind.correct;
      ++report.overall.correct;
    }
  }

  finish_kind(report.morphological, report.categories,
              QuestionKind::kMorphological, macro);
  finish_kind(report.semantic, report.categories, QuestionKind::kSemantic,
              macro);
  report.overall.accuracy =
      micro_accuracy(report.overall.correct, report.overall.covered);
  return report;
}

void save_analogy_csv(const AnalogyReport& report, const std::string& path) {
  std::string out = "kind,covered,total,correct,accuracy\n";
  append_csv_row(out, "morphological", report.morphological);
  append_csv_row(out, "semantic", report.semantic);
  append_csv_row(out, "overall", report.overall);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << out).flush())
    throw Error("cannot write analogy csv: " + path);
}

std::string format_analogy_report(const AnalogyReport& report) {
  auto row = [](std::string_view label, const KindResult& k) {
    char buf[160];
    char acc[32];
    if (k.accuracy)
      std::snprintf(acc, sizeof(acc), "%6.2f", *k.accuracy * 100.0);
    else
      std::snprintf(acc, sizeof(acc), "%6s", "--");
    std::snprintf(buf, sizeof(buf), "%-14.*s %8llu %8llu %8llu %s\n",
                  int(label.size()), label.data(),
                  (unsigned long long)k.covered, (unsigned long long)k.total,
                  (unsigned long long)k.correct, acc);
    return std::string(buf);
  };
  std::string out;
  char head[160];
  std::snprintf(head, sizeof(head), "%-14s %8s %8s %8s %6s\n", "kind",
                "covered", "total", "correct",
                report.macro_averaged ? "macro" : "acc");
  out += head;
  out += row("morphological", report.morphological);
  out += row("semantic", report.semantic);
  out += row("overall", report.overall);
  return out;
}

}  // namespace hanbias
