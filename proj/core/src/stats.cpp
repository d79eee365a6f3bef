#include "hanbias/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hanbias/error.hpp"
#include "hanbias/rng.hpp"

namespace hanbias {
namespace {

bool parse_double(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

// True when the line holds "word<TAB>score"; fills the entry on success.
bool parse_lexicon_line(const std::string& line, LexiconEntry& entry) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos || tab == 0) return false;
  std::string_view score(line);
  score.remove_prefix(tab + 1);
  if (score.empty() || score.find('\t') != std::string_view::npos)
    return false;
  if (!parse_double(score, entry.score)) return false;
  entry.word = line.substr(0, tab);
  entry.raw = std::string(score);
  return true;
}

}  // namespace

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lexicon: " + path);

  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    LexiconEntry entry;
    if (!parse_lexicon_line(line, entry)) {
      if (line_no == 1) continue;  // header
      throw Error("malformed lexicon line " + std::to_string(line_no) +
                  " in " + path);
    }
    if (entry.score < 1.0 || entry.score > 5.0)
      throw Error("lexicon score " + entry.raw + " for '" + entry.word +
                  "' outside [1,5] on line " + std::to_string(line_no));
    if (!lex.index_.emplace(entry.word, lex.entries_.size()).second)
      throw Error("duplicate lexicon word '" + entry.word + "' on line " +
                  std::to_string(line_no));
    lex.entries_.push_back(std::move(entry));
  }
  if (lex.entries_.empty()) throw Error("lexicon is empty: " + path);
  return lex;
}

const LexiconEntry* Lexicon::find(std::string_view word) const {
  auto it = index_.find(word);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw Error("pearson: series lengths differ (" +
                std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                ")");
  const std::size_t n = x.size();
  if (n < 3)
    throw Error("pearson: need at least 3 points, got " + std::to_string(n));

  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= double(n);
  mean_y /= double(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw Error("pearson: constant series has no defined correlation");
  const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  return std::clamp(r, -1.0, 1.0);
}

namespace detail {
namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 1e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete beta: continued fraction did not converge");
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw Error("incomplete beta: parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw Error("incomplete beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  // Use the representation that converges fastest, switching at the mean.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

double p_value(double r, std::size_t n) {
  if (n < 3)
    throw Error("p_value: need n >= 3, got " + std::to_string(n));
  if (std::fabs(r) > 1.0 + 1e-12)
    throw Error("p_value: |r| exceeds 1");
  r = std::clamp(r, -1.0, 1.0);
  if (std::fabs(r) == 1.0) return 0.0;
  const double nu = double(n - 2);
  const double t2 = r * r * nu / (1.0 - r * r);
  return detail::reg_incomplete_beta(nu / 2.0, 0.5, nu / (nu + t2));
}

double permutation_p_value(const std::vector<double>& x,
                           const std::vector<double>& y, std::size_t shuffles,
                           std::uint64_t seed) {
  if (shuffles == 0) throw Error("permutation test needs at least 1 shuffle");
  const double observed = std::fabs(pearson(x, y));
  std::vector<double> perm = y;
  Rng rng(mix_seed(seed));
  std::size_t hits = 0;
  for (std::size_t s = 0; s < shuffles; ++s) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      const std::size_t j = std::size_t(rng.next_below(std::uint64_t(i + 1)));
      std::swap(perm[i], perm[j]);
    }
    if (std::fabs(pearson(x, perm)) >= observed - 1e-12) ++hits;
  }
  return double(hits + 1) / double(shuffles + 1);
}

namespace {

void fill_group(GroupStats& group, const std::vector<double>& human,
                const std::vector<double>& bias, const CorrelateOptions& opt,
                bool allow_degenerate) {
  group.n = human.size();
  if (group.n < 3) {
    if (!allow_degenerate)
      throw Error("correlation needs at least 3 joined words, got " +
                  std::to_string(group.n));
    return;
  }
  try {
    const double r = pearson(human, bias);
    group.r = r;
    group.p = opt.permutation
                  ? permutation_p_value(human, bias, opt.shuffles, opt.seed)
                  : p_value(r, group.n);
  } catch (const Error&) {
    if (!allow_degenerate) throw;
    group.r.reset();
    group.p.reset();
  }
}

}  // namespace

CorrelationReport correlate(const BiasTable& bias, const Lexicon& lexicon,
                            const CorrelateOptions& options) {
  if (!std::isfinite(options.threshold))
    throw Error("correlate: threshold must be finite");

  std::vector<double> full_h, full_b, below_h, below_b, above_h, above_b;
  CorrelationReport report;
  report.threshold = options.threshold;

  for (const auto& row : bias.rows) {
    const LexiconEntry* entry = lexicon.find(row.word);
    if (!entry) continue;
    full_h.push_back(entry->score);
    full_b.push_back(row.score);
    if (entry->score < options.threshold) {
      below_h.push_back(entry->score);
      below_b.push_back(row.score);
    } else if (entry->score > options.threshold) {
      above_h.push_back(entry->score);
      above_b.push_back(row.score);
    } else {
      ++report.excluded_neutral;
    }
  }

  report.full.name = "full";
  report.below.name = "below_threshold";
  report.above.name = "above_threshold";
  fill_group(report.full, full_h, full_b, options, /*allow_degenerate=*/false);
  fill_group(report.below, below_h, below_b, options, true);
  fill_group(report.above, above_h, above_b, options, true);
  return report;
}

ScatterData scatter_rows(const BiasTable& bias, const Lexicon& lexicon) {
  ScatterData data;
  WordSet joined;
  for (const auto& row : bias.rows) {
    const LexiconEntry* entry = lexicon.find(row.word);
    if (!entry) continue;
    data.rows.push_back(
        ScatterRow{row.word, row.word_id, entry->raw, entry->score, row.score});
    joined.insert(row.word);
  }
  if (data.rows.empty())
    throw Error("no lexicon word has a bias score; nothing to plot");
  std::sort(data.rows.begin(), data.rows.end(),
            [](const ScatterRow& a, const ScatterRow& b) {
              return a.word_id < b.word_id;
            });
  for (const auto& entry : lexicon.entries())
    if (!joined.count(entry.word)) data.skipped.push_back(entry.word);
  return data;
}

void save_scatter_csv(const ScatterData& data, const std::string& path,
                      const std::string& skipped_path) {
  std::string out = "word,human_score,bias_score\n";
  char buf[64];
  for (const auto& row : data.rows) {
    std::snprintf(buf, sizeof(buf), ",%.17g\n", row.bias_score);
    out += row.word;
    out += ',';
    out += row.human_raw;
    out += buf;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << out).flush())
    throw Error("cannot write scatter csv: " + path);

  if (skipped_path.empty()) return;
  std::string side;
  for (const auto& word : data.skipped) {
    side += word;
    side += '\n';
  }
  std::ofstream sfile(skipped_path, std::ios::binary | std::ios::trunc);
  if (!sfile || !(sfile << side).flush())
    throw Error("cannot write skipped-word list: " + skipped_path);
}

void save_correlation_csv(const CorrelationReport& report,
                          const std::string& path) {
  auto row = [](const GroupStats& g) {
    char buf[160];
    if (g.r) {
      std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,%.17g\n", g.name.c_str(),
                    g.n, *g.r, *g.p);
    } else {
      std::snprintf(buf, sizeof(buf), "%s,%zu,NA,NA\n", g.name.c_str(), g.n);
    }
    return std::string(buf);
  };
  std::string out = "group,n,r,p\n";
  out += row(report.full);
  out += row(report.below);
  out += row(report.above);
  char tail[96];
  std::snprintf(tail, sizeof(tail), "# threshold=%g excluded_neutral=%llu\n",
                report.threshold,
                (unsigned long long)report.excluded_neutral);
  out += tail;
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << out).flush())
    throw Error("cannot write correlation csv: " + path);
}

std::string format_correlation_report(const CorrelationReport& report) {
  auto row = [](const GroupStats& g) {
    char buf[120];
    if (g.r) {
      std::snprintf(buf, sizeof(buf), "%-16s %6zu %8.3f %8.3f\n",
                    g.name.c_str(), g.n, *g.r, *g.p);
    } else {
      std::snprintf(buf, sizeof(buf), "%-16s %6zu %8s %8s\n", g.name.c_str(),
                    g.n, "--", "--");
    }
    return std::string(buf);
  };
  char head[120];
  std::snprintf(head, sizeof(head), "%-16s %6s %8s %8s\n", "group", "n", "r",
                "p");
  std::string out = head;
  out += row(report.full);
  out += row(report.below);
  out += row(report.above);
  char tail[96];
  std::snprintf(tail, sizeof(tail), "at threshold %g (excluded): %llu\n",
                report.threshold,
                (unsigned long long)report.excluded_neutral);
  out += tail;
  return out;
}

}  // namespace hanbias
