#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hanbias/analogy.hpp"
#include "hanbias/bias.hpp"
#include "hanbias/corpus.hpp"
#include "hanbias/embedding.hpp"
#include "hanbias/error.hpp"
#include "hanbias/stats.hpp"
#include "hanbias/svg.hpp"
#include "hanbias/trainer.hpp"
#include "hanbias/version.hpp"
#include "hanbias/vocabulary.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using hanbias::Error;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string single_line(std::string text) {
  for (auto& ch : text)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return text;
}

// "dir/name.csv" + ".wordonly" -> "dir/name.wordonly.csv"
std::string with_suffix(const std::string& path, const std::string& tag) {
  fs::path p(path);
  const std::string name = p.stem().string() + tag + p.extension().string();
  return (p.parent_path() / name).string();
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

hanbias::Lookup parse_lookup(const std::string& name) {
  if (name == "composed") return hanbias::Lookup::kComposed;
  if (name == "word") return hanbias::Lookup::kWordOnly;
  throw Error("unknown lookup '" + name + "' (expected composed or word)");
}

std::string_view lookup_name(hanbias::Lookup lookup) {
  return lookup == hanbias::Lookup::kComposed ? "composed" : "word";
}

// Reads a raw text file into a token stream, one document per line, with
// optional markup stripping and greedy segmentation of each whitespace run.
hanbias::TokenStream read_stream(const std::string& path, bool strip,
                                 bool segment,
                                 const std::string& lexicon_path) {
  hanbias::WordSet lexicon;
  if (segment) {
    if (lexicon_path.empty())
      throw Error("segmentation requires a lexicon wordlist");
    lexicon = hanbias::load_word_set(lexicon_path);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input: " + path);

  hanbias::TokenStream stream;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string text = strip ? hanbias::strip_markup(line) : line;
    std::vector<std::string> tokens;
    if (segment) {
      for (const auto& piece : hanbias::tokenize_pretokenized(text)) {
        auto parts = hanbias::segment_greedy(piece, lexicon);
        tokens.insert(tokens.end(), std::make_move_iterator(parts.begin()),
                      std::make_move_iterator(parts.end()));
      }
    } else {
      tokens = hanbias::tokenize_pretokenized(text);
    }
    if (!tokens.empty()) stream.documents.push_back(std::move(tokens));
  }
  return stream;
}

void print_config(const hanbias::TrainConfig& cfg, hanbias::Mode mode) {
  std::printf("dim=%d\n", cfg.dim);
  std::printf("window=%d\n", cfg.window);
  std::printf("epochs=%d\n", cfg.epochs);
  std::printf("min_count=%llu\n", (unsigned long long)cfg.min_count);
  std::printf("threads=%d\n", cfg.threads);
  std::printf("negatives=%d\n", cfg.negatives);
  std::printf("lr=%g\n", cfg.initial_lr);
  std::printf("subsample=%g\n", cfg.subsample_t);
  std::printf("seed=%llu\n", (unsigned long long)cfg.seed);
  std::printf("mode=%.*s\n", int(hanbias::mode_name(mode).size()),
              hanbias::mode_name(mode).data());
}

void add_config(hanbias::cli::Manifest& m, const hanbias::TrainConfig& cfg,
                hanbias::Mode mode) {
  m.set("config.dim", std::int64_t(cfg.dim));
  m.set("config.window", std::int64_t(cfg.window));
  m.set("config.epochs", std::int64_t(cfg.epochs));
  m.set("config.min_count", std::uint64_t(cfg.min_count));
  m.set("config.threads", std::int64_t(cfg.threads));
  m.set("config.negatives", std::int64_t(cfg.negatives));
  m.set("config.lr", cfg.initial_lr);
  m.set("config.subsample", cfg.subsample_t);
  m.set("config.seed", std::uint64_t(cfg.seed));
  m.set("config.mode", hanbias::mode_name(mode));
}

void print_bias_summary(const hanbias::BiasTable& table) {
  std::printf("pos=%llu neg=%llu zero=%llu mean=%.5f oov=%llu\n",
              (unsigned long long)table.summary.n_positive,
              (unsigned long long)table.summary.n_negative,
              (unsigned long long)table.summary.n_zero, table.summary.mean,
              (unsigned long long)table.missing.size());
}

// -------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string input, out_corpus = "corpus.txt", out_vocab = "vocab.txt";
  std::string lexicon, manifest;
  std::uint64_t min_count = 8;
  bool strip = false, segment = false;
};

void cmd_preprocess(const PreprocessArgs& a) {
  const auto t0 = Clock::now();
  const auto stream = read_stream(a.input, a.strip, a.segment, a.lexicon);
  const auto vocab = hanbias::Vocabulary::build(stream, a.min_count);
  ensure_parent(a.out_corpus);
  ensure_parent(a.out_vocab);
  hanbias::save_corpus_file(stream, a.out_corpus);
  vocab.save(a.out_vocab);
  const auto stats = hanbias::corpus_stats(stream, &vocab);
  std::printf("tokens=%llu unique=%llu\n",
              (unsigned long long)stats.token_count,
              (unsigned long long)stats.unique_word_count);

  if (a.manifest.empty()) return;
  hanbias::cli::Manifest m("preprocess");
  m.set("config.min_count", a.min_count);
  m.set("config.strip_markup", a.strip);
  m.set("config.segment", a.segment);
  m.add_input("raw", a.input);
  if (!a.lexicon.empty()) m.add_input("lexicon", a.lexicon);
  m.add_output("corpus", a.out_corpus);
  m.add_output("vocab", a.out_vocab);
  m.add_timing("preprocess", seconds_since(t0));
  ensure_parent(a.manifest);
  m.save(a.manifest);
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string corpus, vocab, out = "model", mode = "cbow", optout, manifest;
  hanbias::TrainConfig cfg;
  bool show_config = false;
};

void cmd_train(TrainArgs a) {
  const hanbias::Mode mode = hanbias::parse_mode(a.mode);
  if (a.show_config) {
    print_config(a.cfg, mode);
    return;
  }
  if (a.corpus.empty())
    throw Error("train requires --corpus (or --show-config)");

  const auto t0 = Clock::now();
  const auto stream = hanbias::load_corpus_file(a.corpus);
  auto vocab = a.vocab.empty()
                   ? hanbias::Vocabulary::build(stream, a.cfg.min_count)
                   : hanbias::Vocabulary::load(a.vocab);
  if (!a.vocab.empty()) a.cfg.min_count = vocab.min_count();
  auto chars = mode == hanbias::Mode::kCwe
                   ? hanbias::CharInventory::extract(vocab)
                   : hanbias::CharInventory{};
  if (!a.optout.empty()) a.cfg.compose_optout = hanbias::load_wordlist(a.optout);

  hanbias::TrainMetrics metrics;
  const auto model = hanbias::train(stream, std::move(vocab), std::move(chars),
                                    a.cfg, mode, &metrics);
  ensure_parent(a.out);
  hanbias::save_model(model, a.out);
  std::printf("loss=%.6f tokens_per_sec=%.0f\n", metrics.loss_estimate,
              metrics.tokens_per_sec);

  if (a.manifest.empty()) return;
  hanbias::cli::Manifest m("train");
  add_config(m, a.cfg, mode);
  m.add_input("corpus", a.corpus);
  if (!a.vocab.empty()) m.add_input("vocab", a.vocab);
  if (!a.optout.empty()) m.add_input("compose_optout", a.optout);
  m.add_output("words_vec", a.out + ".words.vec");
  if (mode == hanbias::Mode::kCwe)
    m.add_output("chars_vec", a.out + ".chars.vec");
  m.add_output("model_bin", a.out + ".bin");
  m.set("metrics.loss", metrics.loss_estimate);
  m.set("metrics.tokens_per_sec", metrics.tokens_per_sec);
  m.add_timing("train", seconds_since(t0));
  ensure_parent(a.manifest);
  m.save(a.manifest);
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string model, questions, out = "analogy.csv", lookup = "auto", manifest;
  bool macro = false;
};

// Which representations to evaluate: CWE models default to both.
std::vector<hanbias::Lookup> eval_lookups(const std::string& name,
                                          hanbias::Mode mode) {
  if (name == "auto")
    return mode == hanbias::Mode::kCwe
               ? std::vector{hanbias::Lookup::kComposed,
                             hanbias::Lookup::kWordOnly}
               : std::vector{hanbias::Lookup::kComposed};
  if (name == "both")
    return {hanbias::Lookup::kComposed, hanbias::Lookup::kWordOnly};
  return {parse_lookup(name)};
}

void cmd_eval(const EvalArgs& a) {
  const auto t0 = Clock::now();
  const auto model = hanbias::load_model(a.model);
  const auto questions = hanbias::load_questions(a.questions);
  if (questions.empty()) throw Error("no questions in " + a.questions);

  const auto lookups = eval_lookups(a.lookup, model.mode());
  std::vector<std::string> csv_paths;
  for (std::size_t i = 0; i < lookups.size(); ++i) {
    const auto report = hanbias::evaluate(model, questions, lookups[i], a.macro);
    std::printf("representation=%.*s coverage=%.4f\n",
                int(lookup_name(lookups[i]).size()),
                lookup_name(lookups[i]).data(), report.coverage());
    std::fputs(hanbias::format_analogy_report(report).c_str(), stdout);
    const std::string path =
        i == 0 ? a.out : with_suffix(a.out, ".wordonly");
    ensure_parent(path);
    hanbias::save_analogy_csv(report, path);
    csv_paths.push_back(path);
  }

  if (a.manifest.empty()) return;
  hanbias::cli::Manifest m("eval");
  m.set("config.macro", a.macro);
  m.set("config.lookup", a.lookup);
  m.add_input("model", a.model);
  m.add_input("questions", a.questions);
  m.add_output("report", csv_paths[0]);
  if (csv_paths.size() > 1) m.add_output("report_wordonly", csv_paths[1]);
  m.add_timing("eval", seconds_since(t0));
  ensure_parent(a.manifest);
  m.save(a.manifest);
}

// -------------------------------------------------------------------- bias

struct BiasArgs {
  std::string model, words, out = "bias.csv";
  std::string he = hanbias::kDefaultHeWord, she = hanbias::kDefaultSheWord;
  std::string lookup = "composed", manifest;
  bool no_normalize = false;
};

void cmd_bias(const BiasArgs& a) {
  const auto t0 = Clock::now();
  const auto model = hanbias::load_model(a.model);
  const auto wordlist = hanbias::load_wordlist(a.words);
  const auto lk = parse_lookup(a.lookup);
  const bool normalize = !a.no_normalize;
  const auto direction =
      hanbias::gender_direction(model, a.he, a.she, normalize, lk);
  const auto table =
      hanbias::bias_table(model, wordlist, direction, normalize, lk);
  ensure_parent(a.out);
  hanbias::save_bias_csv(table, a.out);
  print_bias_summary(table);

  if (a.manifest.empty()) return;
  hanbias::cli::Manifest m("bias");
  m.set("config.he", a.he);
  m.set("config.she", a.she);
  m.set("config.normalize", normalize);
  m.set("config.lookup", a.lookup);
  m.add_input("model", a.model);
  m.add_input("words", a.words);
  m.add_output("bias_csv", a.out);
  m.add_timing("bias", seconds_since(t0));
  ensure_parent(a.manifest);
  m.save(a.manifest);
}

// --------------------------------------------------------------- correlate

struct CorrelateArgs {
  std::string bias, lexicon, out = "correlation.csv", scatter = "scatter.csv";
  std::string svg, manifest;
  double threshold = 3.0;
  bool permutation = false;
  std::size_t shuffles = 10000;
  std::uint64_t seed = 1;
};

void cmd_correlate(const CorrelateArgs& a) {
  const auto t0 = Clock::now();
  const auto table = hanbias::load_bias_csv(a.bias);
  const auto lexicon = hanbias::Lexicon::load(a.lexicon);
  const hanbias::CorrelateOptions options{a.threshold, a.permutation,
                                          a.shuffles, a.seed};
  const auto report = hanbias::correlate(table, lexicon, options);
  std::fputs(hanbias::format_correlation_report(report).c_str(), stdout);
  ensure_parent(a.out);
  hanbias::save_correlation_csv(report, a.out);

  const auto scatter = hanbias::scatter_rows(table, lexicon);
  ensure_parent(a.scatter);
  const std::string skipped =
      scatter.skipped.empty() ? "" : a.scatter + ".skipped.txt";
  hanbias::save_scatter_csv(scatter, a.scatter, skipped);
  if (!a.svg.empty()) {
    ensure_parent(a.svg);
    hanbias::save_scatter_svg(
        scatter, a.svg,
        hanbias::SvgOptions{a.threshold, "human score", "bias score"});
  }

  if (a.manifest.empty()) return;
  hanbias::cli::Manifest m("correlate");
  m.set("config.threshold", a.threshold);
  m.set("config.permutation", a.permutation);
  m.set("config.shuffles", std::uint64_t(a.shuffles));
  m.set("config.seed", a.seed);
  m.add_input("bias_csv", a.bias);
  m.add_input("lexicon", a.lexicon);
  m.add_output("report", a.out);
  m.add_output("scatter_csv", a.scatter);
  if (!skipped.empty()) m.add_output("scatter_skipped", skipped);
  if (!a.svg.empty()) m.add_output("scatter_svg", a.svg);
  m.add_timing("correlate", seconds_since(t0));
  ensure_parent(a.manifest);
  m.save(a.manifest);
}

// --------------------------------------------------------------------- run

struct RunArgs {
  bool all = false;
  std::string corpus, wordlist, lexicon, questions, outdir = "out";
  std::string mode = "cbow", seg_lexicon, optout, manifest;
  std::string he = hanbias::kDefaultHeWord, she = hanbias::kDefaultSheWord;
  hanbias::TrainConfig cfg;
  bool strip = false, segment = false, no_normalize = false, macro = false;
  bool permutation = false;
};

void cmd_run(RunArgs a) {
  if (!a.all) throw Error("run requires --all");
  const hanbias::Mode mode = hanbias::parse_mode(a.mode);
  fs::create_directories(a.outdir);
  const auto out = [&](const char* name) {
    return (fs::path(a.outdir) / name).string();
  };

  hanbias::cli::Manifest m("run");
  add_config(m, a.cfg, mode);
  m.set("config.strip_markup", a.strip);
  m.set("config.segment", a.segment);
  m.set("config.he", a.he);
  m.set("config.she", a.she);
  m.set("config.normalize", !a.no_normalize);
  m.set("config.macro", a.macro);
  m.set("config.permutation", a.permutation);
  m.add_input("corpus", a.corpus);
  m.add_input("wordlist", a.wordlist);
  m.add_input("lexicon", a.lexicon);
  m.add_input("questions", a.questions);
  if (!a.seg_lexicon.empty()) m.add_input("segment_lexicon", a.seg_lexicon);
  if (!a.optout.empty()) m.add_input("compose_optout", a.optout);

  // Preprocess.
  std::printf("[preprocess]\n");
  auto t0 = Clock::now();
  const auto stream = read_stream(a.corpus, a.strip, a.segment, a.seg_lexicon);
  auto vocab = hanbias::Vocabulary::build(stream, a.cfg.min_count);
  hanbias::save_corpus_file(stream, out("corpus.txt"));
  vocab.save(out("vocab.txt"));
  const auto stats = hanbias::corpus_stats(stream, &vocab);
  std::printf("tokens=%llu unique=%llu\n",
              (unsigned long long)stats.token_count,
              (unsigned long long)stats.unique_word_count);
  m.add_output("corpus", out("corpus.txt"));
  m.add_output("vocab", out("vocab.txt"));
  m.add_timing("preprocess", seconds_since(t0));

  // Train.
  std::printf("[train]\n");
  t0 = Clock::now();
  auto chars = mode == hanbias::Mode::kCwe
                   ? hanbias::CharInventory::extract(vocab)
                   : hanbias::CharInventory{};
  if (!a.optout.empty()) a.cfg.compose_optout = hanbias::load_wordlist(a.optout);
  hanbias::TrainMetrics metrics;
  const auto model = hanbias::train(stream, std::move(vocab), std::move(chars),
                                    a.cfg, mode, &metrics);
  hanbias::save_model(model, out("model"));
  std::printf("loss=%.6f tokens_per_sec=%.0f\n", metrics.loss_estimate,
              metrics.tokens_per_sec);
  m.add_output("words_vec", out("model") + ".words.vec");
  if (mode == hanbias::Mode::kCwe)
    m.add_output("chars_vec", out("model") + ".chars.vec");
  m.add_output("model_bin", out("model") + ".bin");
  m.set("metrics.loss", metrics.loss_estimate);
  m.set("metrics.tokens_per_sec", metrics.tokens_per_sec);
  m.add_timing("train", seconds_since(t0));

  // Evaluate analogies.
  std::printf("[eval]\n");
  t0 = Clock::now();
  const auto questions = hanbias::load_questions(a.questions);
  if (questions.empty()) throw Error("no questions in " + a.questions);
  const auto lookups = eval_lookups("auto", mode);
  for (std::size_t i = 0; i < lookups.size(); ++i) {
    const auto report = hanbias::evaluate(model, questions, lookups[i], a.macro);
    std::printf("representation=%.*s coverage=%.4f\n",
                int(lookup_name(lookups[i]).size()),
                lookup_name(lookups[i]).data(), report.coverage());
    std::fputs(hanbias::format_analogy_report(report).c_str(), stdout);
    const std::string path = i == 0 ? out("analogy.csv")
                                    : with_suffix(out("analogy.csv"), ".wordonly");
    hanbias::save_analogy_csv(report, path);
    m.add_output(i == 0 ? "analogy_csv" : "analogy_wordonly_csv", path);
  }
  m.add_timing("eval", seconds_since(t0));

  // Bias scores.
  std::printf("[bias]\n");
  t0 = Clock::now();
  const auto wordlist = hanbias::load_wordlist(a.wordlist);
  const bool normalize = !a.no_normalize;
  const auto direction =
      hanbias::gender_direction(model, a.he, a.she, normalize);
  const auto table = hanbias::bias_table(model, wordlist, direction, normalize);
  hanbias::save_bias_csv(table, out("bias.csv"));
  print_bias_summary(table);
  m.add_output("bias_csv", out("bias.csv"));
  m.add_timing("bias", seconds_since(t0));

  // Correlate with the lexicon.
  std::printf("[correlate]\n");
  t0 = Clock::now();
  const auto lexicon = hanbias::Lexicon::load(a.lexicon);
  const hanbias::CorrelateOptions options{3.0, a.permutation, 10000,
                                          a.cfg.seed};
  const auto report = hanbias::correlate(table, lexicon, options);
  std::fputs(hanbias::format_correlation_report(report).c_str(), stdout);
  hanbias::save_correlation_csv(report, out("correlation.csv"));
  const auto scatter = hanbias::scatter_rows(table, lexicon);
  const std::string skipped =
      scatter.skipped.empty() ? "" : out("scatter.csv") + ".skipped.txt";
  hanbias::save_scatter_csv(scatter, out("scatter.csv"), skipped);
  hanbias::save_scatter_svg(scatter, out("scatter.svg"),
                            hanbias::SvgOptions{3.0, "human score",
                                                "bias score"});
  m.add_output("correlation_csv", out("correlation.csv"));
  m.add_output("scatter_csv", out("scatter.csv"));
  if (!skipped.empty()) m.add_output("scatter_skipped", skipped);
  m.add_output("scatter_svg", out("scatter.svg"));
  m.add_timing("correlate", seconds_since(t0));

  const std::string manifest_path =
      a.manifest.empty() ? out("manifest.json") : a.manifest;
  ensure_parent(manifest_path);
  m.save(manifest_path);
  std::printf("manifest=%s\n", manifest_path.c_str());
}

void add_train_options(CLI::App* cmd, hanbias::TrainConfig& cfg) {
  cmd->add_option("--dim", cfg.dim, "embedding dimensionality")
      ->capture_default_str();
  cmd->add_option("--window", cfg.window, "maximum context window span")
      ->capture_default_str();
  cmd->add_option("--epochs", cfg.epochs, "training passes over the corpus")
      ->capture_default_str();
  cmd->add_option("--min-count", cfg.min_count,
                  "minimum word frequency for the vocabulary")
      ->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "asynchronous SGD workers")
      ->capture_default_str();
  cmd->add_option("--negatives", cfg.negatives, "negative samples per step")
      ->capture_default_str();
  cmd->add_option("--lr", cfg.initial_lr, "initial learning rate")
      ->capture_default_str();
  cmd->add_option("--subsample", cfg.subsample_t,
                  "frequent-word subsampling threshold (0 = off)")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word/character embeddings with gender-bias analysis"};
  app.set_version_flag("--version", std::string(hanbias::kVersion));
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* cmd_pre = app.add_subcommand(
      "preprocess", "Tokenize a raw corpus and build its vocabulary");
  cmd_pre->add_option("input", pre.input, "UTF-8 text, one document per line")
      ->required();
  cmd_pre->add_option("--out-corpus", pre.out_corpus, "tokenized corpus path")
      ->capture_default_str();
  cmd_pre->add_option("--out-vocab", pre.out_vocab, "vocabulary path")
      ->capture_default_str();
  cmd_pre->add_option("--min-count", pre.min_count,
                      "minimum word frequency for the vocabulary")
      ->capture_default_str();
  cmd_pre->add_flag("--strip-markup", pre.strip,
                    "remove <...> spans before tokenizing");
  cmd_pre->add_flag("--segment", pre.segment,
                    "greedy longest-match segmentation of each token");
  cmd_pre->add_option("--lexicon", pre.lexicon,
                      "segmentation wordlist (with --segment)");
  cmd_pre->add_option("--manifest", pre.manifest, "write a run manifest here");
  cmd_pre->callback([&] { cmd_preprocess(pre); });

  TrainArgs tr;
  auto* cmd_tr =
      app.add_subcommand("train", "Train CBOW or CWE embeddings with SGD");
  cmd_tr->add_option("--corpus", tr.corpus, "tokenized corpus file");
  cmd_tr->add_option("--vocab", tr.vocab,
                     "vocabulary file (rebuilt from the corpus when omitted)");
  cmd_tr->add_option("--out", tr.out, "output base path")
      ->capture_default_str();
  cmd_tr->add_option("--mode", tr.mode, "cbow or cwe")->capture_default_str();
  add_train_options(cmd_tr, tr.cfg);
  cmd_tr->add_option("--compose-optout", tr.optout,
                     "words trained without character composition");
  cmd_tr->add_flag("--show-config", tr.show_config,
                   "print the effective configuration and exit");
  cmd_tr->add_option("--manifest", tr.manifest, "write a run manifest here");
  cmd_tr->callback([&] { cmd_train(tr); });

  EvalArgs ev;
  auto* cmd_ev =
      app.add_subcommand("eval", "Score a model on analogy questions");
  cmd_ev->add_option("--model", ev.model, "model file (.bin or .words.vec)")
      ->required();
  cmd_ev->add_option("--questions", ev.questions, "analogy question file")
      ->required();
  cmd_ev->add_option("--out", ev.out, "report CSV path")->capture_default_str();
  cmd_ev->add_option("--lookup", ev.lookup,
                     "representation: auto, composed, word, or both")
      ->capture_default_str();
  cmd_ev->add_flag("--macro", ev.macro,
                   "macro-average category accuracies per kind");
  cmd_ev->add_option("--manifest", ev.manifest, "write a run manifest here");
  cmd_ev->callback([&] { cmd_eval(ev); });

  BiasArgs bi;
  auto* cmd_bi =
      app.add_subcommand("bias", "Project words onto the gender direction");
  cmd_bi->add_option("--model", bi.model, "model file (.bin or .words.vec)")
      ->required();
  cmd_bi->add_option("--words", bi.words, "wordlist to score, one per line")
      ->required();
  cmd_bi->add_option("--out", bi.out, "bias CSV path")->capture_default_str();
  cmd_bi->add_option("--he", bi.he, "male pronoun word")
      ->capture_default_str();
  cmd_bi->add_option("--she", bi.she, "female pronoun word")
      ->capture_default_str();
  cmd_bi->add_flag("--no-normalize", bi.no_normalize,
                   "project raw vectors instead of unit-normalized ones");
  cmd_bi->add_option("--lookup", bi.lookup, "representation: composed or word")
      ->capture_default_str();
  cmd_bi->add_option("--manifest", bi.manifest, "write a run manifest here");
  cmd_bi->callback([&] { cmd_bias(bi); });

  CorrelateArgs co;
  auto* cmd_co = app.add_subcommand(
      "correlate", "Correlate bias scores with a human-scored lexicon");
  cmd_co->add_option("--bias", co.bias, "bias CSV from the bias command")
      ->required();
  cmd_co->add_option("--lexicon", co.lexicon, "TSV word<TAB>score in [1,5]")
      ->required();
  cmd_co->add_option("--out", co.out, "correlation report CSV")
      ->capture_default_str();
  cmd_co->add_option("--scatter", co.scatter, "scatter data CSV")
      ->capture_default_str();
  cmd_co->add_option("--svg", co.svg, "also render an SVG scatter plot here");
  cmd_co->add_option("--threshold", co.threshold,
                     "neutral line separating the two groups")
      ->capture_default_str();
  cmd_co->add_flag("--permutation", co.permutation,
                   "p-values from a seeded permutation test");
  cmd_co->add_option("--shuffles", co.shuffles, "permutation shuffle count")
      ->capture_default_str();
  cmd_co->add_option("--seed", co.seed, "permutation seed")
      ->capture_default_str();
  cmd_co->add_option("--manifest", co.manifest, "write a run manifest here");
  cmd_co->callback([&] { cmd_correlate(co); });

  RunArgs ru;
  auto* cmd_ru = app.add_subcommand(
      "run", "Run the whole pipeline: preprocess, train, eval, bias, correlate");
  cmd_ru->add_flag("--all", ru.all, "run every stage")->required();
  cmd_ru->add_option("--corpus", ru.corpus, "raw UTF-8 input text")
      ->required();
  cmd_ru->add_option("--wordlist", ru.wordlist, "words to bias-score")
      ->required();
  cmd_ru->add_option("--lexicon", ru.lexicon, "human-scored TSV lexicon")
      ->required();
  cmd_ru->add_option("--questions", ru.questions, "analogy question file")
      ->required();
  cmd_ru->add_option("--outdir", ru.outdir, "output directory")
      ->capture_default_str();
  cmd_ru->add_option("--mode", ru.mode, "cbow or cwe")->capture_default_str();
  add_train_options(cmd_ru, ru.cfg);
  cmd_ru->add_flag("--strip-markup", ru.strip,
                   "remove <...> spans before tokenizing");
  cmd_ru->add_flag("--segment", ru.segment,
                   "greedy longest-match segmentation of each token");
  cmd_ru->add_option("--seg-lexicon", ru.seg_lexicon,
                     "segmentation wordlist (with --segment)");
  cmd_ru->add_option("--compose-optout", ru.optout,
                     "words trained without character composition");
  cmd_ru->add_option("--he", ru.he, "male pronoun word")
      ->capture_default_str();
  cmd_ru->add_option("--she", ru.she, "female pronoun word")
      ->capture_default_str();
  cmd_ru->add_flag("--no-normalize", ru.no_normalize,
                   "project raw vectors instead of unit-normalized ones");
  cmd_ru->add_flag("--macro", ru.macro,
                   "macro-average category accuracies per kind");
  cmd_ru->add_flag("--permutation", ru.permutation,
                   "correlation p-values from a permutation test");
  cmd_ru->add_option("--manifest", ru.manifest,
                     "manifest path (default <outdir>/manifest.json)");
  cmd_ru->callback([&] { cmd_run(ru); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "hanbias: %s\n", single_line(e.what()).c_str());
    const int code = e.get_exit_code();
    return code == 0 ? 1 : code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hanbias: %s\n", single_line(e.what()).c_str());
    return 1;
  }
  return 0;
}
