#include "hanbias/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "hanbias/error.hpp"

namespace hanbias {

void TrainConfig::validate() const {
  if (dim < 1) throw Error("train config: dim must be >= 1");
  if (window < 1) throw Error("train config: window must be >= 1");
  if (epochs < 1) throw Error("train config: epochs must be >= 1");
  if (min_count < 1) throw Error("train config: min_count must be >= 1");
  if (threads < 1) throw Error("train config: threads must be >= 1");
  if (negatives < 1) throw Error("train config: negatives must be >= 1");
  if (!(initial_lr >= 0)) throw Error("train config: lr must be >= 0");
  if (subsample_t < 0) throw Error("train config: subsample must be >= 0");
}

UnigramTable::UnigramTable(const Vocabulary& vocab, double power) {
  const std::size_t n = vocab.size();
  if (n == 0) throw Error("unigram table: empty vocabulary");

  std::vector<double> weights(n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = std::pow(double(vocab.entry(std::int32_t(i)).count), power);
    total += weights[i];
  }

  // Vose's alias method; stacks filled in ascending id order so the table is
  // deterministic.
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<std::int32_t> small, large;
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * double(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(std::int32_t(i));
  }
  while (!small.empty() && !large.empty()) {
    std::int32_t s = small.back(), l = large.back();
    small.pop_back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::int32_t i : large) prob_[i] = 1.0;
  for (std::int32_t i : small) prob_[i] = 1.0;
}

std::int32_t UnigramTable::sample(Rng& rng) const {
  const std::size_t i = std::size_t(rng.next_below(prob_.size()));
  return rng.next_double() < prob_[i] ? std::int32_t(i) : alias_[i];
}

std::int32_t UnigramTable::sample_excluding(Rng& rng,
                                            std::int32_t forbidden) const {
  if (prob_.size() < 2)
    throw Error("draw_negative: vocabulary of size 1 cannot exclude a word");
  std::int32_t s;
  do {
    s = sample(rng);
  } while (s == forbidden);
  return s;
}

double lr_schedule(double progress, double initial_lr) {
  if (progress < 0.0 || progress > 1.0)
    throw Error("lr_schedule: progress outside [0,1]");
  const double lr = initial_lr * (1.0 - progress);
  const double floor = initial_lr * 1e-4;
  return lr > floor ? lr : floor;
}

std::vector<double> hidden_vector(const EmbeddingModel& model,
                                  std::span<const std::int32_t> context) {
  if (context.empty()) throw Error("hidden_vector: empty context");
  std::vector<double> h(std::size_t(model.dim()), 0.0);
  for (std::int32_t id : context) {
    auto x = compose(model, id);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += x[i];
  }
  const double inv = 1.0 / double(context.size());
  for (auto& v : h) v *= inv;
  return h;
}

namespace {

kernel::ParamView<float> make_view(EmbeddingModel& model) {
  kernel::ParamView<float> view;
  view.words = model.mutable_words();
  view.chars = model.mutable_chars();
  view.outputs = model.mutable_outputs();
  view.dim = model.dim();
  view.mode = model.mode();
  view.word_chars =
      model.mode() == Mode::kCwe ? &model.chars().per_word_chars() : nullptr;
  view.compose_optout =
      model.compose_optout().empty() ? nullptr : &model.compose_optout();
  return view;
}

}  // namespace

void sgd_step(EmbeddingModel& model, const TrainingStep& step) {
  auto view = make_view(model);
  std::vector<float> h(std::size_t(model.dim())), g(std::size_t(model.dim()));
  kernel::sgd_step<float>(view, step, h, g);
}

EmbeddingModel train(const TokenStream& stream, Vocabulary vocab,
                     CharInventory chars, const TrainConfig& config, Mode mode,
                     TrainMetrics* metrics) {
  config.validate();
  if (stream.documents.empty()) throw Error("train: empty token stream");
  if (vocab.size() < std::size_t(config.negatives) + 1)
    throw Error("train: vocabulary smaller than negatives+1 (" +
                std::to_string(vocab.size()) + " words, " +
                std::to_string(config.negatives) + " negatives)");

  // Map the corpus to word ids once; out-of-vocabulary tokens are skipped.
  std::vector<std::vector<std::int32_t>> docs;
  docs.reserve(stream.documents.size());
  std::uint64_t train_tokens = 0;
  for (const auto& doc : stream.documents) {
    std::vector<std::int32_t> ids;
    ids.reserve(doc.size());
    for (const auto& token : doc)
      if (auto id = vocab.id_of(token)) ids.push_back(*id);
    if (!ids.empty()) {
      train_tokens += ids.size();
      docs.push_back(std::move(ids));
    }
  }
  if (docs.empty())
    throw Error("train: no in-vocabulary tokens in the stream");

  UnigramTable table(vocab);
  const std::uint64_t total_tokens = vocab.total_tokens();

  EmbeddingModel model = EmbeddingModel::init(
      mode, config.dim, std::move(vocab), std::move(chars), config.seed);
  if (!config.compose_optout.empty() && mode == Mode::kCwe) {
    std::unordered_set<std::int32_t> optout;
    for (const auto& word : config.compose_optout)
      if (auto id = model.vocab().id_of(word)) optout.insert(*id);
    model.set_compose_optout(std::move(optout));
  }

  const int n_workers =
      int(std::min<std::size_t>(std::size_t(config.threads), docs.size()));
  const std::uint64_t total_work =
      std::uint64_t(config.epochs) * train_tokens;
  std::atomic<std::uint64_t> progress{0};
  std::vector<double> worker_loss(std::size_t(n_workers), 0.0);
  std::vector<std::uint64_t> worker_loss_steps(std::size_t(n_workers), 0);

  // Hogwild contract: workers update the shared matrices without locks; lost
  // updates are tolerated. Reproducibility holds only for one worker.
  auto view = make_view(model);
  const auto t_start = std::chrono::steady_clock::now();

  auto work = [&](int tid) {
    Rng rng(mix_seed(config.seed) ^ mix_seed(0x7261696eULL + tid));
    std::vector<float> h(std::size_t(config.dim)), g(std::size_t(config.dim));
    TrainingStep step;
    step.context.reserve(std::size_t(config.window) * 2);
    step.negatives.reserve(std::size_t(config.negatives));
    std::vector<std::int32_t> sent;

    std::uint64_t local = 0, pushed = 0, steps = 0;
    double lr = config.initial_lr;
    double loss = 0.0;
    std::uint64_t loss_steps = 0;

    for (std::int32_t epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t d = std::size_t(tid); d < docs.size();
           d += std::size_t(n_workers)) {
        const auto& doc = docs[d];
        sent.clear();
        for (std::int32_t id : doc) {
          ++local;
          if (config.subsample_t > 0) {
            const double freq =
                double(model.vocab().entry(id).count) / double(total_tokens);
            const double discard =
                1.0 - std::sqrt(config.subsample_t / freq);
            if (discard > 0 && rng.next_double() < discard) continue;
          }
          sent.push_back(id);
        }

        for (std::size_t pos = 0; pos < sent.size(); ++pos) {
          const std::size_t span =
              1 + std::size_t(rng.next_below(std::uint64_t(config.window)));
          step.context.clear();
          const std::size_t lo = pos > span ? pos - span : 0;
          const std::size_t hi = std::min(sent.size() - 1, pos + span);
          for (std::size_t j = lo; j <= hi; ++j)
            if (j != pos) step.context.push_back(sent[j]);
          if (step.context.empty()) continue;

          step.center = sent[pos];
          step.negatives.clear();
          for (std::int32_t k = 0; k < config.negatives; ++k)
            step.negatives.push_back(
                table.sample_excluding(rng, step.center));
          step.lr = lr;

          const bool track_loss = (steps++ & 63) == 0;
          double step_loss = 0;
          kernel::sgd_step<float>(view, step, h, g,
                                  track_loss ? &step_loss : nullptr);
          if (track_loss) {
            loss += step_loss;
            ++loss_steps;
          }
        }

        if (local - pushed >= 10000) {
          const std::uint64_t done =
              progress.fetch_add(local - pushed,
                                 std::memory_order_relaxed) +
              (local - pushed);
          pushed = local;
          lr = lr_schedule(std::min(1.0, double(done) / double(total_work)),
                           config.initial_lr);
        }
      }
    }
    progress.fetch_add(local - pushed, std::memory_order_relaxed);
    worker_loss[std::size_t(tid)] = loss;
    worker_loss_steps[std::size_t(tid)] = loss_steps;
  };

  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(std::size_t(n_workers));
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(work, t);
    for (auto& t : threads) t.join();
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    t_start)
          .count();
  if (metrics) {
    double loss = 0;
    std::uint64_t n = 0;
    for (int t = 0; t < n_workers; ++t) {
      loss += worker_loss[std::size_t(t)];
      n += worker_loss_steps[std::size_t(t)];
    }
    metrics->loss_estimate = n ? loss / double(n) : 0.0;
    metrics->trained_tokens = total_work;
    metrics->tokens_per_sec =
        seconds > 0 ? double(total_work) / seconds : 0.0;
  }

  if (!model.all_finite())
    throw Error("train: non-finite parameters after training");
  return model;
}

}  // namespace hanbias
