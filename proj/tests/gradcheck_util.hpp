#pragma once
// Double-precision reference loss for one negative-sampling step plus a
// finite-difference comparison against the production kernel. The loss here is
// written from the definition, independent of train_kernel.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "hanbias/rng.hpp"
#include "hanbias/train_kernel.hpp"

namespace testutil {

struct GradProblem {
  hanbias::Mode mode = hanbias::Mode::kCbow;
  std::int32_t dim = 0;
  std::int32_t n_words = 0;
  std::int32_t n_chars = 0;
  std::vector<std::vector<std::int32_t>> word_chars;  // per word id (CWE)
  std::unordered_set<std::int32_t> optout;
  std::vector<double> words, chars, outputs;
  hanbias::TrainingStep step;
};

inline double ref_loss(const GradProblem& p, const std::vector<double>& words,
                       const std::vector<double>& chars,
                       const std::vector<double>& outputs) {
  const std::size_t d = std::size_t(p.dim);
  std::vector<double> h(d, 0.0), x(d);
  for (std::int32_t j : p.step.context) {
    const double* w = words.data() + std::size_t(j) * d;
    const bool composed =
        p.mode == hanbias::Mode::kCwe && !p.optout.contains(j);
    if (!composed) {
      std::copy(w, w + d, x.begin());
    } else {
      const auto& ids = p.word_chars[std::size_t(j)];
      std::fill(x.begin(), x.end(), 0.0);
      for (std::int32_t c : ids) {
        const double* cv = chars.data() + std::size_t(c) * d;
        for (std::size_t i = 0; i < d; ++i) x[i] += cv[i];
      }
      for (std::size_t i = 0; i < d; ++i)
        x[i] = 0.5 * (w[i] + x[i] / double(ids.size()));
    }
    for (std::size_t i = 0; i < d; ++i) h[i] += x[i];
  }
  for (std::size_t i = 0; i < d; ++i) h[i] /= double(p.step.context.size());

  const auto dot = [&](std::int32_t o) {
    const double* u = outputs.data() + std::size_t(o) * d;
    double f = 0.0;
    for (std::size_t i = 0; i < d; ++i) f += u[i] * h[i];
    return f;
  };
  // -log sigmoid(z) = log(1 + e^{-z})
  const auto nls = [](double z) { return std::log1p(std::exp(-z)); };
  double loss = nls(dot(p.step.center));
  for (std::int32_t n : p.step.negatives) loss += nls(-dot(n));
  return loss;
}

struct GradResult {
  std::vector<double> words, chars, outputs;
};

/// Analytic gradient extracted from the kernel: run one step at lr = 1 and
/// take theta_before - theta_after coordinate-wise.
inline GradResult kernel_gradient(const GradProblem& p) {
  auto words = p.words;
  auto chars = p.chars;
  auto outputs = p.outputs;
  hanbias::kernel::ParamView<double> view;
  view.words = words;
  view.chars = chars;
  view.outputs = outputs;
  view.dim = p.dim;
  view.mode = p.mode;
  view.word_chars = p.mode == hanbias::Mode::kCwe ? &p.word_chars : nullptr;
  view.compose_optout = p.optout.empty() ? nullptr : &p.optout;

  auto step = p.step;
  step.lr = 1.0;
  std::vector<double> h(std::size_t(p.dim)), g(std::size_t(p.dim));
  hanbias::kernel::sgd_step<double>(view, step, h, g);

  GradResult r;
  const auto diff = [](const std::vector<double>& before,
                       const std::vector<double>& after) {
    std::vector<double> out(before.size());
    for (std::size_t i = 0; i < before.size(); ++i)
      out[i] = before[i] - after[i];
    return out;
  };
  r.words = diff(p.words, words);
  r.chars = diff(p.chars, chars);
  r.outputs = diff(p.outputs, outputs);
  return r;
}

inline double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / denom;
}

/// Max relative error between the kernel gradient and central finite
/// differences over every parameter coordinate.
inline double max_gradient_error(const GradProblem& p, double fd_h = 1e-5) {
  const GradResult analytic = kernel_gradient(p);
  double worst = 0.0;
  for (int which = 0; which < 3; ++which) {
    std::vector<double> words = p.words, chars = p.chars, outputs = p.outputs;
    std::vector<double>* target =
        which == 0 ? &words : which == 1 ? &chars : &outputs;
    const std::vector<double>& grad =
        which == 0 ? analytic.words : which == 1 ? analytic.chars
                                                 : analytic.outputs;
    for (std::size_t i = 0; i < target->size(); ++i) {
      const double orig = (*target)[i];
      (*target)[i] = orig + fd_h;
      const double up = ref_loss(p, words, chars, outputs);
      (*target)[i] = orig - fd_h;
      const double down = ref_loss(p, words, chars, outputs);
      (*target)[i] = orig;
      const double fd = (up - down) / (2.0 * fd_h);
      worst = std::max(worst, relative_error(grad[i], fd));
    }
  }
  return worst;
}

/// Random step with d in {2,4,8}, 1-4 context words, 1-3 distinct negatives.
inline GradProblem random_problem(hanbias::Rng& rng, hanbias::Mode mode) {
  GradProblem p;
  p.mode = mode;
  const std::int32_t dims[3] = {2, 4, 8};
  p.dim = dims[rng.next_below(3)];
  p.n_words = 6 + std::int32_t(rng.next_below(10));
  const std::size_t d = std::size_t(p.dim);

  if (mode == hanbias::Mode::kCwe) {
    p.n_chars = 2 + std::int32_t(rng.next_below(5));
    p.word_chars.resize(std::size_t(p.n_words));
    for (auto& ids : p.word_chars) {
      const std::size_t n = 1 + std::size_t(rng.next_below(3));
      for (std::size_t k = 0; k < n; ++k)
        ids.push_back(
            std::int32_t(rng.next_below(std::uint64_t(p.n_chars))));
    }
    for (std::int32_t w = 0; w < p.n_words; ++w)
      if (rng.next_below(8) == 0) p.optout.insert(w);
  }

  const auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (auto& x : v) x = 2.0 * rng.next_double() - 1.0;
  };
  fill(p.words, std::size_t(p.n_words) * d);
  fill(p.outputs, std::size_t(p.n_words) * d);
  if (mode == hanbias::Mode::kCwe)
    fill(p.chars, std::size_t(p.n_chars) * d);

  const std::size_t n_ctx = 1 + std::size_t(rng.next_below(4));
  for (std::size_t i = 0; i < n_ctx; ++i)
    p.step.context.push_back(
        std::int32_t(rng.next_below(std::uint64_t(p.n_words))));
  p.step.center = std::int32_t(rng.next_below(std::uint64_t(p.n_words)));

  // Exactness of theta_before - theta_after as the gradient requires each
  // output row to be touched at most once, so negatives stay distinct and
  // never equal the center.
  const std::size_t n_neg = 1 + std::size_t(rng.next_below(3));
  std::unordered_set<std::int32_t> used = {p.step.center};
  while (p.step.negatives.size() < n_neg) {
    const auto c = std::int32_t(rng.next_below(std::uint64_t(p.n_words)));
    if (used.insert(c).second) p.step.negatives.push_back(c);
  }
  return p;
}

}  // namespace testutil
