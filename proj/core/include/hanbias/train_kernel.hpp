#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "hanbias/embedding.hpp"
#include "hanbias/error.hpp"

namespace hanbias {

/// One CBOW/CWE update: predict `center` from `context` against the true
/// output row and `negatives` noise rows, at learning rate `lr`.
/// Invariant: center never appears among the negatives.
struct TrainingStep {
  std::int32_t center = 0;
  std::vector<std::int32_t> context;
  std::vector<std::int32_t> negatives;
  double lr = 0.0;
};

namespace kernel {

template <typename Real>
inline Real sigmoid(Real x) {
  // exp overflow saturates cleanly to 0/1 in IEEE arithmetic.
  return Real(1) / (Real(1) + std::exp(-x));
}

/// Raw view over the three parameter matrices. Templated on the scalar so the
/// float training path and the double-precision gradient checks run the same
/// code.
template <typename Real>
struct ParamView {
  std::span<Real> words;
  std::span<Real> chars;  // empty in CBOW mode
  std::span<Real> outputs;
  std::int32_t dim = 0;
  Mode mode = Mode::kCbow;
  const std::vector<std::vector<std::int32_t>>* word_chars =
      nullptr;  // per word id; required in CWE mode
  const std::unordered_set<std::int32_t>* compose_optout = nullptr;

  Real* word_row(std::int32_t id) const {
    return words.data() + std::size_t(id) * std::size_t(dim);
  }
  Real* char_row(std::int32_t id) const {
    return chars.data() + std::size_t(id) * std::size_t(dim);
  }
  Real* output_row(std::int32_t id) const {
    return outputs.data() + std::size_t(id) * std::size_t(dim);
  }
  bool composes(std::int32_t word_id) const {
    if (mode != Mode::kCwe) return false;
    if (compose_optout && compose_optout->contains(word_id)) return false;
    return true;
  }
};

/// Writes the context-side representation of `word` into `out`: the word row
/// for CBOW/opted-out words, 1/2 (w + mean of character rows) for CWE.
template <typename Real>
void context_vector(const ParamView<Real>& params, std::int32_t word,
                    Real* out) {
  const Real* w = params.word_row(word);
  const std::int32_t dim = params.dim;
  if (!params.composes(word)) {
    for (std::int32_t i = 0; i < dim; ++i) out[i] = w[i];
    return;
  }
  const auto& char_ids = (*params.word_chars)[std::size_t(word)];
  const Real inv_n = Real(1) / Real(char_ids.size());
  for (std::int32_t i = 0; i < dim; ++i) out[i] = Real(0);
  for (std::int32_t c : char_ids) {
    const Real* cv = params.char_row(c);
    for (std::int32_t i = 0; i < dim; ++i) out[i] += cv[i];
  }
  for (std::int32_t i = 0; i < dim; ++i)
    out[i] = Real(0.5) * (w[i] + inv_n * out[i]);
}

/// h = average of the context representations. Throws on empty context.
template <typename Real>
void hidden_vector(const ParamView<Real>& params,
                   std::span<const std::int32_t> context,
                   std::span<Real> h) {
  if (context.empty()) throw Error("hidden_vector: empty context");
  const std::int32_t dim = params.dim;
  std::vector<Real> x(static_cast<std::size_t>(dim));
  for (std::int32_t i = 0; i < dim; ++i) h[i] = Real(0);
  for (std::int32_t word : context) {
    context_vector(params, word, x.data());
    for (std::int32_t i = 0; i < dim; ++i) h[i] += x[i];
  }
  const Real inv = Real(1) / Real(context.size());
  for (std::int32_t i = 0; i < dim; ++i) h[i] *= inv;
}

/// Applies one negative-sampling SGD step in place.
///
/// For each output sample o with label l: g_o = sigmoid(u_o . h) - l;
/// u_o -= lr * g_o * h. The hidden gradient g_h = sum_o g_o * u_o uses the
/// pre-update output rows. Each context word row then moves by
/// lr * g_h / |ctx| (times 1/2 when composed), and each of its character
/// rows by lr * g_h / |ctx| * 1/(2 N_j).
///
/// `h_buf`/`g_buf` are dim-sized scratch. When `loss_accum` is non-null the
/// step's negative-sampling loss is added to it (reporting only).
template <typename Real>
void sgd_step(const ParamView<Real>& params, const TrainingStep& step,
              std::span<Real> h_buf, std::span<Real> g_buf,
              double* loss_accum = nullptr) {
  const std::int32_t dim = params.dim;
  hidden_vector<Real>(params, step.context, h_buf);
  Real* h = h_buf.data();
  Real* gh = g_buf.data();
  for (std::int32_t i = 0; i < dim; ++i) gh[i] = Real(0);

  const Real lr = Real(step.lr);
  const std::size_t n_samples = step.negatives.size() + 1;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const bool positive = s == 0;
    const std::int32_t target =
        positive ? step.center : step.negatives[s - 1];
    Real* u = params.output_row(target);
    Real f = Real(0);
    for (std::int32_t i = 0; i < dim; ++i) f += u[i] * h[i];
    const Real sig = sigmoid(f);
    const Real g = sig - (positive ? Real(1) : Real(0));
    if (loss_accum) {
      const double p = positive ? double(sig) : 1.0 - double(sig);
      *loss_accum += -std::log(p > 1e-12 ? p : 1e-12);
    }
    for (std::int32_t i = 0; i < dim; ++i) gh[i] += g * u[i];
    const Real step_g = lr * g;
    for (std::int32_t i = 0; i < dim; ++i) u[i] -= step_g * h[i];
  }

  const Real inv_ctx = Real(1) / Real(step.context.size());
  for (std::int32_t word : step.context) {
    Real* w = params.word_row(word);
    if (params.composes(word)) {
      const Real word_scale = lr * inv_ctx * Real(0.5);
      for (std::int32_t i = 0; i < dim; ++i) w[i] -= word_scale * gh[i];
      const auto& char_ids = (*params.word_chars)[std::size_t(word)];
      const Real char_scale =
          lr * inv_ctx * Real(0.5) / Real(char_ids.size());
      for (std::int32_t c : char_ids) {
        Real* cv = params.char_row(c);
        for (std::int32_t i = 0; i < dim; ++i) cv[i] -= char_scale * gh[i];
      }
    } else {
      const Real word_scale = lr * inv_ctx;
      for (std::int32_t i = 0; i < dim; ++i) w[i] -= word_scale * gh[i];
    }
  }
}

}  // namespace kernel
}  // namespace hanbias
