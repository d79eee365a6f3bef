#include "hanbias/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hanbias/error.hpp"
#include "hanbias/rng.hpp"
#include "hanbias/utf8.hpp"

namespace hanbias {

std::string_view mode_name(Mode mode) {
  return mode == Mode::kCbow ? "cbow" : "cwe";
}

Mode parse_mode(std::string_view name) {
  if (name == "cbow") return Mode::kCbow;
  if (name == "cwe") return Mode::kCwe;
  throw Error("unknown mode '" + std::string(name) + "' (expected cbow|cwe)");
}

EmbeddingModel EmbeddingModel::init(Mode mode, std::int32_t dim,
                                    Vocabulary vocab, CharInventory chars,
                                    std::uint64_t seed) {
  if (dim < 1) throw Error("model dim must be >= 1");
  if (vocab.empty()) throw Error("cannot initialize model: empty vocabulary");
  if (mode == Mode::kCwe && chars.empty())
    throw Error("CWE model requires a character inventory");

  EmbeddingModel m;
  m.mode_ = mode;
  m.dim_ = dim;
  m.vocab_ = std::move(vocab);
  m.chars_ = mode == Mode::kCwe ? std::move(chars) : CharInventory{};

  const std::size_t vd = m.vocab_.size() * std::size_t(dim);
  Rng rng(mix_seed(seed) ^ 0x1b873593ULL);
  auto fill_uniform = [&](std::vector<float>& v, std::size_t n) {
    v.resize(n);
    for (auto& x : v) x = float((rng.next_double() - 0.5) / dim);
  };
  fill_uniform(m.word_vectors_, vd);
  if (mode == Mode::kCwe)
    fill_uniform(m.char_vectors_, m.chars_.size() * std::size_t(dim));
  m.output_vectors_.assign(vd, 0.0f);
  return m;
}

EmbeddingModel EmbeddingModel::from_parts(Mode mode, std::int32_t dim,
                                          Vocabulary vocab,
                                          CharInventory chars,
                                          std::vector<float> word_vectors,
                                          std::vector<float> char_vectors,
                                          std::vector<float> output_vectors) {
  const std::size_t vd = vocab.size() * std::size_t(dim);
  if (word_vectors.size() != vd || output_vectors.size() != vd)
    throw Error("model matrices do not match vocabulary size x dim");
  if (mode == Mode::kCwe &&
      char_vectors.size() != chars.size() * std::size_t(dim))
    throw Error("char matrix does not match inventory size x dim");
  if (mode == Mode::kCbow && !char_vectors.empty())
    throw Error("CBOW model cannot carry character vectors");

  EmbeddingModel m;
  m.mode_ = mode;
  m.dim_ = dim;
  m.vocab_ = std::move(vocab);
  m.chars_ = std::move(chars);
  m.word_vectors_ = std::move(word_vectors);
  m.char_vectors_ = std::move(char_vectors);
  m.output_vectors_ = std::move(output_vectors);
  return m;
}

bool EmbeddingModel::all_finite() const {
  auto ok = [](const std::vector<float>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](float x) { return std::isfinite(x); });
  };
  return ok(word_vectors_) && ok(char_vectors_) && ok(output_vectors_);
}

std::vector<double> compose(const EmbeddingModel& model,
                            std::int32_t word_id) {
  if (word_id < 0 || std::size_t(word_id) >= model.vocab().size())
    throw Error("unknown word id " + std::to_string(word_id));

  auto w = model.word_row(word_id);
  std::vector<double> out(w.begin(), w.end());
  if (model.mode() == Mode::kCbow || model.compose_optout().contains(word_id))
    return out;

  const auto& char_ids = model.chars().word_chars(word_id);
  const double inv_n = 1.0 / double(char_ids.size());
  std::vector<double> mean(model.dim(), 0.0);
  for (std::int32_t c : char_ids) {
    auto row = model.char_row(c);
    for (std::int32_t i = 0; i < model.dim(); ++i) mean[i] += row[i];
  }
  for (std::int32_t i = 0; i < model.dim(); ++i)
    out[i] = 0.5 * (out[i] + inv_n * mean[i]);
  return out;
}

std::vector<double> word_representation(const EmbeddingModel& model,
                                        std::int32_t word_id, Lookup lookup) {
  if (word_id < 0 || std::size_t(word_id) >= model.vocab().size())
    throw Error("unknown word id " + std::to_string(word_id));
  if (model.mode() == Mode::kCwe && lookup == Lookup::kComposed)
    return compose(model, word_id);
  auto w = model.word_row(word_id);
  return {w.begin(), w.end()};
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("cosine: dimension mismatch");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error("cosine: zero-norm input");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::vector<Neighbor> nearest(const EmbeddingModel& model,
                              std::span<const double> query, std::size_t k,
                              const std::unordered_set<std::int32_t>& exclude,
                              Lookup lookup) {
  if (k < 1) throw Error("nearest: k must be >= 1");
  if (std::size_t(model.dim()) != query.size())
    throw Error("nearest: query dimension mismatch");
  double qn = 0;
  for (double x : query) qn += x * x;
  if (qn == 0.0) throw Error("nearest: zero-norm query");

  std::vector<Neighbor> scored;
  scored.reserve(model.vocab().size());
  for (std::int32_t id = 0; std::size_t(id) < model.vocab().size(); ++id) {
    if (exclude.contains(id)) continue;
    auto rep = word_representation(model, id, lookup);
    double dot = 0, rn = 0;
    for (std::size_t i = 0; i < rep.size(); ++i) {
      dot += rep[i] * query[i];
      rn += rep[i] * rep[i];
    }
    if (rn == 0.0) continue;
    scored.push_back({id, dot / (std::sqrt(rn) * std::sqrt(qn))});
  }

  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.word_id < b.word_id;
  };
  if (scored.size() > k) {
    std::partial_sort(scored.begin(), scored.begin() + k, scored.end(),
                      better);
    scored.resize(k);
  } else {
    std::sort(scored.begin(), scored.end(), better);
  }
  return scored;
}

// --- serialization ---------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'H', 'B', 'E', 'M', '1'};

void put_u8(std::ostream& out, std::uint8_t v) {
  out.put(char(v));
}
void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4] = {char(v), char(v >> 8), char(v >> 16), char(v >> 24)};
  out.write(b, 4);
}
void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, std::uint32_t(v));
  put_u32(out, std::uint32_t(v >> 32));
}
void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

std::uint8_t get_u8(std::istream& in) {
  int c = in.get();
  if (c == EOF) throw Error("model file truncated");
  return std::uint8_t(c);
}
std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw Error("model file truncated");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 |
         std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}
std::uint64_t get_u64(std::istream& in) {
  std::uint64_t lo = get_u32(in);
  std::uint64_t hi = get_u32(in);
  return lo | hi << 32;
}
float get_f32(std::istream& in) {
  std::uint32_t bits = get_u32(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void put_matrix(std::ostream& out, std::span<const float> m) {
  for (float v : m) put_f32(out, v);
}
std::vector<float> get_matrix(std::istream& in, std::size_t rows,
                              std::size_t cols) {
  std::vector<float> m(rows * cols);
  for (auto& v : m) v = get_f32(in);
  return m;
}

}  // namespace

void save_model_binary(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file: " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u8(out, std::uint8_t(model.mode()));
  put_u32(out, std::uint32_t(model.dim()));
  put_u32(out, std::uint32_t(model.vocab().size()));
  put_u32(out, std::uint32_t(model.chars().size()));
  put_u64(out, model.vocab().total_tokens());
  put_u64(out, model.vocab().min_count());

  for (const auto& e : model.vocab().entries()) {
    put_u32(out, std::uint32_t(e.word.size()));
    out.write(e.word.data(), std::streamsize(e.word.size()));
    put_u64(out, e.count);
  }
  if (model.mode() == Mode::kCwe) {
    for (const auto& c : model.chars().entries()) {
      put_u32(out, std::uint32_t(c.ch));
      put_u64(out, c.count);
    }
    for (const auto& list : model.chars().per_word_chars()) {
      put_u32(out, std::uint32_t(list.size()));
      for (std::int32_t id : list) put_u32(out, std::uint32_t(id));
    }
  }

  std::vector<std::int32_t> optout(model.compose_optout().begin(),
                                   model.compose_optout().end());
  std::sort(optout.begin(), optout.end());
  put_u32(out, std::uint32_t(optout.size()));
  for (std::int32_t id : optout) put_u32(out, std::uint32_t(id));

  const std::size_t dim = std::size_t(model.dim());
  for (std::size_t r = 0; r < model.vocab().size(); ++r)
    put_matrix(out, model.word_row(std::int32_t(r)));
  for (std::size_t r = 0; r < model.vocab().size(); ++r)
    put_matrix(out, model.output_row(std::int32_t(r)));
  if (model.mode() == Mode::kCwe)
    for (std::size_t r = 0; r < model.chars().size(); ++r)
      put_matrix(out, model.char_row(std::int32_t(r)));
  (void)dim;
  if (!out) throw Error("write failed: " + path);
}

EmbeddingModel load_model_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path);
  char magic[5];
  if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
    throw Error("not a binary model file (bad magic): " + path);

  std::uint8_t mode_byte = get_u8(in);
  if (mode_byte > 1) throw Error("model file: bad mode byte");
  Mode mode = Mode(mode_byte);
  std::int32_t dim = std::int32_t(get_u32(in));
  std::uint32_t vocab_size = get_u32(in);
  std::uint32_t char_count = get_u32(in);
  std::uint64_t total_tokens = get_u64(in);
  std::uint64_t min_count = get_u64(in);
  if (dim < 1 || vocab_size == 0) throw Error("model file: bad header");
  if (mode == Mode::kCbow && char_count != 0)
    throw Error("model file: CBOW header with character rows");

  std::vector<VocabEntry> entries(vocab_size);
  for (auto& e : entries) {
    std::uint32_t len = get_u32(in);
    e.word.resize(len);
    if (!in.read(e.word.data(), len)) throw Error("model file truncated");
    e.count = get_u64(in);
  }
  Vocabulary vocab =
      Vocabulary::from_entries(std::move(entries), total_tokens, min_count);

  CharInventory chars;
  if (mode == Mode::kCwe) {
    std::vector<CharEntry> char_entries(char_count);
    for (auto& c : char_entries) {
      c.ch = char32_t(get_u32(in));
      c.count = get_u64(in);
    }
    std::vector<std::vector<std::int32_t>> per_word(vocab_size);
    for (auto& list : per_word) {
      std::uint32_t n = get_u32(in);
      list.resize(n);
      for (auto& id : list) id = std::int32_t(get_u32(in));
    }
    chars = CharInventory::from_parts(std::move(char_entries),
                                      std::move(per_word));
  }

  std::unordered_set<std::int32_t> optout;
  std::uint32_t n_optout = get_u32(in);
  for (std::uint32_t i = 0; i < n_optout; ++i)
    optout.insert(std::int32_t(get_u32(in)));

  auto words = get_matrix(in, vocab_size, std::size_t(dim));
  auto outputs = get_matrix(in, vocab_size, std::size_t(dim));
  std::vector<float> char_vecs;
  if (mode == Mode::kCwe)
    char_vecs = get_matrix(in, char_count, std::size_t(dim));

  auto model = EmbeddingModel::from_parts(
      mode, dim, std::move(vocab), std::move(chars), std::move(words),
      std::move(char_vecs), std::move(outputs));
  model.set_compose_optout(std::move(optout));
  return model;
}

void save_vectors_text(std::span<const float> matrix, std::int32_t dim,
                       const std::vector<std::string>& row_names,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vectors file: " + path);
  out << row_names.size() << ' ' << dim << '\n';
  char buf[64];
  for (std::size_t r = 0; r < row_names.size(); ++r) {
    out << row_names[r];
    for (std::int32_t i = 0; i < dim; ++i) {
      std::snprintf(buf, sizeof(buf), " %.6g",
                    double(matrix[r * std::size_t(dim) + std::size_t(i)]));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

void save_model(const EmbeddingModel& model, const std::string& base_path) {
  std::vector<std::string> words;
  words.reserve(model.vocab().size());
  for (const auto& e : model.vocab().entries()) words.push_back(e.word);
  save_vectors_text(
      {model.word_row(0).data(), model.vocab().size() * std::size_t(model.dim())},
      model.dim(), words, base_path + ".words.vec");
  if (model.mode() == Mode::kCwe) {
    std::vector<std::string> chars;
    chars.reserve(model.chars().size());
    for (const auto& c : model.chars().entries())
      chars.push_back(utf8::encode(c.ch));
    save_vectors_text({model.char_row(0).data(),
                       model.chars().size() * std::size_t(model.dim())},
                      model.dim(), chars, base_path + ".chars.vec");
  }
  save_model_binary(model, base_path + ".bin");
}

namespace {

struct TextMatrix {
  std::vector<std::string> names;
  std::vector<float> values;
  std::int32_t dim = 0;
};

TextMatrix load_vectors_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vectors file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw Error("vectors file is empty: " + path);

  std::istringstream header(line);
  std::int64_t rows = -1, dim = -1;
  if (!(header >> rows >> dim) || rows < 1 || dim < 1)
    throw Error("vectors file: bad header '" + line + "' in " + path);

  TextMatrix m;
  m.dim = std::int32_t(dim);
  m.names.reserve(std::size_t(rows));
  m.values.reserve(std::size_t(rows) * std::size_t(dim));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string name;
    if (!(row >> name))
      throw Error("vectors file: malformed line " + std::to_string(line_no));
    double v = 0;
    std::size_t n = 0;
    while (row >> v) {
      m.values.push_back(float(v));
      ++n;
    }
    if (!row.eof())
      throw Error("vectors file: non-numeric component on line " +
                  std::to_string(line_no));
    if (n != std::size_t(dim))
      throw Error("vectors file: line " + std::to_string(line_no) + " has " +
                  std::to_string(n) + " components, header says " +
                  std::to_string(dim));
    m.names.push_back(std::move(name));
  }
  if (m.names.size() != std::size_t(rows))
    throw Error("vectors file: header promises " + std::to_string(rows) +
                " rows, found " + std::to_string(m.names.size()));
  return m;
}

}  // namespace

EmbeddingModel load_model_text(const std::string& words_path,
                               const std::string& chars_path) {
  TextMatrix words = load_vectors_text(words_path);

  std::vector<VocabEntry> entries;
  entries.reserve(words.names.size());
  for (auto& name : words.names) entries.push_back({std::move(name), 1});
  // Text vectors carry no counts; synthesize a unit-count vocabulary in file
  // order.
  Vocabulary vocab = Vocabulary::from_entries(
      std::move(entries), words.names.size(), 1, /*enforce_order=*/false);

  Mode mode = chars_path.empty() ? Mode::kCbow : Mode::kCwe;
  CharInventory inv;
  std::vector<float> char_values;
  if (mode == Mode::kCwe) {
    TextMatrix chars = load_vectors_text(chars_path);
    if (chars.dim != words.dim)
      throw Error("word and character files disagree on dimension");
    std::vector<CharEntry> char_entries;
    std::unordered_map<char32_t, std::int32_t> index;
    for (const auto& name : chars.names) {
      auto cps = utf8::decode(name);
      if (cps.size() != 1)
        throw Error("character vectors file: row name '" + name +
                    "' is not a single character");
      index.emplace(cps[0], std::int32_t(char_entries.size()));
      char_entries.push_back({cps[0], 1});
    }
    std::vector<std::vector<std::int32_t>> per_word(vocab.size());
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      for (char32_t cp : utf8::decode(vocab.entry(std::int32_t(w)).word)) {
        auto it = index.find(cp);
        if (it == index.end())
          throw Error("word '" + vocab.entry(std::int32_t(w)).word +
                      "' has a character missing from " + chars_path);
        per_word[w].push_back(it->second);
      }
    }
    inv = CharInventory::from_parts(std::move(char_entries),
                                    std::move(per_word));
    char_values = std::move(chars.values);
  }

  std::vector<float> outputs(words.values.size(), 0.0f);
  return EmbeddingModel::from_parts(mode, words.dim, std::move(vocab),
                                    std::move(inv), std::move(words.values),
                                    std::move(char_values),
                                    std::move(outputs));
}

EmbeddingModel load_model(const std::string& path) {
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    char magic[5] = {};
    if (in.read(magic, 5) && std::memcmp(magic, kMagic, 5) == 0)
      return load_model_binary(path);
  }
  // Text fallback; look for a sibling character file when given the
  // conventional .words.vec name.
  std::string chars_path;
  const std::string suffix = ".words.vec";
  if (path.size() > suffix.size() &&
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    std::string cand =
        path.substr(0, path.size() - suffix.size()) + ".chars.vec";
    if (std::ifstream probe(cand); probe.good()) chars_path = cand;
  }
  return load_model_text(path, chars_path);
}

}  // namespace hanbias
