#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "hanbias/embedding.hpp"
#include "hanbias/error.hpp"
#include "hanbias/vocabulary.hpp"
#include "test_util.hpp"

using namespace hanbias;

namespace {

EmbeddingModel two_char_model() {
  // 你好 -> chars 你, 好.
  return testutil::cwe_model(2, {{"你好", {2.0f, 0.0f}}},
                             {{U'你', {0.0f, 2.0f}}, {U'好', {0.0f, -2.0f}}},
                             {{0, 1}});
}

}  // namespace

TEST_CASE("mode names round-trip") {
  CHECK(mode_name(Mode::kCbow) == "cbow");
  CHECK(mode_name(Mode::kCwe) == "cwe");
  CHECK(parse_mode("cbow") == Mode::kCbow);
  CHECK(parse_mode("cwe") == Mode::kCwe);
  CHECK_THROWS_AS(parse_mode("sg"), Error);
}

TEST_CASE("composed representation averages word and character mean") {
  const auto model = two_char_model();
  const auto x = compose(model, 0);
  REQUIRE(x.size() == 2);
  // 0.5 * ([2,0] + mean([0,2],[0,-2])) = [1, 0]
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 0.0);
}

TEST_CASE("single-character word composes with its own character") {
  const auto model = testutil::cwe_model(2, {{"你", {2.0f, 2.0f}}},
                                         {{U'你', {0.0f, 0.0f}}}, {{0}});
  const auto x = compose(model, 0);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 1.0);
}

TEST_CASE("composition of zero vectors is the zero vector") {
  const auto model = testutil::cwe_model(2, {{"你", {0.0f, 0.0f}}},
                                         {{U'你', {0.0f, 0.0f}}}, {{0}});
  const auto x = compose(model, 0);
  CHECK(x == std::vector<double>{0.0, 0.0});
}

TEST_CASE("CBOW composition is the word row") {
  const auto model = testutil::word_model(3, {{"a", {1.0f, 2.0f, 3.0f}}});
  CHECK(compose(model, 0) == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("compose rejects out-of-range ids") {
  const auto model = testutil::word_model(2, {{"a", {1.0f, 0.0f}}});
  CHECK_THROWS_AS(compose(model, -1), Error);
  CHECK_THROWS_AS(compose(model, 1), Error);
}

TEST_CASE("composition scales linearly") {
  const auto base = testutil::cwe_model(2, {{"你", {0.25f, -0.5f}}},
                                        {{U'你', {0.75f, 1.0f}}}, {{0}});
  const auto doubled = testutil::cwe_model(2, {{"你", {0.5f, -1.0f}}},
                                           {{U'你', {1.5f, 2.0f}}}, {{0}});
  const auto x = compose(base, 0);
  const auto y = compose(doubled, 0);
  CHECK(y[0] == 2.0 * x[0]);
  CHECK(y[1] == 2.0 * x[1]);
}

TEST_CASE("opted-out words skip composition") {
  auto model = two_char_model();
  model.set_compose_optout({0});
  CHECK(compose(model, 0) == std::vector<double>{2.0, 0.0});
}

TEST_CASE("lookup selects composed or word-only representation") {
  const auto model = two_char_model();
  CHECK(word_representation(model, 0, Lookup::kComposed) ==
        std::vector<double>{1.0, 0.0});
  CHECK(word_representation(model, 0, Lookup::kWordOnly) ==
        std::vector<double>{2.0, 0.0});
  const auto cbow = testutil::word_model(2, {{"a", {3.0f, 4.0f}}});
  CHECK(word_representation(cbow, 0, Lookup::kComposed) ==
        std::vector<double>{3.0, 4.0});
}

TEST_CASE("cosine similarity") {
  const std::vector<double> e1 = {1.0, 0.0};
  const std::vector<double> e2 = {0.0, 2.0};
  const std::vector<double> diag = {1.0, 1.0};
  CHECK(cosine(e1, e1) == doctest::Approx(1.0));
  CHECK(cosine(e1, e2) == doctest::Approx(0.0));
  CHECK(cosine(e1, diag) == doctest::Approx(0.70710678).epsilon(1e-4));
  CHECK_THROWS_AS(cosine(e1, std::vector<double>{0.0, 0.0}), Error);
  CHECK_THROWS_AS(cosine(e1, std::vector<double>{1.0, 0.0, 0.0}), Error);
}

TEST_CASE("nearest ranks by cosine and skips exclusions") {
  const auto model = testutil::word_model(2, {{"a", {1.0f, 0.0f}},
                                              {"b", {0.9f, 0.1f}},
                                              {"c", {-1.0f, 0.0f}},
                                              {"z", {0.0f, 0.0f}}});
  const std::vector<double> query = {1.0, 0.0};
  auto top = nearest(model, query, 10, {}, Lookup::kComposed);
  REQUIRE(top.size() == 3);  // zero row is unrankable
  CHECK(top[0].word_id == 0);
  CHECK(top[1].word_id == 1);
  CHECK(top[2].word_id == 2);
  CHECK(top[0].similarity == doctest::Approx(1.0));
  CHECK(top[2].similarity == doctest::Approx(-1.0));

  auto excl = nearest(model, query, 2, {0}, Lookup::kComposed);
  REQUIRE(excl.size() == 2);
  CHECK(excl[0].word_id == 1);
  CHECK(excl[1].word_id == 2);
}

TEST_CASE("nearest breaks exact ties by ascending id") {
  const auto model = testutil::word_model(
      2, {{"p", {1.0f, 0.0f}}, {"q", {1.0f, 0.0f}}, {"r", {2.0f, 0.0f}}});
  auto top = nearest(model, std::vector<double>{1.0, 0.0}, 3, {},
                     Lookup::kComposed);
  REQUIRE(top.size() == 3);
  CHECK(top[0].word_id == 0);
  CHECK(top[1].word_id == 1);
  CHECK(top[2].word_id == 2);
}

TEST_CASE("nearest validates its inputs") {
  const auto model = testutil::word_model(2, {{"a", {1.0f, 0.0f}}});
  CHECK_THROWS_AS(
      nearest(model, std::vector<double>{1.0, 0.0}, 0, {}, Lookup::kComposed),
      Error);
  CHECK_THROWS_AS(
      nearest(model, std::vector<double>{1.0}, 1, {}, Lookup::kComposed),
      Error);
  CHECK_THROWS_AS(
      nearest(model, std::vector<double>{0.0, 0.0}, 1, {}, Lookup::kComposed),
      Error);
}

TEST_CASE("init draws small deterministic values and zero outputs") {
  TokenStream stream;
  stream.documents = {{"a", "b", "c", "a"}};
  auto vocab = Vocabulary::build(stream, 1);
  auto m1 = EmbeddingModel::init(Mode::kCbow, 4, vocab, {}, 7);
  auto m2 = EmbeddingModel::init(Mode::kCbow, 4, vocab, {}, 7);
  auto m3 = EmbeddingModel::init(Mode::kCbow, 4, vocab, {}, 8);
  CHECK(m1.all_finite());
  bool any_nonzero = false;
  for (std::int32_t id = 0; id < 3; ++id) {
    for (float v : m1.word_row(id)) {
      CHECK(std::abs(v) <= 0.5 / 4 + 1e-9);
      any_nonzero = any_nonzero || v != 0.0f;
    }
    for (float v : m1.output_row(id)) CHECK(v == 0.0f);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(m1.word_row(id)[i] == m2.word_row(id)[i]);
    }
  }
  CHECK(any_nonzero);
  bool differs = false;
  for (std::size_t i = 0; i < 4; ++i)
    differs = differs || m1.word_row(0)[i] != m3.word_row(0)[i];
  CHECK(differs);
  CHECK_THROWS_AS(EmbeddingModel::init(Mode::kCbow, 0, vocab, {}, 1), Error);
  CHECK_THROWS_AS(EmbeddingModel::init(Mode::kCwe, 4, vocab, {}, 1), Error);
}

TEST_CASE("from_parts validates matrix shapes") {
  TokenStream stream;
  stream.documents = {{"a", "b"}};
  auto vocab = Vocabulary::build(stream, 1);
  std::vector<float> good(2 * 2, 0.0f);
  std::vector<float> bad(3, 0.0f);
  CHECK_THROWS_AS(
      EmbeddingModel::from_parts(Mode::kCbow, 2, vocab, {}, bad, {}, good),
      Error);
  CHECK_THROWS_AS(
      EmbeddingModel::from_parts(Mode::kCbow, 2, vocab, {}, good, bad, good),
      Error);
}

TEST_CASE("all_finite detects corrupt parameters") {
  auto model = testutil::word_model(2, {{"a", {1.0f, 2.0f}}});
  CHECK(model.all_finite());
  model.mutable_words()[1] = std::nanf("");
  CHECK_FALSE(model.all_finite());
}

TEST_CASE("binary model round-trip is exact") {
  const auto dir = testutil::make_temp_dir("model_bin");
  auto model = testutil::cwe_model(
      3,
      {{"你好", {0.125f, -0.75f, 2.5f}}, {"好", {1e-7f, 3.14159f, -42.0f}}},
      {{U'你', {0.5f, 0.25f, -0.125f}}, {U'好', {9.0f, -8.0f, 7.0f}}},
      {{0, 1}, {1}});
  model.set_compose_optout({1});
  const auto path = (dir / "m.bin").string();
  save_model_binary(model, path);
  const auto loaded = load_model_binary(path);

  CHECK(loaded.mode() == Mode::kCwe);
  CHECK(loaded.dim() == 3);
  REQUIRE(loaded.vocab().size() == 2);
  CHECK(loaded.vocab().entry(0).word == "你好");
  CHECK(loaded.vocab().total_tokens() == model.vocab().total_tokens());
  CHECK(loaded.compose_optout().contains(1));
  for (std::int32_t w = 0; w < 2; ++w)
    for (std::int32_t i = 0; i < 3; ++i) {
      CHECK(loaded.word_row(w)[std::size_t(i)] ==
            model.word_row(w)[std::size_t(i)]);
      CHECK(loaded.output_row(w)[std::size_t(i)] ==
            model.output_row(w)[std::size_t(i)]);
    }
  for (std::int32_t c = 0; c < 2; ++c)
    for (std::int32_t i = 0; i < 3; ++i)
      CHECK(loaded.char_row(c)[std::size_t(i)] ==
            model.char_row(c)[std::size_t(i)]);
  CHECK(loaded.chars().word_chars(0) == std::vector<std::int32_t>{0, 1});

  // Generic loader sniffs the magic.
  const auto sniffed = load_model(path);
  CHECK(sniffed.mode() == Mode::kCwe);
  std::filesystem::remove_all(dir);
}

TEST_CASE("binary loader rejects garbage") {
  const auto dir = testutil::make_temp_dir("model_garbage");
  testutil::write_file(dir / "junk.bin", "NOTAMODEL");
  CHECK_THROWS_AS(load_model_binary((dir / "junk.bin").string()), Error);
  CHECK_THROWS_AS(load_model_binary((dir / "absent.bin").string()), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("text export round-trips within print precision") {
  const auto dir = testutil::make_temp_dir("model_text");
  auto model = testutil::cwe_model(
      2, {{"你好", {0.123456f, -1.0f}}, {"好", {2.0f, 0.5f}}},
      {{U'你', {0.9f, -0.9f}}, {U'好', {0.1f, 0.2f}}}, {{0, 1}, {1}});
  const auto base = (dir / "m").string();
  save_model(model, base);
  CHECK(std::filesystem::exists(base + ".words.vec"));
  CHECK(std::filesystem::exists(base + ".chars.vec"));
  CHECK(std::filesystem::exists(base + ".bin"));

  // load_model on the text file discovers the sibling character file.
  const auto loaded = load_model(base + ".words.vec");
  CHECK(loaded.mode() == Mode::kCwe);
  REQUIRE(loaded.vocab().size() == 2);
  CHECK(loaded.vocab().entry(1).word == "好");
  for (std::int32_t w = 0; w < 2; ++w) {
    const auto orig = compose(model, w);
    const auto got = compose(loaded, w);
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(got[i] == doctest::Approx(orig[i]).epsilon(1e-5));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("CBOW text export omits the character file") {
  const auto dir = testutil::make_temp_dir("model_cbow_text");
  auto model = testutil::word_model(2, {{"a", {1.0f, 2.0f}}});
  const auto base = (dir / "m").string();
  save_model(model, base);
  CHECK(std::filesystem::exists(base + ".words.vec"));
  CHECK_FALSE(std::filesystem::exists(base + ".chars.vec"));
  const auto loaded = load_model(base + ".words.vec");
  CHECK(loaded.mode() == Mode::kCbow);
  std::filesystem::remove_all(dir);
}

TEST_CASE("text loader reports malformed files with line numbers") {
  const auto dir = testutil::make_temp_dir("model_bad_text");
  testutil::write_file(dir / "short.vec", "1 3\nfoo 1 2\n");
  CHECK_THROWS_WITH_AS(load_model_text((dir / "short.vec").string(), ""),
                       doctest::Contains("line 2"), Error);
  testutil::write_file(dir / "rows.vec", "2 2\nfoo 1 2\n");
  CHECK_THROWS_AS(load_model_text((dir / "rows.vec").string(), ""), Error);
  testutil::write_file(dir / "nan.vec", "1 2\nfoo 1 x\n");
  CHECK_THROWS_AS(load_model_text((dir / "nan.vec").string(), ""), Error);
  testutil::write_file(dir / "empty.vec", "");
  CHECK_THROWS_AS(load_model_text((dir / "empty.vec").string(), ""), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("text loader requires every character of every word") {
  const auto dir = testutil::make_temp_dir("model_missing_char");
  testutil::write_file(dir / "w.vec", "1 2\n你好 1 2\n");
  testutil::write_file(dir / "c.vec", "1 2\n你 1 2\n");  // 好 is missing
  CHECK_THROWS_AS(
      load_model_text((dir / "w.vec").string(), (dir / "c.vec").string()),
      Error);
  std::filesystem::remove_all(dir);
}
