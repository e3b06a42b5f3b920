#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "btmdis/config.hpp"
#include "btmdis/dataset.hpp"
#include "btmdis/synth.hpp"
#include "btmdis/types.hpp"
#include "test_util.hpp"

using namespace btm;
using btmtest::small_gen;
namespace fs = std::filesystem;

namespace {

std::vector<LoadClassSpec> three_specs() {
  return {{"load_1", +1, 1}, {"load_2", +1, 1}, {"solar", -1, 1}};
}

WindowedSeries series(const Matrix& m) {
  WindowedSeries s;
  s.values = m;
  return s;
}

PartialLabelMatrix labels_from(const std::vector<std::vector<Label>>& e) {
  PartialLabelMatrix l;
  l.entries = e;
  return l;
}

}  // namespace

TEST_CASE("consistent inputs validate") {
  Matrix x = Matrix::Ones(4, 2);
  auto labels = labels_from({{Label::Present, Label::Unknown},
                             {Label::Unknown, Label::Present},
                             {Label::Unknown, Label::Unknown}});
  auto ds = validate_dataset(series(x), labels, three_specs());
  CHECK(ds.shape().window_length == 4);
  CHECK(ds.shape().train_windows == 2);
  CHECK(ds.shape().num_classes == 3);
}

TEST_CASE("a fully unknown label column is rejected") {
  Matrix x = Matrix::Ones(4, 2);
  auto labels = labels_from({{Label::Present, Label::Unknown},
                             {Label::Unknown, Label::Unknown},
                             {Label::Unknown, Label::Unknown}});
  try {
    validate_dataset(series(x), labels, three_specs());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FullyUnknownColumn);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("an unlabeled test set is admitted when labels are not required") {
  Matrix x = Matrix::Ones(4, 2);
  auto labels = labels_from({{Label::Unknown, Label::Unknown},
                             {Label::Unknown, Label::Unknown},
                             {Label::Unknown, Label::Unknown}});
  CHECK_NOTHROW(validate_dataset(series(x), labels, three_specs(), false));
}

TEST_CASE("a NaN window entry is rejected with its position") {
  Matrix x = Matrix::Ones(4, 2);
  x(2, 1) = std::nan("");
  auto labels = labels_from({{Label::Present, Label::Present},
                             {Label::Unknown, Label::Unknown},
                             {Label::Unknown, Label::Unknown}});
  try {
    validate_dataset(series(x), labels, three_specs());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteValue);
    CHECK(std::string(e.what()).find("(2,1)") != std::string::npos);
  }
}

TEST_CASE("known mask splits one partially observed column") {
  auto labels = labels_from({{Label::Unknown}, {Label::Unknown}, {Label::Present}});
  auto [known, unknown] = known_mask(labels);
  REQUIRE(known.size() == 1);
  CHECK(known[0] == CellIndex{2, 0});
  REQUIRE(unknown.size() == 2);
  CHECK(unknown[0] == CellIndex{0, 0});
  CHECK(unknown[1] == CellIndex{1, 0});
}

TEST_CASE("known mask with everything observed has no unknowns") {
  auto labels = labels_from({{Label::Present, Label::Absent},
                             {Label::Absent, Label::Present}});
  auto [known, unknown] = known_mask(labels);
  CHECK(known.size() == 4);
  CHECK(unknown.empty());
}

TEST_CASE("known mask with one fully unknown row") {
  auto labels = labels_from({{Label::Unknown, Label::Unknown},
                             {Label::Present, Label::Absent}});
  auto [known, unknown] = known_mask(labels);
  REQUIRE(unknown.size() == 2);
  CHECK(unknown[0].load_class == 0);
  CHECK(unknown[1].load_class == 0);
  CHECK(known.size() == 2);
}

TEST_CASE("dictionary invariants reject bad atoms") {
  DictionaryBank bank;
  bank.blocks = {Matrix::Ones(2, 1)};  // norm sqrt(2) > 1
  bank.class_specs = {{"load_1", +1, 1}};
  CHECK_THROWS_AS(bank.check_invariants(), Error);

  bank.blocks[0] << 0.6, -0.2;
  CHECK_THROWS_AS(bank.check_invariants(), Error);

  bank.blocks[0] << 0.6, 0.8;
  CHECK_NOTHROW(bank.check_invariants());
}

TEST_CASE("dataset round-trip preserves values, labels and truth") {
  auto data = generate_dataset(small_gen(16, 12, 6, 3, 0.7, 9));

  btmtest::TempDir tmp("btm_core");
  write_dataset(data.train, data.train_truth, tmp.path);
  auto back = read_dataset(tmp.path);

  CHECK((back.data.windows.values - data.train.windows.values).cwiseAbs().maxCoeff() <
        1e-12);
  REQUIRE(back.truth.has_value());
  for (int c = 0; c < 3; ++c) {
    CHECK((back.truth->per_class[c] - data.train_truth.per_class[c]).cwiseAbs().maxCoeff() <
          1e-12);
    for (int j = 0; j < 12; ++j) {
      CHECK(back.data.labels.at(c, j) == data.train.labels.at(c, j));
    }
    CHECK(back.data.specs[c].sign == data.train.specs[c].sign);
  }
}

TEST_CASE("a dataset without truth still loads") {
  auto data = generate_dataset(small_gen(8, 6, 3, 3, 0.7, 1));
  btmtest::TempDir tmp("btm_core");
  write_dataset(data.train, std::nullopt, tmp.path);
  auto back = read_dataset(tmp.path);
  CHECK_FALSE(back.truth.has_value());
  CHECK(back.data.windows.num_windows() == 6);
}

TEST_CASE("an out-of-alphabet label cell is a format error naming the cell") {
  btmtest::TempDir tmp("btm_core");
  auto data = generate_dataset(small_gen(8, 6, 3, 3, 0.7, 1));
  write_dataset(data.train, std::nullopt, tmp.path);
  // corrupt one label cell
  std::ifstream in(tmp.path / "labels.csv");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  in.close();
  auto pos = text.find_last_of("01?");
  text[pos] = '2';
  std::ofstream(tmp.path / "labels.csv") << text;
  CHECK_THROWS_AS(read_dataset(tmp.path), Error);
}

TEST_CASE("config parses overrides and rejects unknown keys with line numbers") {
  ToolkitConfig cfg;
  cfg.parse_text("p = 48\n# comment\ngamma=0.5\n", "inline");
  CHECK(cfg.get_int("p") == 48);
  CHECK(cfg.get_double("gamma") == doctest::Approx(0.5));

  ToolkitConfig bad;
  try {
    bad.parse_text("p=48\nnot_a_key=1\n", "inline");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("config rejects non-numeric values on typed reads") {
  ToolkitConfig cfg;
  cfg.set("p", "abc");
  CHECK_THROWS_AS(cfg.get_int("p"), Error);
  cfg.set("gamma", "0.5x");
  CHECK_THROWS_AS(cfg.get_double("gamma"), Error);
}

TEST_CASE("init window picks are labeled, deduplicated across profiles") {
  auto data = generate_dataset(small_gen(32, 60, 6, 3, 0.7, 3));
  for (int c = 0; c < 3; ++c) {
    auto picks = select_init_windows(data.train.windows.values, data.train.labels, c, 4);
    REQUIRE(picks.size() == 4);
    for (int j : picks) CHECK(data.train.labels.at(c, j) == Label::Present);
  }
  // a class with no Present labels yields nothing
  PartialLabelMatrix empty;
  empty.entries.assign(3, std::vector<Label>(60, Label::Unknown));
  CHECK(select_init_windows(data.train.windows.values, empty, 0, 4).empty());
}
