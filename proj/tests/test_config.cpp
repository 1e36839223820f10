#include <doctest.h>

#include <filesystem>
#include <string>

#include "groklab/config.hpp"
#include "groklab/errors.hpp"

using namespace grok;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigInvalid& e) {
    return e.what();
  }
  return "";
}

const char* kTrain = R"({
  "experiment": "train",
  "dataset": {"name": "zero_one", "n_train": 8, "n_val": 8},
  "model": {"kind": "gpc"}
})";

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const ExperimentConfig c = parse_config(kTrain);
  CHECK(c.experiment == ExperimentKind::train);
  CHECK(c.master_seed == 0);
  CHECK(c.seeds == 1);
  CHECK(c.gamma == 0.95);
  CHECK(c.dataset->n_train == 8);
  CHECK(c.model->kind == "gpc");
  CHECK(c.lr() == 1e-2);
  CHECK(c.epochs() == 1000);
  // Canonical form is itself a valid config and stable under re-parsing.
  CHECK(parse_config(c.canonical).canonical == c.canonical);
}

TEST_CASE("missing and unknown fields name their path") {
  CHECK(error_of(R"({"dataset": {"name": "zero_one"}, "model": {"kind": "gpc"}})").find("experiment") == 0);
  CHECK(error_of(R"({"experiment": "train", "model": {"kind": "gpc"}})").find("dataset: missing required field") == 0);
  CHECK(error_of(R"({"experiment": "train", "dataset": {"name": "zero_one"}, "model": {}})").find("model.kind") == 0);
  CHECK(error_of(R"({"experiment": "train", "dataset": {"name": "zero_one", "colour": 1}, "model": {"kind": "gpc"}})")
            .find("dataset.colour: unknown field") == 0);
  CHECK(error_of(R"({"experiment": "train", "extra": 1, "dataset": {"name": "zero_one"}, "model": {"kind": "gpc"}})")
            .find("extra: unknown field") == 0);
  // A field that exists for another model kind is still unknown here.
  CHECK(error_of(R"({"experiment": "train", "dataset": {"name": "zero_one"}, "model": {"kind": "gpc", "hidden": 3}})")
            .find("model.hidden: unknown field") == 0);
}

TEST_CASE("type and range errors") {
  CHECK(error_of(R"({"experiment": "train", "seeds": -1, "dataset": {"name": "zero_one"}, "model": {"kind": "gpc"}})")
            .find("seeds") == 0);
  CHECK(error_of(R"({"experiment": "train", "dataset": {"name": "zero_one", "n_train": "x"}, "model": {"kind": "gpc"}})")
            .find("dataset.n_train") == 0);
  CHECK(error_of(R"({"experiment": "train", "dataset": {"name": "modular", "p": 8}, "model": {"kind": "mlp"}})")
            .find("dataset.p: must be prime") == 0);
  CHECK(error_of(R"({"experiment": "sweep", "dataset": {"name": "parity"}, "model": {"kind": "mlp"}})")
            .find("dataset.name") == 0);
  CHECK(error_of(R"({"experiment": "launch"})").find("experiment") == 0);
  CHECK(error_of("{not json").find("<root>") == 0);
  CHECK(error_of(R"({"experiment": "train", "dataset": {"name": "zero_one"}, "model": {"kind": "gpc"}, "optimizer": {"lr": -1}})")
            .find("optimizer.lr") == 0);
}

TEST_CASE("committed configs parse") {
  const std::filesystem::path dir = std::filesystem::path(GROKLAB_SOURCE_DIR) / "configs";
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
    ++n;
  }
  CHECK(n >= 6);
}
