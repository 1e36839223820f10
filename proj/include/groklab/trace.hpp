#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "groklab/prng.hpp"

namespace grok {

// One row per epoch. Row e holds the state after e parameter updates, so row 0
// is the initialisation.
struct TraceRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double data_fit = 0.0;
  double complexity = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct TrainingTrace {
  std::string model;
  std::string config_hash;
  StreamKey key;
  std::vector<TraceRow> rows;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
  std::vector<double> train_acc() const;
  std::vector<double> val_acc() const;
};

}  // namespace grok
