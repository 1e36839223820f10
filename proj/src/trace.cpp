#include "groklab/trace.hpp"

namespace grok {

std::vector<double> TrainingTrace::train_acc() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.train_acc);
  return out;
}

std::vector<double> TrainingTrace::val_acc() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.val_acc);
  return out;
}

}  // namespace grok
