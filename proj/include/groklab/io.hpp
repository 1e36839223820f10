#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "groklab/trace.hpp"

namespace grok {

// Shortest decimal that parses back to the same double; "nan", "inf", "-inf"
// for non-finite values.
std::string format_double(double v);
double parse_double(const std::string& s);

// Rows of comma-separated fields. No quoting: fields never contain commas.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // IoError if absent
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

inline const std::vector<std::string> kTraceHeader = {"epoch", "train_loss", "train_acc", "val_acc", "data_fit",
                                                      "complexity"};

CsvTable trace_table(const TrainingTrace& trace);
void write_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path);
TrainingTrace read_trace_csv(const std::filesystem::path& path);

// SHA-1 of "blob <size>\0<content>", as `git hash-object` prints it.
std::string git_blob_hash(const std::string& content);

}  // namespace grok
