#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace decepshap {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);

// Writes to a temporary sibling and renames it into place, so readers never
// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// A batch of files that is written only after every entry has been produced.
class OutputBatch {
 public:
  void add(std::filesystem::path path, std::string contents);
  void commit() const;
  std::size_t size() const { return files_.size(); }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

// Flat `key = value` configuration; `#` starts a comment line.
std::map<std::string, std::string> parse_key_value_config(std::string_view text);

// Numeric table with a header row, e.g. the XOR fixture.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_numeric_csv(std::string_view text);

}  // namespace decepshap
