#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace mollify {

/// Shortest round-trip decimal representation, '.' separator, independent of
/// the global locale.
std::string format_double(double x);

/// Minimal CSV emitter: fixed header, newline-terminated rows, no quoting
/// (all fields are numbers or bare identifiers).
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& field(double x);
  CsvWriter& field(std::size_t x);
  CsvWriter& field(std::string_view s);
  void end_row();

  std::size_t columns() const { return columns_; }

 private:
  void separator();

  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

}  // namespace mollify
