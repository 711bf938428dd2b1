#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mollify/csv.hpp"

using namespace mollify;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mollify_csv_" + name);
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(100.0), "100");
  EXPECT_EQ(format_double(-2.5e-7), "-2.5e-07");
  for (double x : {1.0 / 3.0, 1.0 / 252.0, 4.605170185988092, 1e300, 5e-324}) {
    const std::string text = format_double(x);
    EXPECT_EQ(std::strtod(text.c_str(), nullptr), x) << text;
  }
}

TEST(CsvWriter, WritesHeaderAndRows) {
  const auto path = scratch("rows.csv");
  {
    CsvWriter w(path, {"epsilon", "n", "mode"});
    EXPECT_EQ(w.columns(), 3u);
    w.field(0.05).field(std::size_t{64}).field("oracle");
    w.end_row();
    w.field(0.025).field(std::size_t{256}).field("forecast");
    w.end_row();
  }
  EXPECT_EQ(slurp(path), "epsilon,n,mode\n0.05,64,oracle\n0.025,256,forecast\n");
  std::filesystem::remove(path);
}

TEST(CsvWriter, EnforcesRowShape) {
  const auto path = scratch("shape.csv");
  CsvWriter w(path, {"a", "b"});
  w.field(1.0);
  EXPECT_THROW(w.end_row(), std::logic_error);
  w.field(2.0);
  EXPECT_THROW(w.field(3.0), std::logic_error);
  w.end_row();
  std::filesystem::remove(path);
}

TEST(CsvWriter, UnwritablePathThrows) {
  EXPECT_THROW(CsvWriter(std::filesystem::path("/nonexistent-dir/x.csv"), {"a"}), std::runtime_error);
}
