#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fivegcs {

/// A labeled sparse row. Feature indices are 1-based and strictly increasing.
struct DataPoint {
  std::vector<std::pair<std::uint32_t, double>> features;
  double label = 1.0;

  std::uint32_t max_index() const { return features.empty() ? 0 : features.back().first; }
  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

/// The local dataset of one client.
struct ClientShard {
  std::vector<DataPoint> points;
  std::size_t dimension = 0;
};

struct ParsedData {
  std::vector<DataPoint> points;
  std::size_t dimension = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads `<label> <idx>:<val> ...` lines. Labels 0/1 are mapped to -1/+1.
ParsedData parse_libsvm(std::istream& in);
ParsedData parse_libsvm_file(const std::string& path);

/// Writes points in the same format with round-trip exact values.
void write_libsvm(std::ostream& out, const std::vector<DataPoint>& points);

/// Contiguous equal-size split; the trailing |points| mod M points are dropped.
std::vector<ClientShard> partition(const std::vector<DataPoint>& points, std::size_t dimension,
                                   std::size_t clients);

}  // namespace fivegcs
