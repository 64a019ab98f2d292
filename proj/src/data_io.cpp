#include "fivegcs/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>

namespace fivegcs {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_index(std::string_view s, std::uint32_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

ParsedData parse_libsvm(std::istream& in) {
  ParsedData data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;

    DataPoint point;
    double label = 0.0;
    if (!parse_double(tokens[0], label)) throw ParseError(line_no, "malformed label '" + std::string(tokens[0]) + "'");
    if (label == 1.0) {
      point.label = 1.0;
    } else if (label == -1.0 || label == 0.0) {
      point.label = -1.0;
    } else {
      throw ParseError(line_no, "label outside {-1,0,+1}: '" + std::string(tokens[0]) + "'");
    }

    std::uint32_t previous = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "malformed token '" + std::string(tok) + "'");
      std::uint32_t index = 0;
      double value = 0.0;
      if (!parse_index(tok.substr(0, colon), index) || index == 0) {
        throw ParseError(line_no, "malformed feature index in '" + std::string(tok) + "'");
      }
      if (!parse_double(tok.substr(colon + 1), value)) {
        throw ParseError(line_no, "malformed feature value in '" + std::string(tok) + "'");
      }
      if (index <= previous) {
        throw ParseError(line_no, "feature index " + std::to_string(index) + " not increasing");
      }
      previous = index;
      point.features.emplace_back(index, value);
    }
    data.dimension = std::max<std::size_t>(data.dimension, point.max_index());
    data.points.push_back(std::move(point));
  }
  return data;
}

ParsedData parse_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
  return parse_libsvm(in);
}

void write_libsvm(std::ostream& out, const std::vector<DataPoint>& points) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (const auto& p : points) {
    buf << (p.label > 0 ? "+1" : "-1");
    for (const auto& [idx, val] : p.features) buf << ' ' << idx << ':' << val;
    buf << '\n';
  }
  out << buf.str();
}

std::vector<ClientShard> partition(const std::vector<DataPoint>& points, std::size_t dimension,
                                   std::size_t clients) {
  if (clients == 0) throw std::invalid_argument("partition: need at least one client");
  if (clients > points.size()) {
    throw std::invalid_argument("partition: " + std::to_string(clients) + " clients but only " +
                                std::to_string(points.size()) + " points");
  }
  const std::size_t per_client = points.size() / clients;
  std::vector<ClientShard> shards(clients);
  for (std::size_t m = 0; m < clients; ++m) {
    auto first = points.begin() + static_cast<std::ptrdiff_t>(m * per_client);
    shards[m].points.assign(first, first + static_cast<std::ptrdiff_t>(per_client));
    shards[m].dimension = dimension;
  }
  return shards;
}

}  // namespace fivegcs
