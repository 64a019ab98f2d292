#include "fivegcs/synthetic.hpp"

#include "fivegcs/sampling.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace fivegcs {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("synthetic spec: bad value for " + key + ": '" + value + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("synthetic spec: bad value for " + key + ": '" + value + "'");
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Matrix random_orthogonal(Eigen::Index d, SeededRng& rng) {
  Matrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(d, d);
}

}  // namespace

std::string SyntheticSpec::canonical() const {
  std::ostringstream os;
  os << (kind == SyntheticKind::quadratic ? "quadratic" : "logistic") << ":d=" << dimension;
  if (kind == SyntheticKind::logistic) os << ",n=" << points;
  os << ",kappa=" << format_double(kappa) << ",shift=" << format_double(shift) << ",seed=" << seed;
  return os.str();
}

SyntheticSpec parse_synthetic(const std::string& text) {
  SyntheticSpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "quadratic") {
    spec.kind = SyntheticKind::quadratic;
  } else if (kind == "logistic") {
    spec.kind = SyntheticKind::logistic;
  } else {
    throw ConfigError("synthetic spec: unknown kind '" + kind + "' (expected quadratic or logistic)");
  }
  if (colon == std::string::npos) return spec;

  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("synthetic spec: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "d") {
      spec.dimension = parse_uint(key, value);
    } else if (key == "n") {
      spec.points = parse_uint(key, value);
    } else if (key == "kappa") {
      spec.kappa = parse_double(key, value);
    } else if (key == "shift") {
      spec.shift = parse_double(key, value);
    } else if (key == "seed") {
      spec.seed = parse_uint(key, value);
    } else {
      throw ConfigError("synthetic spec: unknown key '" + key + "'");
    }
  }
  if (spec.dimension < 1) throw ConfigError("synthetic spec: d must be positive");
  if (spec.points < 1) throw ConfigError("synthetic spec: n must be positive");
  if (!(spec.kappa > 1.0)) throw ConfigError("synthetic spec: kappa must exceed 1");
  return spec;
}

Problem make_quadratic_problem(const SyntheticSpec& spec, std::size_t clients) {
  if (clients < 1) throw ConfigError("need at least one client");
  SeededRng rng(mix_seed(spec.seed));
  const auto d = static_cast<Eigen::Index>(spec.dimension);
  std::vector<std::shared_ptr<const Loss>> losses;
  for (std::size_t m = 0; m < clients; ++m) {
    const double top = m == 0 ? 1.0 : 0.25 + 0.75 * rng.uniform01();
    Vector eig(d);
    eig[0] = top;
    for (Eigen::Index i = 1; i < d; ++i) eig[i] = top * rng.uniform01();
    const Matrix u = random_orthogonal(d, rng);
    const Matrix q = u * eig.asDiagonal() * u.transpose();
    Vector lin(d);
    for (Eigen::Index i = 0; i < d; ++i) lin[i] = spec.shift * rng.normal();
    losses.push_back(std::make_shared<QuadraticLoss>(q, lin));
  }
  double data_smoothness = 0.0;
  for (const auto& l : losses) data_smoothness = std::max(data_smoothness, l->smoothness());
  return Problem(std::move(losses), lambda_for_condition(data_smoothness, spec.kappa));
}

ParsedData make_logistic_data(const SyntheticSpec& spec, std::size_t clients) {
  SeededRng rng(mix_seed(spec.seed ^ 0x6c6f67697374ULL));
  const auto d = spec.dimension;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> w_global(d);
  for (auto& w : w_global) w = rng.normal();

  ParsedData out;
  out.dimension = d;
  for (std::size_t m = 0; m < clients; ++m) {
    std::vector<double> offset(d);
    std::vector<double> w_local(d);
    for (std::size_t j = 0; j < d; ++j) {
      offset[j] = spec.shift * rng.normal();
      w_local[j] = w_global[j] + spec.shift * rng.normal();
    }
    for (std::size_t i = 0; i < spec.points; ++i) {
      DataPoint p;
      double score = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double a = scale * (rng.normal() + offset[j]);
        p.features.emplace_back(static_cast<std::uint32_t>(j + 1), a);
        score += a * w_local[j];
      }
      p.label = score + 0.3 * rng.normal() >= 0.0 ? 1.0 : -1.0;
      out.points.push_back(std::move(p));
    }
  }
  return out;
}

Problem logistic_with_condition(std::vector<ClientShard> shards, double kappa) {
  double data_smoothness = 0.0;
  for (const auto& s : shards) data_smoothness = std::max(data_smoothness, estimate_L_m(s, 0.0));
  return Problem::logistic(std::move(shards), lambda_for_condition(data_smoothness, kappa));
}

Problem make_logistic_problem(const SyntheticSpec& spec, std::size_t clients) {
  const auto data = make_logistic_data(spec, clients);
  return logistic_with_condition(partition(data.points, data.dimension, clients), spec.kappa);
}

Problem make_synthetic_problem(const SyntheticSpec& spec, std::size_t clients) {
  return spec.kind == SyntheticKind::quadratic ? make_quadratic_problem(spec, clients)
                                               : make_logistic_problem(spec, clients);
}

}  // namespace fivegcs
