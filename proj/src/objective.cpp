#include "fivegcs/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fivegcs {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double estimate_L_m(const ClientShard& shard, double lambda) {
  if (shard.points.empty()) throw std::invalid_argument("estimate_L_m: empty shard");
  const auto d = static_cast<Eigen::Index>(shard.dimension);
  const double n = static_cast<double>(shard.points.size());

  // Deterministic start with distinct entries so it is not orthogonal to the
  // leading eigenvector for structured data.
  if (d == 0) return lambda;
  Vector v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = 1.0 + 1.0 / static_cast<double>(j + 2);
  v.normalize();

  auto apply = [&](const Vector& in) {
    Vector out = Vector::Zero(d);
    for (const auto& p : shard.points) {
      double dot = 0.0;
      for (const auto& [idx, val] : p.features) dot += val * in[idx - 1];
      for (const auto& [idx, val] : p.features) out[idx - 1] += val * dot;
    }
    return out;
  };

  double previous = 0.0;
  double rayleigh = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = apply(v);
    rayleigh = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return lambda;
    v = w / norm;
    if (it > 0 && std::abs(rayleigh - previous) <= 1e-10 * std::abs(rayleigh)) break;
    previous = rayleigh;
  }
  return rayleigh / (4.0 * n) + lambda;
}

double lambda_for_condition(double data_smoothness, double kappa) {
  if (!(kappa > 1.0)) throw ConfigError("condition number must exceed 1");
  return data_smoothness / (kappa - 1.0);
}

// ---------------------------------------------------------------- LogisticLoss

LogisticLoss::LogisticLoss(ClientShard shard) : shard_(std::move(shard)) {
  if (shard_.points.empty()) throw std::invalid_argument("LogisticLoss: empty shard");
  for (const auto& p : shard_.points) {
    if (p.max_index() > shard_.dimension) throw std::invalid_argument("LogisticLoss: feature index exceeds dimension");
  }
  smoothness_ = estimate_L_m(shard_, 0.0);
}

double LogisticLoss::margin(const DataPoint& p, const Vector& x) const {
  double z = 0.0;
  for (const auto& [idx, val] : p.features) z += val * x[idx - 1];
  return p.label * z;
}

double LogisticLoss::value(const Vector& x) const {
  double s = 0.0;
  for (const auto& p : shard_.points) s += softplus(-margin(p, x));
  return s / static_cast<double>(shard_.points.size());
}

void LogisticLoss::add_gradient(const Vector& x, double scale, Vector& g) const {
  const double w = scale / static_cast<double>(shard_.points.size());
  for (const auto& p : shard_.points) {
    const double coef = -w * p.label * sigmoid(-margin(p, x));
    for (const auto& [idx, val] : p.features) g[idx - 1] += coef * val;
  }
}

Matrix LogisticLoss::hessian(const Vector& x) const {
  const auto d = static_cast<Eigen::Index>(shard_.dimension);
  Matrix h = Matrix::Zero(d, d);
  const double n = static_cast<double>(shard_.points.size());
  for (const auto& p : shard_.points) {
    const double s = sigmoid(margin(p, x));
    const double w = s * (1.0 - s) / n;
    for (const auto& [i, vi] : p.features) {
      for (const auto& [j, vj] : p.features) h(i - 1, j - 1) += w * vi * vj;
    }
  }
  return h;
}

void LogisticLoss::add_component_gradient(std::size_t i, const Vector& x, double scale, Vector& g) const {
  const auto& p = shard_.points[i];
  const double coef = -scale * p.label * sigmoid(-margin(p, x));
  for (const auto& [idx, val] : p.features) g[idx - 1] += coef * val;
}

double LogisticLoss::component_smoothness(std::size_t i) const {
  double sq = 0.0;
  for (const auto& [idx, val] : shard_.points[i].features) sq += val * val;
  return sq / 4.0;
}

// --------------------------------------------------------------- QuadraticLoss

QuadraticLoss::QuadraticLoss(Matrix q_matrix, Vector q_vector)
    : quad_(std::move(q_matrix)), linear_(std::move(q_vector)) {
  if (quad_.rows() != quad_.cols() || quad_.rows() != linear_.size()) {
    throw std::invalid_argument("QuadraticLoss: shape mismatch");
  }
  quad_ = 0.5 * (quad_ + quad_.transpose());
  if (quad_.size() == 0) {
    smoothness_ = 0.0;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(quad_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    throw std::invalid_argument("QuadraticLoss: matrix is not positive semidefinite");
  }
  smoothness_ = std::max(0.0, eig.eigenvalues().maxCoeff());
}

double QuadraticLoss::value(const Vector& x) const { return 0.5 * x.dot(quad_ * x) - linear_.dot(x); }

void QuadraticLoss::add_gradient(const Vector& x, double scale, Vector& g) const {
  g.noalias() += scale * (quad_ * x - linear_);
}

void QuadraticLoss::add_component_gradient(std::size_t, const Vector& x, double scale, Vector& g) const {
  add_gradient(x, scale, g);
}

// --------------------------------------------------------------------- Problem

Problem::Problem(std::vector<std::shared_ptr<const Loss>> losses, double lambda)
    : losses_(std::move(losses)), lambda_(lambda) {
  if (losses_.empty()) throw std::invalid_argument("Problem: need at least one client");
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("Problem: lambda must be nonnegative");
  dimension_ = losses_.front()->dimension();
  L_ = 0.0;
  for (const auto& loss : losses_) {
    if (!loss) throw std::invalid_argument("Problem: null loss");
    if (loss->dimension() != dimension_) throw std::invalid_argument("Problem: clients disagree on dimension");
    L_m_.push_back(loss->smoothness() + lambda_);
    L_ = std::max(L_, L_m_.back());
  }
}

Problem Problem::logistic(std::vector<ClientShard> shards, double lambda) {
  std::vector<std::shared_ptr<const Loss>> losses;
  losses.reserve(shards.size());
  for (auto& s : shards) losses.push_back(std::make_shared<LogisticLoss>(std::move(s)));
  return Problem(std::move(losses), lambda);
}

double Problem::f_m(std::size_t m, const Vector& x) const {
  return losses_[m]->value(x) + 0.5 * lambda_ * x.squaredNorm();
}

Vector Problem::grad_f_m(std::size_t m, const Vector& x) const {
  Vector g = lambda_ * x;
  losses_[m]->add_gradient(x, 1.0, g);
  return g;
}

double Problem::f(const Vector& x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < clients(); ++m) s += f_m(m, x);
  return s / static_cast<double>(clients());
}

Vector Problem::grad_f(const Vector& x) const {
  Vector g = Vector::Zero(dimension());
  for (std::size_t m = 0; m < clients(); ++m) g += grad_f_m(m, x);
  return g / static_cast<double>(clients());
}

// mu = lambda, so the quadratic terms cancel analytically: F_m = l_m / M.
// Evaluated without the cancellation.
double Problem::F_m(std::size_t m, const Vector& x) const {
  return losses_[m]->value(x) / static_cast<double>(clients());
}

Vector Problem::grad_F_m(std::size_t m, const Vector& x) const {
  Vector g = Vector::Zero(dimension());
  losses_[m]->add_gradient(x, 1.0 / static_cast<double>(clients()), g);
  return g;
}

Matrix Problem::hess_F_m(std::size_t m, const Vector& x) const {
  return losses_[m]->hessian(x) / static_cast<double>(clients());
}

// ------------------------------------------------------------- LocalSubproblem

LocalSubproblem LocalSubproblem::make(const Problem& problem, std::size_t m, double tau, const Vector& x_hat,
                                      const Vector& u_m) {
  return LocalSubproblem{&problem, m, tau, x_hat + u_m / tau};
}

double LocalSubproblem::value(const Vector& y) const {
  return problem->F_m(client, y) + 0.5 * tau * (y - center).squaredNorm();
}

Vector LocalSubproblem::gradient(const Vector& y) const {
  return problem->grad_F_m(client, y) + tau * (y - center);
}

}  // namespace fivegcs
