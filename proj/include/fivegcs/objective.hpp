#pragma once

#include "fivegcs/data_io.hpp"
#include "fivegcs/types.hpp"

#include <cstddef>
#include <memory>
#include <vector>

namespace fivegcs {

/// Data term l_m of a client objective; f_m(x) = l_m(x) + (lambda/2)|x|^2.
/// l_m is convex and a finite average l_m = (1/n) sum_i l_{m,i}.
class Loss {
 public:
  virtual ~Loss() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  /// g += scale * grad l(x)
  virtual void add_gradient(const Vector& x, double scale, Vector& g) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;
  /// Upper bound on the Lipschitz constant of grad l.
  virtual double smoothness() const = 0;

  virtual std::size_t components() const = 0;
  /// g += scale * grad l_i(x)
  virtual void add_component_gradient(std::size_t i, const Vector& x, double scale, Vector& g) const = 0;
  virtual double component_smoothness(std::size_t i) const = 0;
};

/// Average logistic loss (1/N) sum_i log(1 + exp(-b_i a_i^T x)) over one shard.
class LogisticLoss final : public Loss {
 public:
  explicit LogisticLoss(ClientShard shard);

  std::size_t dimension() const override { return shard_.dimension; }
  double value(const Vector& x) const override;
  void add_gradient(const Vector& x, double scale, Vector& g) const override;
  Matrix hessian(const Vector& x) const override;
  double smoothness() const override { return smoothness_; }
  std::size_t components() const override { return shard_.points.size(); }
  void add_component_gradient(std::size_t i, const Vector& x, double scale, Vector& g) const override;
  double component_smoothness(std::size_t i) const override;

  const ClientShard& shard() const { return shard_; }

 private:
  double margin(const DataPoint& p, const Vector& x) const;

  ClientShard shard_;
  double smoothness_;
};

/// l(x) = (1/2) x^T Q x - q^T x with Q symmetric positive semidefinite. A
/// single component; used for synthetic problems with exactly known spectra.
class QuadraticLoss final : public Loss {
 public:
  QuadraticLoss(Matrix q_matrix, Vector q_vector);

  std::size_t dimension() const override { return static_cast<std::size_t>(linear_.size()); }
  double value(const Vector& x) const override;
  void add_gradient(const Vector& x, double scale, Vector& g) const override;
  Matrix hessian(const Vector&) const override { return quad_; }
  double smoothness() const override { return smoothness_; }
  std::size_t components() const override { return 1; }
  void add_component_gradient(std::size_t i, const Vector& x, double scale, Vector& g) const override;
  double component_smoothness(std::size_t) const override { return smoothness_; }

 private:
  Matrix quad_;
  Vector linear_;
  double smoothness_;
};

/// Numerically stable log(1 + exp(z)).
double softplus(double z);
/// Numerically stable 1 / (1 + exp(-z)).
double sigmoid(double z);

/// lambda_max(A^T A) / (4N) + lambda by power iteration on the shard's rows.
/// Stops when successive Rayleigh quotients agree to 1e-10 relative or after
/// 10,000 iterations. A shard with no nonzero features returns lambda.
double estimate_L_m(const ClientShard& shard, double lambda);

/// Regularizer giving condition number exactly kappa: with L = L_data + lambda
/// and mu = lambda, L/mu = kappa. lambda = 1e-3 L corresponds to kappa = 1000.
double lambda_for_condition(double data_smoothness, double kappa);

/// The federated objective f = (1/M) sum_m f_m together with the lifted
/// reformulation F_m(x) = (1/M)(f_m(x) - (mu/2)|x|^2), mu = lambda.
/// Immutable after construction.
class Problem {
 public:
  Problem(std::vector<std::shared_ptr<const Loss>> losses, double lambda);

  static Problem logistic(std::vector<ClientShard> shards, double lambda);

  std::size_t clients() const { return losses_.size(); }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(dimension_); }
  double lambda() const { return lambda_; }
  double mu() const { return lambda_; }
  /// max_m L_m
  double L() const { return L_; }
  double L_client(std::size_t m) const { return L_m_[m]; }
  /// (L - mu) / M
  double L_F() const { return (L_ - lambda_) / static_cast<double>(clients()); }
  /// (L_m - mu) / M
  double L_F_client(std::size_t m) const { return (L_m_[m] - lambda_) / static_cast<double>(clients()); }
  double kappa() const { return L_ / lambda_; }
  const Loss& loss(std::size_t m) const { return *losses_[m]; }

  double f_m(std::size_t m, const Vector& x) const;
  Vector grad_f_m(std::size_t m, const Vector& x) const;
  double f(const Vector& x) const;
  Vector grad_f(const Vector& x) const;

  double F_m(std::size_t m, const Vector& x) const;
  Vector grad_F_m(std::size_t m, const Vector& x) const;
  /// Hessian of F_m; dense d x d.
  Matrix hess_F_m(std::size_t m, const Vector& x) const;

 private:
  std::vector<std::shared_ptr<const Loss>> losses_;
  std::size_t dimension_;
  double lambda_;
  std::vector<double> L_m_;
  double L_;
};

/// psi_m(y) = F_m(y) + (tau/2)|y - center|^2 with center = x_hat + u_m / tau.
/// (L_F^(m) + tau)-smooth and tau-strongly convex.
struct LocalSubproblem {
  const Problem* problem;
  std::size_t client;
  double tau;
  Vector center;

  static LocalSubproblem make(const Problem& problem, std::size_t m, double tau, const Vector& x_hat,
                              const Vector& u_m);

  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;
  double smoothness() const { return problem->L_F_client(client) + tau; }
};

inline Vector grad_psi(const LocalSubproblem& sub, const Vector& y) { return sub.gradient(y); }

}  // namespace fivegcs
