#pragma once

#include "fivegcs/algorithms.hpp"
#include "fivegcs/objective.hpp"
#include "fivegcs/sampling.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

namespace testing {

using fivegcs::Matrix;
using fivegcs::Vector;

// Random orthogonal matrix from the QR factor of a Gaussian matrix.
inline Matrix random_rotation(Eigen::Index d, fivegcs::SeededRng& rng) {
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

inline Vector random_vector(Eigen::Index d, fivegcs::SeededRng& rng, double scale = 1.0) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = scale * rng.normal();
  return v;
}

// Quadratic clients (1/2) x^T Q_m x - q_m^T x with the given spectra.
inline fivegcs::Problem quadratic_problem(const std::vector<std::vector<double>>& spectra, double lambda,
                                          std::uint64_t seed = 7) {
  fivegcs::SeededRng rng(seed);
  std::vector<std::shared_ptr<const fivegcs::Loss>> losses;
  for (const auto& eig : spectra) {
    const auto d = static_cast<Eigen::Index>(eig.size());
    const Matrix r = random_rotation(d, rng);
    Vector e(d);
    for (Eigen::Index i = 0; i < d; ++i) e(i) = eig[static_cast<std::size_t>(i)];
    Matrix q = r * e.asDiagonal() * r.transpose();
    q = 0.5 * (q + q.transpose());
    losses.push_back(std::make_shared<fivegcs::QuadraticLoss>(q, random_vector(d, rng)));
  }
  return fivegcs::Problem(std::move(losses), lambda);
}

// M clients in dimension d whose largest data eigenvalue is `top` (shared by
// every client, so L_m = L for all m).
inline fivegcs::Problem uniform_quadratic(std::size_t clients, std::size_t d, double top, double lambda,
                                          std::uint64_t seed = 7) {
  std::vector<std::vector<double>> spectra(clients, std::vector<double>(d));
  fivegcs::SeededRng rng(seed + 1000);
  for (auto& eig : spectra) {
    eig[0] = top;
    for (std::size_t i = 1; i < d; ++i) eig[i] = top * rng.uniform01();
  }
  return quadratic_problem(spectra, lambda, seed);
}

inline fivegcs::ClientShard dense_shard(const std::vector<std::vector<double>>& rows, const std::vector<double>& labels) {
  fivegcs::ClientShard shard;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    fivegcs::DataPoint p;
    p.label = labels[i];
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] != 0.0) p.features.emplace_back(static_cast<std::uint32_t>(j + 1), rows[i][j]);
    }
    shard.points.push_back(p);
    shard.dimension = std::max(shard.dimension, rows[i].size());
  }
  return shard;
}

// Central differences of a scalar function.
inline Vector fd_gradient(const std::function<double(const Vector&)>& fn, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (fn(a) - fn(b)) / (2.0 * h);
  }
  return g;
}

// Reference point of a quadratic problem by solving grad f = 0 directly.
inline fivegcs::ReferenceSolution quadratic_reference(const fivegcs::Problem& p) {
  const auto d = p.dimension();
  Matrix h = Matrix::Zero(d, d);
  for (std::size_t m = 0; m < p.clients(); ++m) h += p.hess_F_m(m, Vector::Zero(d));
  h += p.mu() * Matrix::Identity(d, d);
  fivegcs::ReferenceSolution ref;
  ref.x_star = h.ldlt().solve(-p.grad_f(Vector::Zero(d)));
  for (std::size_t m = 0; m < p.clients(); ++m) ref.u_star.push_back(p.grad_F_m(m, ref.x_star));
  ref.f_star = p.f(ref.x_star);
  return ref;
}

inline double rel_err(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1e-12, b.norm()); }

}  // namespace testing
