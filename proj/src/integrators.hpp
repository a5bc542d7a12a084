#pragma once

// Fixed-step one-step methods over a flat complex state vector. A right-hand
// side is any callable f(t, span<const cplx> y, span<cplx> dy).

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "cavity_ising/errors.hpp"

namespace cavity_ising::detail {

using cplx = std::complex<double>;

template <typename Rhs>
class Rk4Stepper {
 public:
  Rk4Stepper(Rhs& rhs, std::size_t dim) : rhs_(rhs), k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  void step(double t, double h, std::vector<cplx>& y) {
    const std::size_t n = y.size();
    rhs_(t, y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
    rhs_(t + 0.5 * h, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
    rhs_(t + 0.5 * h, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
    rhs_(t + h, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  Rhs& rhs_;
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_;
};

// Two-stage Gauss-Legendre collocation. Stage equations are solved by
// fixed-point iteration, which contracts like h * |df/dy| (~0.03 here).
template <typename Rhs>
class Gauss4Stepper {
 public:
  Gauss4Stepper(Rhs& rhs, std::size_t dim)
      : rhs_(rhs), k1_(dim), k2_(dim), n1_(dim), n2_(dim), y1_(dim), y2_(dim) {}

  void step(double t, double h, std::vector<cplx>& y) {
    static const double r3 = std::sqrt(3.0);
    static const double c1 = 0.5 - r3 / 6.0, c2 = 0.5 + r3 / 6.0;
    static const double a11 = 0.25, a12 = 0.25 - r3 / 6.0;
    static const double a21 = 0.25 + r3 / 6.0, a22 = 0.25;
    const std::size_t n = y.size();

    rhs_(t, y, k1_);
    std::copy(k1_.begin(), k1_.end(), k2_.begin());
    for (int iter = 0;; ++iter) {
      for (std::size_t i = 0; i < n; ++i) {
        y1_[i] = y[i] + h * (a11 * k1_[i] + a12 * k2_[i]);
        y2_[i] = y[i] + h * (a21 * k1_[i] + a22 * k2_[i]);
      }
      rhs_(t + c1 * h, y1_, n1_);
      rhs_(t + c2 * h, y2_, n2_);
      bool converged = true;
      for (std::size_t i = 0; i < n && converged; ++i) {
        const double tol = kTolerance * (1.0 + std::abs(y[i]));
        converged = h * std::abs(n1_[i] - k1_[i]) <= tol && h * std::abs(n2_[i] - k2_[i]) <= tol;
      }
      k1_.swap(n1_);
      k2_.swap(n2_);
      if (converged) break;
      if (iter >= kMaxIterations) {
        throw IntegrationQualityError("implicit stage iteration did not converge; reduce dt");
      }
    }
    for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * h * (k1_[i] + k2_[i]);
  }

 private:
  static constexpr double kTolerance = 1e-15;
  static constexpr int kMaxIterations = 60;

  Rhs& rhs_;
  std::vector<cplx> k1_, k2_, n1_, n2_, y1_, y2_;
};

}  // namespace cavity_ising::detail
