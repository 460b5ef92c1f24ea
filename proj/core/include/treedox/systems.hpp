// Copyright 2026 The TreeDOX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Benchmark dynamical systems: Henon and logistic maps, the Lorenz flow
// (adaptive Dormand-Prince 5(4) with dense output on a uniform grid) and the
// Kuramoto-Sivashinsky PDE (Fourier pseudo-spectral, ETDRK4).

#ifndef TREEDOX_SYSTEMS_HPP_
#define TREEDOX_SYSTEMS_HPP_

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treedox/embedding.hpp"

namespace treedox::systems {

struct SystemRun {
  std::string name;
  TimeSeries series;
  std::map<std::string, double> params;
  std::size_t transient_removed = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
};

// (x, y) -> (1 - a x^2 + y, b x). Iterates transient + n times from
// (x0, y0) and keeps the last n states. Throws NumericalError naming the
// iterate at which the orbit left the finite range.
SystemRun henon(double a, double b, double x0, double y0, std::size_t n,
                std::size_t transient);

// x -> r x (1 - x) with x0 in [0, 1], r in [0, 4].
SystemRun logistic(double r, double x0, std::size_t n, std::size_t transient);

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double initial_step = 0.0;  // 0 = automatic
  double min_step = 1e-14;    // relative to max(1, |t|)
};

// dy/dt = f(t, y); f writes the derivative into its third argument.
using OdeRhs = std::function<void(double, std::span<const double>,
                                  std::span<double>)>;

// Integrates from y0 at t = 0 and returns samples at t = j * dt for
// j = 0 .. n_samples - 1 (row 0 is y0), using dense output between accepted
// steps. Throws NumericalError on step-size underflow or non-finite state.
Matrix integrate_uniform(const OdeRhs& rhs, std::span<const double> y0,
                         double dt, std::size_t n_samples,
                         const IntegratorOptions& options = {});

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

// Samples at t = j dt; the first `transient` samples (including the initial
// condition) are dropped and the next n are returned.
SystemRun lorenz(const LorenzParams& params, std::array<double, 3> init,
                 double dt, std::size_t n, std::size_t transient,
                 const IntegratorOptions& options = {});

struct KsParams {
  double length = 22.0;         // L, domain [0, L) periodic
  std::size_t grid_points = 64;  // Q, even
  double dt = 0.25;              // output sampling interval
  double max_internal_step = 0.25;
  bool nonlinear = true;
  std::size_t contour_points = 32;  // ETDRK4 coefficient quadrature
};

// u_t + u_xxxx + u_xx + u u_x = 0 on a periodic grid, advanced in Fourier
// space with ETDRK4 (Kassam & Trefethen 2005). The nonlinear term is
// evaluated in conservative form -(1/2)(u^2)_x with 2/3-rule dealiasing.
class KsSolver {
 public:
  KsSolver(const KsParams& params, std::span<const double> u0);
  ~KsSolver();
  KsSolver(KsSolver&&) noexcept;
  KsSolver& operator=(KsSolver&&) noexcept;

  // Advances by one output interval params.dt.
  void advance();
  [[nodiscard]] std::vector<double> field() const;
  // Complex Fourier coefficients of u for wavenumbers m = 0..Q/2.
  [[nodiscard]] std::vector<std::complex<double>> spectrum() const;
  [[nodiscard]] double time() const noexcept;
  // Wavenumber q_m = 2 pi m / L.
  [[nodiscard]] double wavenumber(std::size_t m) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Seeded initial condition: white Gaussian noise on the grid, low-pass
// filtered to wavenumbers |m| <= Q/8 (at least 1), mean removed and scaled to
// standard deviation `amplitude`.
std::vector<double> ks_initial_condition(std::size_t grid_points,
                                         std::uint64_t seed,
                                         double amplitude = 0.01);

// Drops the first `transient` output samples (including t = 0) and returns
// the next n as an n x Q series.
SystemRun kuramoto_sivashinsky(const KsParams& params, std::size_t n,
                               std::size_t transient, std::uint64_t seed);

}  // namespace treedox::systems

#endif  // TREEDOX_SYSTEMS_HPP_
