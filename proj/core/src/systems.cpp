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

#include "treedox/systems.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "treedox/errors.hpp"
#include "treedox/random.hpp"

namespace treedox::systems {

SystemRun henon(double a, double b, double x0, double y0, std::size_t n,
                std::size_t transient) {
  if (n < 1) throw std::invalid_argument("henon: n must be >= 1");
  Matrix states(n, 2);
  double x = x0, y = y0;
  for (std::size_t i = 1; i <= transient + n; ++i) {
    const double xn = 1.0 - a * x * x + y;
    const double yn = b * x;
    x = xn;
    y = yn;
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw NumericalError("henon: orbit diverged at iterate " + std::to_string(i));
    }
    if (i > transient) {
      states(i - transient - 1, 0) = x;
      states(i - transient - 1, 1) = y;
    }
  }
  return {"henon", TimeSeries(std::move(states)),
          {{"a", a}, {"b", b}, {"x0", x0}, {"y0", y0}}, transient, {}, {}};
}

SystemRun logistic(double r, double x0, std::size_t n, std::size_t transient) {
  if (n < 1) throw std::invalid_argument("logistic: n must be >= 1");
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::invalid_argument("logistic: x0 must be in [0, 1]");
  if (!(r >= 0.0 && r <= 4.0)) throw std::invalid_argument("logistic: r must be in [0, 4]");
  std::vector<double> out(n);
  double x = x0;
  for (std::size_t i = 1; i <= transient + n; ++i) {
    x = r * x * (1.0 - x);
    if (i > transient) out[i - transient - 1] = x;
  }
  return {"logistic", TimeSeries::scalar(out), {{"r", r}, {"x0", x0}}, transient, {}, {}};
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with Hairer's 4th-order dense output.

namespace {

namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;
}  // namespace dp

double scaled_norm(std::span<const double> v, std::span<const double> y,
                   std::span<const double> y_new, const IntegratorOptions& o) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    const double r = v[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

double initial_step(const OdeRhs& rhs, std::span<const double> y0,
                    std::span<const double> f0, const IntegratorOptions& o) {
  const std::size_t n = y0.size();
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = o.atol + o.rtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
  rhs(h0, y1, f1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = o.atol + o.rtol * std::abs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / n) / h0;
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / dmax, 1.0 / 5.0);
  return std::min(100.0 * h0, h1);
}

}  // namespace

Matrix integrate_uniform(const OdeRhs& rhs, std::span<const double> y0,
                         double dt, std::size_t n_samples,
                         const IntegratorOptions& o) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_uniform: dt must be > 0");
  if (!(o.rtol > 0.0) || !(o.atol > 0.0)) {
    throw std::invalid_argument("integrate_uniform: tolerances must be > 0");
  }
  const std::size_t n = y0.size();
  Matrix out(n_samples, n);
  if (n_samples == 0) return out;
  std::copy(y0.begin(), y0.end(), out.row(0).begin());

  std::vector<double> y(y0.begin(), y0.end()), y_new(n), tmp(n), err(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> r2(n), r3(n), r4(n), r5(n);
  rhs(0.0, y, k1);
  double t = 0.0;
  double h = o.initial_step > 0.0 ? o.initial_step : initial_step(rhs, y, k1, o);
  const double t_end = static_cast<double>(n_samples - 1) * dt;
  std::size_t next = 1;

  auto stage = [&](std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = y[i];
      for (const auto& [a, k] : terms) s += h * a * (*k)[i];
      tmp[i] = s;
    }
  };

  while (next < n_samples) {
    h = std::min(h, t_end - t);
    if (h < o.min_step * std::max(1.0, std::abs(t))) {
      throw NumericalError("integrate_uniform: step size underflow at t = " +
                           std::to_string(t));
    }
    stage({{dp::a21, &k1}});
    rhs(t + dp::c2 * h, tmp, k2);
    stage({{dp::a31, &k1}, {dp::a32, &k2}});
    rhs(t + dp::c3 * h, tmp, k3);
    stage({{dp::a41, &k1}, {dp::a42, &k2}, {dp::a43, &k3}});
    rhs(t + dp::c4 * h, tmp, k4);
    stage({{dp::a51, &k1}, {dp::a52, &k2}, {dp::a53, &k3}, {dp::a54, &k4}});
    rhs(t + dp::c5 * h, tmp, k5);
    stage({{dp::a61, &k1}, {dp::a62, &k2}, {dp::a63, &k3}, {dp::a64, &k4},
           {dp::a65, &k5}});
    rhs(t + h, tmp, k6);
    stage({{dp::a71, &k1}, {dp::a73, &k3}, {dp::a74, &k4}, {dp::a75, &k5},
           {dp::a76, &k6}});
    y_new = tmp;
    rhs(t + h, y_new, k7);
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (dp::e1 * k1[i] + dp::e3 * k3[i] + dp::e4 * k4[i] +
                    dp::e5 * k5[i] + dp::e6 * k6[i] + dp::e7 * k7[i]);
    }
    const double err_norm = scaled_norm(err, y, y_new, o);
    if (!std::isfinite(err_norm)) {
      throw NumericalError("integrate_uniform: non-finite state at t = " +
                           std::to_string(t));
    }
    if (err_norm > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
      continue;
    }

    // Dense output coefficients for the accepted step [t, t + h].
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = y_new[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      r2[i] = ydiff;
      r3[i] = bspl;
      r4[i] = ydiff - h * k7[i] - bspl;
      r5[i] = h * (dp::d1 * k1[i] + dp::d3 * k3[i] + dp::d4 * k4[i] +
                   dp::d5 * k5[i] + dp::d6 * k6[i] + dp::d7 * k7[i]);
    }
    const double t_new = t + h;
    while (next < n_samples) {
      const double ts = static_cast<double>(next) * dt;
      if (ts > t_new) break;
      const double s = (ts - t) / h;
      const double s1 = 1.0 - s;
      auto row = out.row(next);
      for (std::size_t i = 0; i < n; ++i) {
        row[i] = y[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
      }
      ++next;
    }
    t = t_new;
    std::swap(y, y_new);
    std::swap(k1, k7);
    const double factor =
        err_norm == 0.0 ? 10.0 : std::min(10.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
    h *= factor;
    if (t >= t_end) {
      // Guard against the last sample falling a rounding error past t_end.
      while (next < n_samples) {
        std::copy(y.begin(), y.end(), out.row(next).begin());
        ++next;
      }
    }
  }
  return out;
}

SystemRun lorenz(const LorenzParams& p, std::array<double, 3> init, double dt,
                 std::size_t n, std::size_t transient,
                 const IntegratorOptions& options) {
  if (n < 1) throw std::invalid_argument("lorenz: n must be >= 1");
  auto rhs = [p](double, std::span<const double> s, std::span<double> ds) {
    ds[0] = p.sigma * (s[1] - s[0]);
    ds[1] = s[0] * (p.rho - s[2]) - s[1];
    ds[2] = s[0] * s[1] - p.beta * s[2];
  };
  Matrix all = integrate_uniform(rhs, init, dt, transient + n, options);
  return {"lorenz",
          TimeSeries(all.slice_rows(transient, transient + n), dt),
          {{"sigma", p.sigma}, {"rho", p.rho}, {"beta", p.beta},
           {"x0", init[0]}, {"y0", init[1]}, {"z0", init[2]},
           {"rtol", options.rtol}, {"atol", options.atol}},
          transient, {}, dt};
}

// ---------------------------------------------------------------------------
// Kuramoto-Sivashinsky.

struct KsSolver::Impl {
  KsParams params;
  std::size_t q_points;
  std::size_t n_modes;
  std::size_t substeps;
  double h;
  double t = 0.0;

  std::vector<double> wavenumber;
  std::vector<std::complex<double>> g;  // -i q / 2, dealiased
  std::vector<double> e, e2, qc, f1, f2, f3;
  std::vector<std::complex<double>> v, nv, a, na, b, nb, c, nc;

  std::vector<double> real_buf;
  std::vector<std::complex<double>> spec_buf;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Impl(const KsParams& p, std::span<const double> u0) : params(p) {
    if (p.grid_points < 4 || p.grid_points % 2 != 0) {
      throw std::invalid_argument("kuramoto_sivashinsky: Q must be even and >= 4");
    }
    if (!(p.length > 0.0)) throw std::invalid_argument("kuramoto_sivashinsky: L must be > 0");
    if (!(p.dt > 0.0) || !(p.max_internal_step > 0.0)) {
      throw std::invalid_argument("kuramoto_sivashinsky: dt and step must be > 0");
    }
    if (u0.size() != p.grid_points) {
      throw std::invalid_argument("kuramoto_sivashinsky: initial field has wrong size");
    }
    q_points = p.grid_points;
    n_modes = q_points / 2 + 1;
    substeps = static_cast<std::size_t>(std::ceil(p.dt / p.max_internal_step - 1e-12));
    substeps = std::max<std::size_t>(1, substeps);
    h = p.dt / static_cast<double>(substeps);

    real_buf.assign(q_points, 0.0);
    spec_buf.assign(n_modes, 0.0);
    forward = fftw_plan_dft_r2c_1d(
        static_cast<int>(q_points), real_buf.data(),
        reinterpret_cast<fftw_complex*>(spec_buf.data()), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(
        static_cast<int>(q_points), reinterpret_cast<fftw_complex*>(spec_buf.data()),
        real_buf.data(), FFTW_ESTIMATE);

    wavenumber.resize(n_modes);
    g.resize(n_modes);
    e.resize(n_modes);
    e2.resize(n_modes);
    qc.resize(n_modes);
    f1.resize(n_modes);
    f2.resize(n_modes);
    f3.resize(n_modes);
    const std::size_t nyquist = q_points / 2;
    for (std::size_t m = 0; m < n_modes; ++m) {
      const double q = 2.0 * std::numbers::pi * static_cast<double>(m) / p.length;
      wavenumber[m] = q;
      const bool keep = 3 * m <= q_points && m != nyquist;
      g[m] = keep ? std::complex<double>(0.0, -0.5 * q) : 0.0;
      const double lin = q * q - q * q * q * q;
      e[m] = std::exp(h * lin);
      e2[m] = std::exp(h * lin / 2.0);
      // Contour-integral evaluation of the phi functions.
      std::complex<double> sq = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      const std::size_t mc = p.contour_points;
      for (std::size_t j = 1; j <= mc; ++j) {
        const std::complex<double> r = std::exp(std::complex<double>(
            0.0, std::numbers::pi * (static_cast<double>(j) - 0.5) /
                     static_cast<double>(mc)));
        const std::complex<double> lr = h * lin + r;
        const std::complex<double> elr = std::exp(lr);
        const std::complex<double> lr3 = lr * lr * lr;
        sq += (std::exp(lr / 2.0) - 1.0) / lr;
        s1 += (-4.0 - lr + elr * (4.0 - 3.0 * lr + lr * lr)) / lr3;
        s2 += (2.0 + lr + elr * (-2.0 + lr)) / lr3;
        s3 += (-4.0 - 3.0 * lr - lr * lr + elr * (4.0 - lr)) / lr3;
      }
      const double inv = 1.0 / static_cast<double>(mc);
      // The contour is symmetric about the real axis; real parts suffice.
      qc[m] = h * (sq * inv).real();
      f1[m] = h * (s1 * inv).real();
      f2[m] = h * (s2 * inv).real();
      f3[m] = h * (s3 * inv).real();
    }

    std::copy(u0.begin(), u0.end(), real_buf.begin());
    fftw_execute(forward);
    v = spec_buf;
    nv = na = nb = nc = a = b = c = v;
  }

  ~Impl() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  void to_physical(const std::vector<std::complex<double>>& s) {
    spec_buf = s;
    fftw_execute(backward);
    const double inv = 1.0 / static_cast<double>(q_points);
    for (double& x : real_buf) x *= inv;
  }

  void nonlinear(const std::vector<std::complex<double>>& s,
                 std::vector<std::complex<double>>& out) {
    if (!params.nonlinear) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    to_physical(s);
    for (double& x : real_buf) x *= x;
    fftw_execute(forward);
    for (std::size_t m = 0; m < n_modes; ++m) out[m] = g[m] * spec_buf[m];
  }

  void step() {
    nonlinear(v, nv);
    for (std::size_t m = 0; m < n_modes; ++m) a[m] = e2[m] * v[m] + qc[m] * nv[m];
    nonlinear(a, na);
    for (std::size_t m = 0; m < n_modes; ++m) b[m] = e2[m] * v[m] + qc[m] * na[m];
    nonlinear(b, nb);
    for (std::size_t m = 0; m < n_modes; ++m) {
      c[m] = e2[m] * a[m] + qc[m] * (2.0 * nb[m] - nv[m]);
    }
    nonlinear(c, nc);
    for (std::size_t m = 0; m < n_modes; ++m) {
      v[m] = e[m] * v[m] + nv[m] * f1[m] + 2.0 * (na[m] + nb[m]) * f2[m] +
             nc[m] * f3[m];
    }
  }
};

KsSolver::KsSolver(const KsParams& params, std::span<const double> u0)
    : impl_(std::make_unique<Impl>(params, u0)) {}
KsSolver::~KsSolver() = default;
KsSolver::KsSolver(KsSolver&&) noexcept = default;
KsSolver& KsSolver::operator=(KsSolver&&) noexcept = default;

void KsSolver::advance() {
  for (std::size_t s = 0; s < impl_->substeps; ++s) impl_->step();
  impl_->t += impl_->params.dt;
  for (const auto& z : impl_->v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NumericalError("kuramoto_sivashinsky: non-finite field at t = " +
                           std::to_string(impl_->t));
    }
  }
}

std::vector<double> KsSolver::field() const {
  impl_->to_physical(impl_->v);
  return impl_->real_buf;
}

std::vector<std::complex<double>> KsSolver::spectrum() const { return impl_->v; }

double KsSolver::time() const noexcept { return impl_->t; }

double KsSolver::wavenumber(std::size_t m) const { return impl_->wavenumber.at(m); }

std::vector<double> ks_initial_condition(std::size_t grid_points,
                                         std::uint64_t seed, double amplitude) {
  if (grid_points < 4 || grid_points % 2 != 0) {
    throw std::invalid_argument("ks_initial_condition: Q must be even and >= 4");
  }
  Rng rng(seed);
  std::vector<double> u(grid_points);
  for (double& x : u) x = rng.normal();

  const std::size_t n_modes = grid_points / 2 + 1;
  std::vector<std::complex<double>> s(n_modes);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(grid_points), u.data(),
                                       reinterpret_cast<fftw_complex*>(s.data()),
                                       FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);
  const std::size_t cutoff = std::max<std::size_t>(1, grid_points / 8);
  s[0] = 0.0;
  for (std::size_t m = cutoff + 1; m < n_modes; ++m) s[m] = 0.0;
  fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(grid_points),
                                       reinterpret_cast<fftw_complex*>(s.data()),
                                       u.data(), FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);

  double mean = 0.0;
  for (double x : u) mean += x;
  mean /= static_cast<double>(grid_points);
  double var = 0.0;
  for (double& x : u) {
    x -= mean;
    var += x * x;
  }
  const double sd = std::sqrt(var / static_cast<double>(grid_points));
  for (double& x : u) x *= amplitude / sd;
  return u;
}

SystemRun kuramoto_sivashinsky(const KsParams& params, std::size_t n,
                               std::size_t transient, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("kuramoto_sivashinsky: n must be >= 1");
  KsSolver solver(params, ks_initial_condition(params.grid_points, seed));
  Matrix out(n, params.grid_points);
  for (std::size_t j = 0; j < transient + n; ++j) {
    if (j > 0) solver.advance();
    if (j >= transient) {
      const auto u = solver.field();
      std::copy(u.begin(), u.end(), out.row(j - transient).begin());
    }
  }
  return {"ks",
          TimeSeries(std::move(out), params.dt),
          {{"L", params.length},
           {"Q", static_cast<double>(params.grid_points)},
           {"max_internal_step", params.max_internal_step}},
          transient, seed, params.dt};
}

}  // namespace treedox::systems
