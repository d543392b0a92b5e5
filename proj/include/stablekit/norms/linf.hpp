#pragma once

#include "stablekit/system/descriptor_system.hpp"
#include "stablekit/system/spectrum.hpp"
#include "stablekit/system/transfer.hpp"
#include "stablekit/system/weierstrass.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace stablekit {

template <typename Scalar>
struct LinfConfig {
  /// Grid bounds; non-positive values mean "derive from the spectrum" (1e-6 and 1e6 times
  /// the largest finite eigenvalue magnitude, floored at 1).
  Scalar wmin = 0;
  Scalar wmax = 0;
  Eigen::Index n0 = 512;
  Scalar reltol = Scalar(1e-8);
  Eigen::Index refine_top = 3;
  /// ||F(i inf)||_2 when known; always part of the supremum.
  std::optional<Scalar> value_at_infinity;
};

template <typename Scalar>
struct FrequencyGrid {
  std::vector<Scalar> omegas;
  std::vector<Scalar> values;
  Scalar argmax_omega = 0;  // +inf when the supremum is attained at infinity
  Scalar max_value = 0;

  Scalar min_value() const { return values.empty() ? Scalar(0) : *std::min_element(values.begin(), values.end()); }
};

template <typename Scalar>
using FrequencyEvaluator = std::function<ComplexMatrix<Scalar>(Scalar)>;

namespace detail {

template <typename Scalar>
Scalar sample_norm(const FrequencyEvaluator<Scalar>& eval, Scalar omega) {
  const Scalar v = spectral_norm<Scalar>(eval(omega));
  if (!std::isfinite(double(v))) {
    throw Error(ErrorCode::NonFiniteSample,
                "non-finite frequency response at omega = " + std::to_string(double(omega)));
  }
  return v;
}

/// Golden-section search for a local maximum of f on [a, b]; records every sample.
template <typename Scalar>
void golden_refine(const FrequencyEvaluator<Scalar>& eval, Scalar a, Scalar b, Scalar reltol, Scalar floor,
                   std::vector<std::pair<Scalar, Scalar>>& samples) {
  const Scalar g = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar x1 = b - g * (b - a), x2 = a + g * (b - a);
  Scalar f1 = sample_norm(eval, x1), f2 = sample_norm(eval, x2);
  samples.emplace_back(x1, f1);
  samples.emplace_back(x2, f2);
  for (int it = 0; it < 200 && (b - a) > reltol * std::max((a + b) / 2, floor); ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = sample_norm(eval, x1);
      samples.emplace_back(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = sample_norm(eval, x2);
      samples.emplace_back(x2, f2);
    }
  }
}

}  // namespace detail

/// sup over omega of ||G(i omega)||_2 by log-spaced sampling plus golden-section refinement of
/// the largest local maxima. omega = 0 and the value at infinity are always included.
template <typename Scalar>
FrequencyGrid<Scalar> linf_norm(const FrequencyEvaluator<Scalar>& eval, const LinfConfig<Scalar>& cfg) {
  const Scalar wmin = cfg.wmin > 0 ? cfg.wmin : Scalar(1e-6);
  const Scalar wmax = cfg.wmax > 0 ? cfg.wmax : Scalar(1e6);
  require_dims(wmax > wmin && cfg.n0 >= 2, "frequency grid needs wmax > wmin and at least two points");

  std::vector<std::pair<Scalar, Scalar>> samples;
  samples.reserve(cfg.n0 + 1 + 64 * cfg.refine_top);
  samples.emplace_back(Scalar(0), detail::sample_norm(eval, Scalar(0)));
  const Scalar lmin = std::log10(wmin), lmax = std::log10(wmax);
  for (Eigen::Index i = 0; i < cfg.n0; ++i) {
    const Scalar w = std::pow(Scalar(10), lmin + (lmax - lmin) * Scalar(i) / Scalar(cfg.n0 - 1));
    samples.emplace_back(w, detail::sample_norm(eval, w));
  }

  // Local maxima of the seed grid, best first, ties to the lower frequency.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool left = i == 0 || samples[i].second >= samples[i - 1].second;
    const bool right = i + 1 == samples.size() || samples[i].second >= samples[i + 1].second;
    if (left && right) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t x, std::size_t y) { return samples[x].second > samples[y].second; });
  if (peaks.size() > std::size_t(cfg.refine_top)) peaks.resize(cfg.refine_top);

  const std::size_t seeds = samples.size();
  for (std::size_t i : peaks) {
    const Scalar a = samples[i == 0 ? 0 : i - 1].first;
    const Scalar b = samples[std::min(i + 1, seeds - 1)].first;
    if (b > a) detail::golden_refine(eval, a, b, cfg.reltol, wmin, samples);
  }

  std::sort(samples.begin(), samples.end());
  FrequencyGrid<Scalar> grid;
  for (const auto& [w, v] : samples) {
    if (!grid.omegas.empty() && w <= grid.omegas.back()) continue;
    grid.omegas.push_back(w);
    grid.values.push_back(v);
    if (v > grid.max_value) {
      grid.max_value = v;
      grid.argmax_omega = w;
    }
  }
  if (cfg.value_at_infinity && *cfg.value_at_infinity > grid.max_value) {
    grid.max_value = *cfg.value_at_infinity;
    grid.argmax_omega = std::numeric_limits<Scalar>::infinity();
  }
  return grid;
}

/// F(infinity) of a proper system; empty when the transfer function has a polynomial part.
template <typename Scalar>
std::optional<Matrix<Scalar>> transfer_at_infinity(const DescriptorSystem<Scalar>& s, Scalar tol = Scalar(1e-9)) {
  if (s.states() == 0) return s.d();
  Eigen::JacobiSVD<Matrix<Scalar>> svd(s.e());
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) > default_pencil_tol<Scalar>(s.states()) * sv(0)) return s.d();
  const auto w = weierstrass_split(s);
  if (w.infinite_order() == 0) return s.d();
  const Scalar scale = Scalar(1) + w.c_n.norm() * w.b_n.norm();
  Matrix<Scalar> term = w.n * w.b_n;
  for (Eigen::Index i = 1; i < w.nu; ++i) {
    if ((w.c_n * term).norm() > tol * scale) return std::nullopt;
    term = w.n * term;
  }
  return Matrix<Scalar>(s.d() - w.c_n * w.b_n);
}

/// Largest finite eigenvalue magnitude of the pencil, floored at 1.
template <typename Scalar>
Scalar spectral_scale(const DescriptorSystem<Scalar>& s) {
  Scalar rho = 1;
  if (s.states() == 0) return rho;
  for (const auto& l : pencil_spectrum(s).finite_eigenvalues) rho = std::max(rho, Scalar(std::abs(l)));
  return rho;
}

/// Grid settings for a set of systems: the band covers all of their eigenvalue scales.
template <typename Scalar>
LinfConfig<Scalar> default_linf_config(std::initializer_list<const DescriptorSystem<Scalar>*> systems) {
  Scalar rho = 1;
  for (const auto* s : systems) rho = std::max(rho, spectral_scale(*s));
  LinfConfig<Scalar> cfg;
  cfg.wmin = Scalar(1e-6) * rho;
  cfg.wmax = Scalar(1e6) * rho;
  return cfg;
}

/// ||F_S1 - F_S2||_inf on the imaginary axis.
template <typename Scalar>
FrequencyGrid<Scalar> linf_error(const DescriptorSystem<Scalar>& s1, const DescriptorSystem<Scalar>& s2,
                                 LinfConfig<Scalar> cfg = LinfConfig<Scalar>{}) {
  if (cfg.wmin <= 0 || cfg.wmax <= 0) {
    const auto d = default_linf_config<Scalar>({&s1, &s2});
    if (cfg.wmin <= 0) cfg.wmin = d.wmin;
    if (cfg.wmax <= 0) cfg.wmax = d.wmax;
  }
  if (!cfg.value_at_infinity) {
    const auto f1 = transfer_at_infinity(s1), f2 = transfer_at_infinity(s2);
    if (f1 && f2) {
      cfg.value_at_infinity = spectral_norm<Scalar>(ComplexMatrix<Scalar>((*f1 - *f2).template cast<std::complex<Scalar>>()));
    } else {
      cfg.value_at_infinity = std::numeric_limits<Scalar>::infinity();
    }
  }
  FrequencyEvaluator<Scalar> eval = [&](Scalar w) -> ComplexMatrix<Scalar> {
    try {
      return frequency_response(s1, w) - frequency_response(s2, w);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::AtPole) throw;
      throw Error(ErrorCode::NonFiniteSample, err.what());
    }
  };
  return linf_norm<Scalar>(eval, cfg);
}

template <typename Scalar>
FrequencyGrid<Scalar> linf_norm(const DescriptorSystem<Scalar>& s, const LinfConfig<Scalar>& cfg = LinfConfig<Scalar>{}) {
  return linf_error(s, DescriptorSystem<Scalar>::empty(s.outputs(), s.inputs()), cfg);
}

}  // namespace stablekit
