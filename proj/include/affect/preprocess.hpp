#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "affect/signal.hpp"

namespace affect {

/// How the zero-phase Butterworth response is realised.
///
/// Spectral applies the analog order-n magnitude response squared,
/// 1 / (1 + (f / fc)^(2n)), to each DFT bin of a mirror-extended copy of
/// the input. That is exactly the gain of running the Butterworth filter
/// forward and backward, without the frequency warping of a bilinear
/// design. IirForwardBackward is the classic bilinear-transform biquad
/// cascade run forward then backward with odd-reflection padding and
/// steady-state initial conditions (what SciPy's butter + sosfiltfilt do).
enum class FilterMethod { Spectral, IirForwardBackward };

std::string_view to_string(FilterMethod method) noexcept;
FilterMethod parse_filter_method(std::string_view text);

struct PreprocessConfig {
  double winsor_lower = 0.01;
  double winsor_upper = 0.99;
  double filter_cutoff_hz = 10.0;
  int filter_order = 4;
  FilterMethod filter_method = FilterMethod::Spectral;
};

/// Empirical quantile with linear interpolation between order statistics:
/// h = (n - 1) q, result = s[floor h] + (h - floor h) (s[floor h + 1] - s[floor h]).
double quantile_sorted(std::span<const double> sorted, double q);
double quantile(std::span<const double> x, double q);

/// Clips values to the [lower_pct, upper_pct] empirical quantiles.
std::vector<double> winsorize(std::span<const double> x, double lower_pct, double upper_pct);

/// Zero-phase low-pass. Requires 0 < cutoff < rate / 2, order >= 1 and more
/// samples than the IIR edge padding (15 for order 4).
std::vector<double> butterworth_lowpass(std::span<const double> x, double rate, double cutoff,
                                        int order,
                                        FilterMethod method = FilterMethod::Spectral);

/// Second-order section b0 b1 b2 / 1 a1 a2.
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 2> a{};
};

/// Bilinear-transform Butterworth low-pass with pre-warped cutoff, unit DC gain.
std::vector<Biquad> design_butterworth_sos(double rate, double cutoff, int order);

/// Maps to [0, 1]; a constant sequence maps to all 0.5.
std::vector<double> minmax_normalize(std::span<const double> x);

/// True when the cutoff is strictly below Nyquist for this rate.
bool filter_applies(double rate, double cutoff) noexcept;

/// winsorize -> low-pass (where the rate allows it) -> min-max, per channel.
/// Also derives the ACC magnitude from the raw axes and preprocesses it the
/// same way.
WindowSample preprocess_window(const WindowSample& window, const PreprocessConfig& config);

std::vector<double> preprocess_series(std::span<const double> x, double rate,
                                      const PreprocessConfig& config);

}  // namespace affect
