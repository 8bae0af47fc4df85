#include "affect/preprocess.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include "affect/error.hpp"
#include "affect/util.hpp"

namespace affect {

std::string_view to_string(FilterMethod method) noexcept {
  return method == FilterMethod::Spectral ? "spectral" : "iir";
}

FilterMethod parse_filter_method(std::string_view text) {
  const std::string folded = to_lower(trim(text));
  if (folded == "spectral") return FilterMethod::Spectral;
  if (folded == "iir") return FilterMethod::IirForwardBackward;
  throw Error(ErrorCode::Config, "filter_method must be 'spectral' or 'iir'");
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::SequenceTooShort, "quantile of empty sequence");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidPercentile, "q outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> x, double q) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, q);
}

std::vector<double> winsorize(std::span<const double> x, double lower_pct, double upper_pct) {
  if (!(lower_pct >= 0.0 && lower_pct < upper_pct && upper_pct <= 1.0)) {
    throw Error(ErrorCode::InvalidPercentile, "need 0 <= lower < upper <= 1");
  }
  if (x.empty()) throw Error(ErrorCode::SequenceTooShort, "winsorize of empty sequence");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = quantile_sorted(sorted, lower_pct);
  const double hi = quantile_sorted(sorted, upper_pct);
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v = std::clamp(v, lo, hi);
  return out;
}

std::vector<double> minmax_normalize(std::span<const double> x) {
  if (x.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  std::vector<double> out(x.size(), 0.5);
  if (range > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - lo) / range;
  }
  return out;
}

bool filter_applies(double rate, double cutoff) noexcept { return cutoff < 0.5 * rate; }

std::vector<Biquad> design_butterworth_sos(double rate, double cutoff, int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "filter order must be >= 1");
  if (!(cutoff > 0.0) || !filter_applies(rate, cutoff)) {
    throw Error(ErrorCode::CutoffAboveNyquist, "cutoff must lie in (0, rate / 2)");
  }
  const double fs2 = 2.0 * rate;
  const double warped = fs2 * std::tan(std::numbers::pi * cutoff / rate);
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const std::complex<double> pole = warped * std::polar(1.0, theta);
    const std::complex<double> z = (fs2 + pole) / (fs2 - pole);
    Biquad s;
    s.a = {-2.0 * z.real(), std::norm(z)};
    const double gain = (1.0 + s.a[0] + s.a[1]) / 4.0;
    s.b = {gain, 2.0 * gain, gain};
    sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double z = (fs2 - warped) / (fs2 + warped);
    Biquad s;
    s.a = {-z, 0.0};
    const double gain = (1.0 - z) / 2.0;
    s.b = {gain, gain, 0.0};
    sections.push_back(s);
  }
  return sections;
}

namespace {

// SciPy's default sosfiltfilt padding: three times the cascade's tap count.
std::size_t iir_pad_length(int order) {
  const int sections = (order + 1) / 2;
  return static_cast<std::size_t>(3 * (2 * sections + 1 - order % 2));
}

// Transposed direct form II, in place, starting from the steady state of a
// constant input equal to x[0].
void sos_filter(std::span<const Biquad> sections, std::vector<double>& x) {
  for (const auto& s : sections) {
    const double dc = (s.b[0] + s.b[1] + s.b[2]) / (1.0 + s.a[0] + s.a[1]);
    const double x0 = x.front();
    double z1 = (s.b[2] - s.a[1] * dc) * x0;
    double z0 = (dc - s.b[0]) * x0;
    for (double& v : x) {
      const double in = v;
      const double out = s.b[0] * in + z0;
      z0 = s.b[1] * in - s.a[0] * out + z1;
      z1 = s.b[2] * in - s.a[1] * out;
      v = out;
    }
  }
}

std::vector<double> iir_forward_backward(std::span<const double> x, double rate, double cutoff,
                                         int order) {
  const auto sections = design_butterworth_sos(rate, cutoff, order);
  const std::size_t n = x.size();
  const std::size_t pad = iir_pad_length(order);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  sos_filter(sections, ext);
  std::reverse(ext.begin(), ext.end());
  sos_filter(sections, ext);
  std::reverse(ext.begin(), ext.end());
  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                             ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

// FFTW's planner is not re-entrant; executing a finished plan is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

std::vector<double> spectral_zero_phase(std::span<const double> x, double rate, double cutoff,
                                        int order) {
  const std::size_t n = x.size();
  const std::size_t len = 2 * n;  // even mirror extension: periodic and continuous
  const std::size_t bins = len / 2 + 1;
  std::unique_ptr<double, FftwFree> buf(static_cast<double*>(fftw_malloc(sizeof(double) * len)));
  std::unique_ptr<fftw_complex, FftwFree> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  if (!buf || !spec) throw std::bad_alloc();

  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  {
    std::lock_guard lock(fftw_planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(len), buf.get(), spec.get(), FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(len), spec.get(), buf.get(), FFTW_ESTIMATE);
  }
  if (!forward || !inverse) throw Error(ErrorCode::InternalInvariant, "FFTW planning failed");

  double* data = buf.get();
  for (std::size_t i = 0; i < n; ++i) {
    data[i] = x[i];
    data[len - 1 - i] = x[i];
  }
  fftw_execute(forward);
  const double exponent = 2.0 * order;
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(len);
    const double gain = 1.0 / (1.0 + std::pow(f / cutoff, exponent)) / static_cast<double>(len);
    spec.get()[k][0] *= gain;
    spec.get()[k][1] *= gain;
  }
  fftw_execute(inverse);
  std::vector<double> out(data, data + n);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
  return out;
}

}  // namespace

std::vector<double> butterworth_lowpass(std::span<const double> x, double rate, double cutoff,
                                        int order, FilterMethod method) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "filter order must be >= 1");
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "rate must be positive");
  if (!(cutoff > 0.0) || !filter_applies(rate, cutoff)) {
    throw Error(ErrorCode::CutoffAboveNyquist, "cutoff must lie in (0, rate / 2)");
  }
  const std::size_t min_len = iir_pad_length(order);
  if (x.size() <= min_len) {
    throw Error(ErrorCode::SequenceTooShort,
                "need more than " + std::to_string(min_len) + " samples to filter");
  }
  if (method == FilterMethod::IirForwardBackward) return iir_forward_backward(x, rate, cutoff, order);
  return spectral_zero_phase(x, rate, cutoff, order);
}

std::vector<double> preprocess_series(std::span<const double> x, double rate,
                                      const PreprocessConfig& config) {
  std::vector<double> out = winsorize(x, config.winsor_lower, config.winsor_upper);
  if (filter_applies(rate, config.filter_cutoff_hz)) {
    out = butterworth_lowpass(out, rate, config.filter_cutoff_hz, config.filter_order,
                              config.filter_method);
  }
  return minmax_normalize(out);
}

WindowSample preprocess_window(const WindowSample& window, const PreprocessConfig& config) {
  WindowSample out = window;
  const auto x = window.slices.find(ChannelKind::AccX);
  const auto y = window.slices.find(ChannelKind::AccY);
  const auto z = window.slices.find(ChannelKind::AccZ);
  if (x != window.slices.end() && y != window.slices.end() && z != window.slices.end()) {
    ChannelSlice magnitude;
    magnitude.sampling_rate = x->second.sampling_rate;
    magnitude.samples = vector_magnitude(x->second.samples, y->second.samples, z->second.samples);
    magnitude.samples = preprocess_series(magnitude.samples, magnitude.sampling_rate, config);
    out.acc_magnitude = std::move(magnitude);
  }
  for (auto& [kind, slice] : out.slices) {
    slice.samples = preprocess_series(slice.samples, slice.sampling_rate, config);
  }
  return out;
}

}  // namespace affect
