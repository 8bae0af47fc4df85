#include "affect/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "affect/error.hpp"

namespace affect {

namespace {

constexpr const char* kStatNames[] = {"mean", "std", "min", "max", "skew", "kurt", "slope",
                                      "diff_std"};
constexpr const char* kChannelPrefixes[] = {"BVP",   "EDA",   "SKT",  "ACC_MAG",
                                            "ACC_X", "ACC_Y", "ACC_Z"};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // population
};

Moments moments(std::span<const double> x) {
  Moments m;
  if (x.empty()) return m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.variance = ss / static_cast<double>(x.size());
  return m;
}

double sample_std(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const Moments m = moments(x);
  return std::sqrt(m.variance * static_cast<double>(x.size()) / static_cast<double>(x.size() - 1));
}

void append_generic_stats(std::span<const double> x, std::vector<double>& out) {
  const Moments m = moments(x);
  const double sd = std::sqrt(m.variance);
  double m3 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const auto n = static_cast<double>(x.size());
  m3 /= n;
  m4 /= n;
  // constant sequences have zero skew and excess kurtosis by convention
  const bool flat = m.variance <= 1e-24;
  const double skew = flat ? 0.0 : m3 / std::pow(m.variance, 1.5);
  const double kurt = flat ? 0.0 : m4 / (m.variance * m.variance) - 3.0;

  std::vector<double> diff;
  diff.reserve(x.size());
  for (std::size_t i = 1; i < x.size(); ++i) diff.push_back(x[i] - x[i - 1]);
  const Moments dm = moments(diff);

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  out.insert(out.end(), {m.mean, sd, *lo, *hi, skew, kurt, dm.mean, std::sqrt(dm.variance)});
}

void append_hrv(std::span<const double> bvp, double rate, std::vector<double>& out) {
  BeatPeaks beats;
  try {
    beats = detect_bvp_peaks(bvp, rate);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewPeaks) throw;
    out.insert(out.end(), 6, kMissing);
    return;
  }
  const std::vector<double> ibi = ibi_from_peaks(beats.peaks, rate);
  std::vector<double> valid;
  std::vector<double> successive;
  for (std::size_t i = 0; i < ibi.size(); ++i) {
    if (beats.long_gaps[i]) continue;
    valid.push_back(ibi[i]);
    if (i > 0 && !beats.long_gaps[i - 1]) successive.push_back(ibi[i] - ibi[i - 1]);
  }
  if (valid.size() < 2) {
    out.insert(out.end(), 6, kMissing);
    return;
  }
  std::vector<double> hr;
  hr.reserve(valid.size());
  for (double v : valid) hr.push_back(60.0 / v);
  const Moments hr_m = moments(hr);
  const Moments ibi_m = moments(valid);

  double rmssd = kMissing;
  double pnn50 = kMissing;
  if (!successive.empty()) {
    double ss = 0.0;
    std::size_t over = 0;
    for (double d : successive) {
      ss += d * d;
      if (std::abs(d) > 0.050) ++over;
    }
    rmssd = 1000.0 * std::sqrt(ss / static_cast<double>(successive.size()));
    pnn50 = static_cast<double>(over) / static_cast<double>(successive.size());
  }
  out.insert(out.end(), {hr_m.mean, std::sqrt(hr_m.variance), ibi_m.mean,
                         1000.0 * sample_std(valid), rmssd, pnn50});
}

}  // namespace

const std::vector<std::string>& feature_catalog() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const char* ch : kChannelPrefixes) {
      for (const char* stat : kStatNames) v.push_back(std::string(ch) + "_" + stat);
    }
    for (const char* name : {"HRV_hr_mean", "HRV_hr_std", "HRV_ibi_mean", "HRV_sdnn", "HRV_rmssd",
                             "HRV_pnn50", "EDA_scr_count", "EDA_scr_amp_mean"}) {
      v.emplace_back(name);
    }
    return v;
  }();
  return names;
}

double refined_peak_position(std::span<const double> x, std::size_t i) {
  if (i == 0 || i + 1 >= x.size()) return static_cast<double>(i);
  const double curvature = x[i - 1] - 2.0 * x[i] + x[i + 1];
  if (!(curvature < 0.0)) return static_cast<double>(i);
  const double offset = 0.5 * (x[i - 1] - x[i + 1]) / curvature;
  return static_cast<double>(i) + std::clamp(offset, -0.5, 0.5);
}

BeatPeaks detect_bvp_peaks(std::span<const double> x, double rate) {
  if (rate < 32.0) throw Error(ErrorCode::InvalidArgument, "beat detection needs rate >= 32 Hz");
  const std::size_t n = x.size();
  const auto half = static_cast<std::size_t>(std::lround(rate));  // 2 s centred window

  std::vector<double> prefix(n + 1, 0.0);
  std::vector<double> prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + x[i];
    prefix_sq[i + 1] = prefix_sq[i] + x[i] * x[i];
  }
  const auto threshold_at = [&](std::size_t i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    const auto count = static_cast<double>(hi - lo);
    const double mean = (prefix[hi] - prefix[lo]) / count;
    const double var = std::max(0.0, (prefix_sq[hi] - prefix_sq[lo]) / count - mean * mean);
    return mean + 0.5 * std::sqrt(var);
  };

  const double refractory = kMinBeatInterval * rate;
  BeatPeaks out;
  double last_apex = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(x[i] > x[i - 1] && x[i] >= x[i + 1])) continue;
    if (!(x[i] > threshold_at(i))) continue;
    const double apex = refined_peak_position(x, i);
    if (!out.peaks.empty() && apex - last_apex < refractory) {
      if (x[i] > x[out.peaks.back()]) {
        out.peaks.back() = i;
        last_apex = apex;
      }
      continue;
    }
    out.peaks.push_back(i);
    last_apex = apex;
  }
  if (out.peaks.size() < 3) {
    throw Error(ErrorCode::TooFewPeaks,
                "found " + std::to_string(out.peaks.size()) + " beats, need 3");
  }
  for (std::size_t i = 0; i + 1 < out.peaks.size(); ++i) {
    const double gap = static_cast<double>(out.peaks[i + 1] - out.peaks[i]) / rate;
    out.long_gaps.push_back(gap > kMaxBeatInterval);
  }
  return out;
}

std::vector<double> ibi_from_peaks(std::span<const std::size_t> peaks, double rate) {
  if (peaks.size() < 2) throw Error(ErrorCode::TooFewPeaks, "need at least 2 peaks for an interval");
  std::vector<double> out;
  out.reserve(peaks.size() - 1);
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
    if (peaks[i + 1] <= peaks[i]) {
      throw Error(ErrorCode::InvalidArgument, "peak indices must be strictly increasing");
    }
    out.push_back(static_cast<double>(peaks[i + 1] - peaks[i]) / rate);
  }
  return out;
}

EdaComponents eda_decompose(std::span<const double> x, double rate, double scr_threshold,
                            double tonic_window_s) {
  const std::size_t n = x.size();
  const auto half = static_cast<std::size_t>(std::lround(0.5 * tonic_window_s * rate));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

  EdaComponents out;
  out.tonic.resize(n);
  out.phasic.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    const std::size_t lo = i - h;
    const std::size_t hi = i + h + 1;
    out.tonic[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    out.phasic[i] = x[i] - out.tonic[i];
  }

  if (n < 3) return out;
  double trough = out.phasic[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double v = out.phasic[i];
    trough = std::min(trough, v);
    if (v > out.phasic[i - 1] && v >= out.phasic[i + 1] && v - trough >= scr_threshold) {
      out.scr_peaks.push_back({i, v - trough});
      trough = v;
    }
  }
  return out;
}

FeatureVector extract_features(const WindowSample& window, const FeatureConfig& config) {
  if (!window.acc_magnitude) {
    throw Error(ErrorCode::InvalidArgument, "window " + window.event_id + " is not preprocessed");
  }
  FeatureVector fv;
  fv.event_id = window.event_id;
  fv.label = window.label;
  fv.names = feature_catalog();
  fv.values.reserve(kFeatureCount);

  const ChannelSlice& bvp = window.slice(ChannelKind::Bvp);
  const ChannelSlice& eda = window.slice(ChannelKind::Eda);
  append_generic_stats(bvp.samples, fv.values);
  append_generic_stats(eda.samples, fv.values);
  append_generic_stats(window.slice(ChannelKind::Skt).samples, fv.values);
  append_generic_stats(window.acc_magnitude->samples, fv.values);
  append_generic_stats(window.slice(ChannelKind::AccX).samples, fv.values);
  append_generic_stats(window.slice(ChannelKind::AccY).samples, fv.values);
  append_generic_stats(window.slice(ChannelKind::AccZ).samples, fv.values);

  append_hrv(bvp.samples, bvp.sampling_rate, fv.values);

  const EdaComponents parts =
      eda_decompose(eda.samples, eda.sampling_rate, config.scr_threshold, config.tonic_window_s);
  double amp_sum = 0.0;
  for (const auto& p : parts.scr_peaks) amp_sum += p.amplitude;
  fv.values.push_back(static_cast<double>(parts.scr_peaks.size()));
  fv.values.push_back(parts.scr_peaks.empty()
                          ? 0.0
                          : amp_sum / static_cast<double>(parts.scr_peaks.size()));

  if (fv.values.size() != kFeatureCount) {
    throw Error(ErrorCode::InternalInvariant, "feature catalog size drifted");
  }
  return fv;
}

MedianImputer MedianImputer::fit(const FeatureMatrix& train) {
  MedianImputer imp;
  imp.names = train.feature_names;
  imp.medians.resize(train.n_features(), 0.0);
  for (std::size_t j = 0; j < train.n_features(); ++j) {
    std::vector<double> seen;
    for (const auto& r : train.rows) {
      if (!std::isnan(r.values[j])) seen.push_back(r.values[j]);
    }
    if (seen.empty()) continue;
    std::sort(seen.begin(), seen.end());
    const std::size_t mid = seen.size() / 2;
    imp.medians[j] = seen.size() % 2 == 1 ? seen[mid] : 0.5 * (seen[mid - 1] + seen[mid]);
  }
  return imp;
}

void MedianImputer::apply(FeatureMatrix& matrix) const {
  if (matrix.feature_names != names) {
    throw Error(ErrorCode::FeatureMismatch, "imputer fitted on a different feature set");
  }
  for (auto& r : matrix.rows) {
    for (std::size_t j = 0; j < r.values.size(); ++j) {
      if (std::isnan(r.values[j])) r.values[j] = medians[j];
    }
  }
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "pearson inputs differ in length");
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  if (ma.variance <= 0.0 || mb.variance <= 0.0) return 0.0;
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - ma.mean) * (b[i] - mb.mean);
  cov /= static_cast<double>(a.size());
  return cov / std::sqrt(ma.variance * mb.variance);
}

FeatureSelection select_features(const FeatureMatrix& matrix, double var_eps, double corr_max) {
  if (matrix.n_rows() == 0 || matrix.n_features() == 0) {
    throw Error(ErrorCode::EmptyMatrix, "feature selection needs a non-empty matrix");
  }
  std::vector<std::vector<double>> columns;
  columns.reserve(matrix.n_features());
  for (std::size_t j = 0; j < matrix.n_features(); ++j) {
    columns.push_back(matrix.column(j));
    for (double v : columns.back()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue,
                    "feature " + matrix.feature_names[j] + " has missing values; impute first");
      }
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (moments(columns[j]).variance <= var_eps) continue;
    const bool redundant = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return std::abs(pearson(columns[j], columns[k])) > corr_max;
    });
    if (!redundant) kept.push_back(j);
  }
  if (kept.empty()) throw Error(ErrorCode::AllFeaturesDropped, "no feature survived selection");

  FeatureSelection out;
  for (std::size_t j : kept) out.kept_names.push_back(matrix.feature_names[j]);
  out.reduced = matrix.select_columns(out.kept_names);
  return out;
}

}  // namespace affect
