#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "affect/dataset.hpp"
#include "affect/signal.hpp"

namespace affect {

inline constexpr std::size_t kFeatureCount = 64;

/// The fixed feature catalog, in declared order:
///   for BVP, EDA, SKT, ACC_MAG, ACC_X, ACC_Y, ACC_Z:
///     <ch>_mean, _std, _min, _max, _skew, _kurt, _slope (mean first
///     difference), _diff_std (std of first differences)          56
///   HRV_hr_mean, HRV_hr_std, HRV_ibi_mean, HRV_sdnn, HRV_rmssd,
///   HRV_pnn50                                                     6
///   EDA_scr_count, EDA_scr_amp_mean                               2
const std::vector<std::string>& feature_catalog();

struct FeatureConfig {
  double scr_threshold = 0.01;  // normalized units
  double tonic_window_s = 4.0;
};

/// Beat detection result. `long_gaps[i]` flags interval i (peaks[i] to
/// peaks[i+1]) as longer than 2 s, i.e. below 30 bpm.
struct BeatPeaks {
  std::vector<std::size_t> peaks;
  std::vector<bool> long_gaps;
};

inline constexpr double kMinBeatInterval = 0.33;  // 180 bpm
inline constexpr double kMaxBeatInterval = 2.0;   // 30 bpm

/// Apex of the parabola through x[i-1], x[i], x[i+1], in samples. Falls back
/// to i at the edges or where the three points are not concave.
double refined_peak_position(std::span<const double> x, std::size_t i);

/// Local maxima above a rolling mean + 0.5 rolling std (2 s centred window),
/// with a 0.33 s refractory period keeping the taller of two close peaks.
/// The refractory test uses the refined apex positions, so a 3 Hz pulse
/// sampled at 64 Hz (21 or 22 samples apart) keeps every beat.
/// Requires rate >= 32 Hz; throws TooFewPeaks below 3 peaks.
BeatPeaks detect_bvp_peaks(std::span<const double> x, double rate);

/// intervals[i] = (peaks[i+1] - peaks[i]) / rate. Throws TooFewPeaks below 2 peaks.
std::vector<double> ibi_from_peaks(std::span<const std::size_t> peaks, double rate);

struct ScrPeak {
  std::size_t index = 0;
  double amplitude = 0.0;  // above the trough since the previous response
};

struct EdaComponents {
  std::vector<double> tonic;
  std::vector<double> phasic;
  std::vector<ScrPeak> scr_peaks;
};

/// Tonic is a centred moving average over `tonic_window_s` (symmetrically
/// shortened at the edges so linear trends pass through unchanged); phasic
/// is the remainder. SCR peaks are local maxima of the phasic component
/// rising at least `scr_threshold` above the lowest point since the
/// previous detected response.
EdaComponents eda_decompose(std::span<const double> x, double rate, double scr_threshold = 0.01,
                            double tonic_window_s = 4.0);

/// Catalog features of a preprocessed window. Undefined values (HRV without
/// enough beats) are left as kMissing.
FeatureVector extract_features(const WindowSample& window, const FeatureConfig& config = {});

/// Per-feature medians of the non-missing training values; replaces missing
/// entries. Columns with no observed value impute 0.
struct MedianImputer {
  std::vector<std::string> names;
  std::vector<double> medians;

  static MedianImputer fit(const FeatureMatrix& train);
  void apply(FeatureMatrix& matrix) const;
};

struct FeatureSelection {
  FeatureMatrix reduced;
  std::vector<std::string> kept_names;
};

/// Drops features with population variance <= var_eps, then scans in
/// declared order dropping any feature whose |Pearson r| with an already
/// kept feature exceeds corr_max. Throws EmptyMatrix or AllFeaturesDropped.
FeatureSelection select_features(const FeatureMatrix& matrix, double var_eps, double corr_max);

/// Population Pearson correlation; 0 when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace affect
