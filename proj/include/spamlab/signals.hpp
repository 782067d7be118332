#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spamlab/corpus.hpp"

namespace spamlab {

// The nine per-window detection signals, in canonical order.
enum class Signal : int {
  kNr = 0,
  kDeltaNr = 1,
  kDeltaCar = 2,
  kCarDev = 3,
  kPr = 4,
  kDeltaPr = 5,
  kEn = 6,
  kDeltaEn = 7,
  kKlDiv = 8,
};
inline constexpr int kSignalCount = 9;
inline constexpr std::array<Signal, kSignalCount> kAllSignals = {
    Signal::kNr,  Signal::kDeltaNr, Signal::kDeltaCar,
    Signal::kCarDev, Signal::kPr,   Signal::kDeltaPr,
    Signal::kEn,  Signal::kDeltaEn, Signal::kKlDiv,
};

const char* signal_name(Signal k);
Signal signal_from_name(const std::string& name);

// Shannon entropy of a 5-point distribution, natural log, 0*log0 = 0.
double rating_entropy(const std::array<double, 5>& p);

// Orientation: rating entropy is suspicious when low, as is a drop in
// entropy; every other signal is suspicious when high.
bool higher_is_suspicious(Signal k);

struct SignalVector {
  double nr = 0.0;
  double delta_nr = 0.0;
  double delta_car = 0.0;
  double car_dev = 0.0;
  double pr = 0.0;
  double delta_pr = 0.0;
  double en = 0.0;
  double delta_en = 0.0;
  double kl_div = 0.0;

  double get(Signal k) const;
  void set(Signal k, double v);
  std::array<double, kSignalCount> as_array() const;
};

// Online AR(d) model over the CAR series. theta[0] multiplies the most
// recent lag; lag spans are passed most-recent-first everywhere.
struct ARModel {
  std::vector<double> theta;
  double eta = 0.01;

  int order() const { return static_cast<int>(theta.size()); }
  static ARModel uniform(int d, double eta);
};

struct ArConfig {
  int d = 4;
  double eta = 0.01;
};

// Inner product of theta with the last d values (most recent first).
double ar_predict(const ARModel& ar, std::span<const double> lags);

// One online gradient step on the squared prediction error:
// theta' = theta + eta * (observed - predicted) * lags.
ARModel ar_update(const ARModel& ar, std::span<const double> lags, double observed);

// CAR lags for predicting window t, most recent first; requires t >= d.
std::vector<double> car_lags(const TargetStream& stream, std::size_t t, int d);

// Online AR run over windows [d, upto): predict, then update on the
// observed CAR. Returns the model state after seeing window upto-1.
ARModel train_ar(const TargetStream& stream, const ArConfig& cfg, std::size_t upto);

// All nine signals of window t; `ar` must be the model trained on windows
// < t. CAR-DEV is 0 when t < order (no full lag span yet). Empty windows
// have EN = KL-DIV = PR = 0.
SignalVector compute_signals(const TargetStream& stream, std::size_t t, const ARModel& ar);

// Inverse of the linearly interpolated ECDF (ECDF(v_k) = k/n, linear in
// between) of an ascending-sorted sample at p in [0, 100].
double percentile_sorted(std::span<const double> sorted, double p);

// Empirical per-signal CDFs pooled over historic windows.
class SignalCDF {
 public:
  explicit SignalCDF(std::array<std::vector<double>, kSignalCount> samples);

  // Right-continuous step ECDF, P(X <= x).
  double cdf(Signal k, double x) const;
  // P(X < x).
  double strict_fraction(Signal k, double x) const;
  // Inverse of the linearly interpolated ECDF at p in [0, 100].
  double percentile(Signal k, double p) const;
  // Orientation-corrected suspiciousness transform; lower = more suspicious.
  double f(Signal k, double x) const;
  // Fraction of historic samples strictly less suspicious than x; 1 = most
  // suspicious ever seen. Equality with historic values does not count
  // against x, so a value sitting on an atom of the CDF passes thresholds.
  double suspicious_rank(Signal k, double x) const;

  std::size_t sample_count(Signal k) const;
  const std::vector<double>& samples(Signal k) const;

 private:
  std::array<std::vector<double>, kSignalCount> sorted_;
};

// Frozen training state of a detector: pooled CDFs plus the per-target AR
// model as of the end of the training range.
struct TrainedDetector {
  SignalCDF cdf;
  std::vector<ARModel> ar_by_target;
  ArConfig ar_config;
  std::size_t train_upto = 0;
};

// Pools signals of all targets over windows [1, upto); AR models are
// trained online within the same range. Throws when no windows exist.
TrainedDetector fit_cdfs(const std::vector<TargetStream>& streams, std::size_t upto,
                         const ArConfig& cfg);

struct WeightVector {
  std::array<double, kSignalCount> w{};

  static WeightVector uniform();
  // Weight 1 on the dominant signal, 1e-3 elsewhere.
  static WeightVector dominant(Signal k);
};

// S = 1 - sqrt(sum_k w_k f_k^2 / sum_k w_k); in [0,1], higher = more
// suspicious. Throws when no weight is positive.
double suspicious_score(const SignalVector& sv, const SignalCDF& cdf, const WeightVector& w);

// max_k (1 - f_k).
double max_signal_score(const SignalVector& sv, const SignalCDF& cdf);

// One CSV row per (item, window >= 1) with the nine signals plus uniform-
// and max-aggregated S scores.
std::string signals_csv(const std::vector<TargetStream>& streams, const ArConfig& cfg);

}  // namespace spamlab
