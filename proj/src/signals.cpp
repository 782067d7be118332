#include "spamlab/signals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace spamlab {

namespace {

constexpr const char* kSignalNames[kSignalCount] = {
    "nr", "delta_nr", "delta_car", "car_dev", "pr", "delta_pr", "en", "delta_en", "kl_div"};

}  // namespace

double rating_entropy(const std::array<double, 5>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

const char* signal_name(Signal k) {
  return kSignalNames[static_cast<int>(k)];
}

Signal signal_from_name(const std::string& name) {
  for (int i = 0; i < kSignalCount; ++i) {
    if (name == kSignalNames[i]) return static_cast<Signal>(i);
  }
  throw std::invalid_argument("unknown signal name: " + name);
}

bool higher_is_suspicious(Signal k) {
  return k != Signal::kEn && k != Signal::kDeltaEn;
}

double SignalVector::get(Signal k) const {
  switch (k) {
    case Signal::kNr: return nr;
    case Signal::kDeltaNr: return delta_nr;
    case Signal::kDeltaCar: return delta_car;
    case Signal::kCarDev: return car_dev;
    case Signal::kPr: return pr;
    case Signal::kDeltaPr: return delta_pr;
    case Signal::kEn: return en;
    case Signal::kDeltaEn: return delta_en;
    case Signal::kKlDiv: return kl_div;
  }
  throw std::logic_error("bad signal");
}

void SignalVector::set(Signal k, double v) {
  switch (k) {
    case Signal::kNr: nr = v; return;
    case Signal::kDeltaNr: delta_nr = v; return;
    case Signal::kDeltaCar: delta_car = v; return;
    case Signal::kCarDev: car_dev = v; return;
    case Signal::kPr: pr = v; return;
    case Signal::kDeltaPr: delta_pr = v; return;
    case Signal::kEn: en = v; return;
    case Signal::kDeltaEn: delta_en = v; return;
    case Signal::kKlDiv: kl_div = v; return;
  }
  throw std::logic_error("bad signal");
}

std::array<double, kSignalCount> SignalVector::as_array() const {
  std::array<double, kSignalCount> a{};
  for (int i = 0; i < kSignalCount; ++i) a[static_cast<std::size_t>(i)] = get(static_cast<Signal>(i));
  return a;
}

ARModel ARModel::uniform(int d, double eta) {
  if (d < 1) throw std::invalid_argument("AR order must be >= 1");
  if (eta <= 0.0) throw std::invalid_argument("AR learning rate must be > 0");
  ARModel m;
  m.theta.assign(static_cast<std::size_t>(d), 1.0 / static_cast<double>(d));
  m.eta = eta;
  return m;
}

double ar_predict(const ARModel& ar, std::span<const double> lags) {
  if (lags.size() != ar.theta.size()) {
    throw std::invalid_argument("ar_predict: lag span length must equal the model order");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < lags.size(); ++i) acc += ar.theta[i] * lags[i];
  return acc;
}

ARModel ar_update(const ARModel& ar, std::span<const double> lags, double observed) {
  const double residual = observed - ar_predict(ar, lags);
  ARModel next = ar;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    next.theta[i] += ar.eta * residual * lags[i];
  }
  return next;
}

std::vector<double> car_lags(const TargetStream& stream, std::size_t t, int d) {
  if (t < static_cast<std::size_t>(d)) {
    throw std::invalid_argument("car_lags: need t >= d");
  }
  std::vector<double> lags(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    lags[static_cast<std::size_t>(i)] = stream.car_at(t - 1 - static_cast<std::size_t>(i));
  }
  return lags;
}

ARModel train_ar(const TargetStream& stream, const ArConfig& cfg, std::size_t upto) {
  ARModel ar = ARModel::uniform(cfg.d, cfg.eta);
  const std::size_t end = std::min(upto, stream.num_windows());
  for (std::size_t t = static_cast<std::size_t>(cfg.d); t < end; ++t) {
    const auto lags = car_lags(stream, t, cfg.d);
    ar = ar_update(ar, lags, stream.car_at(t));
  }
  return ar;
}

SignalVector compute_signals(const TargetStream& stream, std::size_t t, const ARModel& ar) {
  if (t == 0) throw std::invalid_argument("compute_signals: t must be >= 1 (delta signals need history)");
  if (t >= stream.num_windows()) throw std::out_of_range("compute_signals: window index out of range");

  const Window& cur = stream.window(t);
  const Window& prev = stream.window(t - 1);
  const double n_t = static_cast<double>(cur.size());
  const double n_prev = static_cast<double>(prev.size());

  SignalVector sv;
  sv.nr = n_t;
  sv.delta_nr = n_t - n_prev;

  const double car_t = stream.car_at(t);
  const double car_t1 = stream.car_before(t);
  sv.delta_car = car_t - car_t1;

  const int d = ar.order();
  if (t >= static_cast<std::size_t>(d)) {
    const auto lags = car_lags(stream, t, d);
    const double predicted = ar_predict(ar, lags);
    sv.car_dev = std::max(predicted - car_t, 0.0);
  } else {
    sv.car_dev = 0.0;
  }

  auto positive_ratio = [](const Window& w) {
    if (w.ratings.empty()) return 0.0;
    int pos = 0;
    for (int r : w.ratings) pos += (r >= 4) ? 1 : 0;
    return static_cast<double>(pos) / static_cast<double>(w.ratings.size());
  };
  sv.pr = positive_ratio(cur);
  sv.delta_pr = sv.pr - positive_ratio(prev);

  const auto p_cur = stream.window_dist(t);
  const auto p_prev = stream.window_dist(t - 1);
  sv.en = cur.ratings.empty() ? 0.0 : rating_entropy(p_cur);
  const double en_prev = prev.ratings.empty() ? 0.0 : rating_entropy(p_prev);
  sv.delta_en = sv.en - en_prev;

  if (cur.ratings.empty()) {
    sv.kl_div = 0.0;
  } else {
    const auto hist = stream.dist_before(t);
    const double n_hist = static_cast<double>(stream.count_before(t));
    const double floor = 1.0 / (n_hist + 5.0);
    double kl = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      if (p_cur[i] > 0.0) {
        const double q = hist[i] > 0.0 ? hist[i] : floor;
        kl += p_cur[i] * std::log(p_cur[i] / q);
      }
    }
    sv.kl_div = kl;
  }
  return sv;
}

SignalCDF::SignalCDF(std::array<std::vector<double>, kSignalCount> samples)
    : sorted_(std::move(samples)) {
  for (auto& v : sorted_) {
    if (v.empty()) throw std::invalid_argument("SignalCDF: every signal needs at least one sample");
    std::sort(v.begin(), v.end());
  }
}

double SignalCDF::cdf(Signal k, double x) const {
  const auto& v = sorted_[static_cast<std::size_t>(k)];
  const auto it = std::upper_bound(v.begin(), v.end(), x);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

double SignalCDF::strict_fraction(Signal k, double x) const {
  const auto& v = sorted_[static_cast<std::size_t>(k)];
  const auto it = std::lower_bound(v.begin(), v.end(), x);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile: empty sample");
  if (p < 0.0 || p > 100.0) throw std::invalid_argument("percentile: p must be in [0,100]");
  const double h = static_cast<double>(sorted.size()) * p / 100.0;  // ECDF(v_k) = k/n, 1-based
  if (h <= 1.0) return sorted.front();
  if (h >= static_cast<double>(sorted.size())) return sorted.back();
  const std::size_t k1 = static_cast<std::size_t>(h);  // floor, 1-based
  const double frac = h - static_cast<double>(k1);
  return sorted[k1 - 1] + frac * (sorted[k1] - sorted[k1 - 1]);
}

double SignalCDF::percentile(Signal k, double p) const {
  return percentile_sorted(sorted_[static_cast<std::size_t>(k)], p);
}

double SignalCDF::f(Signal k, double x) const {
  return higher_is_suspicious(k) ? 1.0 - cdf(k, x) : cdf(k, x);
}

double SignalCDF::suspicious_rank(Signal k, double x) const {
  if (higher_is_suspicious(k)) return strict_fraction(k, x);
  // Suspicious when low: count samples strictly above x.
  return 1.0 - cdf(k, x);
}

std::size_t SignalCDF::sample_count(Signal k) const {
  return sorted_[static_cast<std::size_t>(k)].size();
}

const std::vector<double>& SignalCDF::samples(Signal k) const {
  return sorted_[static_cast<std::size_t>(k)];
}

TrainedDetector fit_cdfs(const std::vector<TargetStream>& streams, std::size_t upto,
                         const ArConfig& cfg) {
  if (upto < 2) throw std::invalid_argument("fit_cdfs: need upto >= 2");
  std::array<std::vector<double>, kSignalCount> pools;
  std::vector<ARModel> models;
  models.reserve(streams.size());
  for (const TargetStream& s : streams) {
    ARModel ar = ARModel::uniform(cfg.d, cfg.eta);
    const std::size_t end = std::min(upto, s.num_windows());
    for (std::size_t t = 1; t < end; ++t) {
      const SignalVector sv = compute_signals(s, t, ar);
      for (Signal k : kAllSignals) {
        pools[static_cast<std::size_t>(k)].push_back(sv.get(k));
      }
      if (t >= static_cast<std::size_t>(cfg.d)) {
        ar = ar_update(ar, car_lags(s, t, cfg.d), s.car_at(t));
      }
    }
    models.push_back(std::move(ar));
  }
  if (pools[0].empty()) throw std::invalid_argument("fit_cdfs: no windows available");
  return TrainedDetector{SignalCDF(std::move(pools)), std::move(models), cfg, upto};
}

WeightVector WeightVector::uniform() {
  WeightVector wv;
  wv.w.fill(1.0);
  return wv;
}

WeightVector WeightVector::dominant(Signal k) {
  WeightVector wv;
  wv.w.fill(1e-3);
  wv.w[static_cast<std::size_t>(k)] = 1.0;
  return wv;
}

double suspicious_score(const SignalVector& sv, const SignalCDF& cdf, const WeightVector& w) {
  double wsum = 0.0;
  double acc = 0.0;
  for (Signal k : kAllSignals) {
    const double wk = w.w[static_cast<std::size_t>(k)];
    if (wk < 0.0) throw std::invalid_argument("suspicious_score: negative weight");
    const double fk = cdf.f(k, sv.get(k));
    acc += wk * fk * fk;
    wsum += wk;
  }
  if (wsum <= 0.0) throw std::invalid_argument("suspicious_score: at least one weight must be positive");
  return 1.0 - std::sqrt(acc / wsum);
}

double max_signal_score(const SignalVector& sv, const SignalCDF& cdf) {
  double best = 0.0;
  for (Signal k : kAllSignals) {
    best = std::max(best, 1.0 - cdf.f(k, sv.get(k)));
  }
  return best;
}

std::string signals_csv(const std::vector<TargetStream>& streams, const ArConfig& cfg) {
  std::size_t max_windows = 0;
  for (const TargetStream& s : streams) max_windows = std::max(max_windows, s.num_windows());
  const TrainedDetector det = fit_cdfs(streams, std::max<std::size_t>(max_windows, 2), cfg);

  std::string out = "item_id,window_index";
  for (int i = 0; i < kSignalCount; ++i) {
    out += ',';
    out += kSignalNames[i];
  }
  out += ",s_uniform,s_max\n";

  char buf[64];
  const WeightVector uni = WeightVector::uniform();
  for (const TargetStream& s : streams) {
    ARModel ar = ARModel::uniform(cfg.d, cfg.eta);
    for (std::size_t t = 1; t < s.num_windows(); ++t) {
      const SignalVector sv = compute_signals(s, t, ar);
      out += s.item_id();
      out += ',';
      out += std::to_string(t);
      for (Signal k : kAllSignals) {
        std::snprintf(buf, sizeof(buf), ",%.17g", sv.get(k));
        out += buf;
      }
      std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", suspicious_score(sv, det.cdf, uni),
                    max_signal_score(sv, det.cdf));
      out += buf;
      out += '\n';
      if (t >= static_cast<std::size_t>(cfg.d)) {
        ar = ar_update(ar, car_lags(s, t, cfg.d), s.car_at(t));
      }
    }
  }
  return out;
}

}  // namespace spamlab
