#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spamlab {

// One rating event as it appears in a CSV corpus. Windows aggregate these;
// only ratings and window membership survive aggregation.
struct Review {
  std::string item_id;
  std::string account_id;
  int rating = 0;  // stars in {1,...,5}
  std::int64_t timestamp = 0;
  bool spam = false;
};

// One time bucket of a target's reviews. `spam` runs parallel to `ratings`
// and marks injected reviews; detectors never read it. `spam_removed`
// counts spam reviews a removal pass deleted from this window.
struct Window {
  std::vector<int> ratings;
  std::vector<std::uint8_t> spam;
  int spam_removed = 0;

  std::size_t size() const { return ratings.size(); }
  int spam_count() const;
  double mean_rating() const;  // 0 when empty
};

// A target's complete review history as contiguous, chronologically ordered
// windows. Immutable after construction; cumulative statistics are
// precomputed so per-window queries are O(1).
class TargetStream {
 public:
  TargetStream(std::string item_id, std::int64_t window_length, std::vector<Window> windows);

  const std::string& item_id() const { return item_id_; }
  std::int64_t window_length() const { return window_length_; }
  std::size_t num_windows() const { return windows_.size(); }
  const Window& window(std::size_t t) const { return windows_.at(t); }

  // Number of ratings strictly before window t.
  std::int64_t count_before(std::size_t t) const;
  // Cumulative average rating strictly before window t; 0 when no history.
  double car_before(std::size_t t) const;
  // Cumulative average rating through window t; 0 when no ratings at all.
  double car_at(std::size_t t) const;
  // Per-star counts strictly before window t.
  std::array<std::int64_t, 5> star_counts_before(std::size_t t) const;
  // Historic rating distribution strictly before window t; zeros when empty.
  std::array<double, 5> dist_before(std::size_t t) const;
  // Rating distribution of window t alone; zeros when the window is empty.
  std::array<double, 5> window_dist(std::size_t t) const;

 private:
  std::string item_id_;
  std::int64_t window_length_;
  std::vector<Window> windows_;
  std::vector<std::int64_t> count_prefix_;  // size num_windows()+1
  std::vector<std::int64_t> sum_prefix_;
  std::vector<std::array<std::int64_t, 5>> star_prefix_;
};

// Returns a stream whose window `t` additionally contains `ratings`, each
// flagged as spam; cumulative statistics of later windows follow.
TargetStream append_spam(const TargetStream& stream, std::size_t t, std::span<const int> ratings);

// Deletes the spam entries of window `t` at the given positions (indices
// into the window's spam entries in order) and records them as removed.
TargetStream erase_spam(const TargetStream& stream, std::size_t t, std::span<const int> spam_positions);

struct SynthConfig {
  int n_targets = 50;
  int n_windows = 37;
  double arrival_mean = 10.0;
  double arrival_trend = 1.0;
  // Default favors the 1 and 5 ends (U-shaped rating mass).
  std::array<double, 5> base_distribution = {0.25, 0.05, 0.10, 0.15, 0.45};
  double noise_scale = 80.0;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

// Deterministic in the config; each target draws its rating distribution
// from a Dirichlet around base_distribution and its per-window review count
// from Poisson(arrival_mean * arrival_trend^t).
std::vector<TargetStream> generate_synthetic(const SynthConfig& cfg);

// CSV with header item_id,account_id,rating,timestamp. Windows are anchored
// at each item's earliest review. Throws on malformed rows (with the line
// number) and on out-of-range ratings.
std::vector<TargetStream> ingest_csv(const std::string& path, std::int64_t window_length);

// JSON-lines cache format, one window per line.
std::string to_jsonl(const std::vector<TargetStream>& streams);
std::vector<TargetStream> from_jsonl(const std::string& text);
void write_jsonl(const std::vector<TargetStream>& streams, const std::string& path);
std::vector<TargetStream> read_jsonl(const std::string& path);

}  // namespace spamlab
