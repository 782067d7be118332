#include "spamlab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "spamlab/random.hpp"

#include <nlohmann/json.hpp>

namespace spamlab {

namespace {
constexpr std::uint64_t kSynthTag = 0x5359;

void check_rating(int r) {
  if (r < 1 || r > 5) {
    throw std::invalid_argument("rating must be in [1,5], got " + std::to_string(r));
  }
}
}  // namespace

int Window::spam_count() const {
  int n = 0;
  for (auto f : spam) n += f ? 1 : 0;
  return n;
}

double Window::mean_rating() const {
  if (ratings.empty()) return 0.0;
  long sum = 0;
  for (int r : ratings) sum += r;
  return static_cast<double>(sum) / static_cast<double>(ratings.size());
}

TargetStream::TargetStream(std::string item_id, std::int64_t window_length,
                           std::vector<Window> windows)
    : item_id_(std::move(item_id)),
      window_length_(window_length),
      windows_(std::move(windows)) {
  if (window_length_ <= 0) throw std::invalid_argument("window_length must be positive");
  const std::size_t n = windows_.size();
  count_prefix_.assign(n + 1, 0);
  sum_prefix_.assign(n + 1, 0);
  star_prefix_.assign(n + 1, {0, 0, 0, 0, 0});
  for (std::size_t t = 0; t < n; ++t) {
    Window& w = windows_[t];
    if (w.spam.empty()) w.spam.assign(w.ratings.size(), 0);
    if (w.spam.size() != w.ratings.size()) {
      throw std::invalid_argument("window spam flags must align with ratings");
    }
    count_prefix_[t + 1] = count_prefix_[t] + static_cast<std::int64_t>(w.ratings.size());
    sum_prefix_[t + 1] = sum_prefix_[t];
    star_prefix_[t + 1] = star_prefix_[t];
    for (int r : w.ratings) {
      check_rating(r);
      sum_prefix_[t + 1] += r;
      ++star_prefix_[t + 1][static_cast<std::size_t>(r - 1)];
    }
  }
}

std::int64_t TargetStream::count_before(std::size_t t) const {
  return count_prefix_.at(t);
}

double TargetStream::car_before(std::size_t t) const {
  const std::int64_t n = count_prefix_.at(t);
  if (n == 0) return 0.0;
  return static_cast<double>(sum_prefix_[t]) / static_cast<double>(n);
}

double TargetStream::car_at(std::size_t t) const {
  return car_before(t + 1);
}

std::array<std::int64_t, 5> TargetStream::star_counts_before(std::size_t t) const {
  return star_prefix_.at(t);
}

std::array<double, 5> TargetStream::dist_before(std::size_t t) const {
  std::array<double, 5> d{};
  const std::int64_t n = count_prefix_.at(t);
  if (n == 0) return d;
  for (std::size_t i = 0; i < 5; ++i) {
    d[i] = static_cast<double>(star_prefix_[t][i]) / static_cast<double>(n);
  }
  return d;
}

std::array<double, 5> TargetStream::window_dist(std::size_t t) const {
  std::array<double, 5> d{};
  const Window& w = window(t);
  if (w.ratings.empty()) return d;
  for (int r : w.ratings) d[static_cast<std::size_t>(r - 1)] += 1.0;
  for (double& v : d) v /= static_cast<double>(w.ratings.size());
  return d;
}

TargetStream append_spam(const TargetStream& stream, std::size_t t, std::span<const int> ratings) {
  if (t >= stream.num_windows()) {
    throw std::out_of_range("append_spam: window index " + std::to_string(t) + " out of range");
  }
  for (int r : ratings) check_rating(r);
  std::vector<Window> windows;
  windows.reserve(stream.num_windows());
  for (std::size_t i = 0; i < stream.num_windows(); ++i) windows.push_back(stream.window(i));
  Window& w = windows[t];
  for (int r : ratings) {
    w.ratings.push_back(r);
    w.spam.push_back(1);
  }
  return TargetStream(stream.item_id(), stream.window_length(), std::move(windows));
}

TargetStream erase_spam(const TargetStream& stream, std::size_t t,
                        std::span<const int> spam_positions) {
  if (t >= stream.num_windows()) {
    throw std::out_of_range("erase_spam: window index " + std::to_string(t) + " out of range");
  }
  std::vector<Window> windows;
  windows.reserve(stream.num_windows());
  for (std::size_t i = 0; i < stream.num_windows(); ++i) windows.push_back(stream.window(i));
  Window& w = windows[t];

  // Map positions among spam entries to absolute indices.
  std::vector<std::size_t> spam_idx;
  for (std::size_t i = 0; i < w.ratings.size(); ++i) {
    if (w.spam[i]) spam_idx.push_back(i);
  }
  std::vector<std::size_t> to_erase;
  for (int p : spam_positions) {
    if (p < 0 || static_cast<std::size_t>(p) >= spam_idx.size()) {
      throw std::out_of_range("erase_spam: spam position out of range");
    }
    to_erase.push_back(spam_idx[static_cast<std::size_t>(p)]);
  }
  std::sort(to_erase.begin(), to_erase.end());
  to_erase.erase(std::unique(to_erase.begin(), to_erase.end()), to_erase.end());
  for (auto it = to_erase.rbegin(); it != to_erase.rend(); ++it) {
    w.ratings.erase(w.ratings.begin() + static_cast<std::ptrdiff_t>(*it));
    w.spam.erase(w.spam.begin() + static_cast<std::ptrdiff_t>(*it));
    ++w.spam_removed;
  }
  return TargetStream(stream.item_id(), stream.window_length(), std::move(windows));
}

void SynthConfig::validate() const {
  if (n_targets < 1) throw std::invalid_argument("n_targets must be >= 1");
  if (n_windows < 1) throw std::invalid_argument("n_windows must be >= 1");
  if (arrival_mean < 0.0) throw std::invalid_argument("arrival_mean must be >= 0");
  if (arrival_trend <= 0.0) throw std::invalid_argument("arrival_trend must be > 0");
  if (noise_scale <= 0.0) throw std::invalid_argument("noise_scale must be > 0");
  double sum = 0.0;
  for (double p : base_distribution) {
    if (p < 0.0) throw std::invalid_argument("base_distribution entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("base_distribution must sum to 1");
  }
}

std::vector<TargetStream> generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<TargetStream> streams;
  streams.reserve(static_cast<std::size_t>(cfg.n_targets));
  for (int i = 0; i < cfg.n_targets; ++i) {
    Rng rng(derive_seed(cfg.seed, kSynthTag, static_cast<std::uint64_t>(i)));
    std::array<double, 5> conc{};
    for (std::size_t k = 0; k < 5; ++k) conc[k] = cfg.base_distribution[k] * cfg.noise_scale;
    const std::array<double, 5> dist = rng.dirichlet(conc);

    std::vector<Window> windows(static_cast<std::size_t>(cfg.n_windows));
    double lambda = cfg.arrival_mean;
    for (int t = 0; t < cfg.n_windows; ++t) {
      const int count = rng.poisson(lambda);
      Window& w = windows[static_cast<std::size_t>(t)];
      w.ratings.reserve(static_cast<std::size_t>(count));
      for (int k = 0; k < count; ++k) {
        w.ratings.push_back(rng.categorical(dist) + 1);
      }
      w.spam.assign(w.ratings.size(), 0);
      lambda *= cfg.arrival_trend;
    }
    char name[32];
    std::snprintf(name, sizeof(name), "synth-%04d", i);
    streams.emplace_back(name, 1, std::move(windows));
  }
  return streams;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<TargetStream> ingest_csv(const std::string& path, std::int64_t window_length) {
  if (window_length <= 0) throw std::invalid_argument("window_length must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);

  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::vector<Review>> by_item;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!saw_header) {
      if (t != "item_id,account_id,rating,timestamp") {
        throw std::runtime_error("line 1: expected header item_id,account_id,rating,timestamp");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split_csv_line(t);
    if (fields.size() != 4) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                               std::to_string(fields.size()));
    }
    Review r;
    r.item_id = trim(fields[0]);
    r.account_id = trim(fields[1]);
    try {
      std::size_t used = 0;
      r.rating = std::stoi(trim(fields[2]), &used);
      if (used != trim(fields[2]).size()) throw std::invalid_argument("trailing chars");
      r.timestamp = std::stoll(trim(fields[3]), &used);
      if (used != trim(fields[3]).size()) throw std::invalid_argument("trailing chars");
    } catch (const std::exception&) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": malformed numeric field");
    }
    if (r.rating < 1 || r.rating > 5) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": rating " +
                               std::to_string(r.rating) + " outside [1,5]");
    }
    if (r.timestamp < 0) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": negative timestamp");
    }
    by_item[r.item_id].push_back(std::move(r));
  }

  std::vector<TargetStream> streams;
  streams.reserve(by_item.size());
  for (auto& [item, reviews] : by_item) {
    std::int64_t anchor = reviews.front().timestamp;
    std::int64_t last = anchor;
    for (const Review& r : reviews) {
      anchor = std::min(anchor, r.timestamp);
      last = std::max(last, r.timestamp);
    }
    const std::size_t n_windows = static_cast<std::size_t>((last - anchor) / window_length) + 1;
    std::vector<Window> windows(n_windows);
    // Stable order inside a window: by timestamp, then account.
    std::stable_sort(reviews.begin(), reviews.end(), [](const Review& a, const Review& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.account_id < b.account_id;
    });
    for (const Review& r : reviews) {
      const std::size_t t = static_cast<std::size_t>((r.timestamp - anchor) / window_length);
      windows[t].ratings.push_back(r.rating);
      windows[t].spam.push_back(r.spam ? 1 : 0);
    }
    streams.emplace_back(item, window_length, std::move(windows));
  }
  return streams;
}

std::string to_jsonl(const std::vector<TargetStream>& streams) {
  std::string out;
  for (const TargetStream& s : streams) {
    for (std::size_t t = 0; t < s.num_windows(); ++t) {
      const Window& w = s.window(t);
      nlohmann::json j;
      j["item_id"] = s.item_id();
      j["window_length"] = s.window_length();
      j["index"] = t;
      j["ratings"] = w.ratings;
      j["spam"] = w.spam;
      j["spam_removed"] = w.spam_removed;
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

std::vector<TargetStream> from_jsonl(const std::string& text) {
  struct Partial {
    std::int64_t window_length = 0;
    std::vector<Window> windows;
  };
  std::vector<std::pair<std::string, Partial>> order;  // keep first-seen order
  auto find = [&order](const std::string& id) -> Partial& {
    for (auto& [k, v] : order) {
      if (k == id) return v;
    }
    order.emplace_back(id, Partial{});
    return order.back().second;
  };

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string item = j.at("item_id").get<std::string>();
    Partial& p = find(item);
    p.window_length = j.at("window_length").get<std::int64_t>();
    const std::size_t idx = j.at("index").get<std::size_t>();
    if (p.windows.size() <= idx) p.windows.resize(idx + 1);
    Window w;
    w.ratings = j.at("ratings").get<std::vector<int>>();
    w.spam = j.at("spam").get<std::vector<std::uint8_t>>();
    w.spam_removed = j.at("spam_removed").get<int>();
    p.windows[idx] = std::move(w);
  }
  std::vector<TargetStream> streams;
  streams.reserve(order.size());
  for (auto& [item, p] : order) {
    streams.emplace_back(item, p.window_length, std::move(p.windows));
  }
  return streams;
}

void write_jsonl(const std::vector<TargetStream>& streams, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  out << to_jsonl(streams);
}

std::vector<TargetStream> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

}  // namespace spamlab
