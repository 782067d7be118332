#include "spamlab/random.hpp"

#include <cmath>
#include <stdexcept>

namespace spamlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t p : parts) s = splitmix64(s ^ splitmix64(p));
  return s;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
  return derive_seed(base, {a});
}
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return derive_seed(base, {a, b});
}
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return derive_seed(base, {a, b, c});
}

double Rng::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int: n must be >= 1");
  // Rejection to avoid modulo bias.
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t v;
  do {
    v = gen_();
  } while (v >= limit);
  return static_cast<int>(v % un);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  have_spare_ = true;
  return u * m;
}

int Rng::poisson(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("poisson: lambda must be >= 0");
  int total = 0;
  // Poisson(a+b) = Poisson(a) + Poisson(b); chunking keeps exp(-l) > 0.
  while (lambda > 500.0) {
    total += poisson(500.0);
    lambda -= 500.0;
  }
  const double threshold = std::exp(-lambda);
  double p = 1.0;
  int k = 0;
  do {
    ++k;
    p *= uniform01();
  } while (p > threshold);
  return total + k - 1;
}

double Rng::gamma(double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("gamma: alpha must be >= 0");
  if (alpha == 0.0) return 0.0;
  if (alpha < 1.0) {
    // Boost to shape alpha+1, then scale back.
    const double u = uniform01();
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::array<double, 5> Rng::dirichlet(const std::array<double, 5>& alpha) {
  std::array<double, 5> out{};
  double sum = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    out[i] = gamma(alpha[i]);
    sum += out[i];
  }
  if (sum <= 0.0) throw std::invalid_argument("dirichlet: all concentrations zero");
  for (double& v : out) v /= sum;
  return out;
}

int Rng::categorical(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) total += p;
  if (total <= 0.0) throw std::invalid_argument("categorical: nonpositive total mass");
  const double u = uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = uniform_int(i + 1);
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

}  // namespace spamlab
