#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace spamlab {

// Mixes a base seed with logical indices (repetition, target, window, ...)
// so parallel workers draw from independent streams without sharing state.
// Counter-based: the result depends only on the inputs, never on call order.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Seeded generator with hand-rolled samplers. The samplers avoid
// std::*_distribution, whose output is implementation-defined; every draw
// here is a pure function of the seed and the call sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform01();
  // Uniform integer in [0, n); n >= 1.
  int uniform_int(int n);
  // Standard normal (polar method).
  double normal();
  // Poisson with mean lambda >= 0 (Knuth, chunked for large lambda).
  int poisson(double lambda);
  // Gamma with shape alpha >= 0, unit scale (Marsaglia-Tsang).
  double gamma(double alpha);
  // Dirichlet over 5 categories; zero concentrations yield exact zeros.
  std::array<double, 5> dirichlet(const std::array<double, 5>& alpha);
  // Index in [0, probs.size()) by inverse-CDF on the given weights.
  int categorical(std::span<const double> probs);
  // Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spamlab
