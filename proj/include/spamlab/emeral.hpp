#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spamlab/corpus.hpp"
#include "spamlab/random.hpp"
#include "spamlab/signals.hpp"

namespace spamlab {

// Evasion strategies: which detection signals the spammer keeps below
// their historic thresholds. E1-E9 target established products, EA/EB the
// early review period.
enum class Evasion : int {
  kE1 = 0,  // NR
  kE2,      // NR, dNR
  kE3,      // NR, CAR-DEV
  kE4,      // NR, CAR-DEV, dCAR
  kE5,      // NR, CAR-DEV, KL-DIV
  kE6,      // NR, CAR-DEV, KL-DIV, dEN
  kE7,      // NR, CAR-DEV, KL-DIV, PR
  kE8,      // NR, CAR-DEV, EN
  kE9,      // NR, CAR-DEV, EN, dEN
  kEA,      // early: max entropy under NR, dNR, dCAR
  kEB,      // early: max 5-star volume under NR, dNR, dCAR
};
inline constexpr int kPureEvasionCount = 9;

const char* evasion_name(Evasion e);
Evasion evasion_from_name(const std::string& name);
std::vector<Signal> evaded_signals(Evasion e);
bool evades(Evasion e, Signal k);

// The one-dimensional quadratic program for the CAR perturbation delta.
// Maximizes [1 + theta1_next + eta*inner]*delta + eta*x_prev*delta^2 over
// the closed interval
//   max{0, hat_x_t - x_t - epsilon} <= delta
//   delta <= min{upper - x_t, hat_x_t - x_t + epsilon}
// intersected, when enforce_delta_car, with |x_prev - (x_t + delta)| <= epsilon.
struct DeltaProblem {
  double x_t = 0.0;          // current CAR, before spamming
  double x_prev = 0.0;       // previous window's CAR
  double hat_x_t = 0.0;      // AR prediction of the current CAR
  double theta1_next = 0.0;  // most-recent coefficient of the updated model
  double inner = 0.0;        // dot of the two adjacent lag spans
  double eta = 0.0;
  double epsilon = 0.0;      // slack, > 0
  double upper = 5.0;        // series upper bound
  bool enforce_delta_car = false;
};

// Maximizing endpoint (or interior vertex when the curvature is negative);
// nullopt when the feasible interval is empty, meaning the spammer skips
// the window. Ties prefer the larger delta.
std::optional<double> solve_delta(const DeltaProblem& p);

// Closed form for the next AR prediction after the current observation is
// poisoned by delta and the model takes its online step on the poisoned
// residual. `history` holds the last order+1 CAR values, most recent first
// (history[0] is the current, unpoisoned value).
double predict_after_attack(const ARModel& ar, std::span<const double> history, double delta);

// Constrained KL-divergence minimization over the 5-point rating simplex:
//   min KL(p || p_bar)
//   s.t. mean_lower <= E_p[R] <= mean_upper,  H(p) >= entropy_min,
//        p4 + p5 <= positive_cap
// with each constraint individually switchable.
struct KLProblem {
  std::array<double, 5> p_bar = {0.2, 0.2, 0.2, 0.2, 0.2};
  double mean_upper = 5.0;
  double mean_lower = 1.0;
  double entropy_min = 0.0;
  double positive_cap = 1.0;
  bool mean_upper_active = false;
  bool mean_lower_active = false;
  bool entropy_active = false;
  bool positive_active = false;
};

// Projected gradient ascent state for the four dual multipliers.
struct DualState {
  double alpha = 0.0;   // mean upper bound
  double beta = 0.0;    // mean lower bound
  double lambda = 0.0;  // positive-ratio cap
  double gamma = 0.0;   // entropy floor
  double step = 0.05;
  double tol = 1e-7;
  int max_iters = 50000;
};

enum class KLStatus { kConverged, kInfeasible, kNoConvergence };

struct KLSolution {
  KLStatus status = KLStatus::kNoConvergence;
  std::array<double, 5> p{};
  DualState multipliers;
  int iterations = 0;
  double max_violation = 0.0;  // final max primal constraint violation
  double objective = 0.0;      // KL(p || p_bar)
};

// Dual ascent on the closed-form reconstruction p_i = exp(S_i/(1+gamma))/Z.
// The normalizing multiplier is never iterated; p is renormalized through Z
// at every step. Infeasibility of the constraint set is detected before the
// ascent (analytic bounds plus, for the entropy floor, an auxiliary
// max-entropy solve over the remaining polytope).
KLSolution solve_kl(const KLProblem& problem, const DualState& init = DualState{});

// Largest spam count that keeps the window's review volume unsuspicious.
// When bound_delta_nr, the count keeps NR(t)+n - NR(t-1) strictly below the
// percentile of positive historic NR increments (falling back to NR levels
// when no positive increment exists) and within the historic dNR rank
// threshold; when bound_nr_level, NR(t)+n stays strictly below the NR level
// percentile. Returns 0 when a bound is already exceeded.
int choose_n_delta(const TargetStream& stream, std::size_t t, const SignalCDF& cdf,
                   double percentile, bool bound_nr_level, bool bound_delta_nr);

struct EvasionKnobs {
  double percentile = 80.0;  // evasion percentile, capped at 99
  double h_delta = 0.0;      // required entropy increase when evading dEN
  int max_trials = 100;      // sampling attempts before giving up
  double fixed_epsilon = -1.0;  // CAR slack; < 0 derives it from the CDFs
  DualState dual;            // hyper-parameters for solve_kl
};

struct EvasionPlan {
  std::size_t window_index = 0;
  int n_delta = 0;
  double delta_star = 0.0;
  std::array<double, 5> distribution{};
  std::vector<int> ratings;
  bool succeeded = false;
  std::string note;  // failure reason, empty on success
};

// One window of Algorithm-style planning: pick n_delta and delta*, solve
// the rating-distribution problem when distribution signals are evaded,
// then sample ratings until every evaded signal passes its historic-rank
// check or the trial budget runs out. `ar` must be trained on windows < t.
EvasionPlan plan_evasion(Evasion strategy, const TargetStream& stream, std::size_t t,
                         const SignalCDF& cdf, const ARModel& ar, const EvasionKnobs& knobs,
                         Rng& rng);

// Early-period variants. The CDF must be pooled from early windows of
// other targets. EB posts the maximal 5-star volume under the NR, dNR and
// dCAR bounds; EA solves max-entropy (KL to uniform) under the CAR band
// implied by the dCAR bound.
EvasionPlan plan_early_evasion(Evasion variant, const SignalCDF& pooled_cdf,
                               const TargetStream& stream, std::size_t t,
                               const EvasionKnobs& knobs, Rng& rng);

// Sequential attack over windows [from, upto): each planned window sees the
// stream as already mutated by earlier successful attacks, and the AR model
// advances on the observed (post-attack) CAR series.
struct CampaignResult {
  TargetStream stream;              // corpus with successful spam applied
  std::vector<EvasionPlan> plans;   // one per window in [from, upto)
  ARModel ar_final;
};

using StrategyPicker = std::function<Evasion(std::size_t window_index)>;

CampaignResult run_campaign(const TargetStream& stream, const SignalCDF& cdf, const ARModel& ar0,
                            std::size_t from, std::size_t upto, const StrategyPicker& pick,
                            const EvasionKnobs& knobs, Rng& rng);

// Plan serialization for the attack artifacts.
std::string plans_jsonl(const std::vector<TargetStream>& attacked,
                        const std::vector<std::vector<EvasionPlan>>& plans,
                        const std::vector<std::string>& strategy_names);

}  // namespace spamlab
