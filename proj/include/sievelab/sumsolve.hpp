#ifndef SIEVELAB_SUMSOLVE_HPP
#define SIEVELAB_SUMSOLVE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sievelab/numeric.hpp"

namespace sievelab {

// A sorted duplicate-free set of positive integers inside [1, N].
class WeightedIntegerSet {
 public:
  WeightedIntegerSet(std::uint64_t n, std::vector<std::uint64_t> members);

  static WeightedIntegerSet interval(std::uint64_t n, std::uint64_t lo,
                                     std::uint64_t hi);

  // {"N":..., "members":[...]} or
  // {"N":..., "interval":[lo,hi], "keep":"all"|{"modulus":m,"residues":[...]}}
  static WeightedIntegerSet from_json(const nlohmann::json& doc);
  static WeightedIntegerSet from_json_text(const std::string& text);
  nlohmann::json to_json() const;

  std::uint64_t n() const { return n_; }
  const std::vector<std::uint64_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  const Rational& reciprocal_sum() const;  // exact, cached

 private:
  std::uint64_t n_;
  std::vector<std::uint64_t> members_;
  mutable std::optional<Rational> recip_;
};

struct PreconditionCheck {
  bool holds = false;
  double margin = 0.0;  // signed: sum - (1/u + 1/(sqrt(N)-1))
  Rational sum;
};

// Exact-rational test of sum_{a in A} 1/a > 1/u + 1/(sqrt(N)-1); sqrt(N)
// is bracketed by rationals and refined until the comparison is decisive.
PreconditionCheck check_bleichenbacher_precondition(
    const WeightedIntegerSet& a, double u);

struct BleichenbacherWitness {
  std::uint64_t k = 0;
  std::vector<std::uint64_t> parts;  // nondecreasing, all drawn from A
  std::uint64_t total = 0;

  nlohmann::json to_json() const;
};

// Finds a_1..a_k in A with N-k < a_1+...+a_k <= N.  If min(A) < sqrt(N)
// the single-element shortcut applies; otherwise a reachability DP over
// (parts, sum) states with lexicographic witness reconstruction.
BleichenbacherWitness solve_bleichenbacher(const WeightedIntegerSet& a,
                                           double u, bool force = false);

struct RepCountTable {
  unsigned k = 1;
  std::uint64_t ceiling = 0;
  std::vector<BigInt> counts;  // counts[t] = #{(a_1..a_k) in A^k : sum = t}

  BigInt window_sum(std::uint64_t lo_exclusive, std::uint64_t hi) const;
};

// Exact k-fold ordered representation counts, truncated above the ceiling.
RepCountTable rep_count_table(const WeightedIntegerSet& a, unsigned k,
                              std::uint64_t ceiling);

// sum_{N-k < t <= N} of the k-fold representation count.
BigInt windowed_count(const WeightedIntegerSet& a, std::uint64_t n, unsigned k);

struct AlphaRow {
  unsigned k = 0;
  BigInt count;       // windowed count
  Rational alpha;     // count * N / |A|^k
  double alpha_f = 0.0;
  double measured_c = 0.0;  // alpha^(1/k) * log u (A* checker only)
};

struct HypothesisAReport {
  bool domain_ok = true;   // A inside the required interval
  bool sum_ok = true;      // reciprocal-sum premise
  bool scale_ok = true;    // lower bound on N
  std::vector<AlphaRow> table;
  unsigned best_k = 0;
  Rational best_alpha;
  bool refinement_found = false;  // some k <= e^(-1/u) v with alpha > 0
  double refinement_k_limit = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;  // columns k,count,alpha_rational,alpha_float
};

// Hypothesis A: scans k in [ceil(u), floor(v)] over A subset (N/v, N/u].
// Precondition violations are reported, not enforced.
HypothesisAReport hypothesis_a_check(const WeightedIntegerSet& a, double u,
                                     double v, double lambda);

// Hypothesis A*: k in [ceil(u), floor(u/lambda)] over A subset (lambda N/u, N/u].
HypothesisAReport hypothesis_a_star_check(const WeightedIntegerSet& a,
                                          double u, double lambda);

struct DyadicBand {
  unsigned j = 0;
  Rational lo, hi;       // band (lo, hi]
  Rational band_sum;     // sum of 1/a over the band
  Rational threshold;    // (1 + lambda/3) / (u0^j u)
  bool premise_ok = true;

  nlohmann::json to_json() const;
};

// Smallest j >= 0 with sum_{N/(u0^{j+1} u) < a <= N/(u0^j u)} 1/a
// >= (1+lambda/3)/(u0^j u), where u0 = 3/lambda.
DyadicBand dyadic_localization(const WeightedIntegerSet& a, double u,
                               double lambda);

struct DoublingDecomposition {
  unsigned i0 = 0;
  std::vector<std::uint64_t> bin_sizes;   // |B_i| for i = 0..
  std::vector<Rational> r_thresholds;     // r_i
  std::uint64_t e_size = 0;               // popular pairs
  std::vector<std::uint64_t> d_members;   // the popular sumset D
  std::uint64_t d_ambient = 0;            // 2N
  bool ecomplement_ok = false;  // |A x A \ E| <= (lambda^4/64)|A|^2

  nlohmann::json to_json() const;
};

// Popular doubling per the threshold r_i = 2^(i-10) lambda^4 |A|^2 / |2A|:
// finds the smallest i0 >= 1 with |B_i0| r_i0 >= lambda^4 |A|^2 / (512 log u).
DoublingDecomposition popular_doubling(const WeightedIntegerSet& a,
                                       double lambda, double u);

}  // namespace sievelab

#endif  // SIEVELAB_SUMSOLVE_HPP
