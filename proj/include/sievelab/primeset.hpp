#ifndef SIEVELAB_PRIMESET_HPP
#define SIEVELAB_PRIMESET_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sievelab/numeric.hpp"

namespace sievelab {

// Segmented sieve of Eratosthenes; memory O(sqrt(limit) + segment).
std::vector<std::uint64_t> generate_primes(std::uint64_t limit,
                                           std::size_t segment_size = 1u << 20,
                                           std::uint64_t memory_ceiling =
                                               std::uint64_t(1) << 31);

// A subset of the primes <= limit, described as a base ("all" or "none")
// plus an ordered list of add/remove edits.  Materialization is cached; a
// materialized set is immutable and safe to share across threads.
class PrimeSet {
 public:
  enum class Base { all, none };

  struct Edit {
    bool add = true;
    // exactly one of interval / list is active
    std::optional<std::pair<std::uint64_t, std::uint64_t>> interval;
    std::vector<std::uint64_t> list;
  };

  PrimeSet(std::uint64_t limit, Base base, std::vector<Edit> edits = {});

  static PrimeSet all_primes(std::uint64_t limit) {
    return PrimeSet(limit, Base::all);
  }
  static PrimeSet none(std::uint64_t limit) {
    return PrimeSet(limit, Base::none);
  }

  // Parses {"limit":..., "base":"all"|"none", "edits":[...]}; unknown
  // fields are rejected.
  static PrimeSet from_json(const nlohmann::json& doc);
  static PrimeSet from_json_text(const std::string& text);
  nlohmann::json to_json() const;

  std::uint64_t limit() const { return limit_; }
  Base base() const { return base_; }
  const std::vector<Edit>& edits() const { return edits_; }

  // Applies the edits to the base; idempotent, result cached.
  const std::vector<std::uint64_t>& members() const;

  // All primes <= limit (cached).
  const std::vector<std::uint64_t>& universe() const;

  // Primes <= limit not in the set; shares this set's universe cache.
  PrimeSet complement() const;

  bool contains(std::uint64_t p) const;
  std::size_t size() const { return members().size(); }

 private:
  std::uint64_t limit_;
  Base base_;
  std::vector<Edit> edits_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

// Sum of 1/p over members in (lo, hi].  Exact while the denominator stays
// under max_denom_bits; above that the sum switches to a 128-bit-mantissa
// float and is_exact records the switch.
struct ReciprocalSum {
  Rational exact;
  bool is_exact = true;
  Float128 approx;
  double value = 0.0;
};

ReciprocalSum reciprocal_prime_sum(const PrimeSet& set, std::uint64_t lo,
                                   std::uint64_t hi,
                                   unsigned max_denom_bits = 512);

// prod_{p <= limit, p not in set} (1 - 1/p), accumulated in log space.
double mertens_product(const PrimeSet& set);

struct ScanOptions {
  double vbound_denom = 1000.0;      // v_max = log x / (denom * log log x)
  double grid_ratio = 1.05;          // geometric u-grid ratio
  std::optional<double> v_fixed;     // overrides v_max
  std::optional<std::vector<double>> u_grid;  // overrides the geometric grid
  unsigned max_denom_bits = 512;
};

struct ConditionWitness {
  double u = 0.0;
  double v = 0.0;
  double epsilon = 0.0;
  ReciprocalSum sum;
};

// Scans u over the grid (ascending) with v = v_max, testing
// sum_{x^(1/v) < p <= x^(1/u)} 1/p >= (1+eps)/u; returns the first witness.
std::optional<ConditionWitness> scan_theorem_condition(
    const PrimeSet& set, double epsilon, const ScanOptions& opts = {});

}  // namespace sievelab

#endif  // SIEVELAB_PRIMESET_HPP
