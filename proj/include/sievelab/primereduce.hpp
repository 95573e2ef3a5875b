#ifndef SIEVELAB_PRIMEREDUCE_HPP
#define SIEVELAB_PRIMEREDUCE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sievelab/primeset.hpp"

namespace sievelab {

// Multiplicative grid: cell a holds the primes in [rho^a, rho^(a+1)).
// Cell boundaries are evaluated in log space with the exact rational rho;
// the ~168-bit mantissa keeps boundary decisions stable across grids of
// ~10^9 cells.
class RhoGrid {
 public:
  // rho = 1 + (lambda/(1000 v))^2, N = log_rho(x) - v.
  static RhoGrid paper(double x, double u, double v, double lambda);

  // Arbitrary rho > 1; used for experiments and coarse-grid runs.
  static RhoGrid custom(const Rational& rho, double x, double u, double v,
                        double lambda);

  const Rational& rho() const { return rho_; }
  double x() const { return x_; }
  double u() const { return u_; }
  double v() const { return v_; }
  double lambda() const { return lambda_; }
  double n_value() const { return n_.convert_to<double>(); }

  std::int64_t cell_of(std::uint64_t p) const;  // floor(log_rho p)
  // cells a in (N/v, N/u]
  std::int64_t window_lo() const;  // smallest admissible a minus one
  std::int64_t window_hi() const;

 private:
  RhoGrid(Rational rho, double x, double u, double v, double lambda);

  Rational rho_;
  BigFloat log_rho_;
  long double log_rho_ld_;
  BigFloat n_;
  double x_, u_, v_, lambda_;
};

struct LocalizeReport {
  long j0 = -1;
  double j0_cap = 0.0;  // J0 = log(20 v log v / lambda)
  bool found = false;
  bool premise_ok = false;       // window prime sum >= (1+lambda)/u, exact
  double premise_sum = 0.0;
  // selected cells A = A_{j0} with their exact weights sum_{p in cell} 1/p
  std::vector<std::pair<std::int64_t, Rational>> cells;
  double cell_weight_sum = 0.0;
  double recip_cell_sum = 0.0;
  bool ineq22_ok = false;       // (2.2) verdict at j0, exact comparison
  bool consequence_ok = false;  // sum 1/a >= (1 + lambda/4)/u, exact
  bool derived_bound_ok = false;  // sum 1/a >= (1 - lambda/100) * weights

  nlohmann::json to_json() const;  // {"j0","J0","cells","verified",...}
};

// Iterates j = 0, 1, ..., ceil(J0) testing
//   sum_{a in A_j} sum_{p in cell a} 1/p >= (1 + lambda/3 + (lambda/3) j/J0)/u
// with A_j = {a in window : cell weight >= e^{-j}/a}; returns the smallest
// satisfying j.  Throws a counterexample error only when the premise held
// and no j <= J0 works; a violated premise is reported, not thrown.
LocalizeReport localize(const PrimeSet& set, const RhoGrid& grid);

// Exact count of ordered k-tuples of set members with x/2 <= p_1...p_k <= x,
// by meet-in-the-middle over sorted half-product lists.
std::uint64_t hyp_p_tuple_count(const PrimeSet& set, std::uint64_t x,
                                unsigned k, std::uint64_t budget = 10000000);

struct HypPRow {
  unsigned k = 0;
  std::uint64_t count = 0;
  double measured_pi = 0.0;  // count * v^k * log x / x
};

struct HypPReport {
  bool window_ok = true;  // set inside (x^(1/v), x^(1/u)]
  bool sum_ok = true;     // reciprocal-sum premise
  std::vector<HypPRow> table;
  unsigned best_k = 0;
  bool refinement_found = false;
  double refinement_k_limit = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

HypPReport hyp_p_check(const PrimeSet& set, std::uint64_t x, double u,
                       double v, double lambda,
                       std::uint64_t budget = 10000000);

}  // namespace sievelab

#endif  // SIEVELAB_PRIMEREDUCE_HPP
