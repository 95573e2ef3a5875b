#ifndef SIEVELAB_FRIABLE_HPP
#define SIEVELAB_FRIABLE_HPP

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "sievelab/primeset.hpp"

namespace sievelab {

struct PsiOptions {
  // Node ceilings: the enumeration visits exactly one node per counted
  // integer, so these bound both work and the admissible x.
  std::uint64_t ceiling_sparse = 1000000000ULL;
  std::uint64_t ceiling_dense = 100000000ULL;
  unsigned threads = 1;
};

// Psi(x; P): integers n <= x whose prime factors all lie in the set.
// Depth-first enumeration over nondecreasing prime sequences with product
// <= x; n = 1 is always counted.
std::uint64_t psi_count(std::uint64_t x, const PrimeSet& set,
                        const PsiOptions& opts = {});

// Dickman's function: rho = 1 on [0,1], u rho'(u) = -rho(u-1) integrated by
// trapezoid on a fixed grid of step 1e-4 up to u = 50.
double dickman_rho(double u);

struct PsiReport {
  std::uint64_t x = 0;
  std::uint64_t psi = 0;
  double ratio = 0.0;     // psi / x
  double mertens = 0.0;   // prod_{p in complement} (1 - 1/p)
  double quotient = 0.0;  // ratio / mertens, the empirical A_v surrogate

  nlohmann::json to_json() const;
  static const char* csv_header();  // "x,psi,ratio,mertens,quotient"
  std::string to_csv_row() const;
};

PsiReport theorem_ratio_report(std::uint64_t x, const PrimeSet& set,
                               const PsiOptions& opts = {});

}  // namespace sievelab

#endif  // SIEVELAB_FRIABLE_HPP
