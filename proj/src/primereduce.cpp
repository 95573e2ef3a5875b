#include "sievelab/primereduce.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sievelab/errors.hpp"

namespace sievelab {

RhoGrid::RhoGrid(Rational rho, double x, double u, double v, double lambda)
    : rho_(std::move(rho)), x_(x), u_(u), v_(v), lambda_(lambda) {
  if (!(rho_ > 1)) throw DomainError("rho must exceed 1");
  if (!(u >= 1.0) || !(v >= u)) throw DomainError("need 1 <= u <= v");
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw DomainError("need lambda in (0,1]");
  log_rho_ = log(BigFloat(numerator(rho_))) - log(BigFloat(denominator(rho_)));
  // log1p of the exact excess keeps the long-double path accurate even
  // for rho within 1e-8 of 1
  {
    Rational excess = rho_ - 1;
    long double num = BigFloat(numerator(excess)).convert_to<long double>();
    long double den = BigFloat(denominator(excess)).convert_to<long double>();
    log_rho_ld_ = log1pl(num / den);
  }
  n_ = log(BigFloat(x_)) / log_rho_ - BigFloat(v_);
  if (!(n_ > 0)) throw DomainError("grid has N <= 0");
}

RhoGrid RhoGrid::paper(double x, double u, double v, double lambda) {
  if (!(x >= 10000.0)) throw DomainError("paper grid needs x >= 10^4");
  Rational q = rat(lambda) / (1000 * rat(v));
  return RhoGrid(1 + q * q, x, u, v, lambda);
}

RhoGrid RhoGrid::custom(const Rational& rho, double x, double u, double v,
                        double lambda) {
  return RhoGrid(rho, x, u, v, lambda);
}

std::int64_t RhoGrid::cell_of(std::uint64_t p) const {
  // long-double fast path; the ~168-bit evaluation settles points that
  // land within 1e-6 of a cell boundary
  long double t = logl((long double)p) / log_rho_ld_;
  long double fl = floorl(t);
  if (t - fl > 1e-6L && fl + 1.0L - t > 1e-6L) return (std::int64_t)fl;
  BigFloat a = floor(log(BigFloat(p)) / log_rho_);
  return a.convert_to<std::int64_t>();
}

std::int64_t RhoGrid::window_lo() const {
  BigFloat a = floor(n_ / BigFloat(v_));
  return a.convert_to<std::int64_t>();
}

std::int64_t RhoGrid::window_hi() const {
  BigFloat a = floor(n_ / BigFloat(u_));
  return a.convert_to<std::int64_t>();
}

LocalizeReport localize(const PrimeSet& set, const RhoGrid& grid) {
  LocalizeReport rep;
  const double u = grid.u(), v = grid.v(), lambda = grid.lambda();
  Rational ru = rat(u), rl = rat(lambda);

  // J0 = log(20 v log v / lambda); nonpositive arguments collapse the cap
  // to j = 0 only.
  double j0_arg = 20.0 * v * std::log(v) / lambda;
  rep.j0_cap = j0_arg > 1.0 ? std::log(j0_arg) : 0.0;
  long j_max = (long)std::ceil(rep.j0_cap);

  // window primes p in (x^(1/v), x^(1/u)]
  std::uint64_t p_lo = floor_root(grid.x(), v);
  std::uint64_t p_hi = floor_root(grid.x(), u);
  const auto& mem = set.members();
  auto begin = std::upper_bound(mem.begin(), mem.end(), p_lo);
  auto end = std::upper_bound(mem.begin(), mem.end(), p_hi);

  std::int64_t a_lo = grid.window_lo(), a_hi = grid.window_hi();
  std::map<std::int64_t, std::vector<std::uint64_t>> cell_primes;
  std::vector<std::uint64_t> window_primes;
  for (auto it = begin; it != end; ++it) {
    window_primes.push_back(*it);
    std::int64_t a = grid.cell_of(*it);
    if (a > a_lo && a <= a_hi) cell_primes[a].push_back(*it);
  }
  std::map<std::int64_t, RawFraction> weights;
  std::vector<RawFraction> premise_terms;
  premise_terms.reserve(window_primes.size());
  for (std::uint64_t p : window_primes)
    premise_terms.emplace_back(BigInt(1), BigInt(p));
  for (auto& [a, primes] : cell_primes) weights[a] = sum_reciprocals(primes);
  rep.premise_sum = sum_fractions_double(premise_terms);
  rep.premise_ok = compare_sum(premise_terms, (1 + rl) / ru) >= 0;

  RatInterval j0_rat = grid.lambda() > 0 && j0_arg > 1.0
                           ? log_outward(rat(j0_arg))
                           : RatInterval{Rational(0), Rational(0)};

  for (long j = 0; j <= j_max; ++j) {
    RatInterval ej = exp_outward(-(double)j);  // e^{-j}, outward bracket
    std::vector<std::int64_t> selected;
    std::vector<RawFraction> sum_terms;
    for (const auto& [a, w] : weights) {
      // w >= e^{-j}/a, accepted conservatively via the upper bracket
      if (RawFraction(w.num * a, w.den).compare(ej.hi) >= 0) {
        selected.push_back(a);
        sum_terms.push_back(w);
      }
    }
    // threshold (1 + lambda/3 + (lambda/3) j/J0)/u; J0's lower bracket
    // makes the threshold an upper bound, so satisfaction is conservative
    Rational threshold;
    if (j == 0)
      threshold = (1 + rl / 3) / ru;
    else
      threshold = (1 + rl / 3 + (rl / 3) * Rational(j) / j0_rat.lo) / ru;
    if (compare_sum(sum_terms, threshold) >= 0) {
      rep.j0 = j;
      rep.found = true;
      rep.ineq22_ok = true;
      rep.cell_weight_sum = sum_fractions_double(sum_terms);
      std::vector<RawFraction> recip_terms;
      for (std::int64_t a : selected) {
        rep.cells.emplace_back(a, weights[a].normalized());
        recip_terms.emplace_back(BigInt(1), BigInt(a));
      }
      rep.recip_cell_sum = sum_fractions_double(recip_terms);
      rep.consequence_ok = compare_sum(recip_terms, (1 + rl / 4) / ru) >= 0;
      rep.derived_bound_ok =
          compare_sums(recip_terms, 1 - rl / 100, sum_terms) >= 0;
      return rep;
    }
  }
  if (rep.premise_ok)
    throw CounterexampleError(
        "no j <= J0 satisfies the localization inequality although the "
        "premise held");
  return rep;  // premise violation: reported, not thrown
}

nlohmann::json LocalizeReport::to_json() const {
  nlohmann::json doc;
  doc["j0"] = j0;
  doc["J0"] = j0_cap;
  doc["cells"] = cells.size();
  doc["verified"] = ineq22_ok;
  doc["found"] = found;
  doc["premise_ok"] = premise_ok;
  doc["premise_sum"] = premise_sum;
  doc["cell_weight_sum"] = cell_weight_sum;
  doc["recip_cell_sum"] = recip_cell_sum;
  doc["consequence_ok"] = consequence_ok;
  doc["derived_bound_ok"] = derived_bound_ok;
  return doc;
}

namespace {

// All ordered t-tuples of members with product <= x, as a sorted product
// list; throws once the list would exceed the budget.
std::vector<std::uint64_t> half_products(const std::vector<std::uint64_t>& ps,
                                         unsigned t, std::uint64_t x,
                                         std::uint64_t budget) {
  std::vector<std::uint64_t> cur{1};
  for (unsigned i = 0; i < t; ++i) {
    std::vector<std::uint64_t> next;
    next.reserve(std::min<std::size_t>(cur.size() * ps.size(), budget + 1));
    for (std::uint64_t prod : cur)
      for (std::uint64_t p : ps) {
        if (p > x / prod) break;  // ps sorted ascending
        next.push_back(prod * p);
        if (next.size() > budget)
          throw ResourceError(
              "half-product list exceeds the meet-in-the-middle budget " +
              std::to_string(budget));
      }
    cur = std::move(next);
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

}  // namespace

std::uint64_t hyp_p_tuple_count(const PrimeSet& set, std::uint64_t x,
                                unsigned k, std::uint64_t budget) {
  if (k < 1) throw DomainError("tuple arity must be >= 1");
  if (x < 2) throw DomainError("need x >= 2");
  const auto& mem = set.members();
  std::vector<std::uint64_t> ps(
      mem.begin(), std::upper_bound(mem.begin(), mem.end(), x));
  if (ps.empty()) return 0;

  unsigned left_arity = (k + 1) / 2;
  std::vector<std::uint64_t> left = half_products(ps, left_arity, x, budget);
  std::vector<std::uint64_t> right =
      half_products(ps, k - left_arity, x, budget);

  std::uint64_t count = 0;
  for (std::uint64_t l : left) {
    // r in [ceil(x / (2l)), floor(x / l)]
    std::uint64_t r_lo = (x + 2 * l - 1) / (2 * l);
    std::uint64_t r_hi = x / l;
    if (r_lo > r_hi) continue;
    auto lo_it = std::lower_bound(right.begin(), right.end(), r_lo);
    auto hi_it = std::upper_bound(right.begin(), right.end(), r_hi);
    count += (std::uint64_t)(hi_it - lo_it);
  }
  return count;
}

HypPReport hyp_p_check(const PrimeSet& set, std::uint64_t x, double u,
                       double v, double lambda, std::uint64_t budget) {
  if (!(u >= 1.0) || !(v >= u)) throw DomainError("need 1 <= u <= v");
  unsigned k_lo = (unsigned)std::ceil(u - 1e-12);
  unsigned k_hi = (unsigned)std::floor(v + 1e-12);
  if (k_lo > k_hi)
    throw DomainError("empty k-range [" + std::to_string(k_lo) + ", " +
                      std::to_string(k_hi) + "]");

  HypPReport rep;
  std::uint64_t p_lo = floor_root((double)x, v);
  std::uint64_t p_hi = floor_root((double)x, u);
  const auto& mem = set.members();
  rep.window_ok = mem.empty() ||
                  (mem.front() > p_lo && mem.back() <= p_hi);
  rep.sum_ok = sum_reciprocals(mem).compare((1 + rat(lambda)) / rat(u)) >= 0;

  double lx = std::log((double)x);
  double best = -1.0;
  for (unsigned k = k_lo; k <= k_hi; ++k) {
    HypPRow row;
    row.k = k;
    row.count = hyp_p_tuple_count(set, x, k, budget);
    row.measured_pi =
        (double)row.count * std::pow(v, (double)k) * lx / (double)x;
    if (row.measured_pi > best) {
      best = row.measured_pi;
      rep.best_k = k;
    }
    rep.table.push_back(row);
  }
  rep.refinement_k_limit = std::exp(-1.0 / u) * v;
  for (const auto& row : rep.table)
    if ((double)row.k <= rep.refinement_k_limit && row.count > 0)
      rep.refinement_found = true;
  return rep;
}

nlohmann::json HypPReport::to_json() const {
  nlohmann::json doc;
  doc["window_ok"] = window_ok;
  doc["sum_ok"] = sum_ok;
  doc["best_k"] = best_k;
  doc["refinement_found"] = refinement_found;
  doc["refinement_k_limit"] = refinement_k_limit;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table) {
    nlohmann::json rj;
    rj["k"] = r.k;
    rj["count"] = r.count;
    rj["measured_pi"] = r.measured_pi;
    rows.push_back(std::move(rj));
  }
  doc["table"] = std::move(rows);
  return doc;
}

std::string HypPReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "k,count,measured_pi\n";
  for (const auto& r : table)
    os << r.k << ',' << r.count << ',' << r.measured_pi << '\n';
  return os.str();
}

}  // namespace sievelab
