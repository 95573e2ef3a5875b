#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "sievelab/errors.hpp"
#include "sievelab/sumsolve.hpp"

using namespace sievelab;

namespace {

// brute-force oracle over ordered tuples
std::map<std::uint64_t, BigInt> rep_counts_slow(
    const std::vector<std::uint64_t>& a, unsigned k, std::uint64_t ceiling) {
  std::map<std::uint64_t, BigInt> out;
  std::vector<std::size_t> idx(k, 0);
  if (a.empty()) return out;
  for (;;) {
    std::uint64_t sum = 0;
    for (auto i : idx) sum += a[i];
    if (sum <= ceiling) out[sum] += 1;
    std::size_t t = k;
    while (t-- > 0) {
      if (++idx[t] < a.size()) break;
      idx[t] = 0;
      if (t == 0) return out;
    }
  }
}

// ordered tuples with sum in (n-k, n], pruned enumeration over
// nondecreasing tuples weighted by multinomial counts
BigInt windowed_slow(const std::vector<std::uint64_t>& a, std::uint64_t n,
                     unsigned k) {
  BigInt total = 0;
  std::vector<BigInt> fact(k + 1, 1);
  for (unsigned i = 1; i <= k; ++i) fact[i] = fact[i - 1] * i;
  // choose multiplicity m_i for a[i], nondecreasing tuple = multiset
  const std::uint64_t lo = n >= k ? n - k : 0;  // window (lo, n]
  std::vector<std::pair<std::size_t, unsigned>> stack;
  std::function<void(std::size_t, unsigned, std::uint64_t)> rec =
      [&](std::size_t i, unsigned left, std::uint64_t sum) {
        if (left == 0) {
          if (sum > lo && sum <= n) {
            BigInt perms = fact[k];
            for (auto& [_, m] : stack) perms /= fact[m];
            total += perms;
          }
          return;
        }
        if (i >= a.size()) return;
        if (sum + a[i] > n) return;  // everything later is larger
        for (unsigned m = 0; m <= left; ++m) {
          std::uint64_t add = (std::uint64_t)m * a[i];
          if (sum + add > n) break;
          if (m) stack.emplace_back(i, m);
          rec(i + 1, left - m, sum + add);
          if (m) stack.pop_back();
        }
      };
  rec(0, k, 0);
  return total;
}

WeightedIntegerSet make_set(std::uint64_t n, std::vector<std::uint64_t> m) {
  return WeightedIntegerSet(n, std::move(m));
}

}  // namespace

TEST_CASE("weighted set construction and json") {
  auto s = WeightedIntegerSet::from_json_text(R"({"N":40,"members":[12,10,11]})");
  CHECK(s.members() == std::vector<std::uint64_t>{10, 11, 12});
  CHECK(s.reciprocal_sum() ==
        Rational(1, 10) + Rational(1, 11) + Rational(1, 12));

  auto t = WeightedIntegerSet::from_json_text(
      R"({"N":100,"interval":[10,20],"keep":{"modulus":2,"residues":[0]}})");
  CHECK(t.members() == std::vector<std::uint64_t>{10, 12, 14, 16, 18, 20});

  auto u = WeightedIntegerSet::from_json_text(
      R"({"N":10,"interval":[3,5],"keep":"all"})");
  CHECK(u.members() == std::vector<std::uint64_t>{3, 4, 5});

  CHECK_THROWS_AS(
      WeightedIntegerSet::from_json_text(R"({"N":5,"members":[7]})"),
      DomainError);
  CHECK_THROWS_AS(
      WeightedIntegerSet::from_json_text(R"({"N":5,"members":[2,2]})"),
      DomainError);
  CHECK_THROWS_AS(
      WeightedIntegerSet::from_json_text(R"({"N":5,"members":[1],"x":2})"),
      ParseError);
}

TEST_CASE("precondition margins") {
  // A = {10..20}, N = 40, u = 2: 0.76879... vs 0.68781...
  auto a = WeightedIntegerSet::interval(40, 10, 20);
  auto r = check_bleichenbacher_precondition(a, 2.0);
  CHECK(r.holds);
  CHECK(r.margin == doctest::Approx(0.0810).epsilon(0.01));

  // A = {N}: 1/N is far below 1 + 1/(sqrt(N)-1)
  auto b = make_set(36, {36});
  auto rb = check_bleichenbacher_precondition(b, 1.0);
  CHECK_FALSE(rb.holds);

  auto empty = make_set(100, {});
  CHECK_FALSE(check_bleichenbacher_precondition(empty, 1.0).holds);

  // member above floor(N/u)
  CHECK_THROWS_AS(check_bleichenbacher_precondition(make_set(40, {30}), 2.0),
                  DomainError);
}

TEST_CASE("solver examples") {
  auto w = solve_bleichenbacher(WeightedIntegerSet::interval(40, 10, 20), 2.0);
  CHECK(w.k == 2);
  CHECK(w.parts == std::vector<std::uint64_t>{20, 20});
  CHECK(w.total == 40);

  auto w2 = solve_bleichenbacher(make_set(7, {7}), 1.0, true);
  CHECK(w2.k == 1);
  CHECK(w2.parts == std::vector<std::uint64_t>{7});

  // shortcut branch: 3 < sqrt(10)
  auto w3 = solve_bleichenbacher(make_set(10, {3}), 1.0, true);
  CHECK(w3.k == 3);
  CHECK(w3.parts == std::vector<std::uint64_t>{3, 3, 3});
  CHECK(w3.total == 9);
}

TEST_CASE("solver rejects failing preconditions unless forced") {
  auto thin = make_set(100, {50});
  CHECK_THROWS_AS(solve_bleichenbacher(thin, 1.0), DomainError);
  auto w = solve_bleichenbacher(thin, 1.0, true);  // 50+50 = 100 in (98,100]
  CHECK(w.k == 2);
  CHECK(w.total == 100);
}

TEST_CASE("solver over random valid instances") {
  std::mt19937_64 rng(23);
  int dp_runs = 0, shortcut_runs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uint64_t n = 50 + rng() % 2000;
    double u = 1.0 + (double)(rng() % 200) / 100.0;
    std::uint64_t hi = (std::uint64_t)((double)n / u);
    while (Rational(BigInt(hi)) * rat(u) > Rational(BigInt(n))) --hi;
    bool force_dp = rng() & 1;
    std::uint64_t lo = force_dp ? (std::uint64_t)std::sqrt((double)n) + 1 : 1;
    if (lo >= hi) continue;
    std::vector<std::uint64_t> members;
    for (std::uint64_t v = lo; v <= hi; ++v)
      if (rng() % 100 < 85) members.push_back(v);
    if (members.empty()) continue;
    WeightedIntegerSet a(n, std::move(members));
    auto pre = check_bleichenbacher_precondition(a, u);
    if (!pre.holds) continue;
    (force_dp ? dp_runs : shortcut_runs)++;
    auto w = solve_bleichenbacher(a, u);  // validates its own witness
    CHECK(w.total <= n);
    CHECK(w.total + w.k > n);
    CHECK(std::is_sorted(w.parts.begin(), w.parts.end()));
  }
  CHECK(dp_runs > 20);
  CHECK(shortcut_runs > 20);
}

TEST_CASE("solver picks the smallest k, largest total, smallest parts") {
  // window (17, 20] at k=2 holds 18..20; 9+9=18, 9+10=19, 10+10=20; k=1
  // cannot reach (19, 20]
  auto w = solve_bleichenbacher(make_set(20, {9, 10}), 1.0, true);
  CHECK(w.k == 2);
  CHECK(w.total == 20);
  CHECK(w.parts == std::vector<std::uint64_t>{10, 10});

  // lexicographic choice among equal totals: {5, 7} before {6, 6}
  auto v = solve_bleichenbacher(make_set(12, {5, 6, 7}), 1.0, true);
  CHECK(v.k == 2);
  CHECK(v.total == 12);
  CHECK(v.parts == std::vector<std::uint64_t>{5, 7});
}

TEST_CASE("rep count tables match brute force") {
  auto a = make_set(10, {2, 3});
  auto t = rep_count_table(a, 2, 10);
  CHECK(t.counts[4] == 1);
  CHECK(t.counts[5] == 2);
  CHECK(t.counts[6] == 1);
  CHECK(t.window_sum(3, 5) == 3);

  auto one = rep_count_table(make_set(10, {1}), 5, 10);
  for (std::uint64_t s = 0; s <= 10; ++s)
    CHECK(one.counts[s] == (s == 5 ? 1 : 0));

  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    std::uint64_t n = 20 + rng() % 180;
    unsigned k = 1 + rng() % 5;
    std::vector<std::uint64_t> mem;
    for (std::uint64_t v = 1; v <= n && mem.size() < 12; ++v)
      if (rng() % n < 24) mem.push_back(v);
    if (mem.empty()) mem.push_back(1 + rng() % n);
    WeightedIntegerSet set(n, mem);
    auto table = rep_count_table(set, k, n);
    auto slow = rep_counts_slow(mem, k, n);
    for (std::uint64_t s = 0; s <= n; ++s) {
      auto it = slow.find(s);
      CHECK(table.counts[s] == (it == slow.end() ? BigInt(0) : it->second));
    }
  }
}

TEST_CASE("mass conservation when nothing truncates") {
  auto a = make_set(100, {3, 5, 8});
  unsigned k = 4;
  auto t = rep_count_table(a, k, 100);  // 4 * 8 = 32 <= 100
  BigInt total = 0;
  for (const auto& c : t.counts) total += c;
  CHECK(total == pow_int(BigInt(3), k));
}

TEST_CASE("windowed counts") {
  CHECK(windowed_count(make_set(5, {2, 3}), 5, 2) == 3);
  CHECK(windowed_count(make_set(7, {1}), 7, 7) == 1);
  CHECK(windowed_count(make_set(3, {2}), 3, 2) == 0);
}

TEST_CASE("rep table resource guards") {
  auto a = make_set(10, {2, 3});
  CHECK_THROWS_AS(rep_count_table(a, 201, 10), ResourceError);
  CHECK_THROWS_AS(rep_count_table(a, 2, 2000000), ResourceError);
}

TEST_CASE("hypothesis A at N = 60 matches brute force") {
  // A = integers in (60/8, 30] = {8..30}
  auto a = WeightedIntegerSet::interval(60, 8, 30);
  auto rep = hypothesis_a_check(a, 2.0, 8.0, 0.1);
  REQUIRE(rep.table.size() == 7);  // k in [2, 8]
  for (const auto& row : rep.table) {
    BigInt slow = windowed_slow(a.members(), 60, row.k);
    CHECK(row.count == slow);
    Rational alpha = Rational(slow * 60, pow_int(BigInt(a.size()), row.k));
    CHECK(row.alpha == alpha);
  }
  // best k maximizes alpha with smallest-k tie break
  Rational best = -1;
  unsigned best_k = 0;
  for (const auto& row : rep.table)
    if (row.alpha > best) {
      best = row.alpha;
      best_k = row.k;
    }
  CHECK(rep.best_k == best_k);
  CHECK(rep.best_alpha == best);
}

TEST_CASE("hypothesis A reports precondition violations without failing") {
  auto a = WeightedIntegerSet::interval(60, 8, 30);
  auto rep = hypothesis_a_check(a, 2.0, 8.0, 0.1);
  CHECK(rep.sum_ok);       // harmonic mass of (7.5, 30] is ample
  CHECK_FALSE(rep.scale_ok);  // 60 << (100 v / lambda)^2
  CHECK(rep.domain_ok);

  auto outside = make_set(60, {5, 20});  // 5 is below N/v
  CHECK_FALSE(hypothesis_a_check(outside, 2.0, 8.0, 0.1).domain_ok);
}

TEST_CASE("hypothesis A single-member window") {
  auto a = make_set(100, {100});
  auto rep = hypothesis_a_check(a, 1.0, 1.0, 0.5);
  REQUIRE(rep.table.size() == 1);
  CHECK(rep.table[0].k == 1);
  CHECK(rep.table[0].count == 1);
  CHECK(rep.table[0].alpha == 100);  // 1 * N / |A|^1
}

TEST_CASE("hypothesis A empty k-range") {
  auto a = make_set(100, {50});
  CHECK_THROWS_AS(hypothesis_a_check(a, 1.6, 1.9, 0.5), DomainError);
}

TEST_CASE("hypothesis A all-zero windows") {
  auto a = make_set(1000, {10, 11});  // k <= 3 sums far below the window
  auto rep = hypothesis_a_check(a, 2.0, 3.0, 0.5);
  for (const auto& row : rep.table) CHECK(row.count == 0);
  CHECK(rep.best_alpha == 0);
  CHECK(rep.best_k == 2);
}

TEST_CASE("hypothesis A star at N = 400 matches brute force") {
  auto a = WeightedIntegerSet::interval(400, 101, 200);
  auto rep = hypothesis_a_star_check(a, 2.0, 0.5);
  REQUIRE(rep.table.size() == 3);  // k in [2, 4]
  for (const auto& row : rep.table) {
    CHECK(row.count == windowed_slow(a.members(), 400, row.k));
    if (row.count > 0 && row.k >= 2) CHECK(row.measured_c > 0.0);
  }
  CHECK(rep.domain_ok);
  CHECK_FALSE(rep.sum_ok);  // ln 2 = 0.69 misses (1+lambda)/u = 0.75
}

TEST_CASE("hypothesis A star edge cases") {
  CHECK_THROWS_AS(hypothesis_a_star_check(make_set(100, {}), 2.0, 0.5),
                  DomainError);
  // A = {floor(N/u)} with u | N: k = u hits the window iff u*(N/u) > N-u
  auto a = make_set(400, {200});
  auto rep = hypothesis_a_star_check(a, 2.0, 0.5);
  CHECK(rep.table[0].k == 2);
  CHECK(rep.table[0].count == 1);  // 200 + 200 = 400 in (398, 400]
}

TEST_CASE("dyadic localization") {
  // all mass in band 0 = (N/6, N]; its harmonic sum ~ ln 6 covers both
  // the premise 1 + lambda and the band threshold (1 + lambda/3)
  auto a = WeightedIntegerSet::interval(1000, 168, 1000);
  auto band = dyadic_localization(a, 1.0, 0.5);  // u0 = 6
  CHECK(band.j == 0);
  CHECK(band.premise_ok);
  // re-verify from scratch
  RawFraction sum(BigInt(0), BigInt(1));
  for (auto m : a.members())
    if (Rational(m) > band.lo && Rational(m) <= band.hi)
      sum = sum + RawFraction(BigInt(1), BigInt(m));
  CHECK(sum.compare(band.threshold) >= 0);
  CHECK(sum.normalized() == band.band_sum);
}

TEST_CASE("dyadic localization lands on a later band") {
  // u0 = 5 (lambda = 3/5), u = 1: band 0 is (N/5, N], band 1 is (N/25, N/5]
  // keep band 0 thin and band 1 full
  std::vector<std::uint64_t> members;
  for (std::uint64_t v = 41; v <= 200; ++v) members.push_back(v);  // band 1
  members.push_back(600);  // band 0, sum 1/600 alone
  auto a = WeightedIntegerSet(1000, members);
  auto band = dyadic_localization(a, 1.0, 0.6);
  CHECK(band.j == 1);
  CHECK(band.band_sum >= band.threshold);
}

TEST_CASE("dyadic localization flags violated premises") {
  auto empty = make_set(100, {});
  CHECK_THROWS_AS(dyadic_localization(empty, 1.0, 0.5), CounterexampleError);
  try {
    dyadic_localization(empty, 1.0, 0.5);
  } catch (const CounterexampleError& e) {
    CHECK(std::string(e.what()).find("violated") != std::string::npos);
  }
}

TEST_CASE("popular doubling on an arithmetic progression") {
  std::vector<std::uint64_t> ap;
  for (int i = 0; i < 16; ++i) ap.push_back(100 + 7 * i);
  auto a = WeightedIntegerSet(300, ap);
  auto dec = popular_doubling(a, 0.5, 4.0);
  CHECK(dec.i0 >= 1);

  // brute-force r_{2A}
  std::map<std::uint64_t, std::uint64_t> r2a;
  for (auto x : ap)
    for (auto y : ap) r2a[x + y]++;
  // D = {n : r(n) > r_{i0}}, E = sum of counts over D
  Rational r_i0 = dec.r_thresholds[dec.i0];
  std::vector<std::uint64_t> d_expect;
  std::uint64_t e_expect = 0;
  for (auto& [n, c] : r2a)
    if (Rational(c) > r_i0) {
      d_expect.push_back(n);
      e_expect += c;
    }
  CHECK(dec.d_members == d_expect);
  CHECK(dec.e_size == e_expect);

  // |E| + |bad pairs| = |A|^2
  std::uint64_t bad = 0;
  for (auto& [n, c] : r2a)
    if (!(Rational(c) > r_i0)) bad += c;
  CHECK(dec.e_size + bad == ap.size() * ap.size());

  // the complement bound, checked exactly
  Rational lhs{BigInt(bad)};
  Rational rhs = pow_rat(rat(0.5), 4) * BigInt(ap.size() * ap.size()) / 64;
  CHECK(dec.ecomplement_ok == (lhs <= rhs));

  // thresholds follow r_i = 2^{i-10} lambda^4 |A|^2 / |2A|
  Rational base = pow_rat(rat(0.5), 4) * BigInt(ap.size() * ap.size()) /
                  BigInt(r2a.size());
  CHECK(dec.r_thresholds[0] == 0);
  for (std::size_t i = 1; i < dec.r_thresholds.size(); ++i)
    CHECK(dec.r_thresholds[i] == base * pow_rat(Rational(2), i) / 1024);
}

TEST_CASE("popular doubling degenerate pair set") {
  auto a = make_set(4, {1, 2});
  auto dec = popular_doubling(a, 0.5, 2.0);
  CHECK(dec.i0 >= 1);
  CHECK(!dec.d_members.empty());
  // r_{2A}(3) = 2 is the top count
  CHECK(std::find(dec.d_members.begin(), dec.d_members.end(), 3) !=
        dec.d_members.end());
}

TEST_CASE("popular doubling rejects singletons") {
  CHECK_THROWS_AS(popular_doubling(make_set(10, {5}), 0.5, 2.0), DomainError);
}
