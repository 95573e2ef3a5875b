#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "sievelab/errors.hpp"
#include "sievelab/friable.hpp"
#include "sievelab/lattice.hpp"
#include "sievelab/primereduce.hpp"
#include "sievelab/primeset.hpp"
#include "sievelab/sumsolve.hpp"

namespace py = pybind11;
using namespace sievelab;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<long long>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& e : j) out.append(json_to_py(e));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default: return py::none();
  }
}

PrimeSet primes_from_spec(const std::string& spec) {
  return PrimeSet::from_json_text(spec);
}

WeightedIntegerSet set_from_spec(const std::string& spec) {
  return WeightedIntegerSet::from_json_text(spec);
}

std::vector<lattice::Point> points_from_list(
    const std::vector<std::vector<long long>>& rows) {
  json doc = rows;
  return lattice::points_from_json(doc);
}

lattice::Box box_from_list(const std::vector<long long>& half) {
  lattice::Box box;
  if (half.empty() || half.size() > 3)
    throw DomainError("box needs 1..3 half-widths");
  box.d = (int)half.size();
  for (std::size_t i = 0; i < half.size(); ++i) box.half[i] = half[i];
  return box;
}

lattice::QPoint qpoint_from_list(const std::vector<std::string>& coords) {
  json doc = coords;
  return lattice::qpoint_from_json(doc);
}

}  // namespace

PYBIND11_MODULE(_sievelab, m) {
  m.doc() = "exact sieve counts, subset-sum representation measures and "
            "lattice convex geometry";

  py::register_exception<ParseError>(m, "SievelabParseError");
  py::register_exception<DomainError>(m, "SievelabDomainError");
  py::register_exception<ResourceError>(m, "SievelabResourceError");
  py::register_exception<CounterexampleError>(m, "SievelabCounterexampleError");

  m.def("generate_primes",
        [](std::uint64_t limit) { return generate_primes(limit); },
        py::arg("limit"), "All primes <= limit, ascending.");

  m.def("psi_count",
        [](std::uint64_t x, const std::string& primes, unsigned threads) {
          PsiOptions opts;
          opts.threads = threads;
          return psi_count(x, primes_from_spec(primes), opts);
        },
        py::arg("x"), py::arg("primes"), py::arg("threads") = 1,
        "Exact count of n <= x whose prime factors lie in the set "
        "(prime-set JSON spec).");

  m.def("dickman_rho", &dickman_rho, py::arg("u"));

  m.def("mertens_product",
        [](const std::string& primes) {
          return mertens_product(primes_from_spec(primes));
        },
        py::arg("primes"),
        "prod (1 - 1/p) over primes <= limit outside the set.");

  m.def("reciprocal_prime_sum",
        [](const std::string& primes, std::uint64_t lo, std::uint64_t hi,
           unsigned max_bits) {
          ReciprocalSum s =
              reciprocal_prime_sum(primes_from_spec(primes), lo, hi, max_bits);
          return py::make_tuple(
              s.is_exact ? rational_str(s.exact) : std::string("inexact"),
              s.value, s.is_exact);
        },
        py::arg("primes"), py::arg("lo"), py::arg("hi"),
        py::arg("max_denom_bits") = 512,
        "Sum of 1/p over set members in (lo, hi] as (exact, float, is_exact).");

  m.def("scan_condition",
        [](const std::string& primes, double epsilon, double vbound_denom,
           double grid_ratio, double v_fixed,
           unsigned max_bits) -> py::object {
          ScanOptions opts;
          opts.vbound_denom = vbound_denom;
          opts.grid_ratio = grid_ratio;
          if (v_fixed > 0) opts.v_fixed = v_fixed;
          opts.max_denom_bits = max_bits;
          auto w = scan_theorem_condition(primes_from_spec(primes), epsilon,
                                          opts);
          if (!w) return py::none();
          py::dict out;
          out["u"] = w->u;
          out["v"] = w->v;
          out["epsilon"] = w->epsilon;
          out["sum"] = w->sum.value;
          out["sum_is_exact"] = w->sum.is_exact;
          return out;
        },
        py::arg("primes"), py::arg("epsilon"),
        py::arg("vbound_denom") = 1000.0, py::arg("grid_ratio") = 1.05,
        py::arg("v_fixed") = -1.0, py::arg("max_denom_bits") = 512);

  m.def("theorem_ratio_report",
        [](std::uint64_t x, const std::string& primes, unsigned threads) {
          PsiOptions opts;
          opts.threads = threads;
          return json_to_py(
              theorem_ratio_report(x, primes_from_spec(primes), opts)
                  .to_json());
        },
        py::arg("x"), py::arg("primes"), py::arg("threads") = 1);

  m.def("check_bleichenbacher_precondition",
        [](const std::string& set, double u) {
          auto r = check_bleichenbacher_precondition(set_from_spec(set), u);
          return py::make_tuple(r.holds, r.margin);
        },
        py::arg("set"), py::arg("u"));

  m.def("solve_bleichenbacher",
        [](const std::string& set, double u, bool force) {
          return json_to_py(
              solve_bleichenbacher(set_from_spec(set), u, force).to_json());
        },
        py::arg("set"), py::arg("u"), py::arg("force") = false);

  m.def("windowed_count",
        [](const std::string& set, std::uint64_t n, unsigned k) {
          return windowed_count(set_from_spec(set), n, k).str();
        },
        py::arg("set"), py::arg("n"), py::arg("k"),
        "Exact count of ordered k-tuples summing into (N-k, N], as a "
        "decimal string.");

  m.def("hypothesis_a_check",
        [](const std::string& set, double u, double v, double lambda) {
          return json_to_py(
              hypothesis_a_check(set_from_spec(set), u, v, lambda).to_json());
        },
        py::arg("set"), py::arg("u"), py::arg("v"), py::arg("lambda_"));

  m.def("hypothesis_a_star_check",
        [](const std::string& set, double u, double lambda) {
          return json_to_py(
              hypothesis_a_star_check(set_from_spec(set), u, lambda)
                  .to_json());
        },
        py::arg("set"), py::arg("u"), py::arg("lambda_"));

  m.def("dyadic_localization",
        [](const std::string& set, double u, double lambda) {
          return json_to_py(
              dyadic_localization(set_from_spec(set), u, lambda).to_json());
        },
        py::arg("set"), py::arg("u"), py::arg("lambda_"));

  m.def("popular_doubling",
        [](const std::string& set, double lambda, double u) {
          return json_to_py(
              popular_doubling(set_from_spec(set), lambda, u).to_json());
        },
        py::arg("set"), py::arg("lambda_"), py::arg("u"));

  m.def("localize",
        [](const std::string& primes, double x, double u, double v,
           double lambda, const std::string& rho) {
          PrimeSet set = primes_from_spec(primes);
          RhoGrid grid =
              rho.empty()
                  ? RhoGrid::paper(x, u, v, lambda)
                  : RhoGrid::custom(
                        [&] {
                          auto slash = rho.find('/');
                          if (slash == std::string::npos)
                            return Rational(BigInt(rho));
                          return Rational(BigInt(rho.substr(0, slash)),
                                          BigInt(rho.substr(slash + 1)));
                        }(),
                        x, u, v, lambda);
          return json_to_py(localize(set, grid).to_json());
        },
        py::arg("primes"), py::arg("x"), py::arg("u"), py::arg("v"),
        py::arg("lambda_"), py::arg("rho") = std::string());

  m.def("hyp_p_tuple_count",
        [](const std::string& primes, std::uint64_t x, unsigned k,
           std::uint64_t budget) {
          return hyp_p_tuple_count(primes_from_spec(primes), x, k, budget);
        },
        py::arg("primes"), py::arg("x"), py::arg("k"),
        py::arg("budget") = 10000000);

  m.def("hyp_p_check",
        [](const std::string& primes, std::uint64_t x, double u, double v,
           double lambda, std::uint64_t budget) {
          return json_to_py(
              hyp_p_check(primes_from_spec(primes), x, u, v, lambda, budget)
                  .to_json());
        },
        py::arg("primes"), py::arg("x"), py::arg("u"), py::arg("v"),
        py::arg("lambda_"), py::arg("budget") = 10000000);

  m.def("convex_hull",
        [](const std::vector<std::vector<long long>>& pts) {
          auto p = points_from_list(pts);
          return json_to_py(lattice::convex_hull(p, p.front().d).to_json());
        },
        py::arg("points"));

  m.def("inscribe_box",
        [](const std::vector<std::vector<long long>>& pts,
           const std::vector<long long>& box) {
          return json_to_py(
              lattice::inscribe_box(points_from_list(pts), box_from_list(box))
                  .to_json());
        },
        py::arg("points"), py::arg("box"));

  m.def("boundary_shell_count",
        [](const std::vector<std::vector<long long>>& pts,
           const std::vector<long long>& x0, const std::string& gamma) {
          auto p = points_from_list(pts);
          lattice::Hull hull = lattice::convex_hull(p, p.front().d);
          lattice::Point c{};
          c.d = hull.d;
          for (std::size_t i = 0; i < x0.size(); ++i) c.x[i] = x0[i];
          auto slash = gamma.find('/');
          Rational g = slash == std::string::npos
                           ? rat(std::stod(gamma))
                           : Rational(BigInt(gamma.substr(0, slash)),
                                      BigInt(gamma.substr(slash + 1)));
          return lattice::boundary_shell_count(hull, c, g);
        },
        py::arg("points"), py::arg("x0"), py::arg("gamma"));

  m.def("epsilon_regularize",
        [](const std::vector<std::vector<long long>>& pts,
           const std::vector<long long>& box, double epsilon) {
          return json_to_py(lattice::epsilon_regularize(points_from_list(pts),
                                                        box_from_list(box),
                                                        epsilon)
                                .to_json());
        },
        py::arg("points"), py::arg("box"), py::arg("epsilon"));

  m.def("shapley_folkman_decompose",
        [](const std::vector<std::vector<long long>>& pts, unsigned k,
           const std::vector<std::string>& x) {
          return json_to_py(lattice::shapley_folkman_decompose(
                                points_from_list(pts), k, qpoint_from_list(x))
                                .to_json());
        },
        py::arg("points"), py::arg("k"), py::arg("x"));

  m.def("popular_sf_density",
        [](const std::vector<std::vector<long long>>& pts,
           const std::vector<long long>& box, double gamma, double epsilon,
           unsigned k, const std::vector<std::string>& x) {
          return json_to_py(
              lattice::popular_sf_density(points_from_list(pts),
                                          box_from_list(box), gamma, epsilon,
                                          k, qpoint_from_list(x))
                  .to_json());
        },
        py::arg("points"), py::arg("box"), py::arg("gamma"),
        py::arg("epsilon"), py::arg("k"), py::arg("x"));
}
