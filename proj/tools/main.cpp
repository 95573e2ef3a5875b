// Batch front end: parses prime-set / integer-set / point-set specs,
// dispatches to the library, and emits JSON or CSV reports.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sievelab/errors.hpp"
#include "sievelab/friable.hpp"
#include "sievelab/lattice.hpp"
#include "sievelab/primereduce.hpp"
#include "sievelab/primeset.hpp"
#include "sievelab/sumsolve.hpp"

using nlohmann::json;
using namespace sievelab;

namespace {

struct Common {
  std::string output;
  std::string format = "json";
  unsigned threads = 1;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--output", c.output, "write the report to a file");
  sub->add_option("--format", c.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "worker cap for parallel internals");
  sub->add_option("--seed", c.seed,
                  "seed for randomized instance generation (reserved)");
}

std::string read_spec(const std::string& arg) {
  if (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) return arg;
  std::ifstream in(arg);
  if (!in) throw ParseError("cannot open input file: " + arg);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

Rational parse_rational(const std::string& s) {
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos)
      return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos)
      return rat(std::stod(s));
    return Rational(BigInt(s));
  } catch (const Error&) {
    throw;
  } catch (...) {
    throw ParseError("cannot parse rational: " + s);
  }
}

lattice::Box parse_box(const std::string& s) {
  lattice::Box box;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (box.d >= 3) throw ParseError("box has more than 3 sides");
    box.half[box.d++] = std::stoll(item);
  }
  if (box.d == 0) throw ParseError("empty box spec");
  for (int i = 0; i < box.d; ++i)
    if (box.half[i] < 1) throw ParseError("box half-widths must be >= 1");
  return box;
}

lattice::Point parse_point(const std::string& s, int d_expect = -1) {
  lattice::Point p{};
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (p.d >= 3) throw ParseError("point has more than 3 coordinates");
    p.x[p.d++] = std::stoll(item);
  }
  if (d_expect > 0 && p.d != d_expect)
    throw ParseError("point dimension mismatch");
  return p;
}

void emit(const std::string& text, const Common& c) {
  if (c.output.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(c.output);
  if (!out) throw ParseError("cannot open output file: " + c.output);
  out << text << "\n";
}

void emit_json(const json& doc, const Common& c) {
  if (c.format != "json")
    throw ParseError("this subcommand reports JSON only");
  emit(doc.dump(), c);
}

int run(int argc, char** argv) {
  CLI::App app{"workbench for sieved-integer counts, subset-sum "
               "representation measures and lattice convex geometry"};
  app.require_subcommand(1);

  // psi
  auto* psi = app.add_subcommand("psi", "exact Psi(x; P) count");
  static Common c_psi;
  static std::uint64_t psi_x = 0;
  static std::string psi_primes;
  psi->add_option("--x", psi_x, "count integers <= x")->required();
  psi->add_option("--primes", psi_primes, "prime-set JSON or file")->required();
  add_common(psi, c_psi);
  psi->callback([] {
    PrimeSet set = PrimeSet::from_json_text(read_spec(psi_primes));
    PsiOptions opts;
    opts.threads = c_psi.threads;
    std::uint64_t count = psi_count(psi_x, set, opts);
    emit_json(json{{"x", psi_x}, {"psi", count}}, c_psi);
  });

  // condition
  auto* cond = app.add_subcommand("condition",
                                  "scan for a (u, v, eps) witness of the "
                                  "reciprocal-sum condition");
  static Common c_cond;
  static std::string cond_primes;
  static double cond_eps = 0.0;
  static ScanOptions cond_opts;
  static double cond_v = -1.0;
  cond->add_option("--primes", cond_primes)->required();
  cond->add_option("--epsilon", cond_eps)->required();
  cond->add_option("--vbound-denom", cond_opts.vbound_denom,
                   "denominator constant in the v bound");
  cond->add_option("--grid-ratio", cond_opts.grid_ratio);
  cond->add_option("--v", cond_v, "fix v instead of using the bound");
  cond->add_option("--exact-bits", cond_opts.max_denom_bits);
  add_common(cond, c_cond);
  cond->callback([] {
    PrimeSet set = PrimeSet::from_json_text(read_spec(cond_primes));
    if (cond_v > 0) cond_opts.v_fixed = cond_v;
    auto w = scan_theorem_condition(set, cond_eps, cond_opts);
    json doc;
    if (w) {
      doc["witness"] = {{"u", w->u},
                        {"v", w->v},
                        {"epsilon", w->epsilon},
                        {"sum", w->sum.value},
                        {"sum_exact", w->sum.is_exact
                                          ? rational_str(w->sum.exact)
                                          : "inexact"}};
    } else {
      doc["witness"] = nullptr;
    }
    emit_json(doc, c_cond);
  });

  // ratio
  auto* ratio = app.add_subcommand("ratio", "Psi/x against the Mertens product");
  static Common c_ratio;
  static std::uint64_t ratio_x = 0;
  static std::string ratio_primes;
  ratio->add_option("--x", ratio_x)->required();
  ratio->add_option("--primes", ratio_primes)->required();
  add_common(ratio, c_ratio);
  ratio->callback([] {
    PrimeSet set = PrimeSet::from_json_text(read_spec(ratio_primes));
    PsiOptions opts;
    opts.threads = c_ratio.threads;
    PsiReport rep = theorem_ratio_report(ratio_x, set, opts);
    if (c_ratio.format == "csv")
      emit(std::string(PsiReport::csv_header()) + "\n" + rep.to_csv_row(),
           c_ratio);
    else
      emit(rep.to_json().dump(), c_ratio);
  });

  // rho
  auto* rho = app.add_subcommand("rho", "Dickman rho evaluation");
  static Common c_rho;
  static double rho_u = 0.0;
  rho->add_option("--u", rho_u)->required();
  add_common(rho, c_rho);
  rho->callback([] {
    emit_json(json{{"u", rho_u}, {"rho", dickman_rho(rho_u)}}, c_rho);
  });

  // bleichenbacher
  auto* bb = app.add_subcommand("bleichenbacher",
                                "witness for the discrete subset-sum window");
  static Common c_bb;
  static std::string bb_set;
  static double bb_u = 1.0;
  static bool bb_force = false;
  bb->add_option("--set", bb_set)->required();
  bb->add_option("--u", bb_u)->required();
  bb->add_flag("--force", bb_force, "attempt even if the precondition fails");
  add_common(bb, c_bb);
  bb->callback([] {
    WeightedIntegerSet a = WeightedIntegerSet::from_json_text(read_spec(bb_set));
    BleichenbacherWitness w = solve_bleichenbacher(a, bb_u, bb_force);
    emit_json(w.to_json(), c_bb);
  });

  // hyp-a
  auto* ha = app.add_subcommand("hyp-a", "windowed representation measures");
  static Common c_ha;
  static std::string ha_set;
  static double ha_u = 1, ha_v = 1, ha_lambda = 0.5;
  ha->add_option("--set", ha_set)->required();
  ha->add_option("--u", ha_u)->required();
  ha->add_option("--v", ha_v)->required();
  ha->add_option("--lambda", ha_lambda)->required();
  add_common(ha, c_ha);
  ha->callback([] {
    WeightedIntegerSet a = WeightedIntegerSet::from_json_text(read_spec(ha_set));
    HypothesisAReport rep = hypothesis_a_check(a, ha_u, ha_v, ha_lambda);
    if (c_ha.format == "csv")
      emit(rep.to_csv(), c_ha);
    else
      emit(rep.to_json().dump(), c_ha);
  });

  // hyp-a-star
  auto* has = app.add_subcommand("hyp-a-star",
                                 "narrow-window representation measures");
  static Common c_has;
  static std::string has_set;
  static double has_u = 1, has_lambda = 0.5;
  has->add_option("--set", has_set)->required();
  has->add_option("--u", has_u)->required();
  has->add_option("--lambda", has_lambda)->required();
  add_common(has, c_has);
  has->callback([] {
    WeightedIntegerSet a =
        WeightedIntegerSet::from_json_text(read_spec(has_set));
    HypothesisAReport rep = hypothesis_a_star_check(a, has_u, has_lambda);
    if (c_has.format == "csv")
      emit(rep.to_csv(), c_has);
    else
      emit(rep.to_json().dump(), c_has);
  });

  // dyadic
  auto* dy = app.add_subcommand("dyadic", "first dyadic band meeting its threshold");
  static Common c_dy;
  static std::string dy_set;
  static double dy_u = 1, dy_lambda = 0.5;
  dy->add_option("--set", dy_set)->required();
  dy->add_option("--u", dy_u)->required();
  dy->add_option("--lambda", dy_lambda)->required();
  add_common(dy, c_dy);
  dy->callback([] {
    WeightedIntegerSet a = WeightedIntegerSet::from_json_text(read_spec(dy_set));
    emit_json(dyadic_localization(a, dy_u, dy_lambda).to_json(), c_dy);
  });

  // doubling
  auto* db = app.add_subcommand("doubling", "popular-doubling decomposition");
  static Common c_db;
  static std::string db_set;
  static double db_u = 2, db_lambda = 0.5;
  db->add_option("--set", db_set)->required();
  db->add_option("--lambda", db_lambda)->required();
  db->add_option("--u", db_u)->required();
  add_common(db, c_db);
  db->callback([] {
    WeightedIntegerSet a = WeightedIntegerSet::from_json_text(read_spec(db_set));
    emit_json(popular_doubling(a, db_lambda, db_u).to_json(), c_db);
  });

  // localize
  auto* loc = app.add_subcommand("localize",
                                 "grid localization of a prime set");
  static Common c_loc;
  static std::string loc_primes, loc_rho;
  static double loc_x = 0, loc_u = 1, loc_v = 2, loc_lambda = 0.5;
  loc->add_option("--primes", loc_primes)->required();
  loc->add_option("--x", loc_x)->required();
  loc->add_option("--u", loc_u)->required();
  loc->add_option("--v", loc_v)->required();
  loc->add_option("--lambda", loc_lambda)->required();
  loc->add_option("--rho", loc_rho,
                  "override the grid ratio with an exact rational p/q");
  add_common(loc, c_loc);
  loc->callback([] {
    PrimeSet set = PrimeSet::from_json_text(read_spec(loc_primes));
    RhoGrid grid = loc_rho.empty()
                       ? RhoGrid::paper(loc_x, loc_u, loc_v, loc_lambda)
                       : RhoGrid::custom(parse_rational(loc_rho), loc_x,
                                         loc_u, loc_v, loc_lambda);
    emit_json(localize(set, grid).to_json(), c_loc);
  });

  // hyp-p
  auto* hp = app.add_subcommand("hyp-p", "prime-product window measures");
  static Common c_hp;
  static std::string hp_primes;
  static std::uint64_t hp_x = 0, hp_budget = 10000000;
  static double hp_u = 1, hp_v = 2, hp_lambda = 0.5;
  hp->add_option("--primes", hp_primes)->required();
  hp->add_option("--x", hp_x)->required();
  hp->add_option("--u", hp_u)->required();
  hp->add_option("--v", hp_v)->required();
  hp->add_option("--lambda", hp_lambda)->required();
  hp->add_option("--budget", hp_budget);
  add_common(hp, c_hp);
  hp->callback([] {
    PrimeSet set = PrimeSet::from_json_text(read_spec(hp_primes));
    HypPReport rep = hyp_p_check(set, hp_x, hp_u, hp_v, hp_lambda, hp_budget);
    if (c_hp.format == "csv")
      emit(rep.to_csv(), c_hp);
    else
      emit(rep.to_json().dump(), c_hp);
  });

  // hull
  auto* hull_cmd = app.add_subcommand("hull", "exact convex hull");
  static Common c_hull;
  static std::string hull_points;
  hull_cmd->add_option("--points", hull_points)->required();
  add_common(hull_cmd, c_hull);
  hull_cmd->callback([] {
    auto pts = lattice::points_from_json(parse_json(read_spec(hull_points)));
    emit_json(lattice::convex_hull(pts, pts.front().d).to_json(), c_hull);
  });

  // inscribe
  auto* ins = app.add_subcommand("inscribe", "largest inscribed box translate");
  static Common c_ins;
  static std::string ins_points, ins_box;
  ins->add_option("--points", ins_points)->required();
  ins->add_option("--box", ins_box, "half-widths, e.g. 5,5,5")->required();
  add_common(ins, c_ins);
  ins->callback([] {
    auto pts = lattice::points_from_json(parse_json(read_spec(ins_points)));
    emit_json(lattice::inscribe_box(pts, parse_box(ins_box)).to_json(), c_ins);
  });

  // shell
  auto* sh = app.add_subcommand("shell", "lattice points near the hull boundary");
  static Common c_sh;
  static std::string sh_points, sh_x0, sh_gamma;
  sh->add_option("--points", sh_points)->required();
  sh->add_option("--x0", sh_x0, "shrink center, e.g. 0,0")->required();
  sh->add_option("--gamma", sh_gamma, "shrink factor, exact p/q")->required();
  add_common(sh, c_sh);
  sh->callback([] {
    auto pts = lattice::points_from_json(parse_json(read_spec(sh_points)));
    lattice::Hull hull = lattice::convex_hull(pts, pts.front().d);
    lattice::Point x0 = parse_point(sh_x0, hull.d);
    std::uint64_t n =
        lattice::boundary_shell_count(hull, x0, parse_rational(sh_gamma));
    emit_json(json{{"count", n}}, c_sh);
  });

  // regularize
  auto* reg = app.add_subcommand("regularize", "cover-and-delete regular subset");
  static Common c_reg;
  static std::string reg_points, reg_box;
  static double reg_eps = 0.1;
  reg->add_option("--points", reg_points)->required();
  reg->add_option("--box", reg_box)->required();
  reg->add_option("--epsilon", reg_eps)->required();
  add_common(reg, c_reg);
  reg->callback([] {
    auto pts = lattice::points_from_json(parse_json(read_spec(reg_points)));
    emit_json(
        lattice::epsilon_regularize(pts, parse_box(reg_box), reg_eps).to_json(),
        c_reg);
  });

  // sf
  auto* sf = app.add_subcommand("sf", "constructive hull-sum decomposition");
  static Common c_sf;
  static std::string sf_points, sf_x;
  static unsigned sf_k = 0;
  sf->add_option("--points", sf_points)->required();
  sf->add_option("--k", sf_k)->required();
  sf->add_option("--x", sf_x, "target point, rational coords")->required();
  add_common(sf, c_sf);
  sf->callback([] {
    auto pts = lattice::points_from_json(parse_json(read_spec(sf_points)));
    auto x = lattice::qpoint_from_json(parse_json(read_spec(sf_x)));
    emit_json(lattice::shapley_folkman_decompose(pts, sf_k, x).to_json(), c_sf);
  });

  // popular-sf
  auto* psf = app.add_subcommand("popular-sf",
                                 "density of y + a representations");
  static Common c_psf;
  static std::string psf_points, psf_box, psf_x;
  static double psf_gamma = 0.1, psf_eps = 0.01;
  static unsigned psf_k = 0;
  psf->add_option("--points", psf_points)->required();
  psf->add_option("--box", psf_box)->required();
  psf->add_option("--gamma", psf_gamma)->required();
  psf->add_option("--epsilon", psf_eps)->required();
  psf->add_option("--k", psf_k)->required();
  psf->add_option("--x", psf_x)->required();
  add_common(psf, c_psf);
  psf->callback([] {
    auto pts = lattice::points_from_json(parse_json(read_spec(psf_points)));
    auto x = lattice::qpoint_from_json(parse_json(read_spec(psf_x)));
    emit_json(lattice::popular_sf_density(pts, parse_box(psf_box), psf_gamma,
                                          psf_eps, psf_k, x)
                  .to_json(),
              c_psf);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    json err{{"error", "parse"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    json err{{"error", e.kind_name()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return (int)e.kind();
  } catch (const std::exception& e) {
    json err{{"error", "parse"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
