#include "mmass/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmass/constructions.hpp"
#include "mmass/error.hpp"
#include "mmass/extremal.hpp"
#include "mmass/io.hpp"
#include "mmass/mass.hpp"
#include "mmass/metric.hpp"
#include "mmass/sampling.hpp"

namespace mmass::cli {

namespace {

using io::json;

struct Globals {
  std::uint64_t seed = 0;
  double tol = 1e-12;
  std::string format = "json";
  std::string out_path;
};

// Distribution source shared by emm, bounds, gt and simulate.
struct SourceArgs {
  std::string dist_path;
  std::string family;
  std::uint64_t n = 0;
  std::uint64_t horizon = 0;
  std::uint64_t a = 0;
  double ratio = 0.5;
  bool normalize = false;

  void attach(CLI::App* sub) {
    auto* d = sub->add_option("--dist", dist_path, "distribution file (JSON array/masses/runs, family JSON, or CSV)");
    auto* f = sub->add_option("--family", family, "built-in family")
                  ->check(CLI::IsMember({"uniform", "point", "geometric", "tight-finite", "tight-countable"}));
    d->excludes(f);
    sub->add_option("--n", n, "support size (uniform, tight-finite)");
    sub->add_option("--horizon", horizon, "design sample size for tight-finite");
    sub->add_option("--a", a, "block size for tight-countable");
    sub->add_option("--ratio", ratio, "ratio for geometric");
    sub->add_flag("--normalize", normalize, "rescale file masses to sum to one");
  }
};

struct Source {
  std::optional<ProbVector> finite;
  std::optional<CountableFamily> family;
  double tol = 1e-12;
};

Source load_source(const SourceArgs& s, double tol) {
  Source src;
  src.tol = tol;
  if (!s.dist_path.empty()) {
    const auto text = io::read_file(s.dist_path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::parse_error& e) {
        fail(Errc::invalid_input, std::string("malformed JSON: ") + e.what());
      }
      if (j.contains("family")) {
        auto spec = io::family_from_json(j);
        src.family = std::move(spec.family);
        if (!j.contains("truncation_tol")) spec.truncation_tol = tol;
        src.tol = spec.truncation_tol;
        return src;
      }
      src.finite = io::prob_vector_from_json(j, s.normalize);
      return src;
    }
    src.finite = io::parse_prob_vector(text, s.normalize);
    return src;
  }
  require(!s.family.empty(), "one of --dist or --family is required");
  if (s.family == "uniform") {
    require(s.n >= 1, "--n is required for uniform");
    src.finite = ProbVector::uniform(s.n);
  } else if (s.family == "point") {
    src.finite = ProbVector::point_mass();
  } else if (s.family == "tight-finite") {
    require(s.n >= 1 && s.horizon >= 1, "--n and --horizon are required for tight-finite");
    src.finite = tight_finite(s.n, s.horizon);
  } else if (s.family == "geometric") {
    src.family = CountableFamily::geometric(s.ratio);
  } else {
    require(s.a >= 1, "--a is required for tight-countable");
    src.family = tight_countable(s.a);
  }
  return src;
}

const ProbVector& require_finite(const Source& src, const char* what) {
  require(src.finite.has_value(), std::string(what) + " needs a finite distribution");
  return *src.finite;
}

// --t values plus 1..--t-max, deduplicated in ascending order.
std::vector<std::uint64_t> t_grid(const std::vector<std::uint64_t>& ts, std::uint64_t t_max) {
  std::vector<std::uint64_t> out(ts);
  for (std::uint64_t t = 1; t <= t_max; ++t) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  require(!out.empty(), "give --t or --t-max");
  return out;
}

std::string csv_cell(const json& v) {
  if (v.is_number_float()) return io::format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_primitive()) return v.dump();
  std::string s = v.dump();
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// Flat object -> header + one row; array of flat objects -> header + rows.
std::string json_to_csv(const json& j) {
  const json rows = j.is_array() ? j : json::array({j});
  if (rows.empty()) return {};
  if (!rows.front().is_object()) {
    std::string out;
    for (const auto& v : rows) out += csv_cell(v) + "\n";
    return out;
  }
  std::vector<std::string> keys;
  for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + keys[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i) out += ",";
      if (r.contains(keys[i])) out += csv_cell(r.at(keys[i]));
    }
    out += "\n";
  }
  return out;
}

class Emitter {
 public:
  Emitter(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  void emit(const json& j, std::optional<std::string> csv = std::nullopt) {
    std::string text;
    if (g_.format == "csv")
      text = csv ? *csv : json_to_csv(j);
    else
      text = j.dump(2) + "\n";
    if (g_.out_path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(g_.out_path, std::ios::binary);
    require(static_cast<bool>(f), "cannot write '" + g_.out_path + "'");
    f << text;
  }

 private:
  const Globals& g_;
  std::ostream& out_;
};

json one_or_many(json arr) { return arr.size() == 1 ? arr.front() : arr; }

int cmd_emm(const Source& src, const std::vector<std::uint64_t>& ts, Emitter& em) {
  MassCurve c = src.finite ? mass_curve(*src.finite, ts) : mass_curve(*src.family, ts, src.tol);
  json rows = json::array();
  for (std::size_t i = 0; i < c.t_values.size(); ++i) {
    json r = {{"t", c.t_values[i]}, {"value", c.values[i]}};
    if (src.family) {
      r["lower"] = c.lower[i];
      r["upper"] = c.upper[i];
    }
    rows.push_back(r);
  }
  em.emit(one_or_many(rows), io::to_csv(c));
  return kExitOk;
}

int cmd_bounds(const Source& src, const std::vector<std::uint64_t>& ts, double c, Emitter& em) {
  json rows = json::array();
  if (src.finite) {
    const auto& d = *src.finite;
    const auto ell = plateau_length(d);
    for (auto t : ts) {
      const double exact = expected_missing_mass(d, t);
      const double bf = bound_finite(d.size(), t);
      const double bc = bound_countable(ell, t, c);
      rows.push_back({{"t", t},
                      {"exact", exact},
                      {"bound_finite", bf},
                      {"bound_countable", bc},
                      {"trivial_bound", trivial_bound(d, t)},
                      {"plateau", ell},
                      {"n", d.size()},
                      {"ok", exact <= bf + 1e-12}});
    }
  } else {
    const auto tr = truncate(*src.family, src.tol);
    const auto ell = plateau_length(*src.family, tr.masses.size());
    for (auto t : ts) {
      const auto iv = expected_missing_mass(tr, t);
      rows.push_back({{"t", t},
                      {"lower", iv.lower},
                      {"upper", iv.upper},
                      {"bound_countable", bound_countable(ell, t, c)},
                      {"plateau", ell}});
    }
  }
  em.emit(one_or_many(rows));
  return kExitOk;
}

int cmd_gt(const Source& src, const std::vector<std::uint64_t>& ts, Emitter& em) {
  const auto& d = require_finite(src, "gt");
  json rows = json::array();
  for (auto t : ts)
    rows.push_back({{"t", t},
                    {"expected_missing_mass", expected_missing_mass(d, t)},
                    {"expected_estimate", gt_expected_estimate(d, t)},
                    {"singleton_mass", singleton_mass_expectation(d, t)},
                    {"bias", gt_bias(d, t)}});
  em.emit(one_or_many(rows));
  return kExitOk;
}

PointCloud load_cloud(const std::string& path) {
  require(!path.empty(), "--cloud is required");
  return io::parse_point_cloud(io::read_file(path));
}

int cmd_cover(const PointCloud& cloud, double eps, std::uint64_t t, Emitter& em) {
  const double expected = expected_eps_missing_mass(cloud, t, eps);
  const auto greedy = greedy_eps_net(cloud, eps);
  const bool exact = cloud.size() <= kMaxExactCoverPoints;
  const auto net = exact ? exact_eps_net(cloud, eps) : greedy;
  const double bound = covering_bound(net.size(), t);
  const double greedy_bound = covering_bound(greedy.size(), t);
  const bool ok = expected <= bound + 1e-12;
  json j = {{"eps", eps},
            {"t", t},
            {"expected", expected},
            {"net_size", net.size()},
            {"net_exact", exact},
            {"centers", net.centers},
            {"greedy_size", greedy.size()},
            {"bound", bound},
            {"greedy_bound", greedy_bound},
            {"ok", ok}};
  em.emit(j);
  return ok ? kExitOk : kExitViolation;
}

int report_exit(const McReport& r) {
  if (r.violated && *r.violated) return kExitViolation;
  if (r.within_3se && !*r.within_3se) return kExitViolation;
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  Globals g;
  CLI::App app{"Expected missing mass: exact values, bounds, extremal distributions and Monte Carlo checks", "mml"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "master RNG seed")->capture_default_str();
  app.add_option("--tol", g.tol, "truncation tolerance for countable families")->capture_default_str();
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--out", g.out_path, "write output to this path instead of stdout");

  std::vector<std::uint64_t> ts;
  std::uint64_t t_max = 0;
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--t", ts, "sample size(s)")->delimiter(',');
    sub->add_option("--t-max", t_max, "also include every t in 1..t-max");
  };

  SourceArgs src_args;
  auto* emm = app.add_subcommand("emm", "expected missing mass over a t-grid");
  src_args.attach(emm);
  add_grid(emm);

  double c_const = kDefaultUniversalC;
  auto* bounds = app.add_subcommand("bounds", "upper bounds alongside exact values");
  src_args.attach(bounds);
  add_grid(bounds);
  bounds->add_option("--c", c_const, "universal constant in the plateau bound")->capture_default_str();

  std::vector<std::uint64_t> ns;
  std::uint64_t t_one = 0;
  auto* extremal = app.add_subcommand("extremal", "maximizer of the bivalent family for given n, t");
  std::uint64_t ext_n = 0;
  extremal->add_option("--n", ext_n, "support size")->required();
  extremal->add_option("--t", t_one, "sample size")->required();

  auto* tau = app.add_subcommand("tau", "threshold at which the bivalent family beats uniform");
  tau->add_option("--n", ns, "support size(s)")->required()->delimiter(',');
  std::uint64_t scan_max = 0;
  tau->add_option("--t-max", scan_max, "last t to scan (default n + 10 sqrt(n))");

  auto* construct = app.add_subcommand("construct", "emit an extremal construction");
  construct->require_subcommand(1);
  std::uint64_t cn = 0, ct = 0, ca = 0, rate_tmax = 200;
  std::string sequence = "inverse-log";
  double seq_scale = 0.5, seq_ratio = 0.9;
  bool expand = false;
  auto* c_finite = construct->add_subcommand("tight-finite", "n-1 atoms of mass 1/(t+1) plus one heavy atom");
  c_finite->add_option("--n", cn)->required();
  c_finite->add_option("--t", ct)->required();
  c_finite->add_flag("--expand", expand, "list every mass instead of runs");
  auto* c_countable = construct->add_subcommand("tight-countable", "dyadic blocks of a atoms");
  c_countable->add_option("--a", ca)->required();
  auto* c_rate = construct->add_subcommand("rate-lb", "distribution beating a slowly decaying rate");
  c_rate->add_option("--t-max", rate_tmax)->capture_default_str();
  c_rate->add_option("--sequence", sequence)
      ->check(CLI::IsMember({"inverse-log", "geometric"}))
      ->capture_default_str();
  c_rate->add_option("--scale", seq_scale, "geometric sequence scale")->capture_default_str();
  c_rate->add_option("--ratio", seq_ratio, "geometric sequence ratio")->capture_default_str();

  auto* gt = app.add_subcommand("gt", "Good-Turing expectations and bias in closed form");
  src_args.attach(gt);
  add_grid(gt);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo verification");
  simulate->require_subcommand(1);
  std::uint64_t replicates = 100000;
  std::uint64_t sim_t = 0;
  double eps = 0.1;
  std::string cloud_path;
  auto* s_bias = simulate->add_subcommand("bias", "Good-Turing bias against its closed form");
  auto* s_conc = simulate->add_subcommand("concentration", "deviation frequency against 2 exp(-t eps^2)");
  auto* s_eps = simulate->add_subcommand("eps", "eps-missing mass against its closed form");
  for (auto* s : {s_bias, s_conc}) src_args.attach(s);
  for (auto* s : {s_bias, s_conc, s_eps}) {
    s->add_option("--t", sim_t, "sample size")->required();
    s->add_option("--replicates", replicates)->capture_default_str();
  }
  s_conc->add_option("--eps", eps)->required();
  s_eps->add_option("--eps", eps)->required();
  s_eps->add_option("--cloud", cloud_path)->required();

  auto* cover = app.add_subcommand("cover", "eps-net, covering number and the covering bound check");
  cover->add_option("--cloud", cloud_path, "point cloud (JSON or CSV)")->required();
  cover->add_option("--eps", eps)->required();
  cover->add_option("--t", sim_t)->required();

  double step = 1e-3;
  auto* oracle = app.add_subcommand("oracle", "grid search over the 3-point simplex");
  oracle->add_option("--t", t_one)->required();
  oracle->add_option("--step", step)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  Emitter em(g, out);
  try {
    if (emm->parsed()) return cmd_emm(load_source(src_args, g.tol), t_grid(ts, t_max), em);
    if (bounds->parsed()) return cmd_bounds(load_source(src_args, g.tol), t_grid(ts, t_max), c_const, em);
    if (gt->parsed()) return cmd_gt(load_source(src_args, g.tol), t_grid(ts, t_max), em);
    if (extremal->parsed()) {
      em.emit(io::to_json(find_x_star(ext_n, t_one)));
      return kExitOk;
    }
    if (tau->parsed()) {
      json rows = json::array();
      for (auto n : ns) rows.push_back(io::to_json(find_tau(n, scan_max)));
      em.emit(one_or_many(rows));
      return kExitOk;
    }
    if (c_finite->parsed()) {
      const auto d = tight_finite(cn, ct);
      em.emit(io::to_json(d, !expand), io::to_csv(d));
      return kExitOk;
    }
    if (c_countable->parsed()) {
      em.emit(io::to_json(tight_countable(ca), g.tol));
      return kExitOk;
    }
    if (c_rate->parsed()) {
      const auto r = sequence == "inverse-log" ? inverse_log_sequence(rate_tmax)
                                               : geometric_sequence(rate_tmax, seq_scale, seq_ratio);
      em.emit(io::to_json(rate_lb(r)));
      return kExitOk;
    }
    if (s_bias->parsed()) {
      const auto src = load_source(src_args, g.tol);
      const auto rep = verify_bias(require_finite(src, "simulate bias"), sim_t, replicates, g.seed);
      em.emit(io::to_json(rep));
      return report_exit(rep);
    }
    if (s_conc->parsed()) {
      const auto src = load_source(src_args, g.tol);
      const auto rep = verify_concentration(require_finite(src, "simulate concentration"), sim_t, eps, replicates, g.seed);
      em.emit(io::to_json(rep));
      return report_exit(rep);
    }
    if (s_eps->parsed()) {
      const auto rep = mc_eps_missing_mass(load_cloud(cloud_path), sim_t, eps, replicates, g.seed);
      em.emit(io::to_json(rep));
      return report_exit(rep);
    }
    if (cover->parsed()) return cmd_cover(load_cloud(cloud_path), eps, sim_t, em);
    if (oracle->parsed()) {
      const auto o = simplex_oracle_n3(t_one, step);
      const auto fam = find_x_star(3, t_one);
      em.emit({{"t", t_one},
               {"step", step},
               {"value", o.value},
               {"point", o.point},
               {"family_max", fam.value},
               {"family_x_star", fam.x_star}});
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::internal_error ? kExitInternal : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  err << app.help();
  return kExitInvalid;
}

}  // namespace mmass::cli
