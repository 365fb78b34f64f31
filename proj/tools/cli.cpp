#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "delaysl/io.hpp"

namespace delaysl::cli {

namespace {

using io::json;

constexpr int kVerdictFalse = 2;
constexpr int kError = 1;

// JSON config: top-level keys set global options, an object under a
// subcommand name sets that subcommand's options. Arrays become comma lists
// whose elements may be [re, im] pairs.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j = json::object();
    for (const CLI::Option* o : app->get_options()) {
      if (o->get_lnames().empty() || !o->get_configurable()) continue;
      const std::string& name = o->get_lnames().front();
      if (o->count() > 0)
        j[name] = CLI::detail::join(o->results(), ",");
      else if (default_also && !o->get_default_str().empty())
        j[name] = o->get_default_str();
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw CLI::ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("malformed config: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return io::format_complex(io::complex_from_json(v));
    throw CLI::ConfigError("malformed config: unsupported value for '" + key + "'");
  }

  static void walk(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, v] : j.items()) {
      if (v.is_null()) continue;
      if (v.is_object()) {
        if (!parents.empty()) throw CLI::ConfigError("malformed config: nesting below '" + parents.front() + "'");
        walk(v, {key}, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (v.is_array()) {
        std::string joined;
        for (const json& x : v) joined += (joined.empty() ? "" : ",") + scalar(x, key);
        item.inputs = {joined};
      } else {
        item.inputs = {scalar(v, key)};
      }
      items.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::string a = "0.35pi";
  std::optional<int> nodes;
  std::optional<double> tol;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;

  double delay() const { return io::parse_delay(a); }
  int nodes_or(int d) const { return nodes.value_or(d); }
  double tol_or(double d) const { return tol.value_or(d); }
};

// Which potential a subcommand works on.
struct PotentialChoice {
  std::string family = "B1";
  std::string alpha = "0";
  std::string file;

  void add_to(CLI::App* sub, const std::string& default_alpha) {
    alpha = default_alpha;
    sub->add_option("--family", family, "B1, B0, B0-smooth, negative-control or random")
        ->check(CLI::IsMember({"B1", "B0", "B0-smooth", "negative-control", "random"}))
        ->capture_default_str();
    sub->add_option("--alpha", alpha, "family parameter, e.g. 3+4i")->capture_default_str();
    sub->add_option("--potential", file, "potential JSON written by build-potential")->check(CLI::ExistingFile);
  }

  PiecewisePotential build(const Globals& g) const {
    if (!file.empty()) return io::potential_from_json(io::read_json_file(file));
    const double a = g.delay();
    const cplx al = io::parse_complex(alpha);
    const int n = g.nodes_or(256);
    if (family == "negative-control") return negative_control_family(a, al, n);
    if (family == "random") {
      std::mt19937_64 rng(g.seed);
      return random_admissible_potential(a, rng);
    }
    const BuiltinPairs b = builtin_pairs(a);
    const KernelOperator op = KernelOperator::physical(a, b.h1);
    if (family == "B1") return build_family(1, al, op, make_pair(op, b.e1, -1.0, n));
    const EigenPair p0 = make_pair(op, b.e0, 1.0, n);
    if (family == "B0") return build_family(0, al, op, p0);
    return build_smooth_family(al, default_bridge(a), op, p0);
  }
};

std::vector<double> parse_grid(const std::string& s) {
  if (s.empty()) return default_lambda_grid();
  return io::parse_real_list(s);
}

class Emitter {
 public:
  Emitter(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  template <class CsvWriter>
  void emit(const json& j, CsvWriter&& csv) const {
    std::string text;
    if (g_.format == "csv") {
      std::ostringstream s;
      csv(s);
      text = s.str();
    } else {
      text = io::dump(j);
    }
    if (g_.out_path.empty())
      out_ << text;
    else
      io::write_file(g_.out_path, text);
  }

 private:
  const Globals& g_;
  std::ostream& out_;
};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delay Sturm-Liouville verification toolkit", "delaysl"};
  app.fallthrough();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.allow_config_extras(CLI::config_extras_mode::error);

  Globals g;
  app.add_option("--a", g.a, "delay, e.g. 0.35pi or pi/3")->capture_default_str();
  app.add_option("--nodes", g.nodes, "quadrature nodes")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "tolerance or verdict threshold")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_path, "write output to a file instead of stdout");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized inputs")->capture_default_str();
  app.set_config("--config", "", "JSON configuration file");

  // verify-eigenpair
  auto* verify = app.add_subcommand("verify-eigenpair", "check the built-in kernel eigenpair and its mean");
  int verify_nu = 1;
  verify->add_option("--nu", verify_nu, "1 for (h1, e1), 0 for (h0, e0)")->check(CLI::IsMember({0, 1}))
      ->capture_default_str();

  // build-potential
  auto* build = app.add_subcommand("build-potential", "emit a family member");
  PotentialChoice build_q;
  build_q.add_to(build, "1");
  int build_points = 65;
  build->add_option("--points", build_points, "CSV samples per segment")->check(CLI::Range(2, 100000))
      ->capture_default_str();

  // charfn
  auto* charfn = app.add_subcommand("charfn", "evaluate the characteristic function on a lambda grid");
  PotentialChoice charfn_q;
  charfn_q.add_to(charfn, "1");
  int charfn_nu = 1, charfn_j = 0;
  std::string charfn_method = "both", charfn_lambdas;
  charfn->add_option("--nu", charfn_nu)->check(CLI::IsMember({0, 1}))->capture_default_str();
  charfn->add_option("--j", charfn_j)->check(CLI::IsMember({0, 1}))->capture_default_str();
  charfn->add_option("--method", charfn_method)->check(CLI::IsMember({"ode", "repr", "both"}))->capture_default_str();
  charfn->add_option("--lambdas", charfn_lambdas, "comma separated complex values (default grid if empty)");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "locate eigenvalues in a window of the lambda plane");
  PotentialChoice spectrum_q;
  spectrum_q.add_to(spectrum, "0");
  int spectrum_nu = 1, spectrum_j = 0;
  std::string spectrum_method = "ode", spectrum_window = "0,30,-1,1";
  spectrum->add_option("--nu", spectrum_nu)->check(CLI::IsMember({0, 1}))->capture_default_str();
  spectrum->add_option("--j", spectrum_j)->check(CLI::IsMember({0, 1}))->capture_default_str();
  spectrum->add_option("--method", spectrum_method)->check(CLI::IsMember({"ode", "repr"}))->capture_default_str();
  spectrum->add_option("--window", spectrum_window, "rho-plane window lo_re,hi_re,lo_im,hi_im (lambda = rho^2)")->capture_default_str();

  // isospec-check
  auto* isospec = app.add_subcommand("isospec-check", "alpha-invariance of both characteristic functions");
  PotentialChoice isospec_q;
  isospec_q.add_to(isospec, "0");
  std::string isospec_alphas = "0,1,-2,3+4i", isospec_grid, isospec_method = "both";
  isospec->add_option("--alphas", isospec_alphas)->capture_default_str();
  isospec->add_option("--grid", isospec_grid, "real lambda grid (default grid if empty)");
  isospec->add_option("--method", isospec_method)->check(CLI::IsMember({"ode", "repr", "both"}))->capture_default_str();

  // negative-control
  auto* negative = app.add_subcommand("negative-control", "constant-kernel family with nonzero mean");
  std::string negative_alphas = "0,1", negative_grid;
  negative->add_option("--alphas", negative_alphas)->capture_default_str();
  negative->add_option("--grid", negative_grid, "real lambda grid (default grid if empty)");

  // theorem-chain
  auto* chain = app.add_subcommand("theorem-chain", "pass/fail for each link of the invariance argument");
  PotentialChoice chain_q;
  chain_q.add_to(chain, "1");
  std::string chain_grid;
  chain->add_option("--grid", chain_grid, "real lambda grid (default grid if empty)");

  // discover
  auto* discover = app.add_subcommand("discover", "scan cosine kernels for zero-mean eigenpairs");
  int disc_dim = 2, disc_levels = 5, disc_random = 0, disc_top = 10, disc_pairs = 4;
  std::string disc_range = "-2,2";
  bool disc_polish = false;
  discover->add_option("--dim", disc_dim, "number of cos(k pi s) modes")->check(CLI::Range(1, 12))
      ->capture_default_str();
  discover->add_option("--levels", disc_levels, "grid levels per coefficient")->check(CLI::Range(2, 64))
      ->capture_default_str();
  discover->add_option("--range", disc_range, "coefficient range lo,hi")->capture_default_str();
  discover->add_option("--random", disc_random, "draw this many random coefficient vectors instead of a grid")
      ->check(CLI::NonNegativeNumber);
  discover->add_option("--top", disc_top, "candidates to report")->check(CLI::PositiveNumber)->capture_default_str();
  discover->add_option("--pairs", disc_pairs, "eigenpairs per kernel")->check(CLI::PositiveNumber)
      ->capture_default_str();
  discover->add_flag("--polish", disc_polish, "polish the best candidate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kError;
  }

  const Emitter emit(g, out);
  try {
    if (verify->parsed()) {
      const double a = g.delay();
      const int n = g.nodes_or(256);
      const double tol = g.tol_or(1e-8);
      const BuiltinPairs b = builtin_pairs(a);
      const KernelOperator op = KernelOperator::physical(a, verify_nu == 1 ? b.h1 : b.h0);
      const EigenPair p = make_pair(op, verify_nu == 1 ? b.e1 : b.e0, verify_nu == 1 ? -1.0 : 1.0, n, tol);
      const double mean_tol = 1e-12;
      const bool ok = p.residual < tol && (verify_nu == 0 || std::abs(p.mean) < mean_tol);
      const json j = {{"a", a},
                      {"a_pi", io::format_delay(a)},
                      {"nu", verify_nu},
                      {"nodes", n},
                      {"eta", p.eta},
                      {"residual", p.residual},
                      {"tolerance", tol},
                      {"mean", p.mean},
                      {"mean_tolerance", verify_nu == 1 ? json(mean_tol) : json(nullptr)},
                      {"verdict", ok}};
      emit.emit(j, [&](std::ostream& s) {
        s << "a,nu,nodes,eta,residual,mean,verdict\n"
          << g17(a) << ',' << verify_nu << ',' << n << ',' << g17(p.eta) << ',' << g17(p.residual) << ','
          << g17(p.mean) << ',' << (ok ? "true" : "false") << '\n';
      });
      return ok ? 0 : kVerdictFalse;
    }

    if (build->parsed()) {
      const PiecewisePotential q = build_q.build(g);
      emit.emit(io::to_json(q), [&](std::ostream& s) { io::write_potential_csv(s, q, build_points); });
      return 0;
    }

    if (charfn->parsed()) {
      const ProblemSpec spec(charfn_nu, charfn_j, charfn_q.build(g));
      std::vector<cplx> lambdas;
      if (charfn_lambdas.empty())
        for (double l : default_lambda_grid()) lambdas.push_back(l);
      else
        lambdas = io::parse_complex_list(charfn_lambdas);
      const Method m = method_from_string(charfn_method);
      const auto samples = char_fn_grid(spec, lambdas, m);
      const json j = {{"a", spec.a()},
                      {"a_pi", io::format_delay(spec.a())},
                      {"nu", spec.nu},
                      {"j", spec.j},
                      {"family", spec.q.family()},
                      {"alpha", io::to_json(spec.q.alpha())},
                      {"method", to_string(m)},
                      {"samples", io::to_json(samples)}};
      emit.emit(j, [&](std::ostream& s) { io::write_charfn_csv(s, samples); });
      return 0;
    }

    if (spectrum->parsed()) {
      const std::vector<double> w = io::parse_real_list(spectrum_window);
      if (w.size() != 4) throw InvalidInput("--window needs four numbers lo_re,hi_re,lo_im,hi_im");
      const ProblemSpec spec(spectrum_nu, spectrum_j, spectrum_q.build(g));
      LocateOptions opt;
      if (g.tol) opt.residual_tolerance = *g.tol;
      const SpectralReport r =
          locate_spectrum(spec, Rectangle(w[0], w[1], w[2], w[3]), method_from_string(spectrum_method), opt);
      emit.emit(io::to_json(r), [&](std::ostream& s) { io::write_eigenvalues_csv(s, r); });
      return r.count_consistent() ? 0 : kVerdictFalse;
    }

    if (isospec->parsed()) {
      const std::vector<cplx> alphas = io::parse_complex_list(isospec_alphas);
      const InvarianceVerdict v = isospec_check(isospec_q.build(g), alphas, parse_grid(isospec_grid),
                                                g.tol_or(1e-6), method_from_string(isospec_method));
      emit.emit(io::to_json(v), [&](std::ostream& s) { io::write_deviations_csv(s, v); });
      return v.verdict ? 0 : kVerdictFalse;
    }

    if (negative->parsed()) {
      const NegativeControlReport r = negative_control(g.delay(), io::parse_complex_list(negative_alphas),
                                                       parse_grid(negative_grid), g.nodes_or(256));
      emit.emit(io::to_json(r), [&](std::ostream& s) { io::write_deviations_csv(s, r.verdict); });
      return r.verdict.verdict ? 0 : kVerdictFalse;
    }

    if (chain->parsed()) {
      const TheoremChainReport r = verify_theorem_chain(chain_q.build(g), parse_grid(chain_grid));
      emit.emit(io::to_json(r), [&](std::ostream& s) {
        s << "name,status,value,threshold\n";
        for (const ChainLink& l : r.links)
          s << l.name << ',' << to_string(l.status) << ',' << g17(l.value) << ',' << g17(l.threshold) << '\n';
      });
      return r.all_required_pass() ? 0 : kVerdictFalse;
    }

    if (discover->parsed()) {
      const std::vector<double> range = io::parse_real_list(disc_range);
      if (range.size() != 2 || !(range[0] < range[1])) throw InvalidInput("--range needs lo,hi with lo < hi");
      const CosineBasis basis = CosineBasis::standard(disc_dim);
      std::vector<std::vector<double>> coeffs;
      if (disc_random > 0) {
        std::mt19937_64 rng(g.seed);
        std::uniform_real_distribution<double> u(range[0], range[1]);
        for (int i = 0; i < disc_random; ++i) {
          std::vector<double> c(disc_dim);
          for (double& v : c) v = u(rng);
          coeffs.push_back(std::move(c));
        }
      } else {
        coeffs = coefficient_grid(disc_dim, disc_levels, range[0], range[1]);
      }
      ScanOptions so;
      so.nodes = g.nodes_or(so.nodes);
      so.pairs_per_kernel = disc_pairs;
      std::vector<Candidate> cs = scan_kernels(basis, coeffs, so);
      if (cs.size() > static_cast<std::size_t>(disc_top)) cs.erase(cs.begin() + disc_top, cs.end());

      json j = {{"basis", "cos(k pi s)"}, {"dim", disc_dim}, {"kernels", coeffs.size()}};
      json list = json::array();
      for (const Candidate& c : cs) list.push_back(io::to_json(c));
      j["candidates"] = list;
      if (disc_polish && !cs.empty()) {
        PolishOptions po;
        po.nodes = so.nodes;
        if (g.tol) po.target = *g.tol;
        const PolishResult pr = polish_candidate(cs.front(), basis, po);
        j["polished"] = io::to_json(pr);
        cs.insert(cs.begin(), pr.candidate);
      }
      if (!cs.empty() && cs.front().residual < 1e-6) {
        const double a = g.delay();
        try {
          const PhysicalCandidate p = to_physical(cs.front(), a, g.nodes_or(256));
          j["physical"] = {{"a", a}, {"a_pi", io::format_delay(a)}, {"operator", io::to_json(p.op)},
                           {"pair", io::to_json(p.pair)}};
        } catch (const InconsistentPair& e) {
          j["physical"] = {{"error", e.what()}};
        }
      }
      emit.emit(j, [&](std::ostream& s) { io::write_candidates_csv(s, cs); });
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace delaysl::cli
