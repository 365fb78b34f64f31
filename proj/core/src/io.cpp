#include "delaysl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace delaysl::io {

namespace {

constexpr double kPi = std::numbers::pi;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, const char* what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
    throw InvalidInput(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const json& at(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("json: missing key '") + key + "'");
  return j.at(key);
}

double num(const json& j, const char* key) {
  const json& v = at(j, key);
  if (!v.is_number()) throw InvalidInput(std::string("json: '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> nums(const json& j, const char* key) {
  const json& v = at(j, key);
  if (!v.is_array()) throw InvalidInput(std::string("json: '") + key + "' must be an array");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw InvalidInput(std::string("json: '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json opt_cplx(const std::optional<cplx>& z) { return z ? to_json(*z) : json(nullptr); }

}  // namespace

// ------------------------------------------------------------------ text

double parse_delay(std::string_view s) {
  s = trim(s);
  const std::size_t p = s.find("pi");
  if (p == std::string_view::npos) return parse_number(s, "delay");
  std::string_view coef = trim(s.substr(0, p));
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  double v = coef.empty() ? 1.0 : parse_number(coef, "delay");
  std::string_view rest = trim(s.substr(p + 2));
  if (!rest.empty()) {
    if (rest.front() != '/') throw InvalidInput("cannot parse delay '" + std::string(s) + "'");
    const double d = parse_number(rest.substr(1), "delay");
    if (d == 0.0) throw InvalidInput("delay: division by zero");
    v /= d;
  }
  return v * kPi;
}

std::string format_delay(double a) { return shortest(a / kPi) + "pi"; }

cplx parse_complex(std::string_view s) {
  s = trim(s);
  if (s.empty()) throw InvalidInput("cannot parse an empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return parse_number(s, "complex number");
  const std::string_view body = s.substr(0, s.size() - 1);
  std::size_t cut = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  const std::string_view re = cut == std::string_view::npos ? std::string_view{} : body.substr(0, cut);
  std::string_view im = cut == std::string_view::npos ? body : body.substr(cut);
  im = trim(im);
  double imv = 0.0;
  if (im.empty() || im == "+")
    imv = 1.0;
  else if (im == "-")
    imv = -1.0;
  else
    imv = parse_number(im, "complex number");
  return {re.empty() ? 0.0 : parse_number(re, "complex number"), imv};
}

std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return shortest(z.real());
  std::string im = shortest(z.imag());
  if (im.front() != '-') im = "+" + im;
  return shortest(z.real()) + im + "i";
}

std::vector<cplx> parse_complex_list(std::string_view s) {
  std::vector<cplx> out;
  for (std::string_view t : split(s, ',')) out.push_back(parse_complex(t));
  return out;
}

std::vector<double> parse_real_list(std::string_view s) {
  std::vector<double> out;
  for (std::string_view t : split(s, ',')) out.push_back(parse_number(t, "number"));
  return out;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_complex(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InvalidInput("json: expected a complex number as [re, im], a number or a string");
}

double delay_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_delay(j.get<std::string>());
  throw InvalidInput("json: delay must be a number or a string such as \"0.35pi\"");
}

// ------------------------------------------------------------------ functions

json to_json(const RealFunction& f) {
  return std::visit(
      [](const auto& g) -> json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, TrigSeries>) {
          json terms = json::array();
          for (const auto& t : g.terms()) terms.push_back({t.coef, t.freq, t.phase});
          return {{"type", "trig"}, {"lo", g.lo()}, {"hi", g.hi()}, {"terms", terms}, {"label", g.label()}};
        } else if constexpr (std::is_same_v<T, SampledFunction>) {
          return {{"type", "sampled"},
                  {"breaks", g.breaks()},
                  {"points_per_panel", g.points_per_panel()},
                  {"values", g.values()}};
        } else if constexpr (std::is_same_v<T, LinearFunction>) {
          return {{"type", "linear"}, {"lo", g.lo()}, {"hi", g.hi()}, {"v_lo", g.v_lo()}, {"v_hi", g.v_hi()}};
        } else {
          return {{"type", "product-integral"},
                  {"h", to_json(g.h())},
                  {"e", to_json(g.e())},
                  {"shift", g.shift()},
                  {"scale", g.scale()}};
        }
      },
      f.variant());
}

RealFunction function_from_json(const json& j) {
  const std::string type = at(j, "type").get<std::string>();
  if (type == "trig") {
    std::vector<TrigSeries::Term> terms;
    for (const json& t : at(j, "terms")) {
      if (!t.is_array() || t.size() != 3) throw InvalidInput("json: trig term must be [coef, freq, phase]");
      terms.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
    return TrigSeries(num(j, "lo"), num(j, "hi"), std::move(terms), j.value("label", std::string{}));
  }
  if (type == "sampled") {
    const json& m = at(j, "points_per_panel");
    if (!m.is_number_integer()) throw InvalidInput("json: points_per_panel must be an integer");
    return SampledFunction(nums(j, "breaks"), m.get<int>(), nums(j, "values"));
  }
  if (type == "linear") return LinearFunction(num(j, "lo"), num(j, "hi"), num(j, "v_lo"), num(j, "v_hi"));
  if (type == "product-integral") {
    auto h = std::make_shared<const RealFunction>(function_from_json(at(j, "h")));
    auto e = std::make_shared<const RealFunction>(function_from_json(at(j, "e")));
    return ProductIntegralFunction(h, e, num(j, "shift")).scaled(num(j, "scale"));
  }
  throw InvalidInput("json: unknown function type '" + type + "'");
}

json to_json(const KernelOperator& op) {
  json j = {{"unit", op.is_unit()}, {"h", to_json(op.h())}};
  if (!op.is_unit()) j["a"] = op.a();
  return j;
}

KernelOperator operator_from_json(const json& j) {
  RealFunction h = function_from_json(at(j, "h"));
  if (j.value("unit", false)) return KernelOperator::unit(std::move(h));
  return KernelOperator::physical(delay_from_json(at(j, "a")), std::move(h));
}

json to_json(const EigenPair& p) {
  return {{"eta", p.eta},           {"e", to_json(p.e)},         {"mean", p.mean},
          {"residual", p.residual}, {"tolerance", p.tolerance}, {"multiplicity", p.multiplicity},
          {"verified", p.verified()}};
}

EigenPair pair_from_json(const json& j) {
  EigenPair p{.eta = num(j, "eta"), .e = function_from_json(at(j, "e"))};
  p.mean = num(j, "mean");
  p.residual = num(j, "residual");
  p.tolerance = j.value("tolerance", 1e-8);
  p.multiplicity = j.value("multiplicity", 1);
  return p;
}

json to_json(const PiecewisePotential& q) {
  json segs = json::array();
  for (const Segment& s : q.segments()) {
    json terms = json::array();
    for (const auto& t : s.terms) terms.push_back({{"factor", to_json(t.factor)}, {"f", to_json(t.f)}});
    segs.push_back({{"lo", s.lo}, {"hi", s.hi}, {"role", to_string(s.role)}, {"terms", terms}});
  }
  json j = {{"a", q.a()},
            {"a_pi", format_delay(q.a())},
            {"alpha", to_json(q.alpha())},
            {"family", q.family()},
            {"segments", segs}};
  if (q.info()) {
    const FamilyInfo& f = *q.info();
    json info = {{"name", f.name}, {"nu", f.nu}, {"operator", to_json(f.op)}, {"pair", to_json(f.pair)}};
    if (f.bridge)
      info["bridge"] = {{"g", to_json(f.bridge->g)}, {"value_lo", f.bridge->value_lo}, {"value_hi", f.bridge->value_hi}};
    j["info"] = info;
  }
  return j;
}

PiecewisePotential potential_from_json(const json& j) {
  const double a = delay_from_json(at(j, "a"));
  std::vector<Segment> segs;
  for (const json& s : at(j, "segments")) {
    Segment seg{num(s, "lo"), num(s, "hi"), segment_role_from_string(at(s, "role").get<std::string>()), {}};
    for (const json& t : at(s, "terms"))
      seg.terms.push_back({complex_from_json(at(t, "factor")), function_from_json(at(t, "f"))});
    segs.push_back(std::move(seg));
  }
  PiecewisePotential q(a, std::move(segs), j.contains("alpha") ? complex_from_json(j["alpha"]) : cplx(0.0),
                       j.value("family", std::string("custom")));
  if (j.contains("info")) {
    const json& i = j["info"];
    FamilyInfo f{at(i, "name").get<std::string>(), at(i, "nu").get<int>(), operator_from_json(at(i, "operator")),
                 pair_from_json(at(i, "pair")), std::nullopt};
    if (i.contains("bridge")) {
      const json& b = i["bridge"];
      f.bridge = BridgeFunction{function_from_json(at(b, "g")), num(b, "value_lo"), num(b, "value_hi")};
    }
    q.set_info(std::move(f));
  }
  return q;
}

// ------------------------------------------------------------------ reports

json to_json(const W21Report& r) {
  json gaps = json::array();
  for (const auto& g : r.junction_gaps) gaps.push_back({{"x", g.x}, {"gap", g.gap}});
  return {{"continuous", r.continuous},
          {"junction_gaps", gaps},
          {"derivative_l2", std::isfinite(r.derivative_l2) ? json(r.derivative_l2) : json("inf")}};
}

json to_json(const WFunction& w) {
  json xs = json::array(), vs = json::array();
  for (std::size_t i = 0; i < w.rule().size(); ++i) {
    xs.push_back(w.rule().nodes[i]);
    vs.push_back(to_json(w.samples()[i]));
  }
  return {{"nu", w.nu()}, {"breaks", w.breaks()}, {"nodes", xs}, {"values", vs}};
}

json to_json(const std::vector<CharFnSample>& samples) {
  json out = json::array();
  for (const CharFnSample& s : samples) {
    json j = {{"lambda", to_json(s.lambda)}, {"normalization", s.normalization}};
    j["ode"] = opt_cplx(s.ode);
    j["repr"] = opt_cplx(s.repr);
    j["discrepancy"] = s.discrepancy ? json(*s.discrepancy) : json(nullptr);
    out.push_back(j);
  }
  return out;
}

json to_json(const SpectralReport& r) {
  auto rect = [](const Rectangle& w) {
    return json{{"re", {w.lo_re, w.hi_re}}, {"im", {w.lo_im, w.hi_im}}};
  };
  json zs = json::array(), ev = json::array();
  for (const RhoZero& z : r.rho_zeros) zs.push_back({{"rho", to_json(z.rho)}, {"multiplicity", z.multiplicity}});
  for (const Eigenvalue& e : r.eigenvalues)
    ev.push_back({{"lambda", to_json(e.lambda)}, {"multiplicity", e.multiplicity}, {"residual", e.residual}});
  return {{"nu", r.nu},
          {"j", r.j},
          {"method", to_string(r.method)},
          {"window", rect(r.window)},
          {"search", rect(r.search)},
          {"rho_count", r.rho_count},
          {"count_consistent", r.count_consistent()},
          {"rho_zeros", zs},
          {"eigenvalues", ev}};
}

json to_json(const InvarianceVerdict& v) {
  json alphas = json::array(), samples = json::array(), devs = json::array();
  for (cplx a : v.alphas) alphas.push_back(to_json(a));
  for (const IsospecSample& s : v.samples)
    samples.push_back({{"alpha", to_json(s.alpha)},
                       {"j", s.j},
                       {"lambda", s.lambda},
                       {"normalization", s.normalization},
                       {"ode", opt_cplx(s.ode)},
                       {"repr", opt_cplx(s.repr)}});
  for (const PointDeviation& d : v.deviations)
    devs.push_back({{"j", d.j}, {"lambda", d.lambda}, {"deviation", d.deviation}});
  return {{"family", v.family},
          {"nu", v.nu},
          {"method", to_string(v.method)},
          {"alphas", alphas},
          {"grid", v.grid},
          {"samples", samples},
          {"deviations", devs},
          {"max_deviation", v.max_deviation},
          {"method_discrepancy", v.method_discrepancy},
          {"threshold", v.threshold},
          {"verdict", v.verdict}};
}

json to_json(const NegativeControlReport& r) {
  json d = json::array();
  for (cplx z : r.omega_differences) d.push_back(to_json(z));
  return {{"a", r.a},
          {"a_pi", format_delay(r.a)},
          {"eta", r.eta},
          {"mean_of_e", r.mean_of_e},
          {"proof_integral", r.proof_integral},
          {"w1_invariance", r.w1_invariance},
          {"delta_deviation", r.delta_deviation},
          {"omega_differences", d},
          {"omega_gap", r.omega_gap},
          {"verdict", to_json(r.verdict)}};
}

json to_json(const TheoremChainReport& r) {
  json links = json::array();
  for (const ChainLink& l : r.links)
    links.push_back({{"name", l.name}, {"status", to_string(l.status)}, {"value", l.value}, {"threshold", l.threshold}});
  return {{"family", r.family},
          {"nu", r.nu},
          {"alpha", to_json(r.alpha)},
          {"links", links},
          {"all_required_pass", r.all_required_pass()}};
}

json to_json(const Candidate& c) {
  return {{"coefficients", c.coefficients}, {"chi", to_json(c.chi)}, {"eta", c.eta},
          {"mean", c.mean},                 {"residual", c.residual}, {"index", c.index}};
}

json to_json(const PolishResult& r) {
  json log = json::array();
  for (const PolishStep& s : r.log)
    log.push_back({{"iteration", s.iteration}, {"objective", s.objective}, {"step", s.step}});
  return {{"candidate", to_json(r.candidate)}, {"log", log}, {"converged", r.converged}, {"stagnated", r.stagnated}};
}

// ------------------------------------------------------------------ csv

void write_charfn_csv(std::ostream& out, const std::vector<CharFnSample>& samples) {
  out << "re_lambda,im_lambda,re_delta,im_delta,normalization,method\n";
  auto row = [&](const CharFnSample& s, cplx d, const char* m) {
    out << g17(s.lambda.real()) << ',' << g17(s.lambda.imag()) << ',' << g17(d.real()) << ',' << g17(d.imag())
        << ',' << g17(s.normalization) << ',' << m << '\n';
  };
  for (const CharFnSample& s : samples) {
    if (s.ode) row(s, *s.ode, "ode");
    if (s.repr) row(s, *s.repr, "repr");
  }
}

void write_eigenvalues_csv(std::ostream& out, const SpectralReport& r) {
  out << "re_lambda,im_lambda,multiplicity,residual\n";
  for (const Eigenvalue& e : r.eigenvalues)
    out << g17(e.lambda.real()) << ',' << g17(e.lambda.imag()) << ',' << e.multiplicity << ',' << g17(e.residual)
        << '\n';
}

void write_deviations_csv(std::ostream& out, const InvarianceVerdict& v) {
  out << "family,j,lambda,deviation\n";
  for (const PointDeviation& d : v.deviations)
    out << v.family << ',' << d.j << ',' << g17(d.lambda) << ',' << g17(d.deviation) << '\n';
}

void write_candidates_csv(std::ostream& out, const std::vector<Candidate>& cs) {
  std::size_t dim = 0;
  for (const Candidate& c : cs) dim = std::max(dim, c.coefficients.size());
  out << "eta,mean,residual,index";
  for (std::size_t k = 0; k < dim; ++k) out << ",c" << k;
  out << '\n';
  for (const Candidate& c : cs) {
    out << g17(c.eta) << ',' << g17(c.mean) << ',' << g17(c.residual) << ',' << c.index;
    for (double v : c.coefficients) out << ',' << g17(v);
    out << '\n';
  }
}

void write_potential_csv(std::ostream& out, const PiecewisePotential& q, int n) {
  out << "x,re_q,im_q\n";
  for (const Segment& s : q.segments())
    for (int i = 0; i < n; ++i) {
      const double x = s.lo + (s.hi - s.lo) * i / (n - 1);
      const cplx v = i == n - 1 ? q.left_limit(x) : q.value(x);
      out << g17(x) << ',' << g17(v.real()) << ',' << g17(v.imag()) << '\n';
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("malformed json in '" + path + "': " + e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << content;
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

}  // namespace delaysl::io
