#include "pdmq/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <sstream>

#include "pdmq/classical.hpp"
#include "pdmq/error.hpp"
#include "pdmq/models.hpp"
#include "pdmq/quantize.hpp"
#include "pdmq/spectral.hpp"

namespace pdmq::cli {

using json = nlohmann::ordered_json;

namespace {

int log_level() {
  const char* env = std::getenv("PDMQ_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void log(std::ostream& err, int level, const std::string& msg) {
  if (level <= log_level()) err << "pdmq: " << msg << '\n';
}

double parse_number(const std::string& text, const Bindings& bindings = {}) {
  const std::string t = text;
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  const Expr e = parse_expr(t);
  if (depends_on_x(e)) throw InvalidArgument("'" + t + "' must not depend on x");
  return eval_expr(e, 0.0, bindings);
}

Bindings parse_sets(const std::vector<std::string>& sets) {
  Bindings b;
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--set expects name=value, got '" + s + "'");
    b[s.substr(0, eq)] = parse_number(s.substr(eq + 1));
  }
  return b;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
  }
  return out;
}

std::optional<ScalingMap> parse_units(const std::string& text) {
  if (text.empty()) return std::nullopt;
  Units u;
  for (const std::string& kv : split(text, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--units expects hbar=..,m0=..,alpha=..");
    const std::string key = kv.substr(0, eq);
    const double value = parse_number(kv.substr(eq + 1));
    if (key == "hbar") u.hbar = value;
    else if (key == "m0") u.m0 = value;
    else if (key == "alpha") u.alpha = value;
    else throw InvalidArgument("unknown unit '" + key + "'");
  }
  return ScalingMap(u);
}

double max_abs(const Expr& e, const ProblemDef& p, int points) {
  double worst = 0.0;
  for (double x : interior_samples(p.domain, points)) worst = std::max(worst, std::abs(eval_expr(e, x, p.bindings)));
  return worst;
}

std::string shown(const Expr& e, const Bindings& b) { return to_string(simplify(substitute(e, b))); }

json config_json(const RunConfig& c, const ProblemDef& p) {
  json j;
  j["command"] = c.command;
  if (!c.model.empty()) {
    j["model"] = c.model;
  } else {
    j["m"] = c.mass;
    j["V"] = c.potential.empty() ? "0" : c.potential;
  }
  auto bound = [](double v) { return std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : "-inf"); };
  j["domain"] = {bound(p.domain.lower), bound(p.domain.upper)};
  j["domain_kinds"] = {std::string(to_string(p.domain.lower_kind)), std::string(to_string(p.domain.upper_kind))};
  j["params"] = json::object();
  for (const auto& [name, value] : p.bindings) j["params"][name] = value;
  j["N"] = c.N;
  if (!c.N_list.empty()) j["N_list"] = c.N_list;
  j["k"] = c.k;
  j["dt"] = c.dt;
  j["T"] = c.T;
  if (c.y_cut) j["y_cut"] = *c.y_cut;
  if (!c.schemes.empty()) j["schemes"] = c.schemes;
  j["route"] = c.route;
  j["format"] = c.format;
  if (!c.units.empty()) j["units"] = c.units;
  return j;
}

// Writes to -o when given, else to out.
void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw Error("cannot write '" + c.output + "'");
  f << text;
}

std::string csv_header(const json& config) { return "# config: " + config.dump() + "\n"; }

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) a.push_back(v[i]); else a.push_back(nullptr);
  }
  return a;
}

SolveRequest request_for(const RunConfig& c, const std::string& scheme) {
  SolveRequest r;
  r.scheme = OrderingScheme::parse(scheme);
  r.k = c.k;
  r.N = c.N;
  r.N_list = c.N_list;
  r.y_cut = c.y_cut;
  if (c.route != "direct" && c.route != "arclength") throw InvalidArgument("--route is direct or arclength");
  r.transformed = c.route == "arclength";
  return r;
}

json diagnostics(const ProblemDef& p) {
  const KillingData kd = derive_killing(p);
  json d;
  d["killing_residual"] = max_abs(kd.killing_residual, p, 100);
  d["measure_residual"] = max_abs(kd.measure_residual, p, 100);
  return d;
}

int cmd_list(const RunConfig& c, std::ostream& out) {
  if (c.format == "csv") {
    std::ostringstream s;
    s << "name,parameters,mass,potential,domain\n";
    for (const ModelSpec& m : model_registry()) {
      std::string params;
      for (const ParameterSpec& p : m.parameters) params += (params.empty() ? "" : ";") + p.name;
      s << m.name << ',' << params << ",\"" << m.mass << "\",\"" << m.potential << "\",\"" << m.domain << "\"\n";
    }
    emit(c, s.str(), out);
  } else {
    emit(c, models_json() + "\n", out);
  }
  return 0;
}

int cmd_derive(const RunConfig& c, std::ostream& out) {
  const ProblemDef p = resolve_problem(c);
  const KillingData kd = derive_killing(p);
  const NoetherMomentum nm = noether_momentum(p);
  const OperatorCoefficients noe = build_noether(p, 1.0);
  const OperatorCoefficients lb = build_laplace_beltrami(p, 1.0);
  const Bindings& b = p.bindings;

  json r;
  r["m"] = shown(p.mass, b);
  r["V"] = shown(p.potential, b);
  r["f"] = shown(kd.killing_component, b);
  r["rho"] = shown(kd.density, b);
  r["P_velocity"] = shown(nm.velocity_coeff, b) + "*v";
  r["P_phase"] = shown(nm.momentum_coeff, b) + "*p";
  auto coeffs = [&](const OperatorCoefficients& op) {
    return json{{"a", shown(op.a, b)}, {"b", shown(op.b, b)}, {"c", shown(op.c, b)}, {"weight", shown(op.weight, b)}};
  };
  r["noether"] = coeffs(noe);
  r["laplace_beltrami"] = coeffs(lb);

  json d = diagnostics(p);
  d["noether_lb_distance"] = coefficient_distance(noe, lb, interior_samples(p.domain, 100));

  const json config = config_json(c, p);
  if (c.format == "csv") {
    std::ostringstream s;
    s << csv_header(config) << "quantity,value\n";
    for (const auto& [key, value] : r.items()) {
      if (value.is_string()) {
        s << key << ",\"" << value.get<std::string>() << "\"\n";
      } else {
        for (const auto& [sub, v] : value.items()) s << key << '.' << sub << ",\"" << v.get<std::string>() << "\"\n";
      }
    }
    for (const auto& [key, value] : d.items()) s << key << ',' << value.dump() << '\n';
    emit(c, s.str(), out);
  } else {
    emit(c, json{{"config", config}, {"results", r}, {"diagnostics", d}}.dump(2) + "\n", out);
  }
  return 0;
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  const ProblemDef p = resolve_problem(c);
  const std::string scheme = c.schemes.empty() ? "noether" : c.schemes.front();
  const SolveOutcome o = solve_problem(p, request_for(c, scheme));
  const std::optional<ScalingMap> units = parse_units(c.units);
  const Spectrum& s = o.spectrum;

  if (!c.eigenfunctions.empty()) {
    std::ofstream f(c.eigenfunctions);
    if (!f) throw Error("cannot write '" + c.eigenfunctions + "'");
    write_eigenfunctions_csv(s, f);
  }

  const json config = config_json(c, p);
  if (c.format == "csv") {
    std::ostringstream t;
    t << csv_header(config) << (units ? "n,e,err,E\n" : "n,e,err\n");
    for (Eigen::Index n = 0; n < s.eigenvalues.size(); ++n) {
      t << n << ',' << json(s.eigenvalues[n]).dump() << ','
        << (std::isfinite(s.errors[n]) ? json(s.errors[n]).dump() : "");
      if (units) t << ',' << json(units->energy_from(s.eigenvalues[n])).dump();
      t << '\n';
    }
    emit(c, t.str(), out);
    return 0;
  }

  json r;
  r["scheme"] = OrderingScheme::parse(scheme).name();
  r["eigenvalues"] = vec(s.eigenvalues);
  r["errors"] = vec(s.errors);
  if (units) {
    Eigen::VectorXd E = s.eigenvalues.unaryExpr([&](double e) { return units->energy_from(e); });
    r["energies"] = vec(E);
  }
  r["N"] = s.grid.N;
  r["N_list"] = s.N_list;
  r["extrapolated"] = s.extrapolated;
  r["monotone"] = s.monotone;
  r["box"] = {{"xL", o.box.xL}, {"xR", o.box.xR}, {"yL", o.box.yL}, {"yR", o.box.yR}};
  json d = diagnostics(p);
  d["hermiticity_residual"] = o.hermiticity;
  emit(c, json{{"config", config}, {"results", r}, {"diagnostics", d}}.dump(2) + "\n", out);
  return 0;
}

int cmd_classical(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ProblemDef p = resolve_problem(c);
  const Trajectory tr = integrate(p, {c.x0, c.v0, 0.0}, c.dt, c.T);
  const ConservationReport rep = conservation_report(p, tr);

  json r;
  r["acceleration"] = to_string(simplify(substitute(acceleration(p), p.bindings)));
  r["samples"] = tr.size();
  r["exited"] = tr.exited;
  r["energy_drift"] = rep.energy_drift;
  r["noether_drift"] = rep.noether_drift ? json(*rep.noether_drift) : json(nullptr);
  try {
    r["period"] = measure_period(tr);
  } catch (const Error& e) {
    r["period"] = nullptr;
    log(err, 2, e.what());
  }
  const json config = config_json(c, p);
  json d;
  d["final_state"] = {{"t", tr.t.back()}, {"x", tr.x.back()}, {"v", tr.v.back()}};

  if (c.format == "csv") {
    std::ostringstream t;
    t << csv_header(config);
    write_trajectory_csv(p, tr, t);
    emit(c, t.str(), out);
  } else {
    if (!c.output.empty()) {
      std::ofstream f(c.output + ".csv");
      write_trajectory_csv(p, tr, f);
      r["trajectory"] = c.output + ".csv";
    }
    emit(c, json{{"config", config}, {"results", r}, {"diagnostics", d}}.dump(2) + "\n", out);
  }
  if (tr.exited) {
    log(err, 0, "trajectory left the domain at t = " + std::to_string(tr.t.back()));
    return 3;
  }
  return 0;
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
  const ProblemDef p = resolve_problem(c);
  const std::vector<std::string> schemes =
      c.schemes.empty() ? std::vector<std::string>{"noether", "vonroos:0,-1,0", "vonroos:-0.5,0,-0.5"} : c.schemes;
  std::vector<Spectrum> spectra;
  for (const std::string& s : schemes) spectra.push_back(solve_problem(p, request_for(c, s)).spectrum);

  const json config = config_json(c, p);
  if (c.format == "csv") {
    std::ostringstream t;
    t << csv_header(config) << "n,scheme,e,err\n";
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      for (Eigen::Index n = 0; n < spectra[i].eigenvalues.size(); ++n) {
        t << n << ",\"" << OrderingScheme::parse(schemes[i]).name() << "\"," << json(spectra[i].eigenvalues[n]).dump()
          << ',' << (std::isfinite(spectra[i].errors[n]) ? json(spectra[i].errors[n]).dump() : "") << '\n';
      }
    }
    emit(c, t.str(), out);
    return 0;
  }

  json cols = json::array();
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    cols.push_back({{"scheme", OrderingScheme::parse(schemes[i]).name()},
                    {"eigenvalues", vec(spectra[i].eigenvalues)},
                    {"errors", vec(spectra[i].errors)}});
  }
  json pairs = json::array();
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    for (std::size_t j = i + 1; j < schemes.size(); ++j) {
      const Eigen::VectorXd diff = spectra[i].eigenvalues - spectra[j].eigenvalues;
      const Eigen::VectorXd bars = spectra[i].errors + spectra[j].errors;
      json distinct = json::array();
      for (Eigen::Index n = 0; n < diff.size(); ++n) {
        if (std::isfinite(bars[n])) distinct.push_back(std::abs(diff[n]) > 10.0 * bars[n]);
        else distinct.push_back(nullptr);
      }
      pairs.push_back({{"schemes", {OrderingScheme::parse(schemes[i]).name(), OrderingScheme::parse(schemes[j]).name()}},
                       {"difference", vec(diff)},
                       {"distinct", distinct}});
    }
  }
  emit(c, json{{"config", config}, {"results", {{"columns", cols}, {"pairs", pairs}}}, {"diagnostics", diagnostics(p)}}
                  .dump(2) + "\n",
       out);
  return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.param.empty()) throw InvalidArgument("sweep needs --param");
  std::vector<double> values = c.values;
  if (values.empty()) {
    if (!c.from || !c.to || !c.step || !(*c.step > 0) || *c.to < *c.from)
      throw InvalidArgument("sweep needs --values or --from/--to/--step with step > 0");
    const auto count = static_cast<long>(std::floor((*c.to - *c.from) / *c.step + 1e-9));
    for (long i = 0; i <= count; ++i) {
      double v = *c.from + i * *c.step;
      if (std::abs(v) < 1e-12 * *c.step) v = 0.0;
      values.push_back(v);
    }
  }
  const std::string scheme = c.schemes.empty() ? "noether" : c.schemes.front();

  std::ostringstream t;
  json points = json::array();
  int failures = 0;
  json config;
  for (double v : values) {
    try {
      const ProblemDef p = resolve_problem(c, {{c.param, v}});
      if (config.is_null()) config = config_json(c, p);
      const Spectrum s = solve_problem(p, request_for(c, scheme)).spectrum;
      for (Eigen::Index n = 0; n < s.eigenvalues.size(); ++n) {
        t << json(v).dump() << ',' << n << ',' << json(s.eigenvalues[n]).dump() << ','
          << (std::isfinite(s.errors[n]) ? json(s.errors[n]).dump() : "") << '\n';
      }
      points.push_back({{"param", v}, {"eigenvalues", vec(s.eigenvalues)}, {"errors", vec(s.errors)}});
      log(err, 2, c.param + " = " + std::to_string(v) + " done");
    } catch (const Error& e) {
      ++failures;
      log(err, 0, c.param + " = " + std::to_string(v) + " failed: " + e.what());
      points.push_back({{"param", v}, {"error", e.what()}});
    }
  }
  if (config.is_null()) config = json{{"command", c.command}, {"param", c.param}};
  config["param"] = c.param;
  if (c.format == "csv") {
    emit(c, csv_header(config) + "param,n,e_n,err\n" + t.str(), out);
  } else {
    emit(c, json{{"config", config}, {"results", {{"points", points}}}, {"diagnostics", {{"failures", failures}}}}.dump(2) +
                "\n",
         out);
  }
  return failures == 0 ? 0 : 4;
}

void add_problem_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--model", c.model, "built-in model name");
  sub->add_option("--m", c.mass, "inline mass expression");
  sub->add_option("--V", c.potential, "inline potential expression");
  sub->add_option("--domain", c.domain, "inline domain \"a,b\" (inf allowed)");
  sub->add_option("--set", c.sets, "parameter binding name=value (repeatable)");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("-o,--output", c.output, "output file (default stdout)");
}

void add_spectral_options(CLI::App* sub, RunConfig& c, double& y_cut) {
  sub->add_option("-N", c.N, "interior grid points")->check(CLI::PositiveNumber);
  sub->add_option("--N-list", c.N_list, "grid sizes for refinement")->delimiter(',');
  sub->add_option("-k", c.k, "number of eigenvalues")->check(CLI::PositiveNumber);
  sub->add_option("--y-cut", y_cut, "arclength half-width of the box")->check(CLI::PositiveNumber);
  sub->add_option("--route", c.route, "direct or arclength");
  sub->add_option("--units", c.units, "hbar=..,m0=..,alpha=.. to report E = hbar alpha e");
}

}  // namespace

ProblemDef resolve_problem(const RunConfig& c, const Bindings& extra) {
  Bindings b = parse_sets(c.sets);
  for (const auto& [name, value] : extra) b[name] = value;
  const bool inline_given = !c.mass.empty() || !c.potential.empty() || !c.domain.empty();
  if (!c.model.empty() && inline_given) throw InvalidArgument("--model excludes --m/--V/--domain");
  if (!c.model.empty()) return builtin(c.model, b);
  if (c.mass.empty()) throw InvalidArgument("give --model or --m");

  ProblemDef p;
  p.name = "inline";
  p.mass = parse_expr(c.mass);
  p.potential = parse_expr(c.potential.empty() ? "0" : c.potential);
  std::vector<std::string> bounds;
  if (!c.domain.empty()) {
    bounds = split(c.domain, ',');
    if (bounds.size() != 2) throw InvalidArgument("--domain expects \"a,b\"");
  }
  std::set<std::string> free = free_parameters(p.mass);
  for (const std::string& n : free_parameters(p.potential)) free.insert(n);
  for (const std::string& t : bounds)
    if (t != "inf" && t != "+inf" && t != "-inf")
      for (const std::string& n : free_parameters(parse_expr(t))) free.insert(n);
  Bindings used;
  for (const std::string& n : free) {
    auto it = b.find(n);
    if (it == b.end()) throw UnboundParameter(n);
    used[n] = it->second;
  }
  for (const auto& [name, value] : b)
    if (!free.count(name)) throw InvalidArgument("parameter '" + name + "' does not occur in --m, --V or --domain");
  p.bindings = used;

  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  if (!bounds.empty()) {
    lo = parse_number(bounds[0], used);
    hi = parse_number(bounds[1], used);
  }
  p.domain = classify_domain(lo, hi, p.mass, p.bindings);
  p.validate();
  return p;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pdmq: position-dependent-mass quantization toolkit"};
  app.require_subcommand(1);
  RunConfig c;
  double y_cut = 0.0, from = 0.0, to = 0.0, step = 0.0;
  std::string scheme;
  std::vector<std::string> schemes;

  auto* list = app.add_subcommand("list-models", "describe the built-in models");
  list->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv"}));
  list->add_option("-o,--output", c.output);

  auto* derive = app.add_subcommand("derive", "Killing field, measure, Noether momentum and Hamiltonian");
  add_problem_options(derive, c);

  auto* solve = app.add_subcommand("solve", "low-lying spectrum");
  add_problem_options(solve, c);
  add_spectral_options(solve, c, y_cut);
  solve->add_option("--scheme", scheme, "noether | lb | vonroos:a1,a2,a3");
  solve->add_option("--eigenfunctions", c.eigenfunctions, "CSV file for the eigenfunctions");

  auto* classical = app.add_subcommand("classical", "classical trajectory, conservation and period");
  add_problem_options(classical, c);
  classical->add_option("--dt", c.dt)->check(CLI::PositiveNumber);
  classical->add_option("-T", c.T)->check(CLI::PositiveNumber);
  classical->add_option("--x0", c.x0, "initial position");
  classical->add_option("--v0", c.v0, "initial velocity");

  auto* compare = app.add_subcommand("compare", "spectra under several orderings");
  add_problem_options(compare, c);
  add_spectral_options(compare, c, y_cut);
  compare->add_option("--scheme", schemes, "scheme to include (repeatable)");

  auto* sweep = app.add_subcommand("sweep", "eigenvalues against one parameter");
  add_problem_options(sweep, c);
  add_spectral_options(sweep, c, y_cut);
  sweep->add_option("--scheme", scheme, "noether | lb | vonroos:a1,a2,a3");
  sweep->add_option("--param", c.param, "parameter to vary")->required();
  sweep->add_option("--values", c.values, "explicit values")->delimiter(',');
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--step", step);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  for (CLI::App* sub : app.get_subcommands()) c.command = sub->get_name();
  for (CLI::App* sub : {solve, compare, sweep}) {
    if (sub->parsed() && sub->count("--y-cut")) c.y_cut = y_cut;
  }
  if (sweep->parsed()) {
    if (sweep->count("--from")) c.from = from;
    if (sweep->count("--to")) c.to = to;
    if (sweep->count("--step")) c.step = step;
  }
  if (!scheme.empty()) c.schemes = {scheme};
  if (!schemes.empty()) c.schemes = schemes;

  try {
    if (list->parsed()) return cmd_list(c, out);
    if (derive->parsed()) return cmd_derive(c, out);
    if (solve->parsed()) return cmd_solve(c, out);
    if (classical->parsed()) return cmd_classical(c, out, err);
    if (compare->parsed()) return cmd_compare(c, out);
    if (sweep->parsed()) return cmd_sweep(c, out, err);
  } catch (const Error& e) {
    log(err, 0, std::string("error: ") + e.what());
    return 2;
  }
  return 1;
}

}  // namespace pdmq::cli
