#include "pdmq/models.hpp"

#include <cmath>
#include <json.hpp>
#include <limits>

#include "pdmq/error.hpp"

namespace pdmq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ModelSpec> make_registry() {
  using EK = EndpointKind;
  const ParameterSpec L{"L", "nonlinearity (dimensionless lambda)", 1.0, true};
  return {
      {"quasi-harmonic-k",
       "quasi-harmonic oscillator with curvature k; k < 0 is the Mathews-Lakshmanan case (alias l = -k)",
       {{"k", "curvature (dimensionless kappa)", 0.5, false}},
       "1/(1 - k*x^2)",
       "x^2/(2*(1 - k*x^2))",
       "R for k <= 0, (-1/sqrt(k), 1/sqrt(k)) for k > 0",
       [](const Bindings& b) {
         const double k = b.at("k");
         if (k <= 0) return Domain::real_line();
         const double r = 1.0 / std::sqrt(k);
         return Domain::interval(-r, r, EK::SingularMassBlowup, EK::SingularMassBlowup);
       }},
      {"arcsinh-osc", "mass 1/(1 + L^2 x^2) with arcsinh-squared potential", {L}, "1/(1 + L^2*x^2)",
       "arcsinh(L*x)^2/(2*L^2)", "R", [](const Bindings&) { return Domain::real_line(); }},
      {"log-osc", "mass 1/(1 + L x)^2 with log-squared potential", {L}, "1/(1 + L*x)^2",
       "log(1 + L*x)^2/(2*L^2)", "(-1/L, inf)",
       [](const Bindings& b) {
         return Domain::interval(-1.0 / b.at("L"), kInf, EK::SingularMassBlowup, EK::Infinite);
       }},
      {"arctanh-osc", "mass 1/(1 - L^2 x^2)^2 with arctanh-squared potential", {L}, "1/(1 - L^2*x^2)^2",
       "arctanh(L*x)^2/(2*L^2)", "(-1/L, 1/L)",
       [](const Bindings& b) {
         const double r = 1.0 / b.at("L");
         return Domain::interval(-r, r, EK::SingularMassBlowup, EK::SingularMassBlowup);
       }},
  };
}

}  // namespace

const std::vector<ModelSpec>& model_registry() {
  static const std::vector<ModelSpec> registry = make_registry();
  return registry;
}

const ModelSpec& find_model(const std::string& name) {
  for (const ModelSpec& m : model_registry())
    if (m.name == name) return m;
  throw InvalidArgument("unknown model '" + name + "'");
}

ProblemDef builtin(const std::string& name, const Bindings& params) {
  const ModelSpec& spec = find_model(name);
  Bindings given = params;
  if (name == "quasi-harmonic-k") {
    if (auto it = given.find("l"); it != given.end()) {
      if (given.count("k")) throw InvalidArgument("give either k or l, not both");
      given["k"] = -it->second;
      given.erase(it);
    }
  }
  Bindings b;
  for (const ParameterSpec& ps : spec.parameters) {
    auto it = given.find(ps.name);
    const double value = it == given.end() ? ps.default_value : it->second;
    if (!std::isfinite(value) || (ps.positive && !(value > 0.0)))
      throw InvalidArgument("inadmissible " + ps.name + " = " + std::to_string(value) + " for " + name);
    b[ps.name] = value;
    if (it != given.end()) given.erase(it);
  }
  if (!given.empty()) throw InvalidArgument("unknown parameter '" + given.begin()->first + "' for " + name);

  ProblemDef p;
  p.name = name;
  p.mass = parse_expr(spec.mass);
  p.potential = parse_expr(spec.potential);
  p.bindings = b;
  p.domain = spec.domain_rule(b);
  return p;
}

std::string models_json() {
  nlohmann::json out = nlohmann::json::array();
  for (const ModelSpec& m : model_registry()) {
    nlohmann::json params = nlohmann::json::array();
    for (const ParameterSpec& p : m.parameters) {
      params.push_back({{"name", p.name},
                        {"meaning", p.meaning},
                        {"default", p.default_value},
                        {"range", p.positive ? "(0, inf)" : "(-inf, inf)"}});
    }
    out.push_back({{"name", m.name},
                   {"summary", m.summary},
                   {"mass", m.mass},
                   {"potential", m.potential},
                   {"domain", m.domain},
                   {"parameters", params}});
  }
  return out.dump(2);
}

ScalingMap::ScalingMap(const Units& u) : units_(u) {
  if (!(u.hbar > 0.0 && u.m0 > 0.0 && u.alpha > 0.0))
    throw InvalidArgument("hbar, m0 and alpha must be positive");
  length_ = std::sqrt(u.hbar / (u.m0 * u.alpha));
}

double ScalingMap::coupling_from(double value, CouplingKind kind) const {
  return kind == CouplingKind::Lambda ? value / length_ : value / (length_ * length_);
}

double ScalingMap::dimensionless_from(double coupling, CouplingKind kind) const {
  return kind == CouplingKind::Lambda ? coupling * length_ : coupling * length_ * length_;
}

Dimensionless to_dimensionless(const Units& u, double coupling, CouplingKind kind) {
  Dimensionless d;
  d.map = ScalingMap(u);
  d.value = d.map.dimensionless_from(coupling, kind);
  return d;
}

double from_dimensionless(const ScalingMap& map, double value, CouplingKind kind) {
  return map.coupling_from(value, kind);
}

}  // namespace pdmq
