#pragma once

// Built-in dimensionless models and the scaling to dimensionful units.

#include <functional>
#include <string>
#include <vector>

#include "pdmq/geometry.hpp"

namespace pdmq {

struct ParameterSpec {
  std::string name;
  std::string meaning;
  double default_value = 0.0;
  bool positive = false;  // admissible range: (0, inf) if set, else all reals
};

struct ModelSpec {
  std::string name;
  std::string summary;
  std::vector<ParameterSpec> parameters;
  std::string mass;
  std::string potential;
  std::string domain;  // readable domain rule
  std::function<Domain(const Bindings&)> domain_rule;
};

const std::vector<ModelSpec>& model_registry();
const ModelSpec& find_model(const std::string& name);

/// Instantiates a model. quasi-harmonic-k also accepts `l` as -k.
ProblemDef builtin(const std::string& name, const Bindings& params = {});

/// JSON array describing every model and its parameters.
std::string models_json();

struct Units {
  double hbar = 1.0;
  double m0 = 1.0;
  double alpha = 1.0;
};

enum class CouplingKind { Lambda, Kappa };

/// x = sqrt(hbar/(m0 alpha)) x~, lambda = sqrt(m0 alpha/hbar) L,
/// kappa = (m0 alpha/hbar) k~, E = hbar alpha e.
class ScalingMap {
 public:
  ScalingMap() = default;
  explicit ScalingMap(const Units& u);

  const Units& units() const { return units_; }
  double length() const { return length_; }

  double x_from(double x_tilde) const { return length_ * x_tilde; }
  double x_tilde_from(double x) const { return x / length_; }
  double energy_from(double e) const { return units_.hbar * units_.alpha * e; }
  double e_from(double energy) const { return energy / (units_.hbar * units_.alpha); }
  double coupling_from(double dimensionless, CouplingKind kind) const;
  double dimensionless_from(double coupling, CouplingKind kind) const;

 private:
  Units units_;
  double length_ = 1.0;
};

struct Dimensionless {
  double value = 0.0;  // L or k~
  ScalingMap map;
};

Dimensionless to_dimensionless(const Units& u, double coupling, CouplingKind kind);
double from_dimensionless(const ScalingMap& map, double value, CouplingKind kind);

}  // namespace pdmq
