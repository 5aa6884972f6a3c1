#include "gdf/state_space.hpp"

#include <fstream>
#include <sstream>

namespace gdf {

void StateSpace::validate() const {
  const int n = size();
  if (n <= 0) throw ConfigError("state space must contain at least one state");
  if (phi.size() != n) throw ConfigError("phi has " + std::to_string(phi.size()) + " entries, expected " + std::to_string(n));
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw ConfigError("label count does not match state count");
  for (int i = 0; i < n; ++i) {
    const std::string name = labels.empty() ? ("state " + std::to_string(i)) : ("state '" + labels[i] + "'");
    if (!(m[i] > 0.0)) throw ConfigError(name + ": m must be positive, got " + std::to_string(m[i]));
    if (!(phi[i] > 0.0) || phi[i] > 1.0)
      throw ConfigError(name + ": phi must lie in (0,1], got " + std::to_string(phi[i]));
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j]) throw ConfigError("duplicate state label '" + labels[i] + "'");
  // Sigma-finiteness is automatic on a finite space; still assert the mass is
  // a usable number.
  const double total = integrate(phi, *this);
  if (!(total > 0.0) || !std::isfinite(total))
    throw ConfigError("total phi-mass must be finite and positive");
}

StateSpace StateSpace::uniform(int n) {
  StateSpace sp;
  sp.m = Vector::Ones(n);
  sp.phi = Vector::Ones(n);
  sp.validate();
  return sp;
}

StateSpace StateSpace::make(Vector m, Vector phi) {
  StateSpace sp;
  sp.m = std::move(m);
  sp.phi = std::move(phi);
  sp.validate();
  return sp;
}

StateFunction StateFunction::constant(int n, double value) {
  return StateFunction(Vector::Constant(n, value));
}

StateFunction StateFunction::indicator(int n, const std::vector<int>& support) {
  Vector v = Vector::Zero(n);
  for (int i : support) {
    if (i < 0 || i >= n) throw std::out_of_range("indicator support index " + std::to_string(i));
    v[i] = 1.0;
  }
  return StateFunction(std::move(v));
}

double StateFunction::operator()(int i) const {
  if (i == size()) return 0.0;  // cemetery
  if (i < 0 || i > size()) throw std::out_of_range("state index " + std::to_string(i));
  return values_[i];
}

static void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + ": dimension " + std::to_string(got) +
                                " does not match state count " + std::to_string(want));
}

double integrate(const Vector& f, const StateSpace& sp) {
  check_dim(f.size(), sp.m.size(), "integrate");
  Vector terms = f.cwiseProduct(sp.m);
  return neumaier_sum(terms);
}

double integrate(const StateFunction& f, const StateSpace& sp) { return integrate(f.values(), sp); }

double h_inner(const Vector& f, const Vector& g, const StateSpace& sp) {
  check_dim(f.size(), sp.m.size(), "h_inner");
  check_dim(g.size(), sp.m.size(), "h_inner");
  Vector terms = f.cwiseProduct(g).cwiseProduct(sp.m);
  return neumaier_sum(terms);
}

double h_inner(const StateFunction& f, const StateFunction& g, const StateSpace& sp) {
  return h_inner(f.values(), g.values(), sp);
}

Vector extend_to_cemetery(const Vector& f) {
  Vector out(f.size() + 1);
  out.head(f.size()) = f;
  out[f.size()] = 0.0;
  return out;
}

StateSpace read_space_file(std::istream& in, const std::string& source_name) {
  StateSpace sp;
  std::vector<double> ms, phis;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string label;
    if (!(ss >> label)) continue;  // blank or comment-only line
    double m = 0.0, phi = 0.0;
    if (!(ss >> m >> phi))
      throw ConfigError("expected 'label m phi'", source_name, lineno);
    std::string extra;
    if (ss >> extra)
      throw ConfigError("unexpected trailing token '" + extra + "'", source_name, lineno);
    if (!(m > 0.0)) throw ConfigError("state '" + label + "': m must be positive, got " + std::to_string(m), source_name, lineno);
    if (!(phi > 0.0) || phi > 1.0)
      throw ConfigError("state '" + label + "': phi must lie in (0,1], got " + std::to_string(phi), source_name, lineno);
    sp.labels.push_back(label);
    ms.push_back(m);
    phis.push_back(phi);
  }
  if (ms.empty()) throw ConfigError("no states defined", source_name);
  sp.m = Eigen::Map<Vector>(ms.data(), static_cast<Eigen::Index>(ms.size()));
  sp.phi = Eigen::Map<Vector>(phis.data(), static_cast<Eigen::Index>(phis.size()));
  sp.validate();
  return sp;
}

StateSpace read_space_file_path(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open space file", path);
  return read_space_file(in, path);
}

}  // namespace gdf
