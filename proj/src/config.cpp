#include "gdf/config.hpp"

#include "gdf/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gdf {

namespace {

struct Entry {
  std::string section, key, value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

double parse_double(const std::string& t, const std::string& src, int line) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(t, &pos);
  } catch (...) {
    throw ConfigError("expected a number, got '" + t + "'", src, line);
  }
  if (pos != t.size()) throw ConfigError("trailing characters in number '" + t + "'", src, line);
  return v;
}

long parse_long(const std::string& t, const std::string& src, int line) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(t, &pos);
  } catch (...) {
    throw ConfigError("expected an integer, got '" + t + "'", src, line);
  }
  if (pos != t.size()) throw ConfigError("trailing characters in integer '" + t + "'", src, line);
  return v;
}

std::vector<double> parse_doubles(const std::string& v, const std::string& src, int line) {
  std::vector<double> out;
  for (const auto& t : tokens(v)) out.push_back(parse_double(t, src, line));
  if (out.empty()) throw ConfigError("expected at least one number", src, line);
  return out;
}

std::vector<int> parse_ints(const std::string& v, const std::string& src, int line) {
  std::vector<int> out;
  for (const auto& t : tokens(v)) out.push_back(static_cast<int>(parse_long(t, src, line)));
  return out;
}

// "lo:hi" with integer log2 endpoints -> dyadic grid.
std::vector<double> parse_dyadic(const std::string& v, const std::string& src, int line) {
  const auto ts = tokens(v);
  if (ts.size() != 1 || ts[0].find(':') == std::string::npos)
    throw ConfigError("expected a log2 range 'lo:hi'", src, line);
  const auto colon = ts[0].find(':');
  const long lo = parse_long(ts[0].substr(0, colon), src, line);
  const long hi = parse_long(ts[0].substr(colon + 1), src, line);
  if (lo > hi) throw ConfigError("range is empty", src, line);
  if (hi - lo > 64) throw ConfigError("range wider than 64 octaves", src, line);
  return dyadic_grid(static_cast<int>(lo), static_cast<int>(hi));
}

void check_tolerance(double v, const std::string& key, const std::string& src, int line) {
  if (!(v >= 1e-14) || !(v <= 1e-2))
    throw ConfigError(key + " must lie in [1e-14, 1e-2], got " + std::to_string(v), src, line);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& src) {
  static const std::set<std::string> known_sections = {"model",  "space", "grids", "sets",
                                                       "useq",   "probe", "mc",    "tolerances",
                                                       "output"};
  std::vector<Entry> entries;
  {
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("unterminated section header", src, lineno);
        section = trim(line.substr(1, line.size() - 2));
        if (!known_sections.count(section)) throw ConfigError("unknown section [" + section + "]", src, lineno);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected 'key = value'", src, lineno);
      if (section.empty()) throw ConfigError("key outside any section", src, lineno);
      Entry e;
      e.section = section;
      e.key = trim(line.substr(0, eq));
      e.value = trim(line.substr(eq + 1));
      e.line = lineno;
      if (e.key.empty()) throw ConfigError("empty key", src, lineno);
      if (e.value.empty()) throw ConfigError("empty value for key '" + e.key + "'", src, lineno);
      entries.push_back(std::move(e));
    }
  }

  ExperimentConfig cfg;
  std::set<std::string> seen;
  for (const Entry& e : entries) {
    const std::string full = e.section + "." + e.key;
    if (e.section != "sets" && !seen.insert(full).second)
      throw ConfigError("duplicate key '" + e.key + "' in [" + e.section + "]", src, e.line);

    if (e.section == "model") {
      auto& m = cfg.model;
      if (e.key == "kind") m.kind = e.value;
      else if (e.key == "n") m.n = static_cast<int>(parse_long(e.value, src, e.line));
      else if (e.key == "birth") m.birth = parse_doubles(e.value, src, e.line);
      else if (e.key == "death") m.death = parse_doubles(e.value, src, e.line);
      else if (e.key == "kill") m.kill = parse_doubles(e.value, src, e.line);
      else if (e.key == "cells") m.cells = static_cast<int>(parse_long(e.value, src, e.line));
      else if (e.key == "a") m.a = parse_doubles(e.value, src, e.line);
      else if (e.key == "b") m.b = parse_doubles(e.value, src, e.line);
      else if (e.key == "spatial_n") m.spatial_n = static_cast<int>(parse_long(e.value, src, e.line));
      else if (e.key == "spatial_birth") m.spatial_birth = parse_doubles(e.value, src, e.line);
      else if (e.key == "spatial_death") m.spatial_death = parse_doubles(e.value, src, e.line);
      else if (e.key == "layers") m.layers = static_cast<int>(parse_long(e.value, src, e.line));
      else if (e.key == "n1") m.n1 = static_cast<int>(parse_long(e.value, src, e.line));
      else if (e.key == "n2") m.n2 = static_cast<int>(parse_long(e.value, src, e.line));
      else if (e.key == "rate1") m.rate1 = parse_double(e.value, src, e.line);
      else if (e.key == "rate2") m.rate2 = parse_double(e.value, src, e.line);
      else throw ConfigError("unknown key '" + e.key + "' in [model]", src, e.line);
    } else if (e.section == "space") {
      if (e.key == "file") cfg.space_file = e.value;
      else if (e.key == "m") cfg.m_values = parse_doubles(e.value, src, e.line);
      else if (e.key == "phi") cfg.phi_values = parse_doubles(e.value, src, e.line);
      else throw ConfigError("unknown key '" + e.key + "' in [space]", src, e.line);
    } else if (e.section == "grids") {
      if (e.key == "alpha_log2") cfg.alpha_grid = parse_dyadic(e.value, src, e.line);
      else if (e.key == "beta_log2") cfg.beta_grid = parse_dyadic(e.value, src, e.line);
      else if (e.key == "l_log2") cfg.l_grid = parse_dyadic(e.value, src, e.line);
      else if (e.key == "t2_log2") cfg.t2_grid = parse_dyadic(e.value, src, e.line);
      else if (e.key == "t") cfg.t_list = parse_doubles(e.value, src, e.line);
      else if (e.key == "beta") cfg.chain_betas = parse_doubles(e.value, src, e.line);
      else throw ConfigError("unknown key '" + e.key + "' in [grids]", src, e.line);
    } else if (e.section == "sets") {
      SetSpec s;
      s.name = e.key;
      const auto ts = tokens(e.value);
      if (ts.size() == 3 && ts[1] == ">") {
        s.predicate = true;
        s.fn = ts[0];
        if (s.fn != "phi" && s.fn != "g1phi")
          throw ConfigError("unknown predicate function '" + s.fn + "' (use phi or g1phi)", src, e.line);
        s.threshold = parse_double(ts[2], src, e.line);
      } else {
        s.indices = parse_ints(e.value, src, e.line);
      }
      for (const auto& other : cfg.sets)
        if (other.name == s.name) throw ConfigError("duplicate set '" + s.name + "'", src, e.line);
      cfg.sets.push_back(std::move(s));
    } else if (e.section == "useq") {
      if (e.key != "sequence") throw ConfigError("unknown key '" + e.key + "' in [useq]", src, e.line);
      cfg.useq_present = true;
      std::string part;
      std::istringstream ss(e.value);
      while (std::getline(ss, part, '|')) {
        part = trim(part);
        if (part == "empty") {
          cfg.useq.emplace_back();
        } else if (part.find(':') != std::string::npos) {
          const auto colon = part.find(':');
          const long lo = parse_long(trim(part.substr(0, colon)), src, e.line);
          const long hi = parse_long(trim(part.substr(colon + 1)), src, e.line);
          if (lo > hi) throw ConfigError("empty interval '" + part + "' (use 'empty')", src, e.line);
          std::vector<int> idx;
          for (long i = lo; i <= hi; ++i) idx.push_back(static_cast<int>(i));
          cfg.useq.push_back(std::move(idx));
        } else {
          cfg.useq.push_back(parse_ints(part, src, e.line));
        }
      }
      if (cfg.useq.empty()) throw ConfigError("empty sequence", src, e.line);
    } else if (e.section == "probe") {
      if (e.key == "states") cfg.probe_states = parse_ints(e.value, src, e.line);
      else throw ConfigError("unknown key '" + e.key + "' in [probe]", src, e.line);
    } else if (e.section == "mc") {
      if (e.key == "paths") {
        cfg.mc_paths = parse_long(e.value, src, e.line);
        if (cfg.mc_paths < 1 || cfg.mc_paths > 100000000)
          throw ConfigError("paths must lie in [1, 1e8]", src, e.line);
      } else if (e.key == "horizon") {
        cfg.mc_horizon = parse_double(e.value, src, e.line);
        if (!(cfg.mc_horizon > 0.0)) throw ConfigError("horizon must be positive", src, e.line);
      } else if (e.key == "seed") {
        const long s = parse_long(e.value, src, e.line);
        if (s < 0) throw ConfigError("seed must be nonnegative", src, e.line);
        cfg.seed = static_cast<std::uint64_t>(s);
      } else {
        throw ConfigError("unknown key '" + e.key + "' in [mc]", src, e.line);
      }
    } else if (e.section == "tolerances") {
      const double v = parse_double(e.value, src, e.line);
      check_tolerance(v, e.key, src, e.line);
      if (e.key == "excessivity") cfg.tol_excessivity = v;
      else if (e.key == "reduite") cfg.tol_reduite = v;
      else if (e.key == "capacity") cfg.tol_capacity = v;
      else throw ConfigError("unknown key '" + e.key + "' in [tolerances]", src, e.line);
    } else if (e.section == "output") {
      if (e.key == "dir") cfg.out_dir = e.value;
      else throw ConfigError("unknown key '" + e.key + "' in [output]", src, e.line);
    }
  }

  if (cfg.model.kind.empty()) throw ConfigError("missing [model] kind", src);
  const auto check_sorted = [&src](const std::vector<double>& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0)) throw ConfigError(std::string(what) + ": entries must be positive", src);
      if (i && v[i] <= v[i - 1])
        throw ConfigError(std::string(what) + ": entries must be strictly increasing", src);
    }
  };
  check_sorted(cfg.t_list, "[grids] t");
  check_sorted(cfg.chain_betas, "[grids] beta");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file", path);
  return parse_config(in, path);
}

SubMarkovGenerator ExperimentConfig::build_generator() const {
  const auto broadcast = [](const std::vector<double>& v, int count, double fallback,
                            const char* what) {
    if (v.empty()) return std::vector<double>(static_cast<std::size_t>(count), fallback);
    if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(count), v[0]);
    if (static_cast<int>(v.size()) != count)
      throw ConfigError(std::string(what) + ": expected 1 or " + std::to_string(count) + " values");
    return v;
  };

  if (model.kind == "birth_death") {
    if (model.n < 1) throw ConfigError("[model] birth_death: n must be >= 1");
    return model_birth_death(model.n, broadcast(model.birth, model.n - 1, 1.0, "birth"),
                             broadcast(model.death, model.n - 1, 1.0, "death"),
                             broadcast(model.kill, model.n, 0.0, "kill"));
  }
  if (model.kind == "absorbed_diffusion") {
    if (model.cells < 2) throw ConfigError("[model] absorbed_diffusion: cells must be >= 2");
    const auto a = broadcast(model.a, model.cells, 1.0, "a");
    const auto b = broadcast(model.b, model.cells, 0.0, "b");
    const double h = 1.0 / model.cells;
    const auto cell_of = [h, this](double x) {
      int i = static_cast<int>(x / h);
      return std::min(std::max(i, 0), model.cells - 1);
    };
    return model_absorbed_diffusion(
        model.cells, [&, a](double x) { return a[static_cast<std::size_t>(cell_of(x))]; },
        [&, b](double x) { return b[static_cast<std::size_t>(cell_of(x))]; });
  }
  if (model.kind == "space_time_transport") {
    if (model.spatial_n < 1) throw ConfigError("[model] space_time_transport: spatial_n must be >= 1");
    if (model.layers < 2) throw ConfigError("[model] space_time_transport: layers must be >= 2");
    const auto spatial = model_birth_death(
        model.spatial_n, broadcast(model.spatial_birth, model.spatial_n - 1, 1.0, "spatial_birth"),
        broadcast(model.spatial_death, model.spatial_n - 1, 1.0, "spatial_death"),
        std::vector<double>(static_cast<std::size_t>(model.spatial_n), 0.0));
    return model_space_time_transport(spatial, model.layers);
  }
  if (model.kind == "two_block") {
    if (model.n1 < 1 || model.n2 < 1) throw ConfigError("[model] two_block: n1 and n2 must be >= 1");
    if (!(model.rate1 > 0.0) || !(model.rate2 > 0.0))
      throw ConfigError("[model] two_block: rates must be positive");
    const auto block = [](int n, double rate) {
      return model_birth_death(n, std::vector<double>(static_cast<std::size_t>(n - 1), rate),
                               std::vector<double>(static_cast<std::size_t>(n - 1), rate),
                               std::vector<double>(static_cast<std::size_t>(n), 0.0));
    };
    return block_diag(block(model.n1, model.rate1), block(model.n2, model.rate2));
  }
  throw ConfigError("unknown model kind '" + model.kind + "'");
}

StateSpace ExperimentConfig::build_space(const SubMarkovGenerator& L) const {
  const int n = L.size();
  if (space_file) {
    if (!m_values.empty() || !phi_values.empty())
      throw ConfigError("[space] file is exclusive with inline m/phi");
    StateSpace sp = read_space_file_path(*space_file);
    if (sp.size() != n)
      throw ConfigError("[space] file defines " + std::to_string(sp.size()) + " states, model has " +
                        std::to_string(n));
    return sp;
  }
  StateSpace sp;
  const double default_m = model.kind == "absorbed_diffusion" ? 1.0 / model.cells : 1.0;
  const auto fill = [n](const std::vector<double>& v, double fallback, const char* what) {
    Vector out(n);
    if (v.empty()) out.setConstant(fallback);
    else if (v.size() == 1) out.setConstant(v[0]);
    else if (static_cast<int>(v.size()) == n)
      for (int i = 0; i < n; ++i) out[i] = v[static_cast<std::size_t>(i)];
    else
      throw ConfigError(std::string("[space] ") + what + ": expected 1 or " + std::to_string(n) + " values");
    return out;
  };
  sp.m = fill(m_values, default_m, "m");
  sp.phi = fill(phi_values, 1.0, "phi");
  for (int i = 0; i < n; ++i) {
    if (!(sp.m[i] > 0.0))
      throw ConfigError("[space] m: state " + std::to_string(i) + " has non-positive mass");
    if (!(sp.phi[i] > 0.0) || sp.phi[i] > 1.0)
      throw ConfigError("[space] phi: state " + std::to_string(i) + " must have phi in (0,1], got " +
                        std::to_string(sp.phi[i]));
  }
  sp.validate();
  return sp;
}

std::vector<int> ExperimentConfig::resolve_set(const SetSpec& s, const StateSpace& sp,
                                               const SubMarkovGenerator& L) const {
  if (!s.predicate) {
    for (int i : s.indices)
      if (i < 0 || i >= sp.size())
        throw ConfigError("[sets] " + s.name + ": index " + std::to_string(i) + " out of range");
    return s.indices;
  }
  Vector values;
  if (s.fn == "phi") values = sp.phi;
  else values = resolvent(L, 1.0).matrix * sp.phi;  // g1phi
  std::vector<int> out;
  for (int i = 0; i < sp.size(); ++i)
    if (values[i] > s.threshold) out.push_back(i);
  return out;
}

}  // namespace gdf
