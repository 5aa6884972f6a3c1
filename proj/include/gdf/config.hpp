#ifndef GDF_CONFIG_HPP
#define GDF_CONFIG_HPP

#include "gdf/generator.hpp"
#include "gdf/state_space.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gdf {

struct ModelSpec {
  std::string kind;
  // birth_death
  int n = 0;
  std::vector<double> birth, death, kill;
  // absorbed_diffusion
  int cells = 0;
  std::vector<double> a, b;
  // space_time_transport
  int spatial_n = 0, layers = 0;
  std::vector<double> spatial_birth, spatial_death;
  // two_block: two conservative nearest-neighbor blocks with uniform rates
  int n1 = 0, n2 = 0;
  double rate1 = 1.0, rate2 = 1.0;
};

struct SetSpec {
  std::string name;
  std::vector<int> indices;
  bool predicate = false;
  std::string fn;          // "phi" or "g1phi"
  double threshold = 0.0;  // U = { x : fn(x) > threshold }
};

// Parsed experiment description. The exact file grammar lives in
// docs/CONFIG.md; unknown sections or keys are rejected with line numbers.
struct ExperimentConfig {
  ModelSpec model;

  std::optional<std::string> space_file;
  std::vector<double> m_values, phi_values;  // broadcastable (1 or n entries)

  std::vector<double> alpha_grid;   // dyadic, from alpha_log2
  std::vector<double> beta_grid;    // dyadic, from beta_log2
  std::vector<double> l_grid;       // dyadic, from l_log2
  std::vector<double> t_list;       // explicit times
  std::vector<double> t2_grid;      // dyadic, from t2_log2
  std::vector<double> chain_betas;  // explicit, from beta

  std::vector<SetSpec> sets;
  std::vector<std::vector<int>> useq;
  bool useq_present = false;

  std::vector<int> probe_states;

  long mc_paths = 0;
  double mc_horizon = 0.0;
  std::optional<std::uint64_t> seed;

  double tol_excessivity = 1e-10;
  double tol_reduite = 1e-10;
  double tol_capacity = 1e-9;

  std::string out_dir = "out";

  SubMarkovGenerator build_generator() const;
  StateSpace build_space(const SubMarkovGenerator& L) const;

  // Resolves a set spec against the space (evaluating predicates).
  std::vector<int> resolve_set(const SetSpec& s, const StateSpace& sp,
                               const SubMarkovGenerator& L) const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source_name);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace gdf

#endif  // GDF_CONFIG_HPP
