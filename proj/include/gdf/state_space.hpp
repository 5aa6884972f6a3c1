#ifndef GDF_STATE_SPACE_HPP
#define GDF_STATE_SPACE_HPP

#include "gdf/numeric.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gdf {

// Finite state space E together with a strictly positive weight per state
// (the measure m) and a reference function phi with values in (0,1].
// The cemetery is the extra index size(); it carries no mass.
struct StateSpace {
  std::vector<std::string> labels;
  Vector m;
  Vector phi;

  int size() const { return static_cast<int>(m.size()); }
  int cemetery() const { return size(); }

  // Throws ConfigError naming the offending state when a weight or phi value
  // is out of range, or when labels collide.
  void validate() const;

  static StateSpace uniform(int n);
  static StateSpace make(Vector m, Vector phi);
};

// Real function on E; evaluation at the cemetery index size() returns
// exactly 0.
class StateFunction {
 public:
  StateFunction() = default;
  explicit StateFunction(Vector values) : values_(std::move(values)) {}

  static StateFunction constant(int n, double value);
  static StateFunction indicator(int n, const std::vector<int>& support);

  int size() const { return static_cast<int>(values_.size()); }
  double operator()(int i) const;
  const Vector& values() const { return values_; }

 private:
  Vector values_;
};

double integrate(const Vector& f, const StateSpace& sp);
double integrate(const StateFunction& f, const StateSpace& sp);
double h_inner(const Vector& f, const Vector& g, const StateSpace& sp);
double h_inner(const StateFunction& f, const StateFunction& g, const StateSpace& sp);

// Returns the size-(n+1) vector that agrees with f on E and is exactly 0 at
// the cemetery slot.
Vector extend_to_cemetery(const Vector& f);

// Space definition file: one record per state, three whitespace-separated
// columns "label m phi"; '#' starts a comment. Errors carry line numbers.
StateSpace read_space_file(std::istream& in, const std::string& source_name = "<space>");
StateSpace read_space_file_path(const std::string& path);

}  // namespace gdf

#endif  // GDF_STATE_SPACE_HPP
