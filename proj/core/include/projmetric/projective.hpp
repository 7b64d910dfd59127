#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "projmetric/connection.hpp"
#include "projmetric/forms.hpp"

namespace projmetric {

// Change of representative within a projective class, Γ -> Γ + δA + Aδ.
struct GaugeChange {
  ScalarForm A;
  static GaugeChange zero(std::size_t n) { return {ScalarForm(n, 1)}; }
};

// Γ̂^a_bc = Γ^a_bc + δ^a_c A_b + δ^a_b A_c.
Connection gauge_transform(const Connection& conn, const GaugeChange& g);

class PrimitiveNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpecialOptions {
  // When false, only a rational primitive of 2β is accepted.
  bool allow_trace_fallback = true;
};

struct SpecialResult {
  Connection connection;
  GaugeChange gauge;
  enum class Route { AlreadySpecial, Primitive, TraceFree } route = Route::AlreadySpecial;
};

// Connection is special iff d(Γ^c_bc) = 0.
bool is_special(const Connection& conn);

// Returns a special representative: A = 0 when already special, otherwise a
// primitive of 2β = P_[ab] dx^a∧dx^b, otherwise A = -Γ^c_bc/(n+1), which
// makes the trace vanish.
SpecialResult make_special(const Connection& conn, const SpecialOptions& opt = {});

// n >= 3: W ≡ 0; n = 2: Y ≡ 0.
bool is_projectively_flat(const Connection& conn);
bool is_projectively_flat(const CurvaturePackage& pkg);

// A with c2 = gauge_transform(c1, A), if one exists.
std::optional<GaugeChange> same_projective_class(const Connection& c1, const Connection& c2);

struct GeodesicOptions {
  double tolerance = 1e-10;
  std::size_t samples = 64;
};

struct GeodesicSample {
  double s;  // Euclidean arclength from x0
  std::vector<double> x;
};

class GeodesicSingularity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unparametrized geodesic through x0 with initial direction v0, integrated
// with respect to Euclidean arclength: x' = u, u' = -Γ(u,u) + (u·Γ(u,u)) u.
// Samples are equally spaced in arclength over [0, arclen].
std::vector<GeodesicSample> integrate_geodesic(const Connection& conn, const NumericEnv& env,
                                               std::span<const double> x0, std::span<const double> v0,
                                               double arclen, const GeodesicOptions& opt = {});

// Largest Euclidean distance between two traces at matched arclength.
double trace_deviation(const std::vector<GeodesicSample>& a, const std::vector<GeodesicSample>& b);

}  // namespace projmetric
