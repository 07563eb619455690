#pragma once

#include "trmcf/immersion.hpp"

#include <string>
#include <vector>

namespace trmcf {

enum class GeometryLevel {
  Kinematic,  // what the stepper needs: g, omega, eta, N, h, H, velocity, scalar norms
  Full,       // plus Levi-Civita and normal connection, xi, xi_J, Lagrangian angle
};

// Per-node tensors. Index layouts (node-major):
//   Fi [i][a], Fij [i][j][a], ambient_metric [a][b], normals [i][a], velocity [a]
//   g, g_inv, omega, eta, eta_inv [i][j]
//   h [i][j][k] = h_ijk, christoffel [l][j][k] = Gamma^l_jk, normal_connection [s][j][p]
//   H, H_vec (upper p), xi, xi_J [i]
//   lagrangian_angle: (cos, sin) pair, flat ambient with n_L = n only
struct GeometryCache {
  GridSpec grid;
  GeometryLevel level = GeometryLevel::Full;
  int n = 0;
  int D = 0;
  AmbientKind ambient_kind = AmbientKind::FlatTorus;
  double lambda = 0.0;

  std::vector<double> Fi, Fij, ambient_metric;
  std::vector<double> g, g_inv, omega, eta, eta_inv, normals;
  std::vector<double> h, christoffel, normal_connection;
  std::vector<double> H, H_vec, xi, xi_J;
  std::vector<double> sqrt_det_g, A_sq, H_norm2, H_norm2_eta, omega_norm2, eta_min_eig;
  std::vector<double> lagrangian_angle;
  std::vector<double> velocity;

  std::size_t nodes() const { return grid.node_count(); }
  double cell_volume() const { return grid.cell_volume(); }
  // Quadrature of a per-node scalar density against vol_g.
  double integrate(const std::vector<double>& scalar) const;
  double volume() const;
  double sup(const std::vector<double>& scalar) const;
};

// Throws TotallyReal / Immersion errors naming the first failing node.
GeometryCache build_geometry(const ImmersionState& state, GeometryLevel level = GeometryLevel::Full);

struct MetricPair { std::vector<double> g, g_inv; };
struct NormalFrame { std::vector<double> normals, eta, eta_inv; };
struct SecondFundamental { std::vector<double> h, A_sq; };
struct MeanCurvature { std::vector<double> H, H_vec, xi; };

MetricPair first_fundamental(const ImmersionState& state);
std::vector<double> restricted_kahler(const ImmersionState& state);
NormalFrame normal_frame(const ImmersionState& state);
SecondFundamental second_fundamental(const ImmersionState& state);
MeanCurvature mean_curvature(const ImmersionState& state);
std::vector<double> maslov_form(const ImmersionState& state);
// Unit complex field e^{i theta_L} as (cos, sin) pairs; flat ambient only.
std::vector<double> lagrangian_angle(const ImmersionState& state);
std::vector<double> normal_connection(const ImmersionState& state);

struct IdentityReport {
  std::string name;
  double max_norm = 0.0;
  double l2 = 0.0;
  std::array<int, 2> resolution{0, 0};
  double tolerance = 0.0;
  bool passed = false;
};

// Pointwise residual field with `ncomp` components per node, reduced to a report.
IdentityReport make_report(const std::string& name, const GeometryCache& cache,
                           const std::vector<double>& residual, int ncomp, double tolerance);

// Identities; all require a Full cache. Default tolerances: 1e-6 for FD identities,
// 1e-8 for pointwise algebraic ones.
IdentityReport identity_xi_H_dstar_omega(const GeometryCache& cache, double tol = 1e-6);
IdentityReport identity_index_commutation(const GeometryCache& cache, double tol = 1e-6);
IdentityReport identity_dxiJ_rho(const ImmersionState& state, const GeometryCache& cache, double tol = 1e-6);
IdentityReport identity_normal_metric_compat(const GeometryCache& cache, double tol = 1e-6);
IdentityReport identity_xi_xiJ_error(const GeometryCache& cache, double tol = 1e-8);
IdentityReport identity_dH_formula(const GeometryCache& cache, double tol = 1e-6);
IdentityReport identity_hat_vs_levi_civita(const GeometryCache& cache, double tol = 1e-8);
IdentityReport identity_eta_closed_form(const GeometryCache& cache, double tol = 1e-8);
IdentityReport identity_normality(const GeometryCache& cache, double tol = 1e-8);
IdentityReport identity_maslov_angle(const GeometryCache& cache, double tol = 1e-6);
IdentityReport ricci_contraction_identity(const ImmersionState& state, const GeometryCache& cache,
                                          double tol = 1e-8);

// Integral of dH over the fundamental 2-cycle (n_L = 2), zero for an exact form.
double dH_cycle_integral(const GeometryCache& cache);

// Per-node check of (1+s)^-1 |H|_g^2 <= |H|_eta^2 <= (1-s)^-1 |H|_g^2 with s = sup|omega|^2.
// Not applicable when s >= 1. max_violation is relative to |H|_g^2 and <= 0 when it holds.
struct SandwichCheck {
  bool applicable = false;
  double max_violation = 0.0;
  bool holds() const { return !applicable || max_violation <= 1e-12; }
};
SandwichCheck sandwich_check(const GeometryCache& cache);

// All identities applicable to the state, in a fixed order.
std::vector<IdentityReport> identity_suite(const ImmersionState& state, const GeometryCache& cache);

// Covariant derivative norms for the smoothing monitors: sup |nabla A|^2 and sup |nabla^2 A|^2,
// with nabla-hat on the first index of h and Levi-Civita on the others.
std::array<double, 2> second_fundamental_derivative_norms(const GeometryCache& cache);

// sup over nodes of |nabla H|_g (Levi-Civita covariant derivative of the 1-form H).
double sup_grad_H(const GeometryCache& cache);

}  // namespace trmcf
