#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trmcf {

inline constexpr int kMaxComplexDim = 2;
inline constexpr int kMaxRealDim = 2 * kMaxComplexDim;

enum class AmbientKind { FlatTorus, FubiniStudy };

const char* to_string(AmbientKind kind) noexcept;
AmbientKind ambient_kind_from_string(const std::string& name);

// Kahler-Einstein ambient. Real chart coordinates are ordered (u1, v1, ..., un, vn)
// with J du_k = dv_k. Fubini-Study lives in the affine chart with potential
// log(1 + |w|^2) and real metric 2 Re h, so Ric = (n + 1) g.
struct AmbientModel {
  AmbientKind kind = AmbientKind::FlatTorus;
  int complex_dimension = 2;
  std::vector<double> lattice_periods;  // flat only; 0 marks a non-compact direction
  double ke_constant = 0.0;
  double chart_radius_max = 10.0;

  int real_dimension() const { return 2 * complex_dimension; }
  void validate() const;

  static AmbientModel flat_torus(int n, std::vector<double> periods = {});
  static AmbientModel fubini_study(int n, double chart_radius_max = 10.0);
};

bool operator==(const AmbientModel& a, const AmbientModel& b);

struct Tensor3 {
  int dim = 0;
  std::vector<double> data;
  explicit Tensor3(int d = 0) : dim(d), data(static_cast<std::size_t>(d) * d * d, 0.0) {}
  double& operator()(int a, int b, int c) { return data[(a * dim + b) * dim + c]; }
  double operator()(int a, int b, int c) const { return data[(a * dim + b) * dim + c]; }
};

struct Tensor4 {
  int dim = 0;
  std::vector<double> data;
  explicit Tensor4(int d = 0) : dim(d), data(static_cast<std::size_t>(d) * d * d * d, 0.0) {}
  double& operator()(int a, int b, int c, int e) { return data[((a * dim + b) * dim + c) * dim + e]; }
  double operator()(int a, int b, int c, int e) const { return data[((a * dim + b) * dim + c) * dim + e]; }
};

// riemann(a,b,c,d) = <R(e_a, e_b) e_c, e_d>, R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
// ricci_form(a,b) = Ric(J e_a, e_b).
struct CurvatureData {
  Tensor4 riemann;
  Eigen::MatrixXd ricci;
  Eigen::MatrixXd ricci_form;
};

Eigen::MatrixXd metric_at(const AmbientModel& model, std::span<const double> p);
Eigen::MatrixXd complex_structure_at(const AmbientModel& model, std::span<const double> p);
// christoffel(c, a, b) = Gamma^c_ab.
Tensor3 christoffel_at(const AmbientModel& model, std::span<const double> p);
CurvatureData riemann_at(const AmbientModel& model, std::span<const double> p);

// Distance to the chart guard (positive inside); +inf for flat models.
double chart_margin(const AmbientModel& model, std::span<const double> p);
void check_chart(const AmbientModel& model, std::span<const double> p);

struct KeReport {
  int samples = 0;
  double ricci_residual = 0.0;             // max |Ric - lambda g| relative to |g|
  std::array<double, 6> curvature_norm{};  // sup |nabla^l Rm| for l = 0..5
  double rm_norm_min = 0.0;
  double rm_norm_max = 0.0;
  // l >= 2 entries follow from the measured l = 1 entry: both models have parallel curvature.
  bool parallel_curvature = true;
  bool satisfies_local_bounds(double Lambda) const;
};

KeReport verify_ke(const AmbientModel& model, int sample_count, std::uint64_t seed = 1);

// Hot-path evaluation for grid sweeps.
struct AmbientFrame {
  bool flat = true;
  double metric[kMaxRealDim][kMaxRealDim];
  double christoffel[kMaxRealDim][kMaxRealDim][kMaxRealDim];  // [c][a][b]
};

void evaluate_frame(const AmbientModel& model, const double* p, AmbientFrame& frame,
                    bool with_christoffel = true);

inline void apply_complex_structure(int real_dim, const double* x, double* out) {
  for (int k = 0; k < real_dim; k += 2) {
    const double u = x[k];
    out[k] = -x[k + 1];
    out[k + 1] = u;
  }
}

}  // namespace trmcf
