#pragma once

#include "trmcf/geometry.hpp"

#include <vector>

namespace trmcf {

struct ScalarField {
  std::vector<double> v;  // one value per node
};

struct OneFormField {
  int n = 0;
  std::vector<double> v;  // alpha_i, n per node
};

// Independent components only: omega_12 per node when n = 2, nothing when n = 1.
struct TwoFormField {
  int n = 0;
  std::vector<double> v;
};

OneFormField d0(const ScalarField& f, const GeometryCache& cache);
TwoFormField d1(const OneFormField& alpha, const GeometryCache& cache);
// d* alpha = -(1/sqrt g) D_i (sqrt g g^{ij} alpha_j)
ScalarField codifferential1(const OneFormField& alpha, const GeometryCache& cache);
// (d* w)_i = -g_il (1/sqrt g) D_k (sqrt g w^{kl}) = -g^{kj} nabla_k w_ji
OneFormField codifferential2(const TwoFormField& w, const GeometryCache& cache);
OneFormField hodge_laplacian1(const OneFormField& alpha, const GeometryCache& cache);

// vol_g-weighted L2 products.
double inner(const ScalarField& a, const ScalarField& b, const GeometryCache& cache);
double inner(const OneFormField& a, const OneFormField& b, const GeometryCache& cache);
double inner(const TwoFormField& a, const TwoFormField& b, const GeometryCache& cache);

TwoFormField kahler_form_field(const GeometryCache& cache);
OneFormField one_form_field(const std::vector<double>& values, int n);

struct SpectrumOptions {
  int modes = 6;              // trial space |k|_inf <= modes
  bool mixed_form = true;     // harmonic dimension and direct lambda_1^1
};

struct SpectrumResult {
  double lambda0 = 0.0;
  double rho1 = 0.0;
  double lambda11 = 0.0;
  int harmonic_dimension = -1;       // -1 when the mixed form was not solved
  double lambda11_mixed = 0.0;       // lambda_1^1 read directly off the mixed Hodge form
  int iterations = 0;                // dense direct solves performed
  int basis_size = 0;
  double deflation_threshold = 0.0;
  double residual_lambda0 = 0.0;     // relative eigen-residuals |S v - mu M v| / |M v|
  double residual_rho1 = 0.0;
  double residual_mixed = 0.0;
};

SpectrumResult spectrum(const GeometryCache& cache, const SpectrumOptions& options = {});
double eigen_lambda0(const GeometryCache& cache, int modes = 6);
double eigen_rho1(const GeometryCache& cache, int modes = 6);

}  // namespace trmcf
