#include "trmcf/ambient.hpp"

#include "trmcf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

namespace trmcf {

namespace {

using cplx = std::complex<double>;

void require_dim(const AmbientModel& model, std::span<const double> p) {
  if (static_cast<int>(p.size()) != model.real_dimension())
    throw Error(ErrorKind::InvalidArgument, "ambient point has " + std::to_string(p.size()) +
                                                " coordinates, model expects " +
                                                std::to_string(model.real_dimension()));
}

// Complex representative of the real basis vector e_a: component a/2, value 1 or i.
cplx basis_value(int a) { return (a % 2 == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0); }

void fs_frame(int n, const double* p, AmbientFrame& f, bool with_christoffel) {
  const int D = 2 * n;
  std::array<cplx, kMaxComplexDim> w{};
  double s = 1.0;
  for (int k = 0; k < n; ++k) {
    w[k] = cplx(p[2 * k], p[2 * k + 1]);
    s += std::norm(w[k]);
  }
  // c_a = conj(w) . xi_a
  std::array<cplx, kMaxRealDim> c{};
  for (int a = 0; a < D; ++a) c[a] = std::conj(w[a / 2]) * basis_value(a);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      f.metric[a][b] = (a == b ? 2.0 / s : 0.0) - 2.0 / (s * s) * std::real(c[a] * std::conj(c[b]));
  if (!with_christoffel) return;
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) {
      std::array<cplx, kMaxComplexDim> z{};
      z[a / 2] -= basis_value(a) * c[b] / s;
      z[b / 2] -= basis_value(b) * c[a] / s;
      for (int k = 0; k < n; ++k) {
        f.christoffel[2 * k][a][b] = z[k].real();
        f.christoffel[2 * k + 1][a][b] = z[k].imag();
      }
    }
}

Eigen::MatrixXd j_matrix(int D) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(D, D);
  for (int k = 0; k < D; k += 2) {
    J(k + 1, k) = 1.0;
    J(k, k + 1) = -1.0;
  }
  return J;
}

// Closed form for constant holomorphic sectional curvature c = 2.
Tensor4 fs_riemann(const Eigen::MatrixXd& G, const Eigen::MatrixXd& J) {
  const int D = static_cast<int>(G.rows());
  const Eigen::MatrixXd Om = J.transpose() * G;  // Om(a,b) = g(J e_a, e_b)
  Tensor4 R(D);
  const double c4 = 0.5;
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b)
      for (int c = 0; c < D; ++c)
        for (int d = 0; d < D; ++d)
          R(a, b, c, d) = c4 * (G(b, c) * G(a, d) - G(a, c) * G(b, d) + Om(b, c) * Om(a, d) -
                                Om(a, c) * Om(b, d) - 2.0 * Om(a, b) * Om(c, d));
  return R;
}

// Full contraction |T|^2 of a covariant tensor of rank r (flattened, dim D) with g^{-1}.
double tensor_norm2(const std::vector<double>& T, int rank, int D, const Eigen::MatrixXd& Ginv) {
  std::vector<double> raised = T;
  std::size_t stride = 1;
  for (int r = 0; r < rank; ++r) {
    std::vector<double> next(raised.size(), 0.0);
    for (std::size_t idx = 0; idx < raised.size(); ++idx) {
      const int ia = static_cast<int>((idx / stride) % D);
      const std::size_t base = idx - ia * stride;
      double acc = 0.0;
      for (int b = 0; b < D; ++b) acc += Ginv(ia, b) * raised[base + b * stride];
      next[idx] = acc;
    }
    raised.swap(next);
    stride *= D;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) s += T[i] * raised[i];
  return s;
}

}  // namespace

const char* to_string(AmbientKind kind) noexcept {
  return kind == AmbientKind::FlatTorus ? "flat-torus" : "fubini-study";
}

AmbientKind ambient_kind_from_string(const std::string& name) {
  if (name == "flat-torus") return AmbientKind::FlatTorus;
  if (name == "fubini-study") return AmbientKind::FubiniStudy;
  throw Error(ErrorKind::InvalidArgument, "unknown ambient kind '" + name + "'");
}

void AmbientModel::validate() const {
  if (complex_dimension < 1 || complex_dimension > kMaxComplexDim)
    throw Error(ErrorKind::InvalidArgument, "complex dimension must be 1 or 2");
  if (kind == AmbientKind::FlatTorus) {
    if (static_cast<int>(lattice_periods.size()) != real_dimension())
      throw Error(ErrorKind::InvalidArgument, "flat torus needs one lattice period per real coordinate");
    for (double P : lattice_periods)
      if (!(P >= 0.0) || !std::isfinite(P))
        throw Error(ErrorKind::InvalidArgument, "lattice periods must be finite and >= 0");
    if (ke_constant != 0.0) throw Error(ErrorKind::InvalidArgument, "flat torus has lambda = 0");
  } else {
    if (!(chart_radius_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "chart_radius_max must be positive");
    if (ke_constant != complex_dimension + 1.0)
      throw Error(ErrorKind::InvalidArgument, "Fubini-Study has lambda = n + 1");
  }
}

AmbientModel AmbientModel::flat_torus(int n, std::vector<double> periods) {
  AmbientModel m;
  m.kind = AmbientKind::FlatTorus;
  m.complex_dimension = n;
  m.lattice_periods = periods.empty() ? std::vector<double>(2 * n, 1.0) : std::move(periods);
  m.ke_constant = 0.0;
  m.validate();
  return m;
}

AmbientModel AmbientModel::fubini_study(int n, double chart_radius_max) {
  AmbientModel m;
  m.kind = AmbientKind::FubiniStudy;
  m.complex_dimension = n;
  m.ke_constant = n + 1.0;
  m.chart_radius_max = chart_radius_max;
  m.validate();
  return m;
}

bool operator==(const AmbientModel& a, const AmbientModel& b) {
  return a.kind == b.kind && a.complex_dimension == b.complex_dimension &&
         a.lattice_periods == b.lattice_periods && a.ke_constant == b.ke_constant &&
         a.chart_radius_max == b.chart_radius_max;
}

double chart_margin(const AmbientModel& model, std::span<const double> p) {
  if (model.kind == AmbientKind::FlatTorus) return std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (int k = 0; k < model.complex_dimension; ++k) r = std::max(r, std::hypot(p[2 * k], p[2 * k + 1]));
  return model.chart_radius_max - r;
}

void check_chart(const AmbientModel& model, std::span<const double> p) {
  require_dim(model, p);
  for (double x : p)
    if (!std::isfinite(x)) throw Error(ErrorKind::ChartGuard, "non-finite ambient coordinate");
  if (!(chart_margin(model, p) > 0.0))
    throw Error(ErrorKind::ChartGuard, "point leaves the Fubini-Study chart (|w| >= " +
                                           std::to_string(model.chart_radius_max) + ")");
}

void evaluate_frame(const AmbientModel& model, const double* p, AmbientFrame& frame,
                    bool with_christoffel) {
  const int D = model.real_dimension();
  if (model.kind == AmbientKind::FlatTorus) {
    frame.flat = true;
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) frame.metric[a][b] = (a == b) ? 1.0 : 0.0;
    if (with_christoffel)
      for (int c = 0; c < D; ++c)
        for (int a = 0; a < D; ++a)
          for (int b = 0; b < D; ++b) frame.christoffel[c][a][b] = 0.0;
    return;
  }
  frame.flat = false;
  fs_frame(model.complex_dimension, p, frame, with_christoffel);
}

Eigen::MatrixXd metric_at(const AmbientModel& model, std::span<const double> p) {
  check_chart(model, p);
  AmbientFrame f;
  evaluate_frame(model, p.data(), f, false);
  const int D = model.real_dimension();
  Eigen::MatrixXd G(D, D);
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) G(a, b) = f.metric[a][b];
  return G;
}

Eigen::MatrixXd complex_structure_at(const AmbientModel& model, std::span<const double> p) {
  check_chart(model, p);
  return j_matrix(model.real_dimension());
}

Tensor3 christoffel_at(const AmbientModel& model, std::span<const double> p) {
  check_chart(model, p);
  AmbientFrame f;
  evaluate_frame(model, p.data(), f, true);
  const int D = model.real_dimension();
  Tensor3 G(D);
  for (int c = 0; c < D; ++c)
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) G(c, a, b) = f.christoffel[c][a][b];
  return G;
}

CurvatureData riemann_at(const AmbientModel& model, std::span<const double> p) {
  const Eigen::MatrixXd G = metric_at(model, p);
  const int D = model.real_dimension();
  const Eigen::MatrixXd J = j_matrix(D);
  CurvatureData out;
  out.riemann = (model.kind == AmbientKind::FlatTorus) ? Tensor4(D) : fs_riemann(G, J);
  const Eigen::MatrixXd Ginv = G.inverse();
  out.ricci = Eigen::MatrixXd::Zero(D, D);
  for (int b = 0; b < D; ++b)
    for (int c = 0; c < D; ++c) {
      double s = 0.0;
      for (int a = 0; a < D; ++a)
        for (int d = 0; d < D; ++d) s += Ginv(a, d) * out.riemann(a, b, c, d);
      out.ricci(b, c) = s;
    }
  out.ricci_form = J.transpose() * out.ricci;
  return out;
}

bool KeReport::satisfies_local_bounds(double Lambda) const {
  for (int l = 0; l <= 5; ++l) {
    const double bound = std::pow(Lambda, 2.0 + l);
    if (curvature_norm[l] * curvature_norm[l] > bound * (1.0 + 1e-12)) return false;
  }
  return true;
}

KeReport verify_ke(const AmbientModel& model, int sample_count, std::uint64_t seed) {
  model.validate();
  KeReport rep;
  rep.samples = sample_count;
  if (model.kind == AmbientKind::FlatTorus) return rep;

  const int D = model.real_dimension();
  std::mt19937_64 rng(seed);
  const double rmax = std::min(2.0, 0.5 * model.chart_radius_max);
  std::uniform_real_distribution<double> radius(0.0, rmax), angle(0.0, 2.0 * M_PI);
  rep.rm_norm_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    std::vector<double> p(D);
    for (int k = 0; k < model.complex_dimension; ++k) {
      const double r = radius(rng), th = angle(rng);
      p[2 * k] = r * std::cos(th);
      p[2 * k + 1] = r * std::sin(th);
    }
    const Eigen::MatrixXd G = metric_at(model, p);
    const Eigen::MatrixXd Ginv = G.inverse();
    const CurvatureData cd = riemann_at(model, p);
    const double res = (cd.ricci - model.ke_constant * G).cwiseAbs().maxCoeff() / G.cwiseAbs().maxCoeff();
    rep.ricci_residual = std::max(rep.ricci_residual, res);
    const double rm = std::sqrt(tensor_norm2(cd.riemann.data, 4, D, Ginv));
    rep.rm_norm_min = std::min(rep.rm_norm_min, rm);
    rep.rm_norm_max = std::max(rep.rm_norm_max, rm);

    // nabla Rm: fourth-order differences of the closed form plus connection terms.
    const double delta = 1e-3;
    const Tensor3 Gam = christoffel_at(model, p);
    std::vector<double> dR(static_cast<std::size_t>(D) * D * D * D * D, 0.0);
    auto at = [&](int e, double shift) {
      std::vector<double> q = p;
      q[e] += shift;
      return riemann_at(model, q).riemann;
    };
    for (int e = 0; e < D; ++e) {
      const Tensor4 p1 = at(e, delta), m1 = at(e, -delta), p2 = at(e, 2 * delta), m2 = at(e, -2 * delta);
      for (std::size_t i = 0; i < cd.riemann.data.size(); ++i)
        dR[e * cd.riemann.data.size() + i] =
            (-p2.data[i] + 8.0 * p1.data[i] - 8.0 * m1.data[i] + m2.data[i]) / (12.0 * delta);
    }
    const Tensor4& R = cd.riemann;
    for (int e = 0; e < D; ++e)
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
          for (int c = 0; c < D; ++c)
            for (int d = 0; d < D; ++d) {
              double corr = 0.0;
              for (int f = 0; f < D; ++f)
                corr += Gam(f, e, a) * R(f, b, c, d) + Gam(f, e, b) * R(a, f, c, d) +
                        Gam(f, e, c) * R(a, b, f, d) + Gam(f, e, d) * R(a, b, c, f);
              dR[(((e * D + a) * D + b) * D + c) * D + d] -= corr;
            }
    rep.curvature_norm[1] = std::max(rep.curvature_norm[1], std::sqrt(std::max(0.0, tensor_norm2(dR, 5, D, Ginv))));
  }
  rep.curvature_norm[0] = rep.rm_norm_max;
  return rep;
}

}  // namespace trmcf
