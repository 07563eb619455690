#include "trmcf/errors.hpp"
#include "trmcf/hodge.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace trmcf {

namespace {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Rayleigh-Ritz on trigonometric trial functions exp(i k.theta), |k|_inf <= K, with
// the metric weights entering through their Fourier coefficients.
class Galerkin {
 public:
  Galerkin(const GeometryCache& cache, int modes) : cache_(cache), n_(cache.n) {
    int Nmin = cache.grid.resolution[0];
    if (n_ > 1) Nmin = std::min(Nmin, cache.grid.resolution[1]);
    K_ = std::max(1, std::min(modes, (Nmin - 1) / 4));
    const int k1max = n_ > 1 ? K_ : 0;
    for (int k1 = -k1max; k1 <= k1max; ++k1)
      for (int k0 = -K_; k0 <= K_; ++k0) {
        ks_.push_back({k0, k1});
        kappa_.push_back({2.0 * M_PI * k0 / cache.grid.periods[0],
                          n_ > 1 ? 2.0 * M_PI * k1 / cache.grid.periods[1] : 0.0});
      }
    const std::size_t N = cache.nodes();
    std::vector<double> w(N);
    for (std::size_t i = 0; i < N; ++i) w[i] = cache.sqrt_det_g[i];
    W_sqrtg_ = transform(w);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        for (std::size_t node = 0; node < N; ++node)
          w[node] = cache.sqrt_det_g[node] * cache.g_inv[node * n_ * n_ + i * n_ + j];
        W_g_[i][j] = transform(w);
      }
    if (n_ > 1) {
      for (std::size_t node = 0; node < N; ++node) w[node] = 1.0 / cache.sqrt_det_g[node];
      W_inv_ = transform(w);
    }
  }

  int modes() const { return static_cast<int>(ks_.size()); }
  int K() const { return K_; }

  Mat mass0() const {
    const int m = modes();
    Mat M(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) M(a, b) = W(W_sqrtg_, a, b);
    return M;
  }

  Mat stiffness0() const {
    const int m = modes();
    Mat S(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        cplx s = 0.0;
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j) s += kappa_[a][i] * kappa_[b][j] * W(W_g_[i][j], a, b);
        S(a, b) = s;
      }
    return S;
  }

  Mat mass1() const {
    const int m = modes();
    Mat M(m * n_, m * n_);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j) M(a * n_ + i, b * n_ + j) = W(W_g_[i][j], a, b);
    return M;
  }

  Mat stiffness1() const {
    const int m = modes();
    Mat S = Mat::Zero(m * n_, m * n_);
    if (n_ < 2) return S;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        const cplx w = W(W_inv_, a, b);
        const double ca[2] = {-kappa_[a][1], kappa_[a][0]};
        const double cb[2] = {-kappa_[b][1], kappa_[b][0]};
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) S(a * 2 + i, b * 2 + j) = ca[i] * cb[j] * w;
      }
    return S;
  }

  // d0 in coefficient space: (df)_{(b,j)} = i kappa_{b,j} f_b.
  Mat gradient() const {
    const int m = modes();
    Mat G = Mat::Zero(m * n_, m);
    for (int b = 0; b < m; ++b)
      for (int j = 0; j < n_; ++j) G(b * n_ + j, b) = cplx(0.0, kappa_[b][j]);
    return G;
  }

  // Closed (ker d) and co-closed-complement trial bases, n = 2.
  void split_bases(Mat& Y, Mat& Z, std::vector<double>& knorm) const {
    const int m = modes();
    Y = Mat::Zero(2 * m, m - 1);
    Z = Mat::Zero(2 * m, m + 1);
    knorm.clear();
    int y = 0, z = 0;
    for (int a = 0; a < m; ++a) {
      const double k0 = kappa_[a][0], k1 = kappa_[a][1];
      const double kn = std::hypot(k0, k1);
      if (kn == 0.0) {
        Z(2 * a, z++) = 1.0;
        Z(2 * a + 1, z++) = 1.0;
        continue;
      }
      Y(2 * a, y) = -k1 / kn;
      Y(2 * a + 1, y) = k0 / kn;
      ++y;
      knorm.push_back(kn);
      Z(2 * a, z) = k0 / kn;
      Z(2 * a + 1, z) = k1 / kn;
      ++z;
    }
  }

  Mat coexact_stiffness(const std::vector<double>& knorm) const {
    const int m = modes();
    std::vector<int> idx;
    for (int a = 0; a < m; ++a)
      if (ks_[a][0] != 0 || ks_[a][1] != 0) idx.push_back(a);
    const int r = static_cast<int>(idx.size());
    Mat A(r, r);
    for (int p = 0; p < r; ++p)
      for (int q = 0; q < r; ++q) A(p, q) = knorm[p] * knorm[q] * W(W_inv_, idx[p], idx[q]);
    return A;
  }

 private:
  using Table = std::vector<cplx>;

  // hat w(m) = int w exp(-i m.theta), m in [-2K, 2K]^n, by separable direct sums.
  Table transform(const std::vector<double>& w) const {
    const GridSpec& g = cache_.grid;
    const int N0 = g.resolution[0], N1 = n_ > 1 ? g.resolution[1] : 1;
    const int L = 4 * K_ + 1, L1 = n_ > 1 ? L : 1;
    std::vector<cplx> row(static_cast<std::size_t>(L) * N1);
    for (int i1 = 0; i1 < N1; ++i1)
      for (int m0 = -2 * K_; m0 <= 2 * K_; ++m0) {
        cplx s = 0.0;
        for (int i0 = 0; i0 < N0; ++i0) {
          const double ph = -2.0 * M_PI * m0 * i0 / N0;
          s += w[static_cast<std::size_t>(i0) + static_cast<std::size_t>(N0) * i1] * cplx(std::cos(ph), std::sin(ph));
        }
        row[(m0 + 2 * K_) * N1 + i1] = s;
      }
    Table t(static_cast<std::size_t>(L) * L1);
    const double cell = g.cell_volume();
    for (int m0 = 0; m0 < L; ++m0)
      for (int m1 = -(L1 / 2); m1 <= L1 / 2; ++m1) {
        cplx s = 0.0;
        for (int i1 = 0; i1 < N1; ++i1) {
          const double ph = -2.0 * M_PI * m1 * i1 / N1;
          s += row[m0 * N1 + i1] * cplx(std::cos(ph), std::sin(ph));
        }
        t[m0 * L1 + (m1 + L1 / 2)] = s * cell;
      }
    return t;
  }

  cplx W(const Table& t, int a, int b) const {
    const int L = 4 * K_ + 1, L1 = n_ > 1 ? L : 1;
    const int m0 = ks_[a][0] - ks_[b][0] + 2 * K_;
    const int m1 = ks_[a][1] - ks_[b][1] + L1 / 2;
    return t[m0 * L1 + m1];
  }

  const GeometryCache& cache_;
  int n_;
  int K_;
  std::vector<std::array<int, 2>> ks_;
  std::vector<std::array<double, 2>> kappa_;
  Table W_sqrtg_, W_inv_;
  Table W_g_[2][2];
};

struct Pencil {
  Eigen::VectorXd values;
  Mat vectors;
};

Pencil solve(const Mat& S, const Mat& M) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(S, M);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "generalized eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

double residual(const Mat& S, const Mat& M, const Pencil& p, int k) {
  const Eigen::VectorXcd v = p.vectors.col(k);
  const Eigen::VectorXcd Mv = M * v;
  return (S * v - p.values(k) * Mv).norm() / Mv.norm();
}

int first_above(const Eigen::VectorXd& values, double thr) {
  for (int k = 0; k < values.size(); ++k)
    if (values(k) > thr) return k;
  throw Error(ErrorKind::Solver, "no eigenvalue above the deflation threshold");
}

double threshold(const GeometryCache& cache) {
  const int n = cache.n;
  double est = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    double mean_ginv = 0.0;
    for (std::size_t node = 0; node < cache.nodes(); ++node) mean_ginv += cache.g_inv[node * n * n + a * n + a];
    mean_ginv /= static_cast<double>(cache.nodes());
    const double k = 2.0 * M_PI / cache.grid.periods[a];
    est = std::min(est, k * k * mean_ginv);
  }
  return 1e-8 * est;
}

}  // namespace

SpectrumResult spectrum(const GeometryCache& cache, const SpectrumOptions& options) {
  SpectrumResult r;
  Galerkin gal(cache, options.modes);
  r.basis_size = gal.modes();
  r.deflation_threshold = threshold(cache);
  const double thr = r.deflation_threshold;

  const Mat M0 = gal.mass0(), S0 = gal.stiffness0();
  const Pencil p0 = solve(S0, M0);
  ++r.iterations;
  const int k0 = first_above(p0.values, thr);
  r.lambda0 = p0.values(k0);
  r.residual_lambda0 = residual(S0, M0, p0, k0);

  Mat M1, S1;
  if (cache.n == 2) {
    M1 = gal.mass1();
    S1 = gal.stiffness1();
    Mat Y, Z;
    std::vector<double> knorm;
    gal.split_bases(Y, Z, knorm);
    const Mat A = gal.coexact_stiffness(knorm);
    const Mat MY = M1 * Y, MZ = M1 * Z;
    const Mat ZMZ = Z.adjoint() * MZ;
    Eigen::LLT<Mat> llt(ZMZ);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::Solver, "closed-form mass matrix not positive definite");
    const Mat YMZ = Y.adjoint() * MZ;
    Mat B = Y.adjoint() * MY - YMZ * llt.solve(YMZ.adjoint());
    B = 0.5 * (B + B.adjoint()).eval();
    const Pencil p1 = solve(A, B);
    ++r.iterations;
    r.rho1 = p1.values(0);
    r.residual_rho1 = residual(A, B, p1, 0);
  } else {
    r.rho1 = std::numeric_limits<double>::infinity();
  }
  r.lambda11 = std::min(r.lambda0, r.rho1);

  if (options.mixed_form) {
    if (cache.n != 2) {
      M1 = gal.mass1();
      S1 = gal.stiffness1();
    }
    const Mat G = gal.gradient();
    Eigen::LLT<Mat> m0(M0);
    const Mat GM = G.adjoint() * M1;
    Mat Q = S1 + GM.adjoint() * m0.solve(GM);
    Q = 0.5 * (Q + Q.adjoint()).eval();
    const Pencil pm = solve(Q, M1);
    ++r.iterations;
    const int kh = first_above(pm.values, thr);
    r.harmonic_dimension = kh;
    r.lambda11_mixed = pm.values(kh);
    r.residual_mixed = residual(Q, M1, pm, kh);
  }
  return r;
}

double eigen_lambda0(const GeometryCache& cache, int modes) {
  return spectrum(cache, {modes, false}).lambda0;
}

double eigen_rho1(const GeometryCache& cache, int modes) {
  return spectrum(cache, {modes, false}).rho1;
}

}  // namespace trmcf
