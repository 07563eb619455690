#include "trmcf/immersion.hpp"

#include "trmcf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace trmcf {

void ImmersionState::validate() const {
  grid.validate();
  ambient.validate();
  if (grid.dim != ambient.complex_dimension)
    throw Error(ErrorKind::InvalidArgument, "intrinsic dimension must equal the ambient complex dimension");
  const int D = real_dim();
  if (points.size() != grid.node_count() * D)
    throw Error(ErrorKind::InvalidArgument, "point array does not match grid and ambient dimension");
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    try {
      check_chart(ambient, point(node));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " at node " + std::to_string(node));
    }
  }
  const int n = grid.dim;
  const std::vector<double> Fi = partial_derivatives(*this);
  AmbientFrame frame;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    evaluate_frame(ambient, &points[node * D], frame, false);
    double g[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double* a = &Fi[(node * n + i) * D];
        const double* b = &Fi[(node * n + j) * D];
        double s = 0.0;
        for (int p = 0; p < D; ++p)
          for (int q = 0; q < D; ++q) s += a[p] * frame.metric[p][q] * b[q];
        g[i][j] = s;
      }
    const bool ok = (n == 1) ? g[0][0] > 0.0 : (g[0][0] > 0.0 && g[0][0] * g[1][1] - g[0][1] * g[1][0] > 0.0);
    if (!ok)
      throw Error(ErrorKind::Immersion, "induced metric not positive definite at node " + std::to_string(node));
  }
}

std::vector<double> partial_derivatives(const ImmersionState& state) {
  const GridSpec& grid = state.grid;
  const int n = grid.dim, D = state.real_dim();
  const std::size_t N = grid.node_count();
  std::vector<double> out(N * n * D);
  std::vector<double> tmp(N * D);
  for (int i = 0; i < n; ++i) {
    differentiate(grid, state.points, D, i, tmp, state.winding_of(i));
    for (std::size_t node = 0; node < N; ++node)
      std::copy_n(&tmp[node * D], D, &out[(node * n + i) * D]);
  }
  return out;
}

void derivatives(const ImmersionState& state, std::vector<double>& first, std::vector<double>& second) {
  const GridSpec& grid = state.grid;
  const int n = grid.dim, D = state.real_dim();
  const std::size_t N = grid.node_count();
  first.resize(N * n * D);
  second.resize(N * n * n * D);
  std::vector<double> tmp(N * D), d0(N * D), mixed(N * D);
  for (int i = 0; i < n; ++i) {
    differentiate(grid, state.points, D, i, tmp, state.winding_of(i));
    for (std::size_t node = 0; node < N; ++node)
      std::copy_n(&tmp[node * D], D, &first[(node * n + i) * D]);
    if (i == 0 && n > 1) d0 = tmp;
    differentiate2(grid, state.points, D, i, tmp, state.winding_of(i));
    for (std::size_t node = 0; node < N; ++node)
      std::copy_n(&tmp[node * D], D, &second[(node * n * n + i * n + i) * D]);
  }
  if (n == 2) {
    differentiate(grid, d0, D, 1, mixed);
    for (std::size_t node = 0; node < N; ++node) {
      std::copy_n(&mixed[node * D], D, &second[(node * 4 + 1) * D]);
      std::copy_n(&mixed[node * D], D, &second[(node * 4 + 2) * D]);
    }
  }
}

std::vector<double> second_derivatives(const ImmersionState& state) {
  std::vector<double> first, second;
  derivatives(state, first, second);
  return second;
}

double chart_margin(const ImmersionState& state) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t node = 0; node < state.grid.node_count(); ++node)
    m = std::min(m, chart_margin(state.ambient, state.point(node)));
  return m;
}

}  // namespace trmcf
