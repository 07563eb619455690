#include "trmcf/grid.hpp"

#include "trmcf/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace trmcf {

namespace {

struct Stencil {
  int half;
  double c[5];  // offsets -half..half
};

Stencil first_stencil(int order) {
  if (order == 2) return {1, {-0.5, 0.0, 0.5, 0, 0}};
  return {2, {1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0}};
}

Stencil second_stencil(int order) {
  if (order == 2) return {1, {1.0, -2.0, 1.0, 0, 0}};
  return {2, {-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0}};
}

void apply(const GridSpec& grid, std::span<const double> field, int ncomp, int axis,
           std::span<double> out, std::span<const double> offset, const Stencil& st, double scale) {
  const int N0 = grid.resolution[0];
  const int N1 = grid.dim > 1 ? grid.resolution[1] : 1;
  const int Na = grid.resolution[axis];
  const int lines = axis == 0 ? N1 : N0;
  const std::size_t stride = (axis == 0) ? 1 : static_cast<std::size_t>(N0);
  const int h = st.half;
  const bool has_offset = !offset.empty();
  double w[5];
  for (int s = 0; s < 2 * h + 1; ++s) w[s] = st.c[s] * scale;
  // Padded copy of one grid line with periodic halo (offset-corrected across the seam).
  std::vector<double> pad(static_cast<std::size_t>(Na + 2 * h) * ncomp);
  for (int line = 0; line < lines; ++line) {
    const std::size_t base = axis == 0 ? static_cast<std::size_t>(line) * N0 : static_cast<std::size_t>(line);
    for (int j = -h; j < Na + h; ++j) {
      int jj = j, wraps = 0;
      if (jj < 0) { jj += Na; wraps = -1; }
      else if (jj >= Na) { jj -= Na; wraps = 1; }
      const double* f = &field[(base + static_cast<std::size_t>(jj) * stride) * ncomp];
      double* d = &pad[static_cast<std::size_t>(j + h) * ncomp];
      if (has_offset && wraps != 0)
        for (int c = 0; c < ncomp; ++c) d[c] = f[c] + wraps * offset[c];
      else
        for (int c = 0; c < ncomp; ++c) d[c] = f[c];
    }
    for (int i = 0; i < Na; ++i) {
      double* o = &out[(base + static_cast<std::size_t>(i) * stride) * ncomp];
      const double* p = &pad[static_cast<std::size_t>(i) * ncomp];
      if (h == 2) {
        for (int c = 0; c < ncomp; ++c)
          o[c] = w[0] * p[c] + w[1] * p[ncomp + c] + w[2] * p[2 * ncomp + c] + w[3] * p[3 * ncomp + c] +
                 w[4] * p[4 * ncomp + c];
      } else {
        for (int c = 0; c < ncomp; ++c) o[c] = w[0] * p[c] + w[1] * p[ncomp + c] + w[2] * p[2 * ncomp + c];
      }
    }
  }
}

void check_sizes(const GridSpec& grid, std::span<const double> field, int ncomp, std::span<double> out,
                 int axis) {
  if (axis < 0 || axis >= grid.dim) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  const std::size_t expect = grid.node_count() * static_cast<std::size_t>(ncomp);
  if (field.size() != expect || out.size() != expect)
    throw Error(ErrorKind::InvalidArgument, "field size does not match grid");
}

}  // namespace

void GridSpec::validate() const {
  if (dim < 1 || dim > kMaxIntrinsicDim)
    throw Error(ErrorKind::InvalidArgument, "intrinsic dimension must be 1 or 2");
  if (fd_order != 2 && fd_order != 4)
    throw Error(ErrorKind::InvalidArgument, "fd_order must be 2 or 4, got " + std::to_string(fd_order));
  for (int a = 0; a < dim; ++a) {
    if (resolution[a] < 8)
      throw Error(ErrorKind::InvalidArgument, "resolution must be >= 8 per axis");
    if (!(periods[a] > 0.0) || !std::isfinite(periods[a]))
      throw Error(ErrorKind::InvalidArgument, "periods must be positive");
  }
}

std::size_t GridSpec::node_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(resolution[a]);
  return n;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

std::array<int, kMaxIntrinsicDim> GridSpec::coords(std::size_t node) const {
  std::array<int, kMaxIntrinsicDim> c{0, 0};
  c[0] = static_cast<int>(node % resolution[0]);
  if (dim > 1) c[1] = static_cast<int>(node / resolution[0]);
  return c;
}

std::size_t GridSpec::index(int i0, int i1) const {
  return static_cast<std::size_t>(i0) + static_cast<std::size_t>(resolution[0]) * i1;
}

std::array<double, kMaxIntrinsicDim> GridSpec::parameter(std::size_t node) const {
  const auto c = coords(node);
  std::array<double, kMaxIntrinsicDim> u{0.0, 0.0};
  for (int a = 0; a < dim; ++a) u[a] = c[a] * spacing(a);
  return u;
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  if (a.dim != b.dim || a.fd_order != b.fd_order) return false;
  for (int i = 0; i < a.dim; ++i)
    if (a.resolution[i] != b.resolution[i] || a.periods[i] != b.periods[i]) return false;
  return true;
}

void differentiate(const GridSpec& grid, std::span<const double> field, int ncomp, int axis,
                   std::span<double> out, std::span<const double> wrap_offset) {
  check_sizes(grid, field, ncomp, out, axis);
  apply(grid, field, ncomp, axis, out, wrap_offset, first_stencil(grid.fd_order), 1.0 / grid.spacing(axis));
}

void differentiate2(const GridSpec& grid, std::span<const double> field, int ncomp, int axis,
                    std::span<double> out, std::span<const double> wrap_offset) {
  check_sizes(grid, field, ncomp, out, axis);
  const double h = grid.spacing(axis);
  apply(grid, field, ncomp, axis, out, wrap_offset, second_stencil(grid.fd_order), 1.0 / (h * h));
}

std::vector<double> derivative(const GridSpec& grid, std::span<const double> field, int ncomp, int axis,
                               std::span<const double> wrap_offset) {
  std::vector<double> out(field.size());
  differentiate(grid, field, ncomp, axis, out, wrap_offset);
  return out;
}

double integrate(const GridSpec& grid, std::span<const double> density) {
  double s = 0.0;
  for (double v : density) s += v;
  return s * grid.cell_volume();
}

}  // namespace trmcf
