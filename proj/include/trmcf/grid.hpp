#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace trmcf {

inline constexpr int kMaxIntrinsicDim = 2;

// Uniform periodic grid on the parameter torus. Node index = i0 + N0 * i1.
struct GridSpec {
  int dim = 2;
  std::array<int, kMaxIntrinsicDim> resolution{64, 64};
  std::array<double, kMaxIntrinsicDim> periods{1.0, 1.0};
  int fd_order = 4;

  void validate() const;
  std::size_t node_count() const;
  double spacing(int axis) const { return periods[axis] / resolution[axis]; }
  double cell_volume() const;
  std::array<int, kMaxIntrinsicDim> coords(std::size_t node) const;
  std::size_t index(int i0, int i1 = 0) const;
  // Parameter coordinates of a node.
  std::array<double, kMaxIntrinsicDim> parameter(std::size_t node) const;
};

bool operator==(const GridSpec& a, const GridSpec& b);

// Central periodic derivative along `axis` of a field with `ncomp` components per node.
// `wrap_offset` (ncomp entries, may be empty) is added once per period crossed, so
// fields with F(x + P e_axis) = F(x) + offset are differentiated without seams.
void differentiate(const GridSpec& grid, std::span<const double> field, int ncomp, int axis,
                   std::span<double> out, std::span<const double> wrap_offset = {});

// Compact central second derivative along one axis (same offset convention).
void differentiate2(const GridSpec& grid, std::span<const double> field, int ncomp, int axis,
                    std::span<double> out, std::span<const double> wrap_offset = {});

std::vector<double> derivative(const GridSpec& grid, std::span<const double> field, int ncomp, int axis,
                               std::span<const double> wrap_offset = {});

// Trapezoidal (spectrally accurate) sum over the periodic grid of weight * field.
double integrate(const GridSpec& grid, std::span<const double> density);

}  // namespace trmcf
