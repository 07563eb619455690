#pragma once

#include "trmcf/ambient.hpp"
#include "trmcf/grid.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace trmcf {

// Discretized immersion F: T^n -> X. points holds real_dim doubles per node.
// winding[a] is the ambient lattice translation picked up across one period of axis a:
// F(u + P_a e_a) = F(u) + winding[a].
struct ImmersionState {
  GridSpec grid;
  AmbientModel ambient;
  std::vector<double> points;
  std::array<std::array<double, kMaxRealDim>, kMaxIntrinsicDim> winding{};
  double time = 0.0;

  int real_dim() const { return ambient.real_dimension(); }
  std::span<const double> point(std::size_t node) const {
    return {points.data() + node * real_dim(), static_cast<std::size_t>(real_dim())};
  }
  std::span<const double> winding_of(int axis) const {
    return {winding[axis].data(), static_cast<std::size_t>(real_dim())};
  }
  // Shape, chart-guard and immersion (g positive definite) checks.
  void validate() const;
};

// F_i: node-major, per node n * real_dim values ordered [i][a].
std::vector<double> partial_derivatives(const ImmersionState& state);
// F_ij: node-major, per node n * n * real_dim values ordered [i][j][a]; symmetric by construction.
std::vector<double> second_derivatives(const ImmersionState& state);
// Both at once, reusing F_i for the mixed derivative.
void derivatives(const ImmersionState& state, std::vector<double>& first, std::vector<double>& second);

struct PresetParams {
  std::string name;
  int resolution = 64;             // per axis
  int fd_order = 4;
  int intrinsic_dim = 2;
  double epsilon = 0.0;            // perturbation amplitude
  std::array<int, 2> mode{1, 0};   // perturbation wave vector
  int direction = 2;               // flat graph perturbation acts on v_direction
  std::array<double, 2> radii{1.0, 1.0};
  std::vector<double> lattice_periods;  // flat ambient; default 1
  double chart_radius_max = 10.0;
  double noise = 0.0;              // seeded smooth random perturbation amplitude
  std::uint64_t seed = 0;
  std::string path;                // file preset
};

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> preset_list();
ImmersionState preset(const PresetParams& params);

void save_snapshot(const ImmersionState& state, const std::string& path);
ImmersionState load_snapshot(const std::string& path);

// Minimum over nodes of the chart margin.
double chart_margin(const ImmersionState& state);

}  // namespace trmcf
