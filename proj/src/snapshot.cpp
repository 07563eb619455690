#include "trmcf/errors.hpp"
#include "trmcf/immersion.hpp"

#include "json.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace trmcf {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "trmcf-snapshot";

void to_little_endian(std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::big) {
    for (double& x : v) {
      unsigned char b[8];
      std::memcpy(b, &x, 8);
      for (int i = 0; i < 4; ++i) std::swap(b[i], b[7 - i]);
      std::memcpy(&x, b, 8);
    }
  }
}

json header_of(const ImmersionState& s) {
  const GridSpec& g = s.grid;
  json grid = {{"dim", g.dim}, {"fd_order", g.fd_order}};
  grid["resolution"] = std::vector<int>(g.resolution.begin(), g.resolution.begin() + g.dim);
  grid["periods"] = std::vector<double>(g.periods.begin(), g.periods.begin() + g.dim);
  json amb = {{"kind", to_string(s.ambient.kind)},
              {"complex_dimension", s.ambient.complex_dimension},
              {"lattice_periods", s.ambient.lattice_periods},
              {"ke_constant", s.ambient.ke_constant},
              {"chart_radius_max", s.ambient.chart_radius_max}};
  json wind = json::array();
  for (int a = 0; a < g.dim; ++a)
    wind.push_back(std::vector<double>(s.winding[a].begin(), s.winding[a].begin() + s.real_dim()));
  return {{"format", kFormat},
          {"version", 1},
          {"time", s.time},
          {"grid", grid},
          {"ambient", amb},
          {"winding", wind},
          {"node_count", g.node_count()},
          {"values_per_node", s.real_dim()},
          {"byte_order", "little"},
          {"payload_doubles", s.points.size()}};
}

}  // namespace

void save_snapshot(const ImmersionState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << header_of(state).dump() << '\n';
  std::vector<double> payload = state.points;
  to_little_endian(payload);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

ImmersionState load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open snapshot '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Format, "snapshot '" + path + "' has no header");
  ImmersionState s;
  std::size_t expected = 0;
  try {
    const json h = json::parse(line);
    if (h.at("format").get<std::string>() != kFormat)
      throw Error(ErrorKind::Format, "not a trmcf snapshot: '" + path + "'");
    const json& g = h.at("grid");
    s.grid.dim = g.at("dim").get<int>();
    s.grid.fd_order = g.at("fd_order").get<int>();
    const auto res = g.at("resolution").get<std::vector<int>>();
    const auto per = g.at("periods").get<std::vector<double>>();
    if (static_cast<int>(res.size()) != s.grid.dim || static_cast<int>(per.size()) != s.grid.dim)
      throw Error(ErrorKind::Format, "grid arrays do not match grid dimension");
    s.grid.resolution = {1, 1};
    s.grid.periods = {1.0, 1.0};
    for (int a = 0; a < s.grid.dim; ++a) {
      s.grid.resolution[a] = res[a];
      s.grid.periods[a] = per[a];
    }
    const json& a = h.at("ambient");
    s.ambient.kind = ambient_kind_from_string(a.at("kind").get<std::string>());
    s.ambient.complex_dimension = a.at("complex_dimension").get<int>();
    s.ambient.lattice_periods = a.at("lattice_periods").get<std::vector<double>>();
    s.ambient.ke_constant = a.at("ke_constant").get<double>();
    s.ambient.chart_radius_max = a.at("chart_radius_max").get<double>();
    s.grid.validate();
    s.ambient.validate();
    const auto wind = h.at("winding").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(wind.size()) != s.grid.dim)
      throw Error(ErrorKind::Format, "winding does not match grid dimension");
    for (int ax = 0; ax < s.grid.dim; ++ax) {
      if (static_cast<int>(wind[ax].size()) != s.real_dim())
        throw Error(ErrorKind::Format, "winding vector has wrong length");
      for (int c = 0; c < s.real_dim(); ++c) s.winding[ax][c] = wind[ax][c];
    }
    s.time = h.at("time").get<double>();
    expected = s.grid.node_count() * s.real_dim();
    if (h.at("payload_doubles").get<std::size_t>() != expected ||
        h.at("values_per_node").get<int>() != s.real_dim())
      throw Error(ErrorKind::Format, "header dimensions are inconsistent");
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Format, "malformed snapshot header in '" + path + "': " + e.what());
  }
  s.points.resize(expected);
  in.read(reinterpret_cast<char*>(s.points.data()), static_cast<std::streamsize>(expected * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != expected * sizeof(double))
    throw Error(ErrorKind::Format, "dimension mismatch: snapshot payload holds " +
                                       std::to_string(in.gcount() / sizeof(double)) + " doubles, header declares " +
                                       std::to_string(expected));
  in.peek();
  if (!in.eof()) throw Error(ErrorKind::Format, "dimension mismatch: trailing bytes after snapshot payload");
  to_little_endian(s.points);
  return s;
}

}  // namespace trmcf
