#include "trmcf/flow.hpp"

#include "trmcf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace trmcf {

std::vector<double> mu_accumulate(const std::vector<double>& t, const std::vector<double>& sup_AH) {
  if (t.size() != sup_AH.size()) throw Error(ErrorKind::InvalidArgument, "mu: series length mismatch");
  std::vector<double> mu(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double dt = t[i] - t[i - 1];
    if (dt < 0.0) throw Error(ErrorKind::InvalidArgument, "mu: times must be ordered");
    mu[i] = mu[i - 1] + dt * (sup_AH[i] + sup_AH[i - 1]);  // 2 * trapezoid
  }
  return mu;
}

std::vector<double> kappa_envelope(double kappa0, const std::vector<double>& mu, int n) {
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out[i] = kappa0 * std::exp(-(n + 1) * mu[i]);
  return out;
}

EigenEnvelope eigen_envelope(double lambda11_0, const std::vector<double>& mu) {
  EigenEnvelope e;
  for (double m : mu) {
    e.lower.push_back(lambda11_0 * std::exp(-3.0 * m));
    e.upper.push_back(lambda11_0 * std::exp(3.0 * m));
  }
  return e;
}

double sup_from_l2(double C0, double m, double kappa, double r0, int n) {
  if (!(C0 > 0.0 && m > 0.0 && kappa > 0.0 && r0 > 0.0 && n >= 1))
    throw Error(ErrorKind::InvalidArgument, "sup_from_l2 needs positive inputs");
  const double e = n + 2.0;
  const double first = 2.0 * std::pow(C0, n / e) / std::pow(kappa, 1.0 / e);
  const double second = std::pow(2.0, e / 2.0) * std::pow(m, n / (2.0 * e)) / std::sqrt(kappa * std::pow(r0, n));
  return std::max(first, second) * std::pow(m, 1.0 / e);
}

double default_r0(const GeometryCache& cache) {
  double r0 = INFINITY;
  const int n = cache.n;
  for (int a = 0; a < n; ++a) {
    double s = INFINITY;
    for (std::size_t node = 0; node < cache.nodes(); ++node)
      s = std::min(s, std::sqrt(cache.g[node * n * n + a * n + a]));
    r0 = std::min(r0, 0.5 * s * cache.grid.periods[a]);
  }
  return r0;
}

double kappa_estimate(const GeometryCache& cache, double r0) {
  if (!(r0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "kappa_estimate needs r0 > 0");
  const GridSpec& G = cache.grid;
  const int n = cache.n;
  const int N0 = G.resolution[0];
  const int N1 = n == 2 ? G.resolution[1] : 1;
  const std::size_t nodes = cache.nodes();

  std::vector<std::array<int, 2>> offsets;
  if (n == 1) {
    offsets = {{1, 0}, {-1, 0}, {2, 0}, {-2, 0}};
  } else {
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) {
        if (a == 0 && b == 0) continue;
        const int m = std::max(std::abs(a), std::abs(b));
        if (m == 2 && (std::abs(a) != 1 && std::abs(b) != 1)) continue;  // 16-neighbour stencil
        offsets.push_back({a, b});
      }
  }
  auto metric = [&](std::size_t node, int i, int j) { return cache.g[node * n * n + i * n + j]; };
  auto edge = [&](std::size_t p, std::size_t q, const std::array<int, 2>& o) {
    const double du[2] = {o[0] * G.spacing(0), n == 2 ? o[1] * G.spacing(1) : 0.0};
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += 0.5 * (metric(p, i, j) + metric(q, i, j)) * du[i] * du[j];
    return std::sqrt(s);
  };

  const int centers_per_axis = 3;
  std::vector<std::size_t> centers;
  for (int a = 0; a < centers_per_axis; ++a)
    for (int b = 0; b < (n == 2 ? centers_per_axis : 1); ++b)
      centers.push_back(G.index(a * N0 / centers_per_axis, b * N1 / centers_per_axis));
  const int radii = 8;

  double kappa = INFINITY;
  std::vector<double> dist(nodes);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t c : centers) {
    std::fill(dist.begin(), dist.end(), INFINITY);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[c] = 0.0;
    pq.push({0.0, c});
    while (!pq.empty()) {
      auto [d, p] = pq.top();
      pq.pop();
      if (d > dist[p] || d > r0) continue;
      const auto pc = G.coords(p);
      for (const auto& o : offsets) {
        const int i0 = ((pc[0] + o[0]) % N0 + N0) % N0;
        const int i1 = n == 2 ? ((pc[1] + o[1]) % N1 + N1) % N1 : 0;
        const std::size_t q = G.index(i0, i1);
        const double nd = d + edge(p, q, o);
        if (nd < dist[q]) {
          dist[q] = nd;
          pq.push({nd, q});
        }
      }
    }
    for (int k = 0; k < radii; ++k) {
      const double r = r0 * (0.25 + 0.75 * k / (radii - 1));
      double vol = 0.0;
      for (std::size_t q = 0; q < nodes; ++q)
        if (dist[q] < r) vol += cache.sqrt_det_g[q];
      vol *= cache.cell_volume();
      kappa = std::min(kappa, vol / std::pow(r, n));
    }
  }
  return kappa;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& values, double t_start, double t_end) {
  if (t.size() != values.size()) throw Error(ErrorKind::InvalidArgument, "decay_fit: series length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  DecayFit fit;
  fit.t_start = INFINITY;
  fit.t_end = -INFINITY;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_start || t[i] > t_end) continue;
    if (!(values[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "decay_fit: nonpositive sample");
    pts.emplace_back(t[i], std::log(values[i]));
  }
  if (pts.size() < 10) throw Error(ErrorKind::InvalidArgument, "decay_fit: fewer than 10 samples in window");
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    fit.t_start = std::min(fit.t_start, x);
    fit.t_end = std::max(fit.t_end, x);
  }
  const double m = static_cast<double>(pts.size());
  const double mx = sx / m, my = sy / m;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::InvalidArgument, "decay_fit: degenerate time window");
  const double slope = sxy / sxx;
  fit.rate = -slope;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.samples = static_cast<int>(pts.size());
  return fit;
}

}  // namespace trmcf

namespace trmcf {

MonitorSummary summarize_monitors(const RunResult& result) {
  MonitorSummary m;
  const auto& R = result.records;
  bool satisfied_seen = false;
  for (const auto& c : result.certificates) {
    switch (c.l2ctl) {
      case L2ControlVerdict::Satisfied: ++m.l2ctl_satisfied; satisfied_seen = true; break;
      case L2ControlVerdict::Violated: ++m.l2ctl_violated; m.l2ctl_transition_ok = false; break;
      case L2ControlVerdict::Vacuous:
        ++m.l2ctl_vacuous;
        if (satisfied_seen) m.l2ctl_transition_ok = false;
        break;
    }
    if (!certificate_consistent(c)) ++m.inconsistent_certificates;
  }
  for (std::size_t i = 0; i < R.size(); ++i) {
    const auto& r = R[i];
    if (std::isfinite(r.sandwich)) {
      ++m.sandwich_checked;
      if (r.sandwich > 1e-12) ++m.sandwich_violations;
    }
    if (std::isfinite(r.sup_H_bound)) {
      ++m.sup_bound_checked;
      if (std::sqrt(r.sup_H2) > r.sup_H_bound * (1.0 + 1e-9)) ++m.sup_bound_violations;
    }
    if (i > 0 && r.vol > R[i - 1].vol * (1.0 + 1e-13) + 1e-15) ++m.volume_increases;
    if (std::isfinite(r.kappa_measured)) {
      ++m.kappa_checked;
      if (r.kappa_measured < r.kappa_lower * (1.0 - 1e-9)) ++m.kappa_violations;
    }
    if (r.eig_exact && std::isfinite(r.lambda_env_lower)) {
      ++m.lambda_checked;
      if (r.lambda11 < r.lambda_env_lower * (1.0 - 1e-9) || r.lambda11 > r.lambda_env_upper * (1.0 + 1e-9))
        ++m.lambda_violations;
    }
    if (!R.empty()) m.cohomology_drift = std::max(m.cohomology_drift, std::abs(r.cohomology - R.front().cohomology));
  }
  return m;
}

}  // namespace trmcf
