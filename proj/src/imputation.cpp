#include "road/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "road/errors.hpp"

namespace road {

namespace {

constexpr double kDirectWeight = 1.0 / 6.0;
constexpr double kDiagonalWeight = 1.0 / 12.0;

struct Neighbor {
  int pixel;
  double weight;
};

// 8-neighborhood within the grid
template <typename F>
void for_each_neighbor(int p, int height, int width, F&& f) {
  int i = p / width;
  int j = p % width;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      if (di == 0 && dj == 0) continue;
      int a = i + di;
      int b = j + dj;
      if (a < 0 || a >= height || b < 0 || b >= width) continue;
      double w = (di == 0 || dj == 0) ? kDirectWeight : kDiagonalWeight;
      f(a * width + b, w);
    }
  }
}

std::uint8_t kept_bit(Part part) { return part == Part::Low ? 0 : 1; }

}  // namespace

ImageTensor impute_fixed(const ImageTensor& x, const BinaryMask& m, Part part,
                         std::span<const double> value) {
  if (m.height != x.height || m.width != x.width)
    throw ShapeMismatch("mask/image shape mismatch");
  if (static_cast<int>(value.size()) != x.channels)
    throw ShapeMismatch("fill value must have one entry per channel");
  ImageTensor out = x;
  std::uint8_t keep = kept_bit(part);
  for (int p = 0; p < m.num_pixels(); ++p) {
    if (m.bits[p] == keep) continue;
    for (int c = 0; c < x.channels; ++c)
      out.data[static_cast<std::size_t>(p) * x.channels + c] = value[c];
  }
  return out;
}

SparseSystem assemble_system(const ImageTensor& x, const std::vector<int>& unknown,
                             int channel) {
  SparseSystem s;
  s.n_unknowns = static_cast<int>(unknown.size());
  s.unknown_index_map.reserve(unknown.size());
  for (int r = 0; r < s.n_unknowns; ++r) s.unknown_index_map[unknown[r]] = r;
  s.rhs.assign(unknown.size(), 0.0);
  for (int r = 0; r < s.n_unknowns; ++r) {
    int p = unknown[r];
    double diag = 0.0;
    for_each_neighbor(p, x.height, x.width, [&](int q, double w) {
      diag += w;
      auto it = s.unknown_index_map.find(q);
      if (it != s.unknown_index_map.end()) {
        s.entries.emplace_back(r, it->second, -w);
      } else {
        s.rhs[r] += w * x.data[static_cast<std::size_t>(q) * x.channels + channel];
      }
    });
    s.entries.emplace_back(r, r, diag);
  }
  return s;
}

std::vector<double> solve_system(const SparseSystem& s, double tol, int max_iters) {
  int n = s.n_unknowns;
  if (max_iters <= 0) max_iters = 10 * std::max(1, n);

  // CSR
  std::vector<int> row_count(n, 0);
  for (const auto& [r, c, v] : s.entries) row_count[r]++;
  std::vector<int> row_start(n + 1, 0);
  for (int r = 0; r < n; ++r) row_start[r + 1] = row_start[r] + row_count[r];
  std::vector<int> col(s.entries.size());
  std::vector<double> val(s.entries.size());
  {
    std::vector<int> cursor(row_start.begin(), row_start.end() - 1);
    for (const auto& [r, c, v] : s.entries) {
      col[cursor[r]] = c;
      val[cursor[r]] = v;
      cursor[r]++;
    }
  }
  std::vector<double> inv_diag(n, 1.0);
  for (const auto& [r, c, v] : s.entries)
    if (r == c && v > 0.0) inv_diag[r] = 1.0 / v;

  auto matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int idx = row_start[r]; idx < row_start[r + 1]; ++idx)
        acc += val[idx] * in[col[idx]];
      out[r] = acc;
    }
  };

  std::vector<double> x(n, 0.0), r = s.rhs, z(n), p(n), ap(n);
  double rhs_norm = 0.0;
  for (double v : s.rhs) rhs_norm += v * v;
  rhs_norm = std::sqrt(rhs_norm);
  double target = tol * std::max(1.0, rhs_norm);

  auto resid_norm = [&] {
    double acc = 0.0;
    for (double v : r) acc += v * v;
    return std::sqrt(acc);
  };

  if (resid_norm() <= target) return x;

  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];

  for (int it = 0; it < max_iters; ++it) {
    matvec(p, ap);
    double pap = 0.0;
    for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
    if (pap <= 0.0) break;
    double alpha = rz / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    if (resid_norm() <= target) return x;
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) {
      z[i] = inv_diag[i] * r[i];
      rz_new += r[i] * z[i];
    }
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverDiverged("conjugate gradient did not reach tolerance");
}

ImageTensor impute_noisy_linear(const ImageTensor& x, const BinaryMask& m, Part part,
                                const NoisyLinearStrategy& cfg, Rng& rng,
                                std::span<const double> fallback_mean) {
  if (m.height != x.height || m.width != x.width)
    throw ShapeMismatch("mask/image shape mismatch");
  std::uint8_t keep = kept_bit(part);
  std::vector<int> removed;
  for (int p = 0; p < m.num_pixels(); ++p)
    if (m.bits[p] != keep) removed.push_back(p);
  if (removed.empty()) return x;

  // split the unknown set into components reachable from a known pixel
  // (solvable) and fully isolated ones (singular: mean fallback)
  std::vector<std::int8_t> is_unknown(m.num_pixels(), 0);
  for (int p : removed) is_unknown[p] = 1;
  std::vector<std::int8_t> visited(m.num_pixels(), 0);
  std::vector<int> grounded, isolated;
  for (int start : removed) {
    if (visited[start]) continue;
    std::vector<int> component;
    bool has_known_neighbor = false;
    std::queue<int> q;
    q.push(start);
    visited[start] = 1;
    while (!q.empty()) {
      int p = q.front();
      q.pop();
      component.push_back(p);
      for_each_neighbor(p, x.height, x.width, [&](int nb, double) {
        if (!is_unknown[nb]) {
          has_known_neighbor = true;
        } else if (!visited[nb]) {
          visited[nb] = 1;
          q.push(nb);
        }
      });
    }
    auto& dst = has_known_neighbor ? grounded : isolated;
    dst.insert(dst.end(), component.begin(), component.end());
  }
  std::sort(grounded.begin(), grounded.end());
  std::sort(isolated.begin(), isolated.end());

  ImageTensor out = x;
  if (!grounded.empty()) {
    for (int c = 0; c < x.channels; ++c) {
      SparseSystem sys = assemble_system(x, grounded, c);
      std::vector<double> sol = solve_system(sys, cfg.solver_tol, cfg.solver_max_iters);
      for (std::size_t r = 0; r < grounded.size(); ++r)
        out.data[static_cast<std::size_t>(grounded[r]) * x.channels + c] = sol[r];
    }
  }
  if (!isolated.empty()) {
    if (static_cast<int>(fallback_mean.size()) != x.channels)
      throw ShapeMismatch("fallback mean must have one entry per channel");
    for (int p : isolated)
      for (int c = 0; c < x.channels; ++c)
        out.data[static_cast<std::size_t>(p) * x.channels + c] = fallback_mean[c];
  }

  double sigma = cfg.noise_scale;
  if (cfg.noise_scale_mode == NoiseScaleMode::RangeFraction) {
    auto [lo, hi] = x.value_range();
    sigma = cfg.noise_scale * (hi - lo);
  }
  if (sigma > 0.0) {
    for (int p : removed)
      for (int c = 0; c < x.channels; ++c)
        out.data[static_cast<std::size_t>(p) * x.channels + c] += sigma * rng.normal();
  }
  return out;
}

BinaryMask probe_fixed_inverse(const ImageTensor& x_imp,
                               std::span<const double> fill_value) {
  BinaryMask m{x_imp.height, x_imp.width,
               std::vector<std::uint8_t>(static_cast<std::size_t>(x_imp.num_pixels()), 0), 0};
  for (int p = 0; p < x_imp.num_pixels(); ++p) {
    bool all_fill = true;
    for (int c = 0; c < x_imp.channels && all_fill; ++c)
      all_fill = x_imp.data[static_cast<std::size_t>(p) * x_imp.channels + c] == fill_value[c];
    if (all_fill) {
      m.bits[p] = 1;
      m.k++;
    }
  }
  return m;
}

}  // namespace road
