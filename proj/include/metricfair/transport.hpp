// Copyright 2026 The metricfair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Discrete optimal transport between two probability vectors: an exact
// successive-shortest-path solver and a log-domain Sinkhorn solver with a
// final rounding onto the transport polytope.

#ifndef METRICFAIR_TRANSPORT_HPP_
#define METRICFAIR_TRANSPORT_HPP_

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "metricfair/core.hpp"

namespace metricfair {

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix FromRows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) {
        throw Error(ErrorCode::kDimensionMismatch, "ragged matrix rows");
      }
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * m.cols_));
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> Row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  std::vector<std::vector<double>> ToRows() const {
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(Row(i).begin(), Row(i).end());
    return out;
  }

  double RowSum(std::size_t i) const {
    auto r = Row(i);
    return std::accumulate(r.begin(), r.end(), 0.0);
  }

  double ColSum(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, j);
    return s;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TransportPlan {
  Matrix plan;
  Matrix cost;
  double objective = 0.0;
};

inline double TransportObjective(const Matrix& plan, const Matrix& cost) {
  double total = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    for (std::size_t j = 0; j < plan.cols(); ++j) total += plan(i, j) * cost(i, j);
  }
  return total;
}

namespace detail {

inline std::vector<double> CheckedWeights(std::span<const double> w, const char* side) {
  if (w.empty()) {
    throw Error(ErrorCode::kInfeasibleWeights, std::string(side) + " weights are empty");
  }
  double sum = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInfeasibleWeights,
                  std::string(side) + " weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInfeasibleWeights,
                std::string(side) + " weights sum to " + std::to_string(sum) + ", not 1");
  }
  std::vector<double> out(w.begin(), w.end());
  for (double& v : out) v /= sum;
  return out;
}

inline void CheckCost(const Matrix& cost, std::size_t n, std::size_t m) {
  if (cost.rows() != n || cost.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "cost matrix shape does not match weights");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (double c : cost.Row(i)) {
      if (!std::isfinite(c) || c < 0.0) {
        throw Error(ErrorCode::kInfeasibleWeights, "cost entries must be finite and nonnegative");
      }
    }
  }
}

}  // namespace detail

// Exact transport by successive shortest augmenting paths on the residual
// bipartite graph (source -> rows -> columns -> sink). Path search is
// Bellman-Ford style since backward arcs carry negative cost.
inline TransportPlan SolveOtExact(std::span<const double> weights_a,
                                  std::span<const double> weights_b, const Matrix& cost) {
  std::vector<double> supply = detail::CheckedWeights(weights_a, "source");
  std::vector<double> demand = detail::CheckedWeights(weights_b, "target");
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  detail::CheckCost(cost, n, m);

  constexpr double kTol = 1e-14;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Matrix flow(n, m);

  // Node ids: rows 0..n-1, columns n..n+m-1.
  const std::size_t nodes = n + m;
  std::vector<double> dist(nodes);
  std::vector<long> parent(nodes);
  std::vector<bool> queued(nodes);
  std::vector<int> relax_count(nodes);
  const std::size_t max_augment = 4 * (n + m) * (n + m) + 1000;

  for (std::size_t iter = 0;; ++iter) {
    double remaining = 0.0;
    for (double s : supply) remaining += s;
    if (remaining <= kTol * static_cast<double>(n)) break;
    if (iter > max_augment) {
      throw Error(ErrorCode::kSolverDiverged, "exact transport did not terminate");
    }

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(queued.begin(), queued.end(), false);
    std::fill(relax_count.begin(), relax_count.end(), 0);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
      if (supply[i] > kTol) {
        dist[i] = 0.0;
        queue.push_back(i);
        queued[i] = true;
      }
    }
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      queued[u] = false;
      if (++relax_count[u] > static_cast<int>(nodes) + 1) continue;
      auto relax = [&](std::size_t v, double d) {
        if (d < dist[v] - 1e-15) {
          dist[v] = d;
          parent[v] = static_cast<long>(u);
          if (!queued[v]) {
            queue.push_back(v);
            queued[v] = true;
          }
        }
      };
      if (u < n) {
        for (std::size_t j = 0; j < m; ++j) relax(n + j, dist[u] + cost(u, j));
      } else {
        std::size_t j = u - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (flow(i, j) > kTol) relax(i, dist[u] - cost(i, j));
        }
      }
    }

    long best = -1;
    for (std::size_t j = 0; j < m; ++j) {
      if (demand[j] > kTol && dist[n + j] < kInf &&
          (best < 0 || dist[n + j] < dist[static_cast<std::size_t>(best)])) {
        best = static_cast<long>(n + j);
      }
    }
    if (best < 0) break;

    // Trace back and find the bottleneck.
    std::vector<std::size_t> path;
    for (long v = best; v >= 0; v = parent[static_cast<std::size_t>(v)]) {
      path.push_back(static_cast<std::size_t>(v));
      if (path.size() > nodes + 1) {
        throw Error(ErrorCode::kSolverDiverged, "cycle in augmenting path");
      }
    }
    std::reverse(path.begin(), path.end());
    double delta = std::min(supply[path.front()], demand[path.back() - n]);
    for (std::size_t k = 1; k < path.size(); ++k) {
      std::size_t u = path[k - 1], v = path[k];
      if (u >= n) delta = std::min(delta, flow(v, u - n));
    }
    for (std::size_t k = 1; k < path.size(); ++k) {
      std::size_t u = path[k - 1], v = path[k];
      if (u < n) {
        flow(u, v - n) += delta;
      } else {
        double& f = flow(v, u - n);
        f -= delta;
        if (f < kTol) f = 0.0;
      }
    }
    supply[path.front()] -= delta;
    demand[path.back() - n] -= delta;
    if (supply[path.front()] < kTol) supply[path.front()] = 0.0;
    if (demand[path.back() - n] < kTol) demand[path.back() - n] = 0.0;
  }

  TransportPlan out{flow, cost, 0.0};
  out.objective = TransportObjective(out.plan, out.cost);
  return out;
}

struct SinkhornOptions {
  double epsilon = 0.01;
  int max_iter = 1000;
  // L1 violation of the row marginals at which iteration stops.
  double tolerance = 1e-7;
};

namespace detail {

inline double LogSumExp(std::span<const double> v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

// Projects a nonnegative matrix onto the transport polytope U(a, b).
inline Matrix RoundToPolytope(Matrix p, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = p.rows(), m = p.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double r = p.RowSum(i);
    double scale = r > a[i] ? a[i] / r : 1.0;
    for (std::size_t j = 0; j < m; ++j) p(i, j) *= scale;
  }
  for (std::size_t j = 0; j < m; ++j) {
    double c = p.ColSum(j);
    double scale = c > b[j] ? b[j] / c : 1.0;
    for (std::size_t i = 0; i < n; ++i) p(i, j) *= scale;
  }
  std::vector<double> err_r(n), err_c(m);
  double norm_c = 0.0;
  for (std::size_t i = 0; i < n; ++i) err_r[i] = std::max(0.0, a[i] - p.RowSum(i));
  for (std::size_t j = 0; j < m; ++j) {
    err_c[j] = std::max(0.0, b[j] - p.ColSum(j));
    norm_c += err_c[j];
  }
  if (norm_c > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) p(i, j) += err_r[i] * err_c[j] / norm_c;
    }
  }
  return p;
}

}  // namespace detail

// Entropically regularized transport. Dual potentials are updated in the log
// domain; epsilon is annealed geometrically from the cost scale down to the
// requested value, each stage warm-started from the previous one. The
// iteration cap counts all stages.
inline TransportPlan SolveOtSinkhorn(std::span<const double> weights_a,
                                     std::span<const double> weights_b, const Matrix& cost,
                                     const SinkhornOptions& options = {}) {
  std::vector<double> a = detail::CheckedWeights(weights_a, "source");
  std::vector<double> b = detail::CheckedWeights(weights_b, "target");
  const std::size_t n = a.size(), m = b.size();
  detail::CheckCost(cost, n, m);
  if (!(options.epsilon > 0.0)) {
    throw Error(ErrorCode::kConfigError, "sinkhorn epsilon must be positive");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  std::vector<double> log_a(n), log_b(m);
  for (std::size_t i = 0; i < n; ++i) log_a[i] = a[i] > 0.0 ? std::log(a[i]) : kNegInf;
  for (std::size_t j = 0; j < m; ++j) log_b[j] = b[j] > 0.0 ? std::log(b[j]) : kNegInf;

  double cost_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (double c : cost.Row(i)) cost_scale = std::max(cost_scale, c);
  }
  std::vector<double> schedule;
  for (double eps = cost_scale; eps > options.epsilon; eps *= 0.5) schedule.push_back(eps);
  schedule.push_back(options.epsilon);

  std::vector<double> f(n, 0.0), g(m, 0.0), buf(std::max(n, m));
  auto plan_entry = [&](std::size_t i, std::size_t j, double eps) {
    if (a[i] <= 0.0 || b[j] <= 0.0) return 0.0;
    return std::exp((f[i] + g[j] - cost(i, j)) / eps);
  };

  int iterations = 0;
  bool converged = false;
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const double eps = schedule[stage];
    const bool last = stage + 1 == schedule.size();
    const double stage_tol = last ? options.tolerance : 1e-3;
    while (true) {
      if (iterations >= options.max_iter) break;
      ++iterations;
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i] <= 0.0) continue;
        std::size_t k = 0;
        for (std::size_t j = 0; j < m; ++j) {
          buf[k++] = b[j] > 0.0 ? (g[j] - cost(i, j)) / eps : kNegInf;
        }
        f[i] = eps * (log_a[i] - detail::LogSumExp(std::span<const double>(buf.data(), m)));
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (b[j] <= 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
          buf[i] = a[i] > 0.0 ? (f[i] - cost(i, j)) / eps : kNegInf;
        }
        g[j] = eps * (log_b[j] - detail::LogSumExp(std::span<const double>(buf.data(), n)));
      }
      double violation = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < m; ++j) r += plan_entry(i, j, eps);
        violation += std::abs(r - a[i]);
      }
      if (!std::isfinite(violation)) {
        throw Error(ErrorCode::kSolverDiverged, "sinkhorn produced non-finite potentials");
      }
      if (violation <= stage_tol) {
        if (last) converged = true;
        break;
      }
    }
    if (iterations >= options.max_iter && !converged) break;
  }
  if (!converged) {
    throw Error(ErrorCode::kSolverDiverged,
                "sinkhorn did not converge within " + std::to_string(options.max_iter) +
                    " iterations");
  }

  Matrix p(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) p(i, j) = plan_entry(i, j, options.epsilon);
  }
  TransportPlan out{detail::RoundToPolytope(std::move(p), a, b), cost, 0.0};
  out.objective = TransportObjective(out.plan, out.cost);
  return out;
}

}  // namespace metricfair

#endif  // METRICFAIR_TRANSPORT_HPP_
