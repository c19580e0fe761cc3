#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace anncap {

/// Dinic's algorithm on real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : g_(n), level_(n), it_(n) {}

  int size() const noexcept { return static_cast<int>(g_.size()); }

  /// Undirected edge: capacity c in both directions.
  void add_undirected(int u, int v, double c) {
    g_[u].push_back({v, static_cast<int>(g_[v].size()), c});
    g_[v].push_back({u, static_cast<int>(g_[u].size()) - 1, c});
  }

  void add_directed(int u, int v, double c) {
    g_[u].push_back({v, static_cast<int>(g_[v].size()), c});
    g_[v].push_back({u, static_cast<int>(g_[u].size()) - 1, 0.0});
  }

  double run(int s, int t) {
    double cmax = 0.0;
    for (const auto& adj : g_) {
      for (const auto& a : adj) {
        if (std::isfinite(a.cap)) cmax = std::max(cmax, a.cap);
      }
    }
    eps_ = 1e-13 * std::max(cmax, 1e-300);
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      for (;;) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (!(f > 0.0)) break;
        flow += f;
      }
    }
    return flow;
  }

  /// Vertices reachable from s in the residual graph after run().
  std::vector<char> source_side(int s) const {
    std::vector<char> seen(g_.size(), 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& a : g_[u]) {
        if (a.cap > eps_ && !seen[a.to]) {
          seen[a.to] = 1;
          stack.push_back(a.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    int rev;
    double cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& a : g_[u]) {
        if (a.cap > eps_ && level_[a.to] < 0) {
          level_[a.to] = level_[u] + 1;
          q.push(a.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double f) {
    if (u == t) return f;
    for (int& i = it_[u]; i < static_cast<int>(g_[u].size()); ++i) {
      Arc& a = g_[u][i];
      if (a.cap > eps_ && level_[a.to] == level_[u] + 1) {
        const double d = dfs(a.to, t, std::min(f, a.cap));
        if (d > 0.0) {
          a.cap -= d;
          g_[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Arc>> g_;
  std::vector<int> level_;
  std::vector<int> it_;
  double eps_ = 0.0;
};

}  // namespace anncap
