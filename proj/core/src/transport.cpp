#include "popot/transport.hpp"

#include <cfloat>
#include <limits>

namespace popot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool equal_weights(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) return false;
  const double w = 1.0 / static_cast<double>(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - w) > kWeightTolerance || std::abs(b[k] - w) > kWeightTolerance) return false;
  return true;
}

void sort_pairs(std::vector<PlanEntry>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const PlanEntry& x, const PlanEntry& y) {
    return std::pair(x.source, x.target) < std::pair(y.source, y.target);
  });
}

// Primal network simplex on the bipartite transportation graph with an
// artificial root. Tree structure (parents, depths, potentials) is rebuilt
// from the arc set after every pivot.
class NetworkSimplex {
 public:
  NetworkSimplex(std::span<const double> supply, std::span<const double> demand, const CostMatrix& c)
      : m_(supply.size()), n_(demand.size()), cost_(c) {
    nodes_ = m_ + n_ + 1;
    root_ = m_ + n_;
    real_ = m_ * n_;
    double cmax = 0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(c(i, j)));
    art_cost_ = (cmax + 1.0) * static_cast<double>(nodes_);
    eps_ = 64 * DBL_EPSILON * art_cost_;

    const std::size_t arcs = real_ + nodes_ - 1;
    flow_.assign(arcs, 0.0);
    in_tree_.assign(arcs, false);
    for (std::size_t u = 0; u < m_ + n_; ++u) {
      const std::size_t e = real_ + u;
      in_tree_[e] = true;
      flow_[e] = u < m_ ? supply[u] : demand[u - m_];
    }
    rebuild();
  }

  void run() {
    const std::size_t block = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(double(real_))));
    std::size_t next = 0;
    while (true) {
      // Block pricing: scan arcs cyclically, stop at the end of the first
      // block containing an improving arc and take its best one.
      std::size_t best = real_;
      double best_rc = -eps_;
      std::size_t scanned = 0;
      std::size_t cnt = 0;
      while (scanned < real_) {
        const std::size_t e = next;
        next = next + 1 == real_ ? 0 : next + 1;
        ++scanned;
        if (!in_tree_[e]) {
          const double rc = reduced_cost(e);
          if (rc < best_rc) {
            best_rc = rc;
            best = e;
          }
        }
        if (++cnt == block) {
          if (best != real_) break;
          cnt = 0;
        }
      }
      if (best == real_) return;
      pivot(best);
    }
  }

  TransportPlan plan() const {
    TransportPlan p;
    for (std::size_t e = 0; e < real_; ++e)
      if (flow_[e] > 0) p.pairs.push_back({e / n_, e % n_, flow_[e]});
    return p;
  }

 private:
  std::size_t src(std::size_t e) const {
    if (e < real_) return e / n_;
    const std::size_t u = e - real_;
    return u < m_ ? u : root_;
  }
  std::size_t dst(std::size_t e) const {
    if (e < real_) return m_ + e % n_;
    const std::size_t u = e - real_;
    return u < m_ ? root_ : u;
  }
  double arc_cost(std::size_t e) const {
    if (e < real_) return cost_(e / n_, e % n_);
    return e - real_ < m_ ? 0.0 : art_cost_;
  }
  double reduced_cost(std::size_t e) const { return arc_cost(e) + pi_[src(e)] - pi_[dst(e)]; }

  void rebuild() {
    std::vector<std::vector<std::size_t>> adj(nodes_);
    for (std::size_t e = 0; e < in_tree_.size(); ++e)
      if (in_tree_[e]) {
        adj[src(e)].push_back(e);
        adj[dst(e)].push_back(e);
      }
    parent_.assign(nodes_, root_);
    pred_.assign(nodes_, 0);
    up_.assign(nodes_, false);
    depth_.assign(nodes_, 0);
    pi_.assign(nodes_, 0.0);
    std::vector<bool> seen(nodes_, false);
    std::vector<std::size_t> stack{root_};
    seen[root_] = true;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (std::size_t e : adj[p]) {
        const bool down = src(e) == p;
        const std::size_t u = down ? dst(e) : src(e);
        if (seen[u]) continue;
        seen[u] = true;
        parent_[u] = p;
        pred_[u] = e;
        up_[u] = !down;
        depth_[u] = depth_[p] + 1;
        pi_[u] = down ? pi_[p] + arc_cost(e) : pi_[p] - arc_cost(e);
        stack.push_back(u);
      }
    }
  }

  void pivot(std::size_t in) {
    const std::size_t first = src(in);
    const std::size_t second = dst(in);
    std::size_t a = first, b = second;
    while (a != b) {
      if (depth_[a] >= depth_[b]) a = parent_[a];
      else b = parent_[b];
    }
    const std::size_t join = a;

    double delta = kInf;
    std::size_t out_node = nodes_;
    for (std::size_t u = first; u != join; u = parent_[u])
      if (up_[u] && flow_[pred_[u]] < delta) {
        delta = flow_[pred_[u]];
        out_node = u;
      }
    for (std::size_t u = second; u != join; u = parent_[u])
      if (!up_[u] && flow_[pred_[u]] <= delta) {
        delta = flow_[pred_[u]];
        out_node = u;
      }
    if (out_node == nodes_) throw std::logic_error("unbounded transport problem");

    flow_[in] += delta;
    for (std::size_t u = first; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? -delta : delta;
    for (std::size_t u = second; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? delta : -delta;

    const std::size_t out = pred_[out_node];
    flow_[out] = 0.0;
    in_tree_[out] = false;
    in_tree_[in] = true;
    rebuild();
  }

  std::size_t m_, n_, nodes_ = 0, root_ = 0, real_ = 0;
  const CostMatrix& cost_;
  double art_cost_ = 0, eps_ = 0;
  std::vector<double> flow_;
  std::vector<bool> in_tree_;
  std::vector<std::size_t> parent_, pred_, depth_;
  std::vector<bool> up_;
  std::vector<double> pi_;
};

}  // namespace

CostMatrix CostMatrix::transposed() const {
  CostMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

TransportPlan solve_assignment(const CostMatrix& c) {
  const std::size_t n = c.rows();
  if (n == 0 || c.cols() != n) throw std::invalid_argument("assignment needs a square matrix");
  // Shortest augmenting paths with potentials; rows and columns 1-based,
  // column 0 is the virtual start.
  std::vector<double> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  TransportPlan plan;
  plan.backend = "assignment";
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t j = 1; j <= n; ++j) plan.pairs.push_back({p[j] - 1, j - 1, w});
  sort_pairs(plan.pairs);
  plan.cost = plan_cost(plan, c);
  return plan;
}

TransportPlan solve_network_simplex(std::span<const double> source, std::span<const double> target,
                                    const CostMatrix& cost) {
  if (source.size() != cost.rows() || target.size() != cost.cols())
    throw std::invalid_argument("marginal sizes do not match the cost matrix");
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < source.size(); ++i)
    if (source[i] > 0) rows.push_back(i);
  for (std::size_t j = 0; j < target.size(); ++j)
    if (target[j] > 0) cols.push_back(j);
  if (rows.empty() || cols.empty()) throw std::invalid_argument("marginals carry no mass");
  CostMatrix reduced(rows.size(), cols.size());
  std::vector<double> a(rows.size()), b(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) a[i] = source[rows[i]];
  for (std::size_t j = 0; j < cols.size(); ++j) b[j] = target[cols[j]];
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) reduced(i, j) = cost(rows[i], cols[j]);

  NetworkSimplex ns(a, b, reduced);
  ns.run();
  TransportPlan plan = ns.plan();
  for (auto& e : plan.pairs) {
    e.source = rows[e.source];
    e.target = cols[e.target];
  }
  plan.backend = "network_simplex";
  sort_pairs(plan.pairs);
  plan.cost = plan_cost(plan, cost);
  return plan;
}

TransportPlan solve_transport(std::span<const double> source, std::span<const double> target,
                              const CostMatrix& cost) {
  if (equal_weights(source, target)) return solve_assignment(cost);
  return solve_network_simplex(source, target, cost);
}

double plan_cost(const TransportPlan& plan, const CostMatrix& cost) {
  double s = 0;
  for (const auto& e : plan.pairs) s += e.mass * cost(e.source, e.target);
  return s;
}

double marginal_error(const TransportPlan& plan, std::span<const double> source,
                      std::span<const double> target) {
  std::vector<double> rows(source.size(), 0), cols(target.size(), 0);
  for (const auto& e : plan.pairs) {
    rows.at(e.source) += e.mass;
    cols.at(e.target) += e.mass;
  }
  double err = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) err = std::max(err, std::abs(rows[i] - source[i]));
  for (std::size_t j = 0; j < cols.size(); ++j) err = std::max(err, std::abs(cols[j] - target[j]));
  return err;
}

double brute_force_assignment(const CostMatrix& cost) {
  const std::size_t n = cost.rows();
  if (n == 0 || n > 8 || cost.cols() != n)
    throw std::invalid_argument("brute force needs a square matrix with n <= 8");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const double w = 1.0 / static_cast<double>(n);
  double best = kInf;
  do {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += w * cost(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace popot
