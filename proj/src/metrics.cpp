#include "geograph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "geograph/error.hpp"
#include "parallel.hpp"

namespace geograph {

namespace {

// Compressed adjacency over node positions (ascending id order).
struct Csr {
  std::vector<NodeId> ids;
  std::vector<std::size_t> offsets;  // size n + 1
  std::vector<std::size_t> targets;
  std::vector<double> weights;

  std::size_t size() const { return ids.size(); }

  explicit Csr(const GeoGraph& g) {
    std::map<NodeId, std::size_t> position;
    for (const auto& [id, node] : g.nodes()) {
      position.emplace(id, ids.size());
      ids.push_back(id);
    }
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(ids.size());
    for (const auto& [key, e] : g.edges()) {
      const auto u = position.at(e.u);
      const auto v = position.at(e.v);
      adj[u].emplace_back(v, e.weight);
      adj[v].emplace_back(u, e.weight);
    }
    offsets.push_back(0);
    for (auto& list : adj) {
      std::sort(list.begin(), list.end());
      for (const auto& [t, w] : list) {
        targets.push_back(t);
        weights.push_back(w);
      }
      offsets.push_back(targets.size());
    }
  }

  std::size_t position_of(NodeId id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) throw Error("unknown source node " + std::to_string(id));
    return static_cast<std::size_t>(it - ids.begin());
  }
};

void require_positive_weights(const GeoGraph& g) {
  for (const auto& [key, e] : g.edges()) {
    if (!(e.weight > 0.0)) {
      throw Error("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                  ") has nonpositive weight in weighted mode");
    }
  }
}

constexpr double kUnreached = std::numeric_limits<double>::infinity();

// Single-source state for Brandes: distances, path counts, and nodes in
// non-decreasing distance order.
struct SourceScratch {
  std::vector<double> dist;
  std::vector<double> sigma;
  std::vector<double> delta;
  std::vector<std::size_t> order;
  std::vector<std::size_t> rank;  // position in `order`

  explicit SourceScratch(std::size_t n)
      : dist(n, kUnreached), sigma(n, 0.0), delta(n, 0.0), rank(n, 0) {
    order.reserve(n);
  }

  void reset() {
    for (const auto v : order) {
      dist[v] = kUnreached;
      sigma[v] = 0.0;
      delta[v] = 0.0;
    }
    order.clear();
  }
};

void explore_unweighted(const Csr& g, std::size_t s, SourceScratch& st) {
  st.dist[s] = 0.0;
  st.sigma[s] = 1.0;
  st.order.push_back(s);
  for (std::size_t head = 0; head < st.order.size(); ++head) {
    const auto v = st.order[head];
    st.rank[v] = head;
    for (std::size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const auto w = g.targets[k];
      if (st.dist[w] == kUnreached) {
        st.dist[w] = st.dist[v] + 1.0;
        st.order.push_back(w);
      }
      if (st.dist[w] == st.dist[v] + 1.0) st.sigma[w] += st.sigma[v];
    }
  }
}

void explore_weighted(const Csr& g, std::size_t s, SourceScratch& st) {
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<std::size_t> touched{s};
  std::vector<bool> settled(g.size(), false);
  st.dist[s] = 0.0;
  st.sigma[s] = 1.0;
  queue.emplace(0.0, s);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (settled[v] || d > st.dist[v]) continue;
    settled[v] = true;
    st.rank[v] = st.order.size();
    st.order.push_back(v);
    for (std::size_t k = g.offsets[v]; k < g.offsets[v + 1]; ++k) {
      const auto w = g.targets[k];
      if (settled[w]) continue;
      const double nd = d + g.weights[k];
      if (nd < st.dist[w]) {
        if (st.dist[w] == kUnreached) touched.push_back(w);
        st.dist[w] = nd;
        st.sigma[w] = st.sigma[v];
        queue.emplace(nd, w);
      } else if (nd == st.dist[w]) {
        st.sigma[w] += st.sigma[v];
      }
    }
  }
  // Nodes reached but never settled cannot exist; unreached ones were never
  // touched. Clear tentative state of touched-but-unsettled nodes anyway.
  for (const auto w : touched) {
    if (!settled[w]) {
      st.dist[w] = kUnreached;
      st.sigma[w] = 0.0;
    }
  }
}

// Adds the dependencies of source s to `acc` (both directions of each pair).
void accumulate(const Csr& g, std::size_t s, bool weighted, SourceScratch& st,
                std::vector<double>& acc) {
  weighted ? explore_weighted(g, s, st) : explore_unweighted(g, s, st);
  for (auto it = st.order.rbegin(); it != st.order.rend(); ++it) {
    const auto w = *it;
    const double coefficient = (1.0 + st.delta[w]) / st.sigma[w];
    for (std::size_t k = g.offsets[w]; k < g.offsets[w + 1]; ++k) {
      const auto v = g.targets[k];
      if (st.dist[v] == kUnreached || st.rank[v] >= st.rank[w]) continue;
      const double step = weighted ? g.weights[k] : 1.0;
      if (st.dist[v] + step == st.dist[w]) st.delta[v] += st.sigma[v] * coefficient;
    }
    if (w != s) acc[w] += st.delta[w];
  }
  st.reset();
}

constexpr std::size_t kMaxBlocks = 64;

}  // namespace

MetricVector degree(const GeoGraph& g) {
  MetricVector out{"degree", {}};
  for (const auto& [id, node] : g.nodes()) out.values[id] = 0.0;
  for (const auto& [key, e] : g.edges()) {
    out.values[e.u] += 1.0;
    out.values[e.v] += 1.0;
  }
  return out;
}

MetricVector clustering_coefficient(const GeoGraph& g) {
  const Csr csr(g);
  MetricVector out{"clustering", {}};
  std::vector<bool> marked(csr.size(), false);
  for (std::size_t v = 0; v < csr.size(); ++v) {
    const std::size_t k = csr.offsets[v + 1] - csr.offsets[v];
    double value = 0.0;
    if (k >= 2) {
      for (auto i = csr.offsets[v]; i < csr.offsets[v + 1]; ++i) marked[csr.targets[i]] = true;
      std::size_t triangles = 0;
      for (auto i = csr.offsets[v]; i < csr.offsets[v + 1]; ++i) {
        const auto u = csr.targets[i];
        for (auto j = csr.offsets[u]; j < csr.offsets[u + 1]; ++j) {
          const auto w = csr.targets[j];
          if (w > u && marked[w]) ++triangles;
        }
      }
      for (auto i = csr.offsets[v]; i < csr.offsets[v + 1]; ++i) marked[csr.targets[i]] = false;
      value = 2.0 * static_cast<double>(triangles) / (static_cast<double>(k) * static_cast<double>(k - 1));
    }
    out.values[csr.ids[v]] = value;
  }
  return out;
}

ShortestPaths shortest_paths(const GeoGraph& g, NodeId source, bool weighted) {
  const Csr csr(g);
  const auto s = csr.position_of(source);
  if (weighted) require_positive_weights(g);
  SourceScratch st(csr.size());
  weighted ? explore_weighted(csr, s, st) : explore_unweighted(csr, s, st);
  ShortestPaths out;
  for (std::size_t v = 0; v < csr.size(); ++v) {
    const bool reached = st.dist[v] != kUnreached;
    out.distance[csr.ids[v]] = reached ? std::optional<double>(st.dist[v]) : std::nullopt;
    out.path_count[csr.ids[v]] = reached ? st.sigma[v] : 0.0;
  }
  return out;
}

MetricVector betweenness(const GeoGraph& g, const BetweennessOptions& options) {
  if (options.weighted) require_positive_weights(g);
  const Csr csr(g);
  const std::size_t n = csr.size();
  MetricVector out{"betweenness", {}};
  if (n == 0) return out;

  // Fixed block decomposition: the summation tree depends on n only, never on
  // the worker count.
  const std::size_t blocks = std::min(n, kMaxBlocks);
  const std::size_t per_block = (n + blocks - 1) / blocks;
  std::vector<std::vector<double>> partial(blocks);
  detail::parallel_for(blocks, detail::resolve_workers(options.workers), [&](std::size_t b) {
    std::vector<double> acc(n, 0.0);
    SourceScratch st(n);
    const std::size_t end = std::min(n, (b + 1) * per_block);
    for (std::size_t s = b * per_block; s < end; ++s) accumulate(csr, s, options.weighted, st, acc);
    partial[b] = std::move(acc);
  });

  std::vector<double> total(n, 0.0);
  for (const auto& acc : partial) {
    if (acc.empty()) continue;
    for (std::size_t v = 0; v < n; ++v) total[v] += acc[v];
  }
  double scale = 0.5;  // every unordered pair was counted from both ends
  if (options.normalized) {
    const double nd = static_cast<double>(n);
    scale = n < 3 ? 0.0 : scale / ((nd - 1.0) * (nd - 2.0) / 2.0);
  }
  for (std::size_t v = 0; v < n; ++v) out.values[csr.ids[v]] = total[v] * scale;
  return out;
}

GeoGraph attach_metrics(const GeoGraph& g, const std::vector<MetricVector>& vectors) {
  GeoGraph out = g;
  for (const auto& vec : vectors) {
    if (vec.name.empty()) throw Error("metric vector without a name");
    if (vec.values.size() != g.node_count()) {
      throw Error("metric '" + vec.name + "' has " + std::to_string(vec.values.size()) +
                  " values for " + std::to_string(g.node_count()) + " nodes");
    }
    for (const auto& [id, value] : vec.values) {
      if (!g.has_node(id)) {
        throw Error("metric '" + vec.name + "' names unknown node " + std::to_string(id));
      }
      out.set_node_attribute(id, vec.name, value);
    }
  }
  return out;
}

}  // namespace geograph
