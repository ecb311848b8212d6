#include "trigroup/igraph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "union_find.hpp"

namespace trigroup {

namespace {

void check_probability(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
}

std::vector<std::uint64_t> distinct_features(std::uint64_t m, std::uint64_t k, Rng& rng) {
  std::vector<std::uint64_t> out;
  if (k == 0) return out;
  if (k * 2 > m) {
    // Dense: partial Fisher-Yates over the whole universe.
    std::vector<std::uint64_t> all(m);
    for (std::uint64_t i = 0; i < m; ++i) all[i] = i;
    for (std::uint64_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::uint64_t> pick(i, m - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
  } else {
    std::unordered_set<std::uint64_t> seen;
    std::uniform_int_distribution<std::uint64_t> pick(0, m - 1);
    while (out.size() < k) {
      auto f = pick(rng);
      if (seen.insert(f).second) out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

IntersectionGraph sample_rig(std::uint32_t vertex_count, std::uint64_t m, double rho, Rng& rng) {
  check_probability(rho);
  IntersectionGraph g{vertex_count, m, std::vector<std::vector<std::uint64_t>>(vertex_count)};
  if (m == 0 || rho == 0.0) return g;
  std::binomial_distribution<std::uint64_t> count(m, rho);
  for (auto& f : g.features) f = distinct_features(m, count(rng), rng);
  return g;
}

IntersectionGraph sample_rig_coupled(std::uint32_t vertex_count, std::uint64_t m, double rho,
                                     std::uint64_t seed) {
  check_probability(rho);
  IntersectionGraph g{vertex_count, m, std::vector<std::vector<std::uint64_t>>(vertex_count)};
  for (std::uint32_t v = 0; v < vertex_count; ++v) {
    for (std::uint64_t f = 0; f < m; ++f) {
      if (unit_from_hash(mix_seed({seed, v, f})) < rho) g.features[v].push_back(f);
    }
  }
  return g;
}

DerivedGraph derive_rig(const SplitSample& split) {
  const Partition& part = split.partition;
  if (part.s2.empty()) throw std::invalid_argument("derive_rig: S2 is empty");

  std::vector<std::uint32_t> local(part.n);
  for (std::uint32_t i = 0; i < part.s1.size(); ++i) local[part.s1[i]] = i;
  for (std::uint32_t i = 0; i < part.s2.size(); ++i) local[part.s2[i]] = i;
  auto local_code = [&](Letter x) { return 2 * local[x.generator()] + (x.inverted() ? 1u : 0u); };

  const std::uint64_t b = 2 * part.s2.size();
  DerivedGraph out;
  out.graph.vertex_count = static_cast<std::uint32_t>(2 * part.s1.size());
  out.graph.feature_count = b * (b - 1);
  out.graph.features.resize(out.graph.vertex_count);
  for (std::uint32_t g : part.s1) {
    out.vertex_letter.push_back(Letter(g, false));
    out.vertex_letter.push_back(Letter(g, true));
  }

  for (const Word& w : split.r1) {
    if (w.size() != 3 || w.generator_bound() > part.n || stage_of(w, part) != 1) {
      throw std::invalid_argument("derive_rig: '" + to_string(w) + "' is not a stage-one relation");
    }
    std::size_t j = 0;
    while (!part.contains(w[j])) ++j;
    const Letter a = w[j], c = w[(j + 1) % 3], d = w[(j + 2) % 3];
    const std::uint64_t cc = local_code(c);
    std::uint64_t dd = local_code(d);
    if (dd > (cc ^ 1u)) --dd;
    out.graph.features[local_code(a)].push_back(cc * (b - 1) + dd);
  }
  for (auto& f : out.graph.features) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }

  const double p = split.p;
  const double n = part.n;
  out.rho = 1.0 - std::pow(1.0 - p, 3);
  out.rho_lower = p;
  out.beta = out.rho * out.rho * double(out.graph.feature_count) * out.graph.vertex_count;
  out.beta_lower = p * p * n * n * (n - 1);
  return out;
}

ComponentSummary components(const IntersectionGraph& g) {
  detail::DisjointSets sets(g.vertex_count);
  std::unordered_map<std::uint64_t, std::uint32_t> holder;
  for (std::uint32_t v = 0; v < g.vertex_count; ++v) {
    for (auto f : g.features[v]) {
      auto [it, fresh] = holder.try_emplace(f, v);
      if (!fresh) sets.unite(v, it->second);
    }
  }

  ComponentSummary s;
  s.component_of.resize(g.vertex_count);
  std::vector<std::uint32_t> id_of_root(g.vertex_count, UINT32_MAX);
  for (std::uint32_t v = 0; v < g.vertex_count; ++v) {
    auto root = sets.find(v);
    if (id_of_root[root] == UINT32_MAX) {
      id_of_root[root] = static_cast<std::uint32_t>(s.sizes.size());
      s.sizes.push_back(0);
    }
    s.component_of[v] = id_of_root[root];
    ++s.sizes[id_of_root[root]];
  }
  for (std::uint32_t c = 0; c < s.sizes.size(); ++c) {
    if (s.sizes[c] > s.sizes[s.largest_id]) s.largest_id = c;
  }
  for (std::uint32_t v = 0; v < g.vertex_count; ++v) {
    if (s.component_of[v] == s.largest_id) s.largest_members.push_back(v);
  }
  return s;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> edges(const IntersectionGraph& g) {
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> holders;
  for (std::uint32_t v = 0; v < g.vertex_count; ++v) {
    for (auto f : g.features[v]) holders[f].push_back(v);
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (auto& [f, hs] : holders) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      for (std::size_t j = i + 1; j < hs.size(); ++j) out.emplace_back(hs[i], hs[j]);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void write_edge_list(std::ostream& out, const IntersectionGraph& g) {
  for (auto [u, v] : edges(g)) out << u << ' ' << v << '\n';
}

double edge_probability(double rho, std::uint64_t m) {
  check_probability(rho);
  if (m == 0 || rho == 0.0) return 0.0;
  if (rho == 1.0) return 1.0;
  return -std::expm1(double(m) * std::log1p(-rho * rho));
}

double gamma_solve(double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  if (beta <= 1.0) return 1.0;
  auto g = [beta](double x) { return x - std::exp(beta * (x - 1.0)); };
  // g < 0 on (0, root) and g > 0 on (root, 1). Walk the upper end towards 1
  // until it lands above the root.
  double lo = 0.0;
  double delta = 0.5;
  while (g(1.0 - delta) <= 0.0) {
    lo = 1.0 - delta;
    delta *= 0.5;
    if (delta < 1e-300) return 1.0 - delta;
  }
  double hi = 1.0 - delta;
  for (int it = 0; it < 4000; ++it) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

double giant_fraction(double beta) { return 1.0 - gamma_solve(beta); }

}  // namespace trigroup
