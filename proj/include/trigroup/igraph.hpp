#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "trigroup/presentation.hpp"
#include "trigroup/random.hpp"

namespace trigroup {

/// Vertices carrying feature sets; two vertices are adjacent iff they share
/// a feature. Only occupied features are stored.
struct IntersectionGraph {
  std::uint32_t vertex_count = 0;
  std::uint64_t feature_count = 0;
  std::vector<std::vector<std::uint64_t>> features;  // sorted, per vertex
};

/// G(vertices, m, rho): per-vertex Binomial(m, rho) feature counts, then that
/// many distinct uniform features.
IntersectionGraph sample_rig(std::uint32_t vertex_count, std::uint64_t m, double rho, Rng& rng);

/// Same model with one hashed uniform per (vertex, feature) pair, so that
/// graphs for the same seed are nested in rho. Costs O(vertex_count * m).
IntersectionGraph sample_rig_coupled(std::uint32_t vertex_count, std::uint64_t m, double rho,
                                     std::uint64_t seed);

/// The graph read off a stage-one relation set: vertex 2i + e stands for
/// the letter (S1[i])^(+/-1), feature (c, d) is an ordered pair of S2 letters
/// with d != c^-1, held by a when R1 contains acd, cda or dac.
struct DerivedGraph {
  IntersectionGraph graph;
  std::vector<Letter> vertex_letter;
  double rho = 0.0;          // 1 - (1-p)^3
  double rho_lower = 0.0;    // p
  double beta = 0.0;         // rho^2 * m * vertex_count
  double beta_lower = 0.0;   // p^2 n^2 (n-1)
};

/// Throws std::invalid_argument when S2 is empty or a stage-one word does not
/// belong to the split's partition.
DerivedGraph derive_rig(const SplitSample& split);

struct ComponentSummary {
  std::vector<std::uint32_t> component_of;  // ids numbered by smallest member
  std::vector<std::uint32_t> sizes;
  std::uint32_t largest_id = 0;
  std::vector<std::uint32_t> largest_members;  // ascending

  std::uint32_t largest_size() const { return sizes.empty() ? 0 : sizes[largest_id]; }
};

ComponentSummary components(const IntersectionGraph& g);

/// Materialized edge set, u < v, sorted.
std::vector<std::pair<std::uint32_t, std::uint32_t>> edges(const IntersectionGraph& g);
void write_edge_list(std::ostream& out, const IntersectionGraph& g);

/// 1 - (1 - rho^2)^m.
double edge_probability(double rho, std::uint64_t m);

/// The fixed point of gamma = exp(beta (gamma - 1)) in (0, 1) for beta > 1;
/// 1 otherwise.
double gamma_solve(double beta);

/// 1 - gamma_solve(beta): limiting largest-component fraction.
double giant_fraction(double beta);

}  // namespace trigroup
