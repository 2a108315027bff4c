#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ibplab/netmodel.hpp"

namespace gen {

using Rng = std::mt19937_64;
using EdgeList = std::vector<std::pair<int, int>>;  // vertex 0 = origin, 1 = destination

ibplab::Network to_network(const EdgeList& edges, int num_vertices);

/// All fully relevant two-terminal multigraphs with at most `max_edges` edges,
/// one per isomorphism class (terminals fixed).
std::vector<ibplab::Network> all_small_networks(int max_edges);

/// Random series-parallel composition with exactly `edges` edges.
ibplab::Network random_sp(Rng& rng, int edges);
/// Random LI network (series with single edges, parallel joins).
ibplab::Network random_li(Rng& rng, int edges);
/// Series of random LI blocks.
ibplab::Network random_sli(Rng& rng, int edges);
/// Random SP composition with up to two random chords added, irrelevant parts stripped.
ibplab::Network random_composed(Rng& rng, int max_edges);

/// Random affine costs a x + b with a, b log-uniform over [lo, hi]; a few
/// coefficients are zeroed.
std::vector<ibplab::CostFunction> random_affine_costs(Rng& rng, std::size_t m, double lo = 1e-2, double hi = 10.0);

/// Random edge subset that still contains at least one route.
std::vector<bool> random_info_set(Rng& rng, const ibplab::Network& net, double keep = 0.6);

}  // namespace gen
