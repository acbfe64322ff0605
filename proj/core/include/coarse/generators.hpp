#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "coarse/space.hpp"

namespace coarse {

enum class GenKind {
    path,
    cycle,
    grid,
    binary_tree,
    laakso,
    random_regular,
    heisenberg_ball,
};

struct GenSpec {
    GenKind kind;
    std::vector<long> params;
    std::uint64_t seed = 0; // random_regular only

    // Parses CLI-facing spec strings: "binary_tree:10", "grid:2,16",
    // "random_regular:100,3,seed=7", "laakso:3", "heisenberg_ball:6".
    static GenSpec parse(const std::string& text);
    std::string to_string() const;
};

// Deterministic benchmark graphs, unit edge lengths throughout.
//  path:n, cycle:n, grid:a,b          the obvious lattices
//  binary_tree:D                      rooted complete tree, 2^(D+1)-1 vertices,
//                                     children of i are 2i+1, 2i+2
//  laakso:L                           level-L split-diamond recursion; every edge is
//                                     replaced by a 6-vertex gadget (subdivide into 4
//                                     arcs, duplicate the middle two), lengths scaled
//                                     so final edges are unit
//  random_regular:n,deg,seed=S        pairing model, rejecting loops/multi-edges/
//                                     disconnected outcomes; bit-reproducible per seed
//  heisenberg_ball:R                  ball of radius R in the Cayley graph of the
//                                     discrete Heisenberg group, generators a,b and
//                                     inverses, as triples (x,y,z) with
//                                     (x,y,z)*(x',y',z') = (x+x', y+y', z+z'+x y')
Graph gen(const GenSpec& spec);

// Vertex/edge counts of laakso:L without building it.
long laakso_vertex_count(int level);
long laakso_edge_count(int level);

// Complete group of measure-preserving isometries of the graph metric, found by
// backtracking over distance-preserving bijections. Throws TooLarge past `limit`.
std::vector<std::vector<int>> automorphisms(const FiniteSpace& s, int limit = 64);

} // namespace coarse
