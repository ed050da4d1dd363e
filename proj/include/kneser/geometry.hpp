#pragma once

#include "kneser/lattice.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kneser {

/// Short vectors up to a norm bound, one representative per +-pair.
struct ShortVectorList {
    Int bound;
    struct Entry {
        std::vector<int32_t> x;  // coordinates in the lattice basis
        int64_t norm;
    };
    std::vector<Entry> vectors;  // sorted lexicographically by coordinates

    /// counts per norm value
    std::map<int64_t, int64_t> shell_sizes() const;
};

struct LllResult {
    Lattice reduced;
    IntMat transform;  // reduced.gram = transform * gram * transform^T
};

/// Exact-rational LLL on the Gram matrix (no coordinates needed).
LllResult lll(const Lattice& l, const Rat& delta = Rat(99, 100));

/// Floating-point LLL with exact integer transform bookkeeping. Falls back
/// to the exact routine when numerics degrade. Used as an enumeration
/// preprocessor; the returned Gram is recomputed exactly.
LllResult lll_fast(const Lattice& l);

/// Complete up-to-sign list of nonzero vectors with norm <= bound.
/// Floating-point pruning with an exact re-check of every candidate.
ShortVectorList short_vectors(const Lattice& l, const Int& bound);

/// r_L(m) for m = 0..max_norm, counting both signs; r_L(0) = 1.
std::vector<Int> theta_prefix(const Lattice& l, long max_norm);

/// ADE decomposition of the norm-2 root system.
struct RootDecomposition {
    struct Component {
        char type;  // 'A', 'D' or 'E'
        int rank;
        long roots;  // number of roots, both signs
        bool operator<(const Component& o) const {
            return std::tie(type, rank) < std::tie(o.type, o.rank);
        }
        bool operator==(const Component& o) const { return type == o.type && rank == o.rank; }
    };
    std::vector<Component> components;  // sorted
    long total_roots = 0;

    std::string to_string() const;
    bool operator==(const RootDecomposition& o) const { return components == o.components; }
    bool operator!=(const RootDecomposition& o) const { return !(*this == o); }
};

/// Components of the non-orthogonality graph on norm-2 vectors, typed by
/// (rank, root count). A3 = D3 is reported as A3.
RootDecomposition root_decomposition(const Lattice& l);

/// Exact Lovasz + size-reduction check, used in tests.
bool is_lll_reduced(const IntMat& gram, const Rat& delta);

} // namespace kneser
