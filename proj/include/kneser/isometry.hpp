#pragma once

#include "kneser/geometry.hpp"

#include <functional>
#include <optional>

namespace kneser {

/// Full orthogonal group O(L) of a positive-definite integral lattice.
struct AutGroup {
    std::vector<IntMat> generators;  // each g satisfies g * gram * g^T = gram
    Int order;                       // exact group order
};

struct AutOptions {
    /// re-derive the order with a Schreier-Sims chain on the permutation
    /// action on signed short vectors and assert agreement
    bool cross_check = true;
    int cross_check_max_degree = 2200;
    std::function<void(const std::string&)> progress;
};

/// Plesken-Souvignier backtracking over short-vector shells; order from the
/// stabilizer-chain orbit sizes.
AutGroup automorphisms(const Lattice& l, const AutOptions& opt = {});

/// An isometry g with g * b.gram * g^T = a.gram (rows map a-coordinates to
/// b-coordinates), or nothing if the lattices are not isometric.
std::optional<IntMat> is_isometric(const Lattice& a, const Lattice& b);

/// Cheap isometry invariants used to bucket lattices before full tests.
struct Fingerprint {
    Int det;
    bool even = false;
    std::vector<Int> theta;                         // r_L(0..bound)
    std::string roots;                              // ADE decomposition
    std::vector<std::pair<int64_t, Int>> shells;    // (norm, pair count) up to max diag

    bool operator==(const Fingerprint&) const = default;
};

/// theta_bound < 0 picks a rank-adaptive bound (8 up to rank 10, then 4, then 2).
Fingerprint fingerprint(const Lattice& l, int theta_bound = -1, bool with_shells = true);

/// Index of the unique representative isometric to l; throws std::runtime_error
/// if none matches (incomplete catalog or genus violation).
int classify(const Lattice& l, const std::vector<Lattice>& reps);

} // namespace kneser
