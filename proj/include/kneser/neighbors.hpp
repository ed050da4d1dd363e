#pragma once

#include "kneser/isometry.hpp"

#include <cstdint>
#include <functional>

namespace kneser {

/// Projective F_p-point with q = 0; index of a p-neighbor.
struct IsotropicLine {
    int64_t p = 0;
    std::vector<int64_t> rep;  // first nonzero coordinate normalized to 1

    bool operator==(const IsotropicLine&) const = default;
};

/// |C_L(Z/p)| from rank and determinant. Legendre/Kronecker symbol term for
/// even rank; p = 2 follows the even-unimodular convention.
Int count_isotropic_lines(int n, const Int& det, const Int& p);

/// Number of projective points of P^{n-1}(F_p) = candidate space size.
uint64_t line_candidate_count(int n, int64_t p);

/// Visit the isotropic lines whose candidate index lies in [lo, hi), in
/// deterministic chart order. Candidate indices range over all projective
/// points; non-isotropic ones are skipped.
void for_each_isotropic_line(const Lattice& l, int64_t p, uint64_t lo, uint64_t hi,
                             const std::function<void(const IsotropicLine&)>& fn);

std::vector<IsotropicLine> isotropic_lines(const Lattice& l, int64_t p);

/// Seeded i.i.d. uniform lines via rejection sampling of isotropic vectors.
std::vector<IsotropicLine> sample_isotropic_lines(const Lattice& l, int64_t p, int64_t count,
                                                  uint64_t seed);

/// p-neighbor with its basis in the source lattice's rational coordinates.
struct NeighborLattice {
    RatMat basis;  // rows, denominators divide p
    Lattice lat;
};

NeighborLattice neighbor(const Lattice& l, const IsotropicLine& line);

/// Inverse of the neighbor construction: the line (pN + pL)/pL.
/// Throws if N is not a p-neighbor of L (index checks both ways).
IsotropicLine line_of(const Lattice& l, const RatMat& neighbor_basis, int64_t p);

/// Lines of the orthogonal complement B embedded into L x F_p; neighbors at
/// these lines all contain A.
void for_each_biased_line(const Lattice& l, const Sublattice& a, int64_t p, uint64_t lo,
                          uint64_t hi, const std::function<void(const IsotropicLine&)>& fn);
std::vector<IsotropicLine> biased_lines(const Lattice& l, const Sublattice& a, int64_t p);
uint64_t biased_candidate_count(const Lattice& l, const Sublattice& a, int64_t p);

/// Class representatives with exact masses.
struct GenusCatalog {
    int rank = 0;
    Int det;
    bool even = false;
    std::vector<Lattice> reps;
    std::vector<Int> aut_orders;
    std::vector<Rat> masses;  // 1/|O|
    Rat total_mass;
    std::vector<int64_t> primes_used;

    int classes() const { return static_cast<int>(reps.size()); }
    void save(const std::string& path) const;
    static GenusCatalog load(const std::string& path);
};

struct GenusOptions {
    int max_classes = 256;
    uint64_t full_enumeration_limit = 1000000;  // lines; above this, sample
    int64_t sample_count = 100000;
    uint64_t seed = 1;
    /// confirm classifications by a full isometry test when the matched
    /// class's short-vector domain is at most this many pairs; above it,
    /// fingerprint matching decides and a second prime backs the closure
    int64_t confirm_domain_limit = 3000;
    std::function<void(const std::string&)> progress;
};

/// Kneser closure of the class of l under p-neighbors.
GenusCatalog enumerate_genus(const Lattice& l, int64_t p, const GenusOptions& opt = {});

/// Element of Q^x / Q^x2 as a squarefree integer.
struct SquareClass {
    Int rep = 1;

    SquareClass() = default;
    explicit SquareClass(const Int& v) : rep(squarefree_part(v)) {}
    explicit SquareClass(const Rat& v) : rep(squarefree_part(v)) {}
    SquareClass operator*(const SquareClass& o) const { return SquareClass(Int(rep * o.rep)); }
    bool operator==(const SquareClass&) const = default;
    /// parity of the p-adic valuation
    int valuation_mod2(const Int& p) const { return static_cast<int>(valuation(rep, p) % 2); }
};

/// Spinor norm of an isometry of (V, q), q(x) = x.x/2, via Cartan-Dieudonne
/// reflection factorization. g must satisfy g * gram * g^T = gram.
SquareClass spinor_norm(const RatMat& g, const IntMat& gram);

struct SigmaCertificate {
    bool certified = false;
    std::string reason;
};

/// Conservative certificate that the genus of l is a single spinor genus
/// (Sigma(K) = 1); never a false positive.
SigmaCertificate sigma_trivial(const Lattice& l);

/// Certificate for the inertial genus of B = A-perp inside the unimodular
/// lattice l, from the rank/generator-count inequalities.
SigmaCertificate inertial_sigma_trivial(const Lattice& l, const Sublattice& a);

/// Jordan symbol over Z_p, p odd: (scale exponent, rank, unit-class +-1).
struct JordanBlock {
    long scale_exp;
    int rank;
    int det_class;  // +1 square, -1 non-square unit part
    bool operator==(const JordanBlock&) const = default;
};
std::vector<JordanBlock> genus_symbol_odd(const Lattice& l, const Int& p);
bool same_genus_odd(const Lattice& a, const Lattice& b, const Int& p);

} // namespace kneser
