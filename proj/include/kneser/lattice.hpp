#pragma once

#include "kneser/intmat.hpp"

#include <iosfwd>
#include <string>

namespace kneser {

/// Integral positive-definite lattice, given by the Gram matrix of a basis.
struct Lattice {
    IntMat gram;
    std::string label;

    Lattice() = default;
    explicit Lattice(IntMat g, std::string name = "");

    /// Skips the symmetry/definiteness validation; for Grams that are
    /// positive definite by construction (neighbors, glue, rebasing).
    static Lattice unchecked(IntMat g, std::string name = "");

    int rank() const { return gram.rows; }
    Int det() const;
    bool is_even() const;

    /// Inner product of coordinate rows.
    Int inner(const std::vector<Int>& x, const std::vector<Int>& y) const;
};

/// Parity split of integral lattices.
enum class Parity { Even, Odd };
inline Parity parity(const Lattice& l) { return l.is_even() ? Parity::Even : Parity::Odd; }

/// Gram matrix of the dual lattice in the dual basis (inverse Gram).
RatMat dual(const Lattice& l);

/// Sublattice of an ambient lattice; rows of basis are ambient coordinates.
struct Sublattice {
    const Lattice* ambient = nullptr;
    IntMat basis;  // k x n, full row rank

    Sublattice() = default;
    Sublattice(const Lattice& amb, IntMat b);

    int rank() const { return basis.rows; }
    IntMat induced_gram() const;
    Lattice lattice(std::string name = "") const { return Lattice(induced_gram(), std::move(name)); }
};

/// Smallest saturated sublattice containing A (same Q-span).
Sublattice saturate(const Sublattice& a);
bool is_saturated(const Sublattice& a);

/// B = {v in L : v.A = 0}; always saturated.
Sublattice orthogonal_complement(const Sublattice& a);

Lattice direct_sum(const Lattice& a, const Lattice& b);

/// Finite quadratic module res L = L#/L.
///
/// Elements are coefficient tuples modulo `orders` over the stored
/// generators; all Q/Z values are reduced fractions in [0,1).
struct FiniteQuadraticModule {
    std::vector<Int> orders;   // d1 | d2 | ..., all > 1
    RatMat bilinear;           // b(g_i, g_j) mod Z
    std::vector<Rat> quadratic;  // q(g_i) mod Z; set iff source lattice even
    bool has_quadratic = false;

    // lift data: generator representatives as rational rows in the source basis
    RatMat gen_lifts;
    IntMat gram;          // source Gram
    IntMat coord_map;     // gram * snf.right: dual coords -> pre-SNF coords
    std::vector<Int> diag_full;
    std::vector<int> kept;

    int ngens() const { return static_cast<int>(orders.size()); }
    Int order() const;

    using Elt = std::vector<Int>;

    Elt zero() const { return Elt(orders.size(), 0); }
    Elt reduce(Elt e) const;
    Elt add(const Elt& x, const Elt& y) const;
    Elt neg(const Elt& x) const;
    Elt scale(const Int& c, const Elt& x) const;
    Rat b(const Elt& x, const Elt& y) const;
    Rat q(const Elt& x) const;

    /// All elements, ordered lexicographically by tuple. Guarded by a cap.
    std::vector<Elt> elements(const Int& cap = Int(100000)) const;

    /// Rational row in the source basis representing the element.
    std::vector<Rat> lift(const Elt& x) const;

    /// Coefficient tuple of an element of L# given as a rational row in the
    /// source basis; throws if the row is not in L#.
    Elt discretize(const std::vector<Rat>& dual_vec) const;
};

/// Discriminant module of an integral lattice.
FiniteQuadraticModule residue(const Lattice& l);

/// Standard lattices: Zn, An, Dn, E6, E7, E8, Dn+ (8|n), E16 (= D16+).
Lattice builtin(const std::string& name);

/// `.lat` text format: rank line, then Gram rows; '#' starts a comment.
Lattice read_lat(std::istream& in, const std::string& name = "");
Lattice read_lat_file(const std::string& path);
void write_lat(std::ostream& out, const Lattice& l);
void write_lat_file(const std::string& path, const Lattice& l);

} // namespace kneser
