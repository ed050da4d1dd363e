#pragma once

#include "kneser/neighbors.hpp"

#include <optional>

namespace kneser {

/// Group isomorphism res A -> res B with b(sx, sy) = -b(x, y); rows of map
/// are images of the source generators in target generator coordinates.
struct AntiIsometry {
    std::vector<Int> source_orders, target_orders;
    IntMat map;
    bool quadratic = false;  // additionally q(sx) = -q(x)

    std::vector<Int> apply(const FiniteQuadraticModule& target,
                           const std::vector<Int>& x) const;
    bool operator==(const AntiIsometry& o) const {
        return source_orders == o.source_orders && target_orders == o.target_orders &&
               map == o.map;
    }
};

/// Complete brute-force list over generator images; residues capped at 10^4.
std::vector<AntiIsometry> anti_isometries(const Lattice& a, const Lattice& b);

/// L(sigma): the unimodular overlattice of A + B glued along sigma.
struct GlueResult {
    Lattice glued;
    RatMat basis;    // rows in (A | B) block coordinates
    IntMat embed_a;  // A basis in glued coordinates
    IntMat embed_b;
};
GlueResult glue(const Lattice& a, const Lattice& b, const AntiIsometry& sigma);

/// Recover the glue map of a unimodular overlattice u containing the
/// orthogonal images ea(A), eb(B) with ea(A) saturated.
AntiIsometry glue_map(const Lattice& a, const Lattice& b, const Lattice& u, const IntMat& ea,
                      const IntMat& eb);

/// Objects of the groupoids: (U, e) with e a saturated isometric embedding,
/// and (B, sigma).
struct EmbeddedPair {
    Lattice u;
    IntMat e;
};
struct GluePair {
    Lattice b;
    AntiIsometry sigma;
};

GluePair functor_h(const Lattice& a, const EmbeddedPair& x);
EmbeddedPair functor_g(const Lattice& a, const GluePair& y);

struct EmbedCapExceeded : std::runtime_error {
    Int partial_count;
    explicit EmbedCapExceeded(Int partial)
        : std::runtime_error("embedding cap exceeded; partial count " + partial.get_str()),
          partial_count(std::move(partial)) {}
};

/// All Gram-preserving maps A -> U with saturated image, as row matrices in
/// U's coordinates. Throws EmbedCapExceeded beyond `cap`.
std::vector<IntMat> saturated_embeddings(const Lattice& a, const Lattice& u,
                                         int64_t cap = 1000000);
Int count_saturated_embeddings(const Lattice& a, const Lattice& u);

/// mass G_m(A) restricted to the catalog (optionally one parity):
/// sum |emb(A,U)| / |O(U)|.
Rat groupoid_mass(const Lattice& a, const GenusCatalog& catalog,
                  std::optional<bool> even_filter = std::nullopt);

/// Orbits of the O(B)-action sigma -> res(h) . sigma on a set of
/// anti-isometries into res B.
int ob_orbit_count(const Lattice& b, const std::vector<AntiIsometry>& sigmas);

} // namespace kneser
