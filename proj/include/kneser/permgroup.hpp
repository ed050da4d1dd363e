#pragma once

#include "kneser/integers.hpp"

#include <cstdint>
#include <vector>

namespace kneser {

using Perm = std::vector<int32_t>;

Perm perm_identity(int degree);
/// (a then b): compose(a,b)[x] = b[a[x]]
Perm perm_compose(const Perm& a, const Perm& b);
Perm perm_inverse(const Perm& a);
bool perm_is_identity(const Perm& a);

/// Stabilizer chain via the deterministic Schreier-Sims algorithm.
/// Degrees up to a few thousand; explicit transversal elements.
class PermGroup {
public:
    explicit PermGroup(int degree) : degree_(degree) {}

    void add_generator(const Perm& g);
    /// Adds many generators with a single chain-verification pass.
    void add_generators(const std::vector<Perm>& gs);
    Int order() const;
    bool contains(const Perm& g) const;
    const std::vector<int32_t>& base() const { return base_; }

private:
    struct Level {
        int32_t base = -1;
        std::vector<int32_t> orbit;           // points, BFS order
        std::vector<int32_t> pos;             // point -> index+1 in orbit, 0 = absent
        std::vector<Perm> transversal;        // element mapping base -> orbit[j]
    };

    int degree_;
    std::vector<Perm> gens_;
    std::vector<int32_t> gen_level_;  // g fixes base_[0..gen_level_-1]
    std::vector<int32_t> base_;
    std::vector<Level> levels_;

    bool fixes_prefix(const Perm& g, int k) const;
    void rebuild_orbit(int i);
    /// strip through levels >= from; returns first level where the residue
    /// leaves the chain (== levels size if fully stripped)
    std::pair<Perm, int> strip(Perm g, int from) const;
    void schreier_sims(int start_level);
};

} // namespace kneser
