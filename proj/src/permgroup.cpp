#include "kneser/permgroup.hpp"

#include <cassert>
#include <stdexcept>

namespace kneser {

Perm perm_identity(int degree) {
    Perm p(degree);
    for (int i = 0; i < degree; ++i) p[i] = i;
    return p;
}

Perm perm_compose(const Perm& a, const Perm& b) {
    Perm c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = b[a[i]];
    return c;
}

Perm perm_inverse(const Perm& a) {
    Perm c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[a[i]] = static_cast<int32_t>(i);
    return c;
}

bool perm_is_identity(const Perm& a) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != static_cast<int32_t>(i)) return false;
    return true;
}

bool PermGroup::fixes_prefix(const Perm& g, int k) const {
    for (int j = 0; j < k; ++j)
        if (g[base_[j]] != base_[j]) return false;
    return true;
}

void PermGroup::rebuild_orbit(int i) {
    Level& lv = levels_[i];
    lv.base = base_[i];
    lv.orbit.assign(1, lv.base);
    lv.pos.assign(degree_, 0);
    lv.pos[lv.base] = 1;
    lv.transversal.assign(1, perm_identity(degree_));
    for (size_t head = 0; head < lv.orbit.size(); ++head) {
        int32_t p = lv.orbit[head];
        for (size_t gi = 0; gi < gens_.size(); ++gi) {
            if (gen_level_[gi] < i) continue;  // does not fix the prefix
            int32_t q = gens_[gi][p];
            if (lv.pos[q] == 0) {
                lv.pos[q] = static_cast<int32_t>(lv.orbit.size()) + 1;
                lv.orbit.push_back(q);
                lv.transversal.push_back(perm_compose(lv.transversal[head], gens_[gi]));
            }
        }
    }
}

std::pair<Perm, int> PermGroup::strip(Perm g, int from) const {
    for (int i = from; i < static_cast<int>(levels_.size()); ++i) {
        int32_t p = g[base_[i]];
        int32_t idx = levels_[i].pos[p];
        if (idx == 0) return {std::move(g), i};
        g = perm_compose(g, perm_inverse(levels_[i].transversal[idx - 1]));
    }
    return {std::move(g), static_cast<int>(levels_.size())};
}

void PermGroup::schreier_sims(int start_level) {
    int i = start_level;
    while (i >= 0) {
        rebuild_orbit(i);
        const Level& lv = levels_[i];
        bool restarted = false;
        for (size_t pi = 0; pi < lv.orbit.size() && !restarted; ++pi) {
            for (size_t gi = 0; gi < gens_.size() && !restarted; ++gi) {
                if (gen_level_[gi] < i) continue;
                Perm s = perm_compose(lv.transversal[pi], gens_[gi]);
                int32_t q = s[base_[i]];
                assert(lv.pos[q] != 0);
                Perm schreier = perm_compose(s, perm_inverse(lv.transversal[lv.pos[q] - 1]));
                auto [h, j] = strip(std::move(schreier), i + 1);
                if (!perm_is_identity(h)) {
                    if (j == static_cast<int>(levels_.size())) {
                        int32_t moved = -1;
                        for (int32_t x = 0; x < degree_; ++x)
                            if (h[x] != x) { moved = x; break; }
                        base_.push_back(moved);
                        levels_.emplace_back();
                    }
                    gens_.push_back(std::move(h));
                    gen_level_.push_back(j);
                    for (int l = i + 1; l <= j && l < static_cast<int>(levels_.size()); ++l)
                        rebuild_orbit(l);
                    i = j;
                    restarted = true;
                }
            }
        }
        if (!restarted) --i;
    }
}

void PermGroup::add_generator(const Perm& g) { add_generators({g}); }

void PermGroup::add_generators(const std::vector<Perm>& gs) {
    bool changed = false;
    for (const Perm& g : gs) {
        if (static_cast<int>(g.size()) != degree_) throw std::invalid_argument("degree mismatch");
        auto [h, j] = strip(g, 0);
        if (perm_is_identity(h)) continue;
        if (j == static_cast<int>(levels_.size())) {
            int32_t moved = -1;
            for (int32_t x = 0; x < degree_; ++x)
                if (h[x] != x) { moved = x; break; }
            base_.push_back(moved);
            levels_.emplace_back();
        }
        gens_.push_back(std::move(h));
        gen_level_.push_back(j);
        for (int l = 0; l <= j && l < static_cast<int>(levels_.size()); ++l) rebuild_orbit(l);
        changed = true;
    }
    if (changed) schreier_sims(static_cast<int>(levels_.size()) - 1);
}

Int PermGroup::order() const {
    Int o = 1;
    for (const Level& lv : levels_) o *= Int(static_cast<long>(lv.orbit.size()));
    return o;
}

bool PermGroup::contains(const Perm& g) const {
    auto [h, j] = strip(g, 0);
    (void)j;
    return perm_is_identity(h);
}

} // namespace kneser
