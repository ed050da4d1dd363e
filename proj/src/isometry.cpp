#include "kneser/isometry.hpp"
#include "kneser/permgroup.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <unordered_map>

namespace kneser {

namespace {

struct VecHash {
    size_t operator()(const std::vector<int32_t>& v) const {
        size_t h = 1469598103934665603ull;
        for (int32_t x : v) {
            h ^= static_cast<uint32_t>(x);
            h *= 1099511628211ull;
        }
        return h;
    }
};

int64_t to_i64(const Int& v) { return to_long(v); }

// Signed short-vector domain of a lattice given by an int64 Gram.
// Pair i is stored once; signed index 2i = +v_i, 2i+1 = -v_i.
struct Domain {
    int n = 0;
    int pairs = 0;
    std::vector<int32_t> coords;  // pairs x n
    std::vector<int64_t> norms;   // per pair
    std::vector<int64_t> gv;      // pairs x n, row = v_i * G
    std::unordered_map<std::vector<int32_t>, int32_t, VecHash> index;  // positive rep -> pair
    std::vector<int32_t> table;   // pairs x pairs products, empty if too large
    static constexpr int kTableLimit = 2048;

    void build(const ShortVectorList& sv, const std::vector<std::vector<int64_t>>& w) {
        n = static_cast<int>(w.size());
        pairs = static_cast<int>(sv.vectors.size());
        coords.resize(static_cast<size_t>(pairs) * n);
        norms.resize(pairs);
        gv.assign(static_cast<size_t>(pairs) * n, 0);
        for (int i = 0; i < pairs; ++i) {
            const auto& e = sv.vectors[i];
            norms[i] = e.norm;
            for (int j = 0; j < n; ++j) coords[static_cast<size_t>(i) * n + j] = e.x[j];
            for (int a = 0; a < n; ++a) {
                int64_t xa = e.x[a];
                if (xa == 0) continue;
                for (int j = 0; j < n; ++j) gv[static_cast<size_t>(i) * n + j] += xa * w[a][j];
            }
            index.emplace(e.x, i);
        }
        if (pairs > 0 && pairs <= kTableLimit) {
            table.assign(static_cast<size_t>(pairs) * pairs, 0);
            for (int i = 0; i < pairs; ++i)
                for (int j = 0; j < pairs; ++j) {
                    int64_t s = 0;
                    for (int a = 0; a < n; ++a)
                        s += int64_t(coords[static_cast<size_t>(i) * n + a]) * gv[static_cast<size_t>(j) * n + a];
                    if (s > INT32_MAX || s < INT32_MIN) { table.clear(); return; }
                    table[static_cast<size_t>(i) * pairs + j] = static_cast<int32_t>(s);
                }
        }
    }

    int64_t prod(int32_t si, int32_t sj) const {
        int i = si >> 1, j = sj >> 1;
        int64_t v;
        if (!table.empty()) {
            v = table[static_cast<size_t>(i) * pairs + j];
        } else {
            v = 0;
            for (int a = 0; a < n; ++a)
                v += int64_t(coords[static_cast<size_t>(i) * n + a]) * gv[static_cast<size_t>(j) * n + a];
        }
        return ((si ^ sj) & 1) ? -v : v;
    }

    // product of signed vector si with basis vector e_j
    int64_t prod_basis(int32_t si, int j) const {
        int64_t v = gv[static_cast<size_t>(si >> 1) * n + j];
        return (si & 1) ? -v : v;
    }

    int64_t norm_of(int32_t si) const { return norms[si >> 1]; }

    std::vector<int32_t> vec(int32_t si) const {
        std::vector<int32_t> v(coords.begin() + static_cast<size_t>(si >> 1) * n,
                               coords.begin() + (static_cast<size_t>(si >> 1) + 1) * n);
        if (si & 1)
            for (auto& x : v) x = -x;
        return v;
    }

    // signed index of an explicit vector, or -1
    int32_t find(const std::vector<int32_t>& v) const {
        int sgn = 0;
        for (int32_t x : v)
            if (x != 0) { sgn = x > 0 ? 1 : -1; break; }
        if (sgn == 0) return -1;
        std::vector<int32_t> key = v;
        if (sgn < 0)
            for (auto& x : key) x = -x;
        auto it = index.find(key);
        if (it == index.end()) return -1;
        return 2 * it->second + (sgn < 0 ? 1 : 0);
    }
};

// Backtracking search for Gram-compatible images; shared by the
// automorphism and isometry entry points.
struct IsomSearch {
    const Domain& dom;
    std::vector<std::vector<int64_t>> target;  // source gram (row constraints)
    int n;
    std::vector<std::vector<std::vector<int32_t>>> lists;  // [depth][level]
    std::vector<int32_t> placed;
    long nodes = 0;

    IsomSearch(const Domain& d, std::vector<std::vector<int64_t>> tgt)
        : dom(d), target(std::move(tgt)), n(static_cast<int>(target.size())),
          lists(n + 1, std::vector<std::vector<int32_t>>(n)), placed(n, -1) {}

    // filter candidates of level k by compatibility with image s at level t
    void filter(const std::vector<int32_t>& src, std::vector<int32_t>& dst, int k, int t,
                int32_t s) const {
        dst.clear();
        int64_t want = target[k][t];
        for (int32_t x : src)
            if (dom.prod(x, s) == want) dst.push_back(x);
    }

    bool dfs(int k) {
        if (k == n) return true;
        ++nodes;
        for (int32_t x : lists[k][k]) {
            placed[k] = x;
            bool ok = true;
            for (int j = k + 1; j < n; ++j) {
                filter(lists[k][j], lists[k + 1][j], j, k, x);
                if (lists[k + 1][j].empty()) { ok = false; break; }
            }
            if (ok && dfs(k + 1)) return true;
        }
        placed[k] = -1;
        return false;
    }
};

std::vector<std::vector<int64_t>> gram_to_i64(const IntMat& g) {
    std::vector<std::vector<int64_t>> w(g.rows, std::vector<int64_t>(g.cols));
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) w[i][j] = to_i64(g(i, j));
    return w;
}

Int max_diag(const IntMat& g) {
    Int m = 0;
    for (int i = 0; i < g.rows; ++i) m = std::max(m, g(i, i));
    return m;
}

IntMat rows_to_mat(const Domain& dom, const std::vector<int32_t>& placed, int n) {
    IntMat h(n, n);
    for (int i = 0; i < n; ++i) {
        auto v = dom.vec(placed[i]);
        for (int j = 0; j < n; ++j) h(i, j) = v[j];
    }
    return h;
}

std::vector<int32_t> apply_mat(const Domain& dom, int32_t si,
                               const std::vector<std::vector<int64_t>>& rows) {
    int n = dom.n;
    std::vector<int64_t> out(n, 0);
    auto v = dom.vec(si);
    for (int a = 0; a < n; ++a) {
        if (v[a] == 0) continue;
        for (int j = 0; j < n; ++j) out[j] += int64_t(v[a]) * rows[a][j];
    }
    std::vector<int32_t> res(n);
    for (int j = 0; j < n; ++j) {
        if (out[j] > INT32_MAX || out[j] < INT32_MIN) throw std::overflow_error("image overflow");
        res[j] = static_cast<int32_t>(out[j]);
    }
    return res;
}

} // namespace

AutGroup automorphisms(const Lattice& l, const AutOptions& opt) {
    int n = l.rank();
    AutGroup out;
    out.order = 1;
    if (n == 0) return out;

    auto say = [&](const std::string& s) {
        if (opt.progress) opt.progress(s);
    };

    LllResult red = lll(l);
    const IntMat& w = red.reduced.gram;
    auto wi = gram_to_i64(w);

    ShortVectorList sv = short_vectors(red.reduced, max_diag(w));
    Domain dom;
    dom.build(sv, wi);
    say("automorphisms: domain " + std::to_string(2 * dom.pairs) + " signed vectors");

    // signed indices of the basis vectors
    std::vector<int32_t> basis_idx(n);
    for (int i = 0; i < n; ++i) {
        std::vector<int32_t> e(n, 0);
        e[i] = 1;
        basis_idx[i] = dom.find(e);
        if (basis_idx[i] < 0) throw std::logic_error("basis vector missing from short-vector domain");
    }

    struct Gen {
        IntMat mat;                           // in reduced coordinates
        std::vector<std::vector<int64_t>> rows;
        int level;                            // fixes e_0..e_{level-1}
    };
    std::vector<Gen> gens;

    auto orbit_of = [&](int level) {
        std::vector<int32_t> orb{basis_idx[level]};
        std::unordered_map<int32_t, bool> seen;
        seen[basis_idx[level]] = true;
        for (size_t head = 0; head < orb.size(); ++head) {
            for (const Gen& g : gens) {
                if (g.level < level) continue;
                auto img = apply_mat(dom, orb[head], g.rows);
                int32_t si = dom.find(img);
                assert(si >= 0);
                if (!seen.count(si)) {
                    seen[si] = true;
                    orb.push_back(si);
                }
            }
        }
        return orb;
    };

    std::vector<Int> orbit_sizes(n, 1);
    IsomSearch search(dom, wi);

    for (int level = n - 1; level >= 0; --level) {
        // base candidate lists under the identity prefix
        for (int k = level; k < n; ++k) {
            auto& lst = search.lists[level][k];
            lst.clear();
            for (int32_t p = 0; p < 2 * dom.pairs; ++p) {
                if (dom.norm_of(p) != wi[k][k]) continue;
                bool ok = true;
                for (int j = 0; j < level && ok; ++j)
                    if (dom.prod_basis(p, j) != wi[k][j]) ok = false;
                if (ok) lst.push_back(p);
            }
        }
        auto orb = orbit_of(level);
        std::unordered_map<int32_t, bool> in_orbit;
        for (int32_t s : orb) in_orbit[s] = true;

        const auto base_list = search.lists[level][level];
        for (int32_t x : base_list) {
            if (in_orbit.count(x)) continue;
            // try to extend e_level -> x fixing the prefix
            for (int j = 0; j < level; ++j) search.placed[j] = basis_idx[j];
            search.placed[level] = x;
            bool ok = true;
            for (int j = level + 1; j < n; ++j) {
                search.filter(search.lists[level][j], search.lists[level + 1][j], j, level, x);
                if (search.lists[level + 1][j].empty()) { ok = false; break; }
            }
            if (ok && search.dfs(level + 1)) {
                Gen g;
                g.mat = rows_to_mat(dom, search.placed, n);
                // exact gram identity in reduced coordinates
                if (!(g.mat * w * g.mat.transpose() == w))
                    throw std::logic_error("search produced a non-isometry");
                g.rows = gram_to_i64(g.mat);
                g.level = level;
                gens.push_back(std::move(g));
                orb = orbit_of(level);
                in_orbit.clear();
                for (int32_t s : orb) in_orbit[s] = true;
            }
        }
        orbit_sizes[level] = Int(static_cast<long>(orb.size()));
        out.order *= orbit_sizes[level];
        say("automorphisms: level " + std::to_string(level) + " orbit " +
            std::to_string(orb.size()));
    }

    // cross-check the order with a stabilizer chain on the permutation action
    if (opt.cross_check && 2 * dom.pairs <= opt.cross_check_max_degree) {
        int degree = 2 * dom.pairs;
        PermGroup pg(degree);
        std::vector<Perm> perms;
        for (const Gen& g : gens) {
            Perm p(degree);
            for (int32_t s = 0; s < degree; ++s) {
                int32_t t = dom.find(apply_mat(dom, s, g.rows));
                assert(t >= 0);
                p[s] = t;
            }
            perms.push_back(std::move(p));
        }
        pg.add_generators(perms);
        if (pg.order() != out.order)
            throw std::logic_error("stabilizer-chain order disagrees with orbit product");
    }

    // conjugate generators back to the original basis
    RatMat tinv_r = inverse(red.transform);
    IntMat tinv = tinv_r.to_int();
    for (const Gen& g : gens) {
        IntMat orig = tinv * g.mat * red.transform;
        if (!(orig * l.gram * orig.transpose() == l.gram))
            throw std::logic_error("conjugated generator fails the gram identity");
        out.generators.push_back(std::move(orig));
    }
    return out;
}

Fingerprint fingerprint(const Lattice& l, int theta_bound, bool with_shells) {
    Fingerprint f;
    f.det = l.det();
    f.even = l.is_even();
    if (theta_bound < 0) theta_bound = l.rank() <= 10 ? 8 : (l.rank() <= 20 ? 4 : 2);
    f.theta = theta_prefix(l, theta_bound);
    f.roots = root_decomposition(l).to_string();
    if (with_shells && l.rank() > 0) {
        LllResult red = lll_fast(l);
        ShortVectorList sv = short_vectors(red.reduced, max_diag(red.reduced.gram));
        std::map<int64_t, Int> sizes;
        for (const auto& e : sv.vectors) sizes[e.norm] += 1;
        for (auto& [k, v] : sizes) f.shells.emplace_back(k, v);
    }
    return f;
}

std::optional<IntMat> is_isometric(const Lattice& a, const Lattice& b) {
    if (a.rank() != b.rank()) return std::nullopt;
    int n = a.rank();
    if (n == 0) return IntMat(0, 0);
    if (a.det() != b.det() || a.is_even() != b.is_even()) return std::nullopt;

    LllResult ra = lll_fast(a), rb = lll_fast(b);
    const IntMat& w1 = ra.reduced.gram;
    const IntMat& w2 = rb.reduced.gram;
    auto w1i = gram_to_i64(w1);

    Int bound = max_diag(w1);
    ShortVectorList sv1 = short_vectors(ra.reduced, bound);
    ShortVectorList sv2 = short_vectors(rb.reduced, bound);
    if (sv1.shell_sizes() != sv2.shell_sizes()) return std::nullopt;

    Domain dom;
    dom.build(sv2, gram_to_i64(w2));

    IsomSearch search(dom, w1i);
    for (int k = 0; k < n; ++k) {
        auto& lst = search.lists[0][k];
        lst.clear();
        for (int32_t p = 0; p < 2 * dom.pairs; ++p)
            if (dom.norm_of(p) == w1i[k][k]) lst.push_back(p);
        if (lst.empty()) return std::nullopt;
    }
    if (!search.dfs(0)) return std::nullopt;
    IntMat h = rows_to_mat(dom, search.placed, n);
    // map original a-coords -> original b-coords
    IntMat iso = inverse(ra.transform).to_int() * h * rb.transform;
    if (!(iso * b.gram * iso.transpose() == a.gram))
        throw std::logic_error("isometry search produced an invalid map");
    return iso;
}

int classify(const Lattice& l, const std::vector<Lattice>& reps) {
    Fingerprint f = fingerprint(l);
    for (size_t i = 0; i < reps.size(); ++i) {
        if (fingerprint(reps[i]) == f && is_isometric(l, reps[i]))
            return static_cast<int>(i);
    }
    throw std::runtime_error("classify: no catalog representative is isometric (incomplete catalog?)");
}

} // namespace kneser
