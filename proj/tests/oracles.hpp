#pragma once

// Brute-force reference computations, independent of the library's
// enumeration paths. Only usable at small rank / small bounds.

#include "kneser/lattice.hpp"

#include <set>
#include <vector>

namespace oracles {

using namespace kneser;

// all vectors with 0 < norm <= bound, one per +-pair, by box search over
// coordinates |x_i| <= box
inline std::set<std::vector<long>> brute_short_vectors(const IntMat& gram, long bound, long box) {
    int n = gram.rows;
    std::vector<std::vector<long>> g(n, std::vector<long>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g[i][j] = kneser::to_long(gram(i, j));
    std::set<std::vector<long>> out;
    std::vector<long> x(n, -box);
    while (true) {
        long norm = 0;
        for (int i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            for (int j = 0; j < n; ++j) norm += x[i] * g[i][j] * x[j];
        }
        if (norm > 0 && norm <= bound) {
            std::vector<long> v = x;
            for (int i = 0; i < n; ++i) {
                if (v[i] > 0) break;
                if (v[i] < 0) {
                    for (auto& c : v) c = -c;
                    break;
                }
            }
            out.insert(v);
        }
        int i = 0;
        while (i < n && x[i] == box) x[i++] = -box;
        if (i == n) break;
        ++x[i];
    }
    return out;
}

// number of isotropic lines of gram mod p by scanning all of F_p^n
inline long brute_isotropic_line_count(const IntMat& gram, long p) {
    int n = gram.rows;
    std::vector<std::vector<long>> g(n, std::vector<long>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g[i][j] = kneser::to_long(gram(i, j));
    std::vector<long> v(n, 0);
    long vectors = 0;
    while (true) {
        int i = 0;
        while (i < n && v[i] == p - 1) v[i++] = 0;
        if (i == n) break;
        ++v[i];
        long norm = 0;
        for (int a = 0; a < n; ++a) {
            if (v[a] == 0) continue;
            for (int b = 0; b < n; ++b) norm += v[a] * g[a][b] * v[b];
        }
        bool isotropic = (p == 2) ? (norm % 4 == 0) : (norm % p == 0);
        if (isotropic) ++vectors;
    }
    return vectors / (p - 1);  // each line has p-1 nonzero vectors
}

} // namespace oracles
