#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kneser {

using Int = mpz_class;
using Rat = mpq_class;

inline long to_long(const Int& a) {
    if (!a.fits_slong_p()) throw std::overflow_error("integer does not fit in a machine word");
    return a.get_si();
}

inline Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Int lcm(const Int& a, const Int& b) {
    Int l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

/// Kronecker symbol (a|n), the usual extension of the Legendre symbol.
inline int kronecker(const Int& a, const Int& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

/// Largest e with p^e | a (a != 0).
inline long valuation(const Int& a, const Int& p) {
    if (a == 0) throw std::domain_error("valuation of zero");
    Int rest;
    return static_cast<long>(mpz_remove(rest.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()));
}

/// Squarefree part of a nonzero integer, keeping the sign.
inline Int squarefree_part(Int a) {
    if (a == 0) throw std::domain_error("squarefree part of zero");
    int sign = (a < 0) ? -1 : 1;
    a = abs(a);
    for (Int d = 2; d * d <= a; ++d)
        while (a % (d * d) == 0) a /= d * d;
    return sign * a;
}

/// Squarefree representative of a nonzero rational square class.
inline Int squarefree_part(const Rat& r) {
    if (r == 0) throw std::domain_error("squarefree part of zero");
    return squarefree_part(Int(r.get_num() * r.get_den()));
}

inline bool is_prime(const Int& p) {
    return mpz_probab_prime_p(p.get_mpz_t(), 40) != 0;
}

/// a^-1 mod p for p prime, 0 < a < p.
inline int64_t inv_mod(int64_t a, int64_t p) {
    int64_t t = 0, newt = 1, r = p, newr = a % p;
    while (newr != 0) {
        int64_t q = r / newr;
        t -= q * newt; std::swap(t, newt);
        r -= q * newr; std::swap(r, newr);
    }
    if (r != 1) throw std::domain_error("not invertible");
    return ((t % p) + p) % p;
}

inline int64_t mod_pos(int64_t a, int64_t p) { return ((a % p) + p) % p; }

/// Fraction reduced into [0,1).
inline Rat frac_mod1(Rat x) {
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    x -= Rat(fl);
    return x;
}

} // namespace kneser
