#ifndef HCLIB_RAT_HPP
#define HCLIB_RAT_HPP

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace hc {

// Exact rational scalar. GMP keeps values canonical (lowest terms, positive
// denominator), which is exactly the invariant we need.
using Rat = mpq_class;
using Int = mpz_class;

// p-adic valuation with an explicit +infinity state (valuation of 0).
struct Val {
    bool inf = false;
    long v = 0;

    static Val infinity() { return Val{true, 0}; }
    static Val of(long n) { return Val{false, n}; }

    bool is_inf() const { return inf; }
    long finite() const {
        if (inf) throw std::logic_error("valuation is +infinity");
        return v;
    }
    bool operator==(const Val& o) const {
        return inf == o.inf && (inf || v == o.v);
    }
    bool operator<(const Val& o) const {
        if (inf) return false;
        if (o.inf) return true;
        return v < o.v;
    }
    bool operator<=(const Val& o) const { return *this == o || *this < o; }
    bool operator>=(const Val& o) const { return o <= *this; }
    Val operator+(const Val& o) const {
        if (inf || o.inf) return infinity();
        return of(v + o.v);
    }
};

// v_p(n) for a nonzero integer; 0 maps to +infinity.
Val valuation(const Int& n, unsigned long p);

// v_p(x) = v_p(num) - v_p(den).
Val valuation(const Rat& x, unsigned long p);

// x / p^{v_p(x)} reduced: the p-unit part of a nonzero rational.
Rat unit_part(const Rat& x, unsigned long p);

Rat pow_rat(const Rat& x, long e);   // x^e, e may be negative (x != 0 then)
Int pow_int(unsigned long b, unsigned long e);

// Helpers for the many small rational formulas: floor, numerator/denominator
// as longs (throws if out of range), parity of an integer rational.
Int floor_rat(const Rat& x);
long to_long(const Int& n);
bool is_integer(const Rat& x);
bool is_odd_integer(const Rat& x);

std::string rat_str(const Rat& x);

}  // namespace hc

#endif
