#include "hclib/rat.hpp"

namespace hc {

Val valuation(const Int& n, unsigned long p) {
    if (n == 0) return Val::infinity();
    mpz_class q = n < 0 ? Int(-n) : n;
    unsigned long v = mpz_remove(q.get_mpz_t(), q.get_mpz_t(), Int(p).get_mpz_t());
    return Val::of(static_cast<long>(v));
}

Val valuation(const Rat& x, unsigned long p) {
    if (x == 0) return Val::infinity();
    return Val::of(valuation(x.get_num(), p).finite() -
                   valuation(x.get_den(), p).finite());
}

Rat unit_part(const Rat& x, unsigned long p) {
    if (x == 0) throw std::logic_error("unit_part of zero");
    long v = valuation(x, p).finite();
    Rat pw{Int(p)};
    return x / pow_rat(pw, v);
}

Rat pow_rat(const Rat& x, long e) {
    if (e == 0) return Rat(1);
    bool neg = e < 0;
    unsigned long a = neg ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    Rat base = x;
    if (neg) {
        if (x == 0) throw std::logic_error("0 to negative power");
        base = 1 / x;
    }
    Rat r(1);
    while (a) {
        if (a & 1) r *= base;
        base *= base;
        a >>= 1;
    }
    return r;
}

Int pow_int(unsigned long b, unsigned long e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, e);
    return r;
}

Int floor_rat(const Rat& x) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    return q;
}

long to_long(const Int& n) {
    if (!n.fits_slong_p()) throw std::overflow_error("integer out of long range");
    return n.get_si();
}

bool is_integer(const Rat& x) { return x.get_den() == 1; }

bool is_odd_integer(const Rat& x) {
    return is_integer(x) && mpz_odd_p(x.get_num().get_mpz_t());
}

std::string rat_str(const Rat& x) { return x.get_str(); }

}  // namespace hc
