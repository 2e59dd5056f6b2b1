#include "hclib/fq.hpp"

#include <algorithm>
#include <sstream>

namespace hc {

namespace {

using PV = std::vector<unsigned long>;  // poly over F_p, c[i] coeff of t^i

void trim(PV& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

unsigned long inv_mod_p(unsigned long a, unsigned long p) {
    long t = 0, nt = 1;
    long r = static_cast<long>(p), nr = static_cast<long>(a % p);
    while (nr != 0) {
        long q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw std::logic_error("not invertible mod p");
    return static_cast<unsigned long>((t % static_cast<long>(p) + static_cast<long>(p)) % static_cast<long>(p));
}

PV pmul(const PV& a, const PV& b, unsigned long p) {
    if (a.empty() || b.empty()) return {};
    PV r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    trim(r);
    return r;
}

// a mod m, m monic
PV pmod(PV a, const PV& m, unsigned long p) {
    trim(a);
    while (a.size() >= m.size()) {
        unsigned long c = a.back();
        size_t shift = a.size() - m.size();
        if (c) {
            for (size_t i = 0; i + 1 < m.size(); ++i)
                a[i + shift] = (a[i + shift] + p * p - c * m[i] % p) % p;
        }
        a.pop_back();
        trim(a);
    }
    return a;
}

PV pgcd(PV a, PV b, unsigned long p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        // make b monic so pmod applies
        unsigned long lc = b.back();
        if (lc != 1) {
            unsigned long il = inv_mod_p(lc, p);
            for (auto& c : b) c = c * il % p;
        }
        PV r = pmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() != 1) {
        unsigned long il = inv_mod_p(a.back(), p);
        for (auto& c : a) c = c * il % p;
    }
    return a;
}

// t^{p^e} mod m by repeated p-th powering
PV t_pe_mod(const PV& m, unsigned long p, unsigned long e) {
    PV x = {0, 1};
    x = pmod(x, m, p);
    for (unsigned long i = 0; i < e; ++i) {
        // x^p mod m via square-and-multiply on exponent p
        PV r = {1};
        PV base = x;
        unsigned long n = p;
        while (n) {
            if (n & 1) r = pmod(pmul(r, base, p), m, p);
            base = pmod(pmul(base, base, p), m, p);
            n >>= 1;
        }
        x = std::move(r);
    }
    return x;
}

bool is_irreducible(const PV& m, unsigned long p) {
    unsigned long d = static_cast<unsigned long>(m.size()) - 1;
    if (d == 0) return false;
    // t^{p^d} == t mod m
    PV xpd = t_pe_mod(m, p, d);
    PV t = pmod({0, 1}, m, p);
    if (xpd != t) return false;
    for (unsigned long r = 2; r <= d; ++r) {
        if (d % r) continue;
        bool prime = true;
        for (unsigned long s = 2; s * s <= r; ++s)
            if (r % s == 0) { prime = false; break; }
        if (!prime) continue;
        PV xe = t_pe_mod(m, p, d / r);
        PV diff = xe;
        diff.resize(std::max<size_t>(diff.size(), 2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(diff);
        if (pgcd(m, diff, p).size() > 1) return false;
    }
    return true;
}

}  // namespace

FqCtx::FqCtx(unsigned long p) : p_(p), m_{0, 1} {}

FqCtx::FqCtx(unsigned long p, unsigned long deg) : p_(p) {
    if (deg == 0) throw std::logic_error("extension degree must be >= 1");
    if (deg > 12) throw ExtensionCapExceeded("residue extension degree above cap");
    // first monic irreducible of this degree in index order
    Int count = pow_int(p, deg);
    for (Int idx(0); idx < count; ++idx) {
        PV m(deg + 1, 0);
        Int n = idx;
        for (unsigned long i = 0; i < deg; ++i) {
            m[i] = mpz_fdiv_ui(n.get_mpz_t(), p);
            n /= static_cast<long>(p);
        }
        m[deg] = 1;
        if (is_irreducible(m, p)) {
            m_ = std::move(m);
            return;
        }
    }
    throw std::logic_error("no irreducible modulus found");
}

FqCtx::FqCtx(unsigned long p, std::vector<unsigned long> modulus) : p_(p), m_(std::move(modulus)) {
    for (auto& c : m_) c %= p;
    if (m_.size() < 2 || m_.back() != 1)
        throw std::logic_error("modulus must be monic of degree >= 1");
    if (!is_irreducible(m_, p)) throw std::logic_error("modulus is reducible");
}

Int FqCtx::order() const { return pow_int(p_, deg()); }

Fq FqCtx::zero() const { return Fq{PV(deg(), 0)}; }

Fq FqCtx::one() const {
    Fq a = zero();
    a.c[0] = 1 % p_;
    return a;
}

Fq FqCtx::from_ul(unsigned long n) const {
    Fq a = zero();
    a.c[0] = n % p_;
    return a;
}

Fq FqCtx::from_int(const Int& n) const {
    Fq a = zero();
    Int r = n % static_cast<long>(p_);
    if (r < 0) r += static_cast<long>(p_);
    a.c[0] = r.get_ui();
    return a;
}

Fq FqCtx::from_rat(const Rat& x) const {
    if (x == 0) return zero();
    if (valuation(x, p_) < Val::of(0))
        throw NegativeValuation("reduce_mod_p: negative valuation");
    Int den = x.get_den();
    Int dm = den % static_cast<long>(p_);
    unsigned long d = dm.get_ui();
    unsigned long di = inv_mod_p(d, p_);
    Fq num = from_int(x.get_num());
    return mul(num, from_ul(di));
}

bool FqCtx::is_zero(const Fq& a) const {
    return std::all_of(a.c.begin(), a.c.end(), [](unsigned long c) { return c == 0; });
}

Fq FqCtx::add(const Fq& a, const Fq& b) const {
    Fq r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = (r.c[i] + b.c[i]) % p_;
    return r;
}

Fq FqCtx::sub(const Fq& a, const Fq& b) const {
    Fq r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = (r.c[i] + p_ - b.c[i]) % p_;
    return r;
}

Fq FqCtx::neg(const Fq& a) const { return sub(zero(), a); }

Fq FqCtx::mul(const Fq& a, const Fq& b) const {
    PV r = pmod(pmul(a.c, b.c, p_), m_, p_);
    r.resize(deg(), 0);
    return Fq{r};
}

Fq FqCtx::pow(const Fq& a, const Int& e) const {
    if (e < 0) return pow(inv(a), -e);
    Fq r = one(), base = a;
    Int n = e;
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) r = mul(r, base);
        base = mul(base, base);
        n /= 2;
    }
    return r;
}

Fq FqCtx::inv(const Fq& a) const {
    if (is_zero(a)) throw std::logic_error("inverse of zero in F_q");
    // a^{q-2}
    return pow(a, order() - 2);
}

Fq FqCtx::pth_root(const Fq& a) const {
    if (deg() == 1) return a;  // Frobenius is the identity on F_p
    Int e = pow_int(p_, deg() - 1);
    return pow(a, e);
}

unsigned long FqCtx::trace(const Fq& a) const {
    Fq s = zero(), x = a;
    for (unsigned long i = 0; i < deg(); ++i) {
        s = add(s, x);
        x = frobenius(x);
    }
    for (size_t i = 1; i < s.c.size(); ++i)
        if (s.c[i] != 0) throw std::logic_error("trace not in prime field");
    return s.c[0];
}

Int FqCtx::elem_index(const Fq& a) const {
    Int idx(0);
    for (size_t i = a.c.size(); i-- > 0;)
        idx = idx * static_cast<long>(p_) + static_cast<long>(a.c[i]);
    return idx;
}

Fq FqCtx::elem_from_index(const Int& idx) const {
    Fq a = zero();
    Int n = idx;
    for (unsigned long i = 0; i < deg(); ++i) {
        a.c[i] = mpz_fdiv_ui(n.get_mpz_t(), p_);
        n /= static_cast<long>(p_);
    }
    return a;
}

bool FqCtx::elem_less(const Fq& a, const Fq& b) const {
    return elem_index(a) < elem_index(b);
}

std::string FqCtx::to_string(const Fq& a) const {
    if (is_zero(a)) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i]) continue;
        if (!first) os << "+";
        first = false;
        if (i == 0) {
            os << a.c[i];
        } else {
            if (a.c[i] != 1) os << a.c[i] << "*";
            os << "t";
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

}  // namespace hc
