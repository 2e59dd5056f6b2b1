#include "hclib/poly.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace hc {

// ---------------------------------------------------------------------------
// PolyRat

PolyRat::PolyRat(std::vector<Rat> coeffs) : c(std::move(coeffs)) {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

const Rat& PolyRat::lc() const {
    if (c.empty()) throw ZeroPolynomial("leading coefficient of 0");
    return c.back();
}

PolyRat pr_x() { return PolyRat({Rat(0), Rat(1)}); }
PolyRat pr_const(const Rat& a) { return PolyRat({a}); }

PolyRat pr_add(const PolyRat& a, const PolyRat& b) {
    std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return PolyRat(std::move(r));
}

PolyRat pr_sub(const PolyRat& a, const PolyRat& b) {
    std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return PolyRat(std::move(r));
}

PolyRat pr_mul(const PolyRat& a, const PolyRat& b) {
    if (a.is_zero() || b.is_zero()) return PolyRat();
    std::vector<Rat> r(a.c.size() + b.c.size() - 1, Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return PolyRat(std::move(r));
}

PolyRat pr_scale(const PolyRat& a, const Rat& s) {
    if (s == 0) return PolyRat();
    std::vector<Rat> r = a.c;
    for (auto& x : r) x *= s;
    return PolyRat(std::move(r));
}

PolyRat pr_pow(const PolyRat& a, unsigned long e) {
    PolyRat r = pr_const(Rat(1)), base = a;
    while (e) {
        if (e & 1) r = pr_mul(r, base);
        base = pr_mul(base, base);
        e >>= 1;
    }
    return r;
}

std::pair<PolyRat, PolyRat> pr_divrem(const PolyRat& a, const PolyRat& b) {
    if (b.is_zero()) throw ZeroPolynomial("division by zero polynomial");
    std::vector<Rat> rem = a.c;
    std::vector<Rat> quo;
    long db = b.degree();
    if (a.degree() >= db) quo.assign(a.degree() - db + 1, Rat(0));
    while (static_cast<long>(rem.size()) - 1 >= db) {
        Rat q = rem.back() / b.lc();
        size_t shift = rem.size() - 1 - db;
        quo[shift] = q;
        for (long i = 0; i <= db; ++i) rem[shift + i] -= q * b.c[i];
        while (!rem.empty() && rem.back() == 0) rem.pop_back();
    }
    return {PolyRat(std::move(quo)), PolyRat(std::move(rem))};
}

PolyRat pr_derivative(const PolyRat& a) {
    if (a.c.size() <= 1) return PolyRat();
    std::vector<Rat> r(a.c.size() - 1);
    for (size_t i = 1; i < a.c.size(); ++i) r[i - 1] = a.c[i] * Rat(static_cast<long>(i));
    return PolyRat(std::move(r));
}

Rat pr_eval(const PolyRat& a, const Rat& x) {
    Rat r(0);
    for (size_t i = a.c.size(); i-- > 0;) r = r * x + a.c[i];
    return r;
}

PolyRat pr_shift(const PolyRat& a, const Rat& w) {
    PolyRat r;
    PolyRat xw({w, Rat(1)});
    for (size_t i = a.c.size(); i-- > 0;) r = pr_add(pr_mul(r, xw), pr_const(a.c[i]));
    return r;
}

PolyRat pr_gcd(const PolyRat& a, const PolyRat& b) {
    PolyRat f = a, g = b;
    while (!g.is_zero()) {
        PolyRat r = pr_divrem(f, g).second;
        f = g;
        g = r;
    }
    if (!f.is_zero()) f = pr_scale(f, 1 / f.lc());
    return f;
}

bool pr_separable(const PolyRat& a) {
    if (a.is_zero()) return false;
    if (a.degree() == 0) return true;
    return pr_gcd(a, pr_derivative(a)).degree() == 0;
}

Rat pr_resultant(const PolyRat& a, const PolyRat& b) {
    if (a.is_zero() || b.is_zero()) return Rat(0);
    long m = a.degree(), n = b.degree();
    if (m == 0) return pow_rat(a.c[0], n);
    if (n == 0) return pow_rat(b.c[0], m);
    size_t size = static_cast<size_t>(m + n);
    std::vector<std::vector<Rat>> M(size, std::vector<Rat>(size, Rat(0)));
    for (long row = 0; row < n; ++row)
        for (long i = 0; i <= m; ++i) M[row][row + m - i] = a.c[i];
    for (long row = 0; row < m; ++row)
        for (long i = 0; i <= n; ++i) M[n + row][row + n - i] = b.c[i];
    // Gaussian elimination over Q
    Rat det(1);
    for (size_t col = 0; col < size; ++col) {
        size_t piv = col;
        while (piv < size && M[piv][col] == 0) ++piv;
        if (piv == size) return Rat(0);
        if (piv != col) {
            std::swap(M[piv], M[col]);
            det = -det;
        }
        det *= M[col][col];
        for (size_t r = col + 1; r < size; ++r) {
            if (M[r][col] == 0) continue;
            Rat factor = M[r][col] / M[col][col];
            for (size_t cc = col; cc < size; ++cc) M[r][cc] -= factor * M[col][cc];
        }
    }
    return det;
}

Rat pr_discriminant(const PolyRat& a) {
    long n = a.degree();
    if (n < 1) throw ZeroPolynomial("discriminant needs degree >= 1");
    Rat res = pr_resultant(a, pr_derivative(a));
    Rat d = res / a.lc();
    long s = (n * (n - 1) / 2) % 2;
    return s ? -d : d;
}

std::string pr_str(const PolyRat& a) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = a.c.size(); i-- > 0;) {
        const Rat& co = a.c[i];
        if (co == 0) continue;
        Rat abs = co < 0 ? Rat(-co) : co;
        if (first) {
            if (co < 0) os << "-";
            first = false;
        } else {
            os << (co < 0 ? " - " : " + ");
        }
        bool unit = abs == 1;
        if (i == 0 || !unit) os << abs.get_str();
        if (i > 0) {
            if (!unit) os << "*";
            os << "x";
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// PolyFq

PolyFq::PolyFq(FqCtxPtr ctx, std::vector<Fq> coeffs) : F(std::move(ctx)), c(std::move(coeffs)) {
    trim();
}

void PolyFq::trim() {
    while (!c.empty() && F->is_zero(c.back())) c.pop_back();
}

bool pf_eq(const PolyFq& a, const PolyFq& b) { return a.c == b.c; }

PolyFq pf_const(FqCtxPtr F, const Fq& a) { return PolyFq(F, {a}); }

PolyFq pf_x(FqCtxPtr F) { return PolyFq(F, {F->zero(), F->one()}); }

PolyFq pf_add(const PolyFq& a, const PolyFq& b) {
    const FqCtxPtr& F = a.F ? a.F : b.F;
    std::vector<Fq> r(std::max(a.c.size(), b.c.size()), F->zero());
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = F->add(r[i], a.c[i]);
    for (size_t i = 0; i < b.c.size(); ++i) r[i] = F->add(r[i], b.c[i]);
    return PolyFq(F, std::move(r));
}

PolyFq pf_sub(const PolyFq& a, const PolyFq& b) {
    const FqCtxPtr& F = a.F ? a.F : b.F;
    std::vector<Fq> r(std::max(a.c.size(), b.c.size()), F->zero());
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = F->add(r[i], a.c[i]);
    for (size_t i = 0; i < b.c.size(); ++i) r[i] = F->sub(r[i], b.c[i]);
    return PolyFq(F, std::move(r));
}

PolyFq pf_mul(const PolyFq& a, const PolyFq& b) {
    const FqCtxPtr& F = a.F ? a.F : b.F;
    if (a.c.empty() || b.c.empty()) return PolyFq(F);
    std::vector<Fq> r(a.c.size() + b.c.size() - 1, F->zero());
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j)
            r[i + j] = F->add(r[i + j], F->mul(a.c[i], b.c[j]));
    return PolyFq(F, std::move(r));
}

PolyFq pf_scale(const PolyFq& a, const Fq& s) {
    std::vector<Fq> r = a.c;
    for (auto& x : r) x = a.F->mul(x, s);
    return PolyFq(a.F, std::move(r));
}

PolyFq pf_pow(const PolyFq& a, unsigned long e) {
    PolyFq r = pf_const(a.F, a.F->one());
    PolyFq base = a;
    while (e) {
        if (e & 1) r = pf_mul(r, base);
        base = pf_mul(base, base);
        e >>= 1;
    }
    return r;
}

std::pair<PolyFq, PolyFq> pf_divrem(const PolyFq& a, const PolyFq& b) {
    if (b.is_zero()) throw ZeroPolynomial("division by zero polynomial");
    const FqCtxPtr& F = a.F ? a.F : b.F;
    std::vector<Fq> rem = a.c;
    std::vector<Fq> quo;
    long db = b.degree();
    Fq lci = F->inv(b.c.back());
    if (a.degree() >= db) quo.assign(a.degree() - db + 1, F->zero());
    while (static_cast<long>(rem.size()) - 1 >= db) {
        Fq q = F->mul(rem.back(), lci);
        size_t shift = rem.size() - 1 - db;
        quo[shift] = q;
        for (long i = 0; i <= db; ++i)
            rem[shift + i] = F->sub(rem[shift + i], F->mul(q, b.c[i]));
        while (!rem.empty() && F->is_zero(rem.back())) rem.pop_back();
    }
    return {PolyFq(F, std::move(quo)), PolyFq(F, std::move(rem))};
}

PolyFq pf_monic(const PolyFq& a) {
    if (a.is_zero()) return a;
    return pf_scale(a, a.F->inv(a.c.back()));
}

PolyFq pf_gcd(const PolyFq& a, const PolyFq& b) {
    PolyFq f = a, g = b;
    if (!f.F) f.F = g.F;
    if (!g.F) g.F = f.F;
    while (!g.is_zero()) {
        PolyFq r = pf_divrem(f, g).second;
        f = g;
        g = r;
    }
    return pf_monic(f);
}

PolyFq pf_derivative(const PolyFq& a) {
    if (a.c.size() <= 1) return PolyFq(a.F);
    std::vector<Fq> r(a.c.size() - 1, a.F->zero());
    for (size_t i = 1; i < a.c.size(); ++i)
        r[i - 1] = a.F->mul(a.c[i], a.F->from_ul(i % a.F->p()));
    return PolyFq(a.F, std::move(r));
}

Fq pf_eval(const PolyFq& a, const Fq& x) {
    Fq r = a.F->zero();
    for (size_t i = a.c.size(); i-- > 0;) r = a.F->add(a.F->mul(r, x), a.c[i]);
    return r;
}

PolyFq pf_shift(const PolyFq& a, const Fq& w) {
    PolyFq r(a.F);
    PolyFq xw(a.F, {w, a.F->one()});
    for (size_t i = a.c.size(); i-- > 0;)
        r = pf_add(pf_mul(r, xw), pf_const(a.F, a.c[i]));
    return r;
}

PolyFq pf_powmod(const PolyFq& a, const Int& e, const PolyFq& mod) {
    PolyFq r = pf_const(mod.F, mod.F->one());
    PolyFq base = pf_divrem(a, mod).second;
    Int n = e;
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) r = pf_divrem(pf_mul(r, base), mod).second;
        base = pf_divrem(pf_mul(base, base), mod).second;
        n /= 2;
    }
    return r;
}

std::string pf_str(const PolyFq& a) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = a.c.size(); i-- > 0;) {
        if (a.F->is_zero(a.c[i])) continue;
        if (!first) os << " + ";
        first = false;
        std::string cs = a.F->to_string(a.c[i]);
        bool unit = cs == "1";
        bool simple = cs.find('+') == std::string::npos;
        if (i == 0 || !unit) {
            if (!simple && i > 0) os << "(" << cs << ")";
            else os << cs;
        }
        if (i > 0) {
            if (!unit) os << "*";
            os << "x";
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

// p-th root of a polynomial that is a p-th power: g(x) = h(x^p)^? — here g
// has zero derivative, so g = sum c_{pi} x^{pi} and h_i = c_{pi}^{1/p}.
static PolyFq pf_pth_root(const PolyFq& g) {
    unsigned long p = g.F->p();
    std::vector<Fq> h;
    for (size_t i = 0; i < g.c.size(); i += p) h.push_back(g.F->pth_root(g.c[i]));
    return PolyFq(g.F, std::move(h));
}

std::vector<std::pair<PolyFq, unsigned long>> pf_squarefree(const PolyFq& gin) {
    if (gin.is_zero()) throw ZeroPolynomial("squarefree decomposition of 0");
    std::vector<std::pair<PolyFq, unsigned long>> out;
    PolyFq g = pf_monic(gin);
    if (g.degree() == 0) return out;
    PolyFq d = pf_derivative(g);
    if (d.is_zero()) {
        for (auto& [h, m] : pf_squarefree(pf_pth_root(g)))
            out.emplace_back(h, m * g.F->p());
        return out;
    }
    PolyFq c = pf_gcd(g, d);
    PolyFq w = pf_divrem(g, c).first;
    unsigned long i = 1;
    while (w.degree() > 0) {
        PolyFq y = pf_gcd(w, c);
        PolyFq z = pf_divrem(w, y).first;
        if (z.degree() > 0) out.emplace_back(pf_monic(z), i);
        w = y;
        c = pf_divrem(c, y).first;
        ++i;
    }
    if (c.degree() > 0) {
        for (auto& [h, m] : pf_squarefree(pf_pth_root(c)))
            out.emplace_back(h, m * g.F->p());
    }
    return out;
}

// Equal-degree splitting: g squarefree monic, all factors of degree d.
static void pf_edf(const PolyFq& g, unsigned long d, std::vector<PolyFq>& out) {
    const FqCtxPtr& F = g.F;
    if (g.degree() == static_cast<long>(d)) {
        out.push_back(g);
        return;
    }
    Int Q = pow_int(F->p(), F->deg() * d);  // order of the splitting field
    unsigned long bits = mpz_sizeinbase(Q.get_mpz_t(), 2) - 1;
    for (Int trial(0);; ++trial) {
        // candidate u: x + delta sweeping the field, then x^2 + delta, ...
        Int qq = F->order();
        Int di = trial % qq;
        unsigned long degu = 1 + to_long(trial / qq);
        PolyFq u = pf_add(pf_pow(pf_x(F), degu), pf_const(F, F->elem_from_index(di)));
        PolyFq t;
        if (F->p() == 2) {
            // trace map over F_2: u + u^2 + ... + u^{2^{bits-1}} mod g
            PolyFq s = pf_divrem(u, g).second;
            PolyFq acc = s;
            for (unsigned long i = 1; i < bits + 1 && i < F->deg() * d; ++i) {
                s = pf_divrem(pf_mul(s, s), g).second;
                acc = pf_add(acc, s);
            }
            t = pf_gcd(acc, g);
        } else {
            PolyFq b = pf_powmod(u, (Q - 1) / 2, g);
            t = pf_gcd(pf_sub(b, pf_const(F, F->one())), g);
        }
        if (t.degree() > 0 && t.degree() < g.degree()) {
            pf_edf(t, d, out);
            pf_edf(pf_divrem(g, t).first, d, out);
            return;
        }
    }
}

std::vector<std::pair<PolyFq, unsigned long>> pf_factor(const PolyFq& gin) {
    if (gin.is_zero()) throw ZeroPolynomial("factorization of 0");
    std::vector<std::pair<PolyFq, unsigned long>> out;
    for (auto& [sf, mult] : pf_squarefree(gin)) {
        // distinct-degree then equal-degree
        PolyFq g = sf;
        PolyFq h = pf_divrem(pf_x(g.F), g).second;
        Int q = g.F->order();
        for (unsigned long d = 1; g.degree() > 0 && 2 * static_cast<long>(d) <= g.degree(); ++d) {
            h = pf_powmod(h, q, g);
            PolyFq gd = pf_gcd(pf_sub(h, pf_x(g.F)), g);
            if (gd.degree() > 0) {
                std::vector<PolyFq> parts;
                pf_edf(gd, d, parts);
                for (auto& f : parts) out.emplace_back(f, mult);
                g = pf_divrem(g, gd).first;
                h = pf_divrem(h, g).second;
            }
        }
        if (g.degree() > 0) out.emplace_back(g, mult);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
        const FqCtxPtr& F = a.first.F;
        for (size_t i = a.first.c.size(); i-- > 0;) {
            Int ia = F->elem_index(a.first.c[i]), ib = F->elem_index(b.first.c[i]);
            if (ia != ib) return ia < ib;
        }
        return false;
    });
    return out;
}

std::vector<std::pair<Fq, unsigned long>> pf_roots(const PolyFq& g) {
    std::vector<std::pair<Fq, unsigned long>> out;
    for (auto& [f, m] : pf_factor(g)) {
        if (f.degree() == 1) out.emplace_back(g.F->neg(f.c[0]), m);
    }
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        return g.F->elem_less(a.first, b.first);
    });
    return out;
}

Fq fq_embedding_image(const FqCtx& src, FqCtxPtr dst) {
    if (src.deg() == 1) return dst->zero();  // t == 0 in the prime field stage
    // roots of the source modulus inside dst; take the least
    std::vector<Fq> mc;
    for (unsigned long c : src.modulus()) mc.push_back(dst->from_ul(c));
    PolyFq m(dst, std::move(mc));
    auto roots = pf_roots(m);
    if (roots.empty()) throw std::logic_error("no embedding: modulus has no root in target");
    return roots.front().first;
}

Fq fq_embed(const FqCtx& src, const Fq& a, FqCtxPtr dst, const Fq& timage) {
    Fq r = dst->zero();
    for (size_t i = a.c.size(); i-- > 0;)
        r = dst->add(dst->mul(r, timage), dst->from_ul(a.c[i]));
    return r;
}

ExtRoots pf_roots_in_ext(const PolyFq& g, unsigned long ext, unsigned long cap) {
    if (g.is_zero()) throw ZeroPolynomial("roots of 0");
    unsigned long total = g.F->deg() * ext;
    if (total > cap)
        throw ExtensionCapExceeded("residue extension degree " + std::to_string(total) +
                                   " above cap " + std::to_string(cap));
    if (ext == 1) return ExtRoots{g.F, pf_roots(g)};
    auto dst = std::make_shared<FqCtx>(g.F->p(), total);
    Fq ti = fq_embedding_image(*g.F, dst);
    std::vector<Fq> cc;
    for (auto& co : g.c) cc.push_back(fq_embed(*g.F, co, dst, ti));
    PolyFq ge(dst, std::move(cc));
    return ExtRoots{dst, pf_roots(ge)};
}

// ---------------------------------------------------------------------------
// NfCtx

NfCtx::NfCtx(unsigned long p, long precisionN)
    : NfCtx(p, std::vector<Int>{Int(0), Int(1)}, precisionN) {}

NfCtx::NfCtx(unsigned long p, std::vector<Int> modulus, long precisionN)
    : p_(p), m_(std::move(modulus)), N_(precisionN) {
    if (m_.size() < 2 || m_.back() != 1)
        throw std::logic_error("working-ring modulus must be monic of degree >= 1");
    if (N_ < 1) N_ = 1;
    mpz_class base(p);
    mpz_pow_ui(pN_.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(N_));
    std::vector<unsigned long> mp;
    for (auto& c : m_) {
        Int r = c % static_cast<long>(p);
        if (r < 0) r += static_cast<long>(p);
        mp.push_back(r.get_ui());
    }
    fq_ = std::make_shared<FqCtx>(p, mp);  // checks irreducibility mod p
}

NfEl NfCtx::one() const {
    NfEl a = zero();
    a[0] = 1;
    return a;
}

NfEl NfCtx::from_rat(const Rat& a) const {
    NfEl r = zero();
    r[0] = a;
    return r;
}

NfEl NfCtx::lift(const Fq& a) const {
    NfEl r = zero();
    for (size_t i = 0; i < a.c.size() && i < r.size(); ++i)
        r[i] = Rat(static_cast<long>(a.c[i]));
    return r;
}

NfEl NfCtx::add(const NfEl& a, const NfEl& b) const {
    NfEl r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

NfEl NfCtx::sub(const NfEl& a, const NfEl& b) const {
    NfEl r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

NfEl NfCtx::reduce_mod_m(std::vector<Rat> v) const {
    size_t d = deg();
    while (v.size() > d) {
        Rat c = v.back();
        size_t shift = v.size() - 1 - d;
        if (c != 0)
            for (size_t i = 0; i < d; ++i) v[shift + i] -= c * Rat(m_[i]);
        v.pop_back();
    }
    v.resize(d, Rat(0));
    return v;
}

NfEl NfCtx::mul(const NfEl& a, const NfEl& b) const {
    std::vector<Rat> v(2 * deg() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) v[i + j] += a[i] * b[j];
    }
    return reduce_mod_m(std::move(v));
}

NfEl NfCtx::scale(const NfEl& a, const Rat& s) const {
    NfEl r = a;
    for (auto& x : r) x *= s;
    return r;
}

bool NfCtx::is_zero(const NfEl& a) const {
    return std::all_of(a.begin(), a.end(), [](const Rat& x) { return x == 0; });
}

Val NfCtx::val(const NfEl& a) const {
    Val v = Val::infinity();
    for (auto& x : a) {
        Val vx = valuation(x, p_);
        if (vx < v) v = vx;
    }
    return v;
}

Fq NfCtx::to_residue(const NfEl& a, long s) const {
    Fq r = fq_->zero();
    Rat ps = pow_rat(Rat(static_cast<long>(p_)), s);
    for (size_t i = 0; i < a.size(); ++i) {
        Rat x = a[i] / ps;
        if (x == 0) continue;
        if (valuation(x, p_) < Val::of(0))
            throw NegativeValuation("residue of an element of negative valuation");
        Fq xi = fq_->from_rat(x);
        // place at t^i: multiply by t^i
        Fq ti = fq_->one();
        Fq t = fq_->zero();
        if (fq_->deg() > 1) t.c[1] = 1;
        else t = fq_->zero();
        for (size_t k = 0; k < i; ++k) ti = fq_->mul(ti, t);
        r = fq_->add(r, fq_->mul(xi, ti));
    }
    return r;
}

NfEl NfCtx::reduce_centre(const NfEl& a) const {
    NfEl r = a;
    for (auto& x : r) {
        // p-integral rationals reduce mod p^N; denominators coprime to p are
        // inverted mod p^N
        Int den = x.get_den();
        Int n = x.get_num() % pN_;
        if (n < 0) n += pN_;
        if (den != 1) {
            Int dinv;
            if (mpz_invert(dinv.get_mpz_t(), Int(den % pN_).get_mpz_t(), pN_.get_mpz_t()) == 0)
                throw std::logic_error("centre is not integral");
            n = (n * dinv) % pN_;
        }
        x = Rat(n);
    }
    return r;
}

bool NfCtx::rational_within(const NfEl& a, const Rat& rho, Rat* rat) const {
    Rat bound = rho;
    for (size_t i = 1; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        Val v = valuation(a[i], p_);
        if (v.is_inf()) continue;
        if (Rat(v.finite()) < bound) return false;
    }
    if (rat) *rat = a[0];
    return true;
}

NfEl NfCtx::frobenius(const NfEl& a) const {
    if (deg() == 1) return a;
    if (!frob_t_) {
        // Hensel-lift the conjugate of t congruent to t^p mod p
        PolyRat m;  // modulus as rational polynomial
        std::vector<Rat> mc;
        for (auto& c : m_) mc.emplace_back(c);
        m = PolyRat(mc);
        PolyRat md = pr_derivative(m);
        // evaluate polynomials at ring elements
        auto eval_at = [&](const PolyRat& f, const NfEl& x) {
            NfEl r = zero();
            for (size_t i = f.c.size(); i-- > 0;)
                r = add(mul(r, x), from_rat(f.c[i]));
            return r;
        };
        // inverse of a valuation-0 element via extended Euclid over Q[t]
        auto inv_el = [&](const NfEl& u) {
            PolyRat a2(std::vector<Rat>(u.begin(), u.end()));
            PolyRat b2 = m;
            PolyRat s0 = pr_const(Rat(1)), s1;
            PolyRat r0 = a2, r1 = b2;
            while (!r1.is_zero()) {
                auto [q, r] = pr_divrem(r0, r1);
                PolyRat s2 = pr_sub(s0, pr_mul(q, s1));
                r0 = r1; r1 = r;
                s0 = s1; s1 = s2;
            }
            // r0 = gcd = const (m irreducible); inverse = s0 / r0
            PolyRat invp = pr_scale(s0, 1 / r0.c[0]);
            NfEl r = zero();
            for (size_t i = 0; i < invp.c.size() && i < r.size(); ++i) r[i] = invp.c[i];
            return r;
        };
        // start: t^p mod m over the residue lift
        NfEl t = zero();
        t[1] = 1;
        NfEl tau = t;
        for (unsigned long i = 1; i < p_; ++i) tau = mul(tau, t);
        // Newton iteration tau <- tau - m(tau)/m'(tau)
        for (int it = 0; it < 64; ++it) {
            NfEl mt = eval_at(m, tau);
            if (val(mt) >= Val::of(N_)) break;
            NfEl corr = mul(mt, inv_el(eval_at(md, tau)));
            tau = sub(tau, corr);
            tau = reduce_centre(tau);
        }
        frob_t_ = tau;
    }
    NfEl r = zero();
    for (size_t i = a.size(); i-- > 0;)
        r = add(mul(r, *frob_t_), from_rat(a[i]));
    return r;
}

std::string NfCtx::to_string(const NfEl& a) const {
    if (is_zero(a)) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << a[i].get_str();
        if (i == 1) os << "*t";
        else if (i > 1) os << "*t^" << i;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// PolyNf

PolyNf pn_from_rat(NfCtxPtr R, const PolyRat& f) {
    PolyNf r;
    r.R = R;
    for (auto& c : f.c) r.c.push_back(R->from_rat(c));
    return r;
}

PolyNf pn_shift(const PolyNf& f, const NfEl& w) {
    const NfCtxPtr& R = f.R;
    PolyNf r;
    r.R = R;
    for (size_t i = f.c.size(); i-- > 0;) {
        // r = r*(x+w) + c_i
        PolyNf next;
        next.R = R;
        next.c.assign(r.c.size() + 1, R->zero());
        for (size_t j = 0; j < r.c.size(); ++j) {
            next.c[j + 1] = R->add(next.c[j + 1], r.c[j]);
            next.c[j] = R->add(next.c[j], R->mul(r.c[j], w));
        }
        if (next.c.empty()) next.c.assign(1, R->zero());
        next.c[0] = R->add(next.c[0], f.c[i]);
        r = std::move(next);
    }
    while (!r.c.empty() && R->is_zero(r.c.back())) r.c.pop_back();
    return r;
}

NfEl pn_eval(const PolyNf& f, const NfEl& x) {
    const NfCtxPtr& R = f.R;
    NfEl r = R->zero();
    for (size_t i = f.c.size(); i-- > 0;) r = R->add(R->mul(r, x), f.c[i]);
    return r;
}

}  // namespace hc
