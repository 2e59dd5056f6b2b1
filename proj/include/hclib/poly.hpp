#ifndef HCLIB_POLY_HPP
#define HCLIB_POLY_HPP

#include <optional>
#include <string>
#include <vector>

#include "hclib/fq.hpp"
#include "hclib/rat.hpp"

namespace hc {

struct ZeroPolynomial : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InseparablePolynomial : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Dense univariate polynomials over Q. c[i] is the coefficient of x^i; no
// trailing zeros; the zero polynomial has an empty vector.

struct PolyRat {
    std::vector<Rat> c;

    PolyRat() = default;
    explicit PolyRat(std::vector<Rat> coeffs);

    bool is_zero() const { return c.empty(); }
    long degree() const { return static_cast<long>(c.size()) - 1; }  // -1 for 0
    const Rat& lc() const;
    Rat coeff(long i) const { return (i >= 0 && i < static_cast<long>(c.size())) ? c[i] : Rat(0); }

    bool operator==(const PolyRat& o) const { return c == o.c; }
};

PolyRat pr_x();                       // the monomial x
PolyRat pr_const(const Rat& a);
PolyRat pr_add(const PolyRat& a, const PolyRat& b);
PolyRat pr_sub(const PolyRat& a, const PolyRat& b);
PolyRat pr_mul(const PolyRat& a, const PolyRat& b);
PolyRat pr_scale(const PolyRat& a, const Rat& s);
PolyRat pr_pow(const PolyRat& a, unsigned long e);
std::pair<PolyRat, PolyRat> pr_divrem(const PolyRat& a, const PolyRat& b);
PolyRat pr_derivative(const PolyRat& a);
Rat pr_eval(const PolyRat& a, const Rat& x);
PolyRat pr_shift(const PolyRat& a, const Rat& w);  // a(x + w)
PolyRat pr_gcd(const PolyRat& a, const PolyRat& b);  // monic
bool pr_separable(const PolyRat& a);
Rat pr_resultant(const PolyRat& a, const PolyRat& b);
Rat pr_discriminant(const PolyRat& a);
std::string pr_str(const PolyRat& a);  // human-readable, variable x

// ---------------------------------------------------------------------------
// Dense univariate polynomials over F_q.

struct PolyFq {
    FqCtxPtr F;
    std::vector<Fq> c;

    PolyFq() = default;
    explicit PolyFq(FqCtxPtr ctx) : F(std::move(ctx)) {}
    PolyFq(FqCtxPtr ctx, std::vector<Fq> coeffs);

    bool is_zero() const { return c.empty(); }
    long degree() const { return static_cast<long>(c.size()) - 1; }
    void trim();
};

bool pf_eq(const PolyFq& a, const PolyFq& b);
PolyFq pf_const(FqCtxPtr F, const Fq& a);
PolyFq pf_x(FqCtxPtr F);
PolyFq pf_add(const PolyFq& a, const PolyFq& b);
PolyFq pf_sub(const PolyFq& a, const PolyFq& b);
PolyFq pf_mul(const PolyFq& a, const PolyFq& b);
PolyFq pf_scale(const PolyFq& a, const Fq& s);
PolyFq pf_pow(const PolyFq& a, unsigned long e);
std::pair<PolyFq, PolyFq> pf_divrem(const PolyFq& a, const PolyFq& b);
PolyFq pf_monic(const PolyFq& a);
PolyFq pf_gcd(const PolyFq& a, const PolyFq& b);  // monic
PolyFq pf_derivative(const PolyFq& a);
Fq pf_eval(const PolyFq& a, const Fq& x);
PolyFq pf_shift(const PolyFq& a, const Fq& w);  // a(x + w)
PolyFq pf_powmod(const PolyFq& a, const Int& e, const PolyFq& mod);
std::string pf_str(const PolyFq& a);

// Squarefree decomposition (handles p-th power parts). Factors are monic,
// pairwise coprime, squarefree; the product of factor^mult times the leading
// unit reconstructs the input.
std::vector<std::pair<PolyFq, unsigned long>> pf_squarefree(const PolyFq& g);

// Full monic irreducible factorization with multiplicities, deterministic
// order (by degree, then by coefficient index).
std::vector<std::pair<PolyFq, unsigned long>> pf_factor(const PolyFq& g);

// Roots in the base field, with multiplicities, ordered by element index.
std::vector<std::pair<Fq, unsigned long>> pf_roots(const PolyFq& g);

// Roots in F_{q^ext}: builds the canonical extension context (degree
// deg(F) * ext over p), embeds, and enumerates. Returned roots live in the
// returned context. Throws ExtensionCapExceeded past the cap.
struct ExtRoots {
    FqCtxPtr ext_field;
    std::vector<std::pair<Fq, unsigned long>> roots;
};
ExtRoots pf_roots_in_ext(const PolyFq& g, unsigned long ext, unsigned long cap = 12);

// Embedding F_{p^d} -> F_{p^{d*e}}: image of t under the lex-least root of
// the source modulus in the target field.
Fq fq_embedding_image(const FqCtx& src, FqCtxPtr dst);
Fq fq_embed(const FqCtx& src, const Fq& a, FqCtxPtr dst, const Fq& timage);

// ---------------------------------------------------------------------------
// The working unramified ring Q[t]/(m(t)) with m monic over Z and irreducible
// mod p. Valuation is coefficientwise min; the valuation ring is
// Z_p[t]/(m), residue field F_p[t]/(m mod p). Centres of cluster discs live
// in the integral part and are kept reduced mod p^N.

using NfEl = std::vector<Rat>;  // length deg(m), coefficient of t^i at [i]

class NfCtx {
  public:
    // Degree-1 stage: plain Q with residue field F_p.
    NfCtx(unsigned long p, long precisionN);
    // Stage with an explicit monic integer modulus, irreducible mod p.
    NfCtx(unsigned long p, std::vector<Int> modulus, long precisionN);

    unsigned long p() const { return p_; }
    unsigned long deg() const { return static_cast<unsigned long>(m_.size()) - 1; }
    long precision() const { return N_; }
    const std::vector<Int>& modulus() const { return m_; }
    FqCtxPtr residue_field() const { return fq_; }

    NfEl zero() const { return NfEl(deg(), Rat(0)); }
    NfEl one() const;
    NfEl from_rat(const Rat& a) const;
    NfEl lift(const Fq& a) const;  // integer-coefficient lift of a residue
    NfEl add(const NfEl& a, const NfEl& b) const;
    NfEl sub(const NfEl& a, const NfEl& b) const;
    NfEl mul(const NfEl& a, const NfEl& b) const;
    NfEl scale(const NfEl& a, const Rat& s) const;
    bool is_zero(const NfEl& a) const;
    Val val(const NfEl& a) const;  // min over coefficient valuations
    // a / p^s reduced to the residue field; requires val(a) >= s.
    Fq to_residue(const NfEl& a, long s = 0) const;
    // reduce an integral element mod p^N (canonical centre form)
    NfEl reduce_centre(const NfEl& a) const;
    // true if the element is within distance >= rho of a rational, i.e. all
    // t-coefficients have valuation >= rho; if so *rat is that rational.
    bool rational_within(const NfEl& a, const Rat& rho, Rat* rat) const;
    // Frobenius lift: substitutes t by the Hensel-lifted conjugate congruent
    // to t^p mod p; exact on centres mod p^N.
    NfEl frobenius(const NfEl& a) const;

    std::string to_string(const NfEl& a) const;

  private:
    unsigned long p_;
    std::vector<Int> m_;  // monic over Z
    long N_;
    Int pN_;
    FqCtxPtr fq_;
    mutable std::optional<NfEl> frob_t_;  // cached image of t
    NfEl reduce_mod_m(std::vector<Rat> v) const;
};

using NfCtxPtr = std::shared_ptr<const NfCtx>;

// Polynomial over the working ring, for f(x + w) with w in the ring.
struct PolyNf {
    NfCtxPtr R;
    std::vector<NfEl> c;
    long degree() const { return static_cast<long>(c.size()) - 1; }
};

PolyNf pn_from_rat(NfCtxPtr R, const PolyRat& f);
PolyNf pn_shift(const PolyNf& f, const NfEl& w);  // f(x + w)
NfEl pn_eval(const PolyNf& f, const NfEl& x);

}  // namespace hc

#endif
