#ifndef HCLIB_FQ_HPP
#define HCLIB_FQ_HPP

#include <memory>
#include <vector>

#include "hclib/rat.hpp"

namespace hc {

struct ExtensionCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Element of F_q = F_p[t]/(m(t)). Coefficients live in [0,p), c[i] is the
// coefficient of t^i, stored at full length deg(m).
struct Fq {
    std::vector<unsigned long> c;
    bool operator==(const Fq& o) const { return c == o.c; }
};

// Field context: the prime and the monic irreducible modulus. All element
// operations go through the context so elements stay plain data.
class FqCtx {
  public:
    // Prime field F_p (modulus t).
    explicit FqCtx(unsigned long p);
    // F_{p^deg} with the canonical modulus: the first monic irreducible of
    // that degree in index order (see elem_index).
    FqCtx(unsigned long p, unsigned long deg);
    // Explicit modulus, checked irreducible via gcd with t^{p^i} - t.
    FqCtx(unsigned long p, std::vector<unsigned long> modulus);

    unsigned long p() const { return p_; }
    unsigned long deg() const { return static_cast<unsigned long>(m_.size()) - 1; }
    const std::vector<unsigned long>& modulus() const { return m_; }
    // q = p^deg as a big integer.
    Int order() const;

    Fq zero() const;
    Fq one() const;
    Fq from_ul(unsigned long n) const;
    Fq from_int(const Int& n) const;
    // Image of a rational with v_p >= 0; throws NegativeValuation otherwise.
    Fq from_rat(const Rat& x) const;

    bool is_zero(const Fq& a) const;
    Fq add(const Fq& a, const Fq& b) const;
    Fq sub(const Fq& a, const Fq& b) const;
    Fq neg(const Fq& a) const;
    Fq mul(const Fq& a, const Fq& b) const;
    Fq inv(const Fq& a) const;
    Fq pow(const Fq& a, const Int& e) const;
    Fq frobenius(const Fq& a) const { return pow(a, Int(p_)); }

    // a = b^p has the unique solution b = a^{q/p}; used by the squarefree
    // decomposition when stripping p-th powers.
    Fq pth_root(const Fq& a) const;

    // Trace to the prime field, as an integer in [0,p).
    unsigned long trace(const Fq& a) const;

    // Deterministic enumeration: index = sum c_i p^i, so index order is
    // lexicographic on coefficient vectors read from the top coefficient.
    Int elem_index(const Fq& a) const;
    Fq elem_from_index(const Int& idx) const;
    bool elem_less(const Fq& a, const Fq& b) const;

    std::string to_string(const Fq& a) const;

  private:
    unsigned long p_;
    std::vector<unsigned long> m_;
    void reduce(std::vector<unsigned long>& v) const;
};

struct NegativeValuation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using FqCtxPtr = std::shared_ptr<const FqCtx>;

}  // namespace hc

#endif
