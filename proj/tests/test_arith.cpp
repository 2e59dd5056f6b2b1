#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hclib/poly.hpp"

using namespace hc;

namespace {

FqCtxPtr F3 = std::make_shared<FqCtx>(3);
FqCtxPtr F5 = std::make_shared<FqCtx>(5);

PolyFq poly_fp(FqCtxPtr F, std::vector<long> coeffs) {
    std::vector<Fq> c;
    for (long x : coeffs) c.push_back(F->from_int(Int(x)));
    return PolyFq(F, std::move(c));
}

PolyRat poly_q(std::vector<Rat> c) { return PolyRat(std::move(c)); }

// brute-force root finder: evaluate at every element of the field
std::vector<std::pair<Fq, unsigned long>> brute_roots(const PolyFq& g) {
    std::vector<std::pair<Fq, unsigned long>> out;
    Int q = g.F->order();
    for (Int i(0); i < q; ++i) {
        Fq a = g.F->elem_from_index(i);
        if (!g.F->is_zero(pf_eval(g, a))) continue;
        // multiplicity by repeated division by (x - a)
        PolyFq lin(g.F, {g.F->neg(a), g.F->one()});
        PolyFq h = g;
        unsigned long m = 0;
        while (true) {
            auto [quo, rem] = pf_divrem(h, lin);
            if (!rem.is_zero()) break;
            ++m;
            h = quo;
        }
        out.emplace_back(a, m);
    }
    return out;
}

}  // namespace

TEST_CASE("valuation basics") {
    CHECK(valuation(Rat(9, 2), 3) == Val::of(2));
    CHECK(valuation(Rat(0), 5).is_inf());
    CHECK(valuation(Rat(81), 3) == Val::of(4));
    CHECK(valuation(Rat(1, 27), 3) == Val::of(-3));
    CHECK(valuation(Rat(-12), 2) == Val::of(2));
}

TEST_CASE("valuation is additive and ultrametric") {
    std::vector<Rat> xs = {Rat(9, 2), Rat(-5, 27), Rat(81), Rat(7, 3), Rat(12, 35)};
    for (auto& x : xs)
        for (auto& y : xs) {
            CHECK(valuation(x * y, 3) == valuation(x, 3) + valuation(y, 3));
            if (x + y != 0) {
                Val vs = valuation(x + y, 3);
                Val vx = valuation(x, 3), vy = valuation(y, 3);
                Val vmin = vx < vy ? vx : vy;
                CHECK(vmin <= vs);
                if (!(vx == vy)) CHECK(vs == vmin);
            }
        }
}

TEST_CASE("reduce_mod_p") {
    CHECK(F3->is_zero(F3->from_rat(Rat(-3))));
    CHECK(F3->from_rat(Rat(10, 7)) == F3->one());
    CHECK(F3->is_zero(F3->from_rat(Rat(-27))));
    CHECK_THROWS_AS(F3->from_rat(Rat(1, 3)), NegativeValuation);
}

TEST_CASE("Fq field arithmetic in F9") {
    auto F9 = std::make_shared<FqCtx>(3, 2ul);
    // every nonzero element has an inverse
    for (Int i(1); i < 9; ++i) {
        Fq a = F9->elem_from_index(i);
        Fq ai = F9->inv(a);
        CHECK(F9->mul(a, ai) == F9->one());
    }
    // Frobenius has order 2
    Fq t = F9->elem_from_index(Int(3));  // the element t
    CHECK(F9->frobenius(F9->frobenius(t)) == t);
    CHECK_FALSE(F9->frobenius(t) == t);
}

TEST_CASE("canonical modulus is irreducible; bad modulus rejected") {
    CHECK_THROWS(FqCtx(3, std::vector<unsigned long>{0, 0, 1}));  // t^2 reducible
    CHECK_NOTHROW(FqCtx(3, std::vector<unsigned long>{1, 0, 1}));  // t^2+1 irreducible mod 3
    CHECK_THROWS_AS(FqCtx(3, 13ul), ExtensionCapExceeded);
}

TEST_CASE("squarefree_part goldens") {
    // x^2+1 over F3 is squarefree
    auto r1 = pf_squarefree(poly_fp(F3, {1, 0, 1}));
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].second == 1);
    CHECK(pf_eq(r1[0].first, poly_fp(F3, {1, 0, 1})));
    // (x+2)^2 over F3
    auto sq = pf_mul(poly_fp(F3, {2, 1}), poly_fp(F3, {2, 1}));
    auto r2 = pf_squarefree(sq);
    REQUIRE(r2.size() == 1);
    CHECK(r2[0].second == 2);
    CHECK(pf_eq(r2[0].first, poly_fp(F3, {2, 1})));
    // x^3 over F5
    auto r3 = pf_squarefree(poly_fp(F5, {0, 0, 0, 1}));
    REQUIRE(r3.size() == 1);
    CHECK(r3[0].second == 3);
    CHECK(pf_eq(r3[0].first, poly_fp(F5, {0, 1})));
}

TEST_CASE("squarefree_part properties: coprime squarefree factors, product reconstructs") {
    // includes a p-th power part: (x+1)^3 (x+2)^2 x over F3
    PolyFq g = pf_mul(pf_mul(pf_pow(poly_fp(F3, {1, 1}), 3), pf_pow(poly_fp(F3, {2, 1}), 2)),
                      poly_fp(F3, {0, 1}));
    auto parts = pf_squarefree(g);
    PolyFq prod = pf_const(F3, F3->one());
    for (size_t i = 0; i < parts.size(); ++i) {
        auto& [f, m] = parts[i];
        // squarefree: gcd(f, f') = 1
        CHECK(pf_gcd(f, pf_derivative(f)).degree() == 0);
        for (size_t j = i + 1; j < parts.size(); ++j)
            CHECK(pf_gcd(f, parts[j].first).degree() == 0);
        prod = pf_mul(prod, pf_pow(f, m));
    }
    CHECK(pf_eq(pf_monic(prod), pf_monic(g)));
}

TEST_CASE("roots_in_Fq base field goldens") {
    auto r = pf_roots(poly_fp(F3, {-1, 0, 1}));  // y^2 - 1
    REQUIRE(r.size() == 2);
    CHECK(r[0].first == F3->one());
    CHECK(r[1].first == F3->from_ul(2));
    auto r2 = pf_roots(pf_pow(poly_fp(F3, {2, 1}), 2));  // (x+2)^2 -> root 1 mult 2
    REQUIRE(r2.size() == 1);
    CHECK(r2[0].first == F3->one());
    CHECK(r2[0].second == 2);
}

TEST_CASE("roots in extension: x^2+1 over F3 has two simple roots in F9") {
    auto er = pf_roots_in_ext(poly_fp(F3, {1, 0, 1}), 2);
    REQUIRE(er.roots.size() == 2);
    CHECK(er.roots[0].second == 1);
    CHECK(er.roots[1].second == 1);
    // conjugate pair: Frobenius swaps them
    CHECK(er.ext_field->frobenius(er.roots[0].first) == er.roots[1].first);
    // and they really are roots of x^2+1
    for (auto& [r, m] : er.roots) {
        Fq sq = er.ext_field->mul(r, r);
        CHECK(er.ext_field->add(sq, er.ext_field->one()) == er.ext_field->zero());
    }
}

TEST_CASE("roots agree with brute force over small fields") {
    std::vector<PolyFq> polys = {
        poly_fp(F3, {1, 0, 1}),  poly_fp(F3, {0, 2, 1, 1}), poly_fp(F5, {2, 3, 0, 1}),
        poly_fp(F3, {1, 1, 1, 1, 1}), poly_fp(F5, {0, 0, 1}),
    };
    for (auto& g : polys) {
        auto fast = pf_roots(g);
        auto slow = brute_roots(g);
        REQUIRE(fast.size() == slow.size());
        for (size_t i = 0; i < fast.size(); ++i) {
            CHECK(fast[i].first == slow[i].first);
            CHECK(fast[i].second == slow[i].second);
        }
    }
    // and in F_{3^2}, F_{3^3}, F_{3^4} via extension roots
    for (unsigned long e = 2; e <= 4; ++e) {
        PolyFq g = poly_fp(F3, {1, 2, 0, 1, 1});
        auto er = pf_roots_in_ext(g, e);
        // embed g and brute force in the extension
        Fq ti = fq_embedding_image(*F3, er.ext_field);
        std::vector<Fq> cc;
        for (auto& co : g.c) cc.push_back(fq_embed(*F3, co, er.ext_field, ti));
        auto slow = brute_roots(PolyFq(er.ext_field, std::move(cc)));
        REQUIRE(er.roots.size() == slow.size());
        for (size_t i = 0; i < er.roots.size(); ++i) {
            CHECK(er.roots[i].first == slow[i].first);
            CHECK(er.roots[i].second == slow[i].second);
        }
    }
}

TEST_CASE("full factorization sanity") {
    // x^9 - x over F3 = product of all monic irreducibles of degree 1 and 2
    std::vector<Fq> c(10, F3->zero());
    c[9] = F3->one();
    c[1] = F3->neg(F3->one());
    PolyFq g(F3, c);
    auto fac = pf_factor(g);
    PolyFq prod = pf_const(F3, F3->one());
    unsigned long degsum = 0;
    for (auto& [f, m] : fac) {
        degsum += f.degree() * m;
        prod = pf_mul(prod, pf_pow(f, m));
    }
    CHECK(degsum == 9);
    CHECK(pf_eq(pf_monic(prod), pf_monic(g)));
    CHECK(fac.size() == 6);  // 3 linear + 3 quadratic irreducible
}

TEST_CASE("PolyRat: divrem, gcd, shift, discriminant") {
    PolyRat f = poly_q({Rat(-27), Rat(0), Rat(0), Rat(0), Rat(0), Rat(9), Rat(-3), Rat(0), Rat(0), Rat(0), Rat(0), Rat(1)});
    CHECK(f.degree() == 11);
    auto [q, r] = pr_divrem(f, poly_q({Rat(1), Rat(1)}));
    CHECK(pr_add(pr_mul(q, poly_q({Rat(1), Rat(1)})), r) == f);
    CHECK(pr_separable(f));
    // shift round trip
    PolyRat sh = pr_shift(f, Rat(3));
    CHECK(pr_shift(sh, Rat(-3)) == f);
    // disc(x^2 + bx + c) = b^2 - 4c
    PolyRat quad = poly_q({Rat(7), Rat(5), Rat(1)});
    CHECK(pr_discriminant(quad) == Rat(25 - 28));
    // disc(x^3 + px + q) = -4p^3 - 27q^2
    PolyRat cub = poly_q({Rat(2), Rat(3), Rat(0), Rat(1)});
    CHECK(pr_discriminant(cub) == Rat(-4 * 27 - 27 * 4));
    // resultant multiplicativity
    PolyRat a = poly_q({Rat(1), Rat(2), Rat(1, 3)});
    PolyRat b = poly_q({Rat(-2), Rat(1)});
    PolyRat cpoly = poly_q({Rat(5), Rat(0), Rat(2)});
    CHECK(pr_resultant(pr_mul(a, b), cpoly) == pr_resultant(a, cpoly) * pr_resultant(b, cpoly));
}

TEST_CASE("working ring: valuation, residue, rational proximity") {
    // degree-1 stage = plain Q
    auto R = std::make_shared<NfCtx>(3, 8);
    NfEl a = R->from_rat(Rat(18));
    CHECK(R->val(a) == Val::of(2));
    CHECK(R->to_residue(a, 2) == R->residue_field()->from_ul(2));
    // quadratic stage Z[t]/(t^2+1) over p=3
    auto R2 = std::make_shared<NfCtx>(3, std::vector<Int>{Int(1), Int(0), Int(1)}, 8);
    NfEl t = R2->zero();
    t[1] = 1;
    NfEl sq = R2->mul(t, t);  // t^2 = -1
    CHECK(sq[0] == Rat(-1));
    CHECK(R2->val(t) == Val::of(0));
    NfEl w = R2->add(R2->from_rat(Rat(5)), R2->scale(t, Rat(9)));  // 5 + 9t
    Rat wr;
    CHECK(R2->rational_within(w, Rat(2), &wr));
    CHECK(wr == Rat(5));
    CHECK_FALSE(R2->rational_within(w, Rat(3), nullptr));
    // Frobenius lift: fixes rationals, has order 2, reduces to x -> x^3
    NfEl fw = R2->frobenius(w);
    CHECK(R2->rational_within(R2->sub(R2->frobenius(fw), w), Rat(8), &wr));
    Fq res_fw = R2->to_residue(R2->reduce_centre(fw));
    Fq res_w3 = R2->residue_field()->pow(R2->to_residue(R2->reduce_centre(w)), Int(3));
    CHECK(res_fw == res_w3);
}

TEST_CASE("PolyNf shift matches rational shift on the degree-1 stage") {
    auto R = std::make_shared<NfCtx>(3, 8);
    PolyRat f = poly_q({Rat(-27), Rat(0), Rat(0), Rat(36), Rat(0), Rat(0), Rat(12), Rat(0), Rat(0), Rat(1)});
    PolyNf fn = pn_from_rat(R, f);
    PolyNf sh = pn_shift(fn, R->from_rat(Rat(3)));
    PolyRat shr = pr_shift(f, Rat(3));
    REQUIRE(sh.c.size() == shr.c.size());
    for (size_t i = 0; i < sh.c.size(); ++i) CHECK(sh.c[i][0] == shr.c[i]);
}
