#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "hclib/clusters.hpp"

using namespace hc;

namespace {

PolyRat poly_q(std::vector<Rat> c) { return PolyRat(std::move(c)); }

// x^11 - 3x^6 + 9x^5 - 27
PolyRat example_f() {
    std::vector<Rat> c(12, Rat(0));
    c[11] = 1;
    c[6] = -3;
    c[5] = 9;
    c[0] = -27;
    return PolyRat(c);
}

// (x^3 - 3^4)(x^3 + 3^4)((x - 3)^3 - 3^11), the genus-4 worked example
PolyRat genus4_f() {
    PolyRat a = poly_q({Rat(-81), Rat(0), Rat(0), Rat(1)});
    PolyRat b = poly_q({Rat(81), Rat(0), Rat(0), Rat(1)});
    PolyRat shifted = pr_shift(poly_q({Rat(-177147), Rat(0), Rat(0), Rat(1)}), Rat(-3));
    return pr_mul(pr_mul(a, b), shifted);
}

PolyRat from_roots(const std::vector<Rat>& roots) {
    PolyRat f = pr_const(Rat(1));
    for (auto& r : roots) f = pr_mul(f, poly_q({-r, Rat(1)}));
    return f;
}

// brute-force rational cluster data for a separable product of rational roots
struct BruteNode {
    std::set<size_t> roots;
    Rat rho;
    Rat eps;
    int parent = -1;
};

std::vector<BruteNode> brute_picture(const std::vector<Rat>& roots, unsigned long p) {
    size_t n = roots.size();
    std::vector<std::vector<Rat>> dist(n, std::vector<Rat>(n, Rat(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j) dist[i][j] = Rat(valuation(roots[i] - roots[j], p).finite());

    std::set<std::set<size_t>> seen;
    std::vector<BruteNode> out;
    for (size_t i = 0; i < n; ++i) {
        std::set<Rat> levels;
        for (size_t j = 0; j < n; ++j)
            if (j != i) levels.insert(dist[i][j]);
        for (auto& d : levels) {
            std::set<size_t> s{i};
            for (size_t j = 0; j < n; ++j)
                if (j != i && dist[i][j] >= d) s.insert(j);
            if (s.size() < 2 || seen.count(s)) continue;
            seen.insert(s);
            BruteNode node;
            node.roots = s;
            node.rho = d;
            for (size_t a : s)
                for (size_t b : s)
                    if (a != b && dist[a][b] < node.rho) node.rho = dist[a][b];
            Rat eps = Rat(static_cast<long>(s.size())) * node.rho;
            size_t anchor = *s.begin();
            for (size_t j = 0; j < n; ++j)
                if (!s.count(j)) eps += dist[anchor][j];
            node.eps = eps;
            out.push_back(std::move(node));
        }
    }
    // parents by strict inclusion
    for (size_t i = 0; i < out.size(); ++i) {
        int best = -1;
        for (size_t j = 0; j < out.size(); ++j) {
            if (i == j || out[j].roots.size() <= out[i].roots.size()) continue;
            if (!std::includes(out[j].roots.begin(), out[j].roots.end(), out[i].roots.begin(),
                               out[i].roots.end()))
                continue;
            if (best < 0 || out[j].roots.size() < out[best].roots.size())
                best = static_cast<int>(j);
        }
        out[i].parent = best;
    }
    return out;
}

}  // namespace

TEST_CASE("centred picture goldens") {
    auto c1 = centred_picture(example_f(), Rat(0), 3);
    REQUIRE(c1.size() == 2);
    CHECK(c1[0].size == 6);
    CHECK(c1[0].rho == Rat(1, 3));
    CHECK(c1[0].eps == Rat(3));
    CHECK(c1[1].size == 11);
    CHECK(c1[1].rho == Rat(1, 5));
    CHECK(c1[1].eps == Rat(11, 5));

    std::vector<Rat> c(10, Rat(0));
    c[9] = 1;
    c[6] = 12;
    c[3] = 36;
    c[0] = 81;
    auto c2 = centred_picture(PolyRat(c), Rat(0), 3);
    REQUIRE(c2.size() == 2);
    CHECK(c2[0].size == 3);
    CHECK(c2[0].rho == Rat(2, 3));
    CHECK(c2[0].eps == Rat(4));
    CHECK(c2[1].size == 9);
    CHECK(c2[1].rho == Rat(1, 3));
    CHECK(c2[1].eps == Rat(3));

    for (unsigned long p : {3ul, 5ul, 7ul}) {
        auto c3 = centred_picture(poly_q({Rat(-static_cast<long>(p)), Rat(0), Rat(1)}), Rat(0), p);
        REQUIRE(c3.size() == 1);
        CHECK(c3[0].size == 2);
        CHECK(c3[0].rho == Rat(1, 2));
        CHECK(c3[0].eps == Rat(1));
    }
}

TEST_CASE("rational picture golden: wild-twins example") {
    ClusterPicture pic = rational_picture(example_f(), 3);
    REQUIRE(pic.nodes.size() == 2);
    const ClusterNode& root = pic.root();
    CHECK(root.size == 11);
    CHECK(root.rho == Rat(1, 5));
    CHECK(root.eps == Rat(11, 5));
    CHECK(root.k_rational);
    CHECK(root.rat_centre == Rat(0));
    REQUIRE(root.children.size() == 1);
    const ClusterNode& s6 = pic.nodes[root.children[0]];
    CHECK(s6.size == 6);
    CHECK(s6.rho == Rat(1, 3));
    CHECK(s6.eps == Rat(3));
    CHECK(s6.minimal());
    CHECK(s6.unramified_roots_inside == 0);
    // the ramified triples below s6 are flagged wild, certified by clause (b)
    REQUIRE(s6.wild.size() == 1);
    CHECK(s6.wild[0].rho == Rat(1, 3));
    CHECK(s6.wild[0].size == 3);
    CHECK(s6.wild[0].clause_b_ok);
    CHECK(pic.almost_rational == TriState::Yes);
    CHECK(pic.y_regular);

    ClusterInvariants i6 = invariants(pic, s6.id);
    CHECK(i6.b == 3);
    CHECK(i6.D == 1);
    CHECK(i6.m == 6);
    CHECK(i6.p0 == 2);
    ClusterInvariants ir = invariants(pic, root.id);
    CHECK(ir.b == 5);
    CHECK(ir.D == 1);
    CHECK(ir.m == 10);
}

TEST_CASE("rational picture golden: genus-4 example") {
    ClusterPicture pic = rational_picture(genus4_f(), 3);
    REQUIRE(pic.nodes.size() == 3);
    const ClusterNode& root = pic.root();
    CHECK(root.size == 9);
    CHECK(root.rho == Rat(1));
    CHECK(root.eps == Rat(9));
    REQUIRE(root.children.size() == 2);
    const ClusterNode& t3 = pic.nodes[root.children[0]];
    const ClusterNode& t4 = pic.nodes[root.children[1]];
    CHECK(t3.size == 6);
    CHECK(t3.rho == Rat(4, 3));
    CHECK(t3.eps == Rat(11));
    CHECK(t3.rat_centre == Rat(0));
    CHECK(t4.size == 3);
    CHECK(t4.rho == Rat(11, 3));
    CHECK(t4.eps == Rat(17));
    CHECK(t4.rat_centre == Rat(3));
    CHECK(pic.almost_rational == TriState::Yes);

    ClusterInvariants i4 = invariants(pic, t4.id);
    CHECK(i4.b == 3);
    CHECK(i4.D == 1);
    CHECK(i4.m == 6);
    CHECK(i4.genus == 0);
    ClusterInvariants ir = invariants(pic, root.id);
    CHECK(ir.b == 1);
    CHECK(ir.D == 1);
    CHECK(ir.m == 2);
}

TEST_CASE("rational picture trivial: x^3 - p") {
    for (unsigned long p : {5ul, 7ul}) {
        ClusterPicture pic =
            rational_picture(poly_q({Rat(-static_cast<long>(p)), Rat(0), Rat(0), Rat(1)}), p);
        REQUIRE(pic.nodes.size() == 1);
        CHECK(pic.root().size == 3);
        CHECK(pic.root().rho == Rat(1, 3));
        CHECK(pic.root().eps == Rat(1));
        CHECK(pic.almost_rational == TriState::Yes);
    }
}

TEST_CASE("almost rational verdicts") {
    // x(x^4 - 2) at p = 2: one wild class of size 4 = 2^2, certified
    PolyRat f1 = poly_q({Rat(0), Rat(-2), Rat(0), Rat(0), Rat(0), Rat(1)});
    ClusterPicture p1 = rational_picture(f1, 2);
    REQUIRE(p1.nodes.size() == 1);
    CHECK(p1.root().size == 5);
    CHECK(p1.root().rho == Rat(1, 4));
    CHECK(p1.root().eps == Rat(5, 4));
    CHECK(p1.root().unramified_roots_inside == 1);
    CHECK(p1.root().centre_is_root);
    REQUIRE(p1.root().wild.size() == 1);
    CHECK(p1.root().wild[0].size == 4);
    CHECK(p1.root().wild[0].clause_b_ok);
    CHECK(p1.almost_rational == TriState::Yes);
    // b = 4, eps = 5/4, b*eps = 5 odd, so D = 1 and the curve is y-regular
    CHECK(invariants(p1, 0).D == 1);
    CHECK(invariants(p1, 0).p0 == 1);
    CHECK(p1.y_regular);

    // ((x-p)^2 - p)((x+p)^2 - p): twins centred at +-sqrt(p), depth 1 above
    // rational radius 1/2, and |s| = 2 is no p-power for odd p
    for (unsigned long p : {5ul, 7ul}) {
        Rat pr(static_cast<long>(p));
        PolyRat a = pr_shift(poly_q({-pr, Rat(0), Rat(1)}), -pr);
        PolyRat b = pr_shift(poly_q({-pr, Rat(0), Rat(1)}), pr);
        ClusterPicture pic = rational_picture(pr_mul(a, b), p);
        CHECK(pic.almost_rational == TriState::No);
    }

    // x^4 - 4 at p = 2: all four roots share one residue direction; the class
    // has size 4 but v_2(4 * 1/2) = 1, so clause (b) fails
    ClusterPicture p3 = rational_picture(poly_q({Rat(-4), Rat(0), Rat(0), Rat(0), Rat(1)}), 2);
    CHECK(p3.almost_rational == TriState::No);
    CHECK_FALSE(p3.y_regular);  // b = 2, eps = 2, b*eps even, D = 2
}

TEST_CASE("conjugate discs merge into orbits") {
    // (x^2 - 2)((x - 5)^2 - 2) at p = 5: twins at sqrt(2) and -sqrt(2)
    PolyRat f = pr_mul(poly_q({Rat(-2), Rat(0), Rat(1)}),
                       pr_shift(poly_q({Rat(-2), Rat(0), Rat(1)}), Rat(-5)));
    ClusterPicture pic = rational_picture(f, 5);
    REQUIRE(pic.nodes.size() == 2);
    CHECK(pic.root().size == 4);
    CHECK(pic.root().rho == Rat(0));
    CHECK(pic.root().eps == Rat(0));
    CHECK(pic.root().unramified_roots_inside == 0);
    const ClusterNode& twin = pic.nodes[pic.root().children[0]];
    CHECK(twin.size == 2);
    CHECK(twin.rho == Rat(1));
    CHECK(twin.eps == Rat(2));
    CHECK(twin.orbit_size == 2);
    CHECK_FALSE(twin.k_rational);
    CHECK(twin.unramified_roots_inside == 2);
    CHECK(invariants(pic, twin.id).p0 == 1);
    CHECK(pic.almost_rational == TriState::Yes);

    // same curve under a tight residue cap: the quadratic residue extension
    // is forbidden, so the verdict degrades honestly
    ClusterPicture capped = rational_picture(f, 5, 1);
    CHECK(capped.almost_rational == TriState::NeedsExtension);
    CHECK(capped.extension_blocked);
}

TEST_CASE("negative radii: roots with denominator p") {
    // roots 1/5, 6/5, 3: the first two are distance 0 apart, the third sits
    // at distance -1, so the root cluster has a negative radius
    PolyRat f = pr_mul(poly_q({Rat(-1, 5), Rat(1)}),
                       pr_mul(poly_q({Rat(-6, 5), Rat(1)}), poly_q({Rat(-3), Rat(1)})));
    ClusterPicture pic = rational_picture(f, 5);
    REQUIRE(pic.nodes.size() == 2);
    CHECK(pic.root().size == 3);
    CHECK(pic.root().rho == Rat(-1));
    CHECK(pic.root().eps == Rat(-3));
    CHECK(pic.root().unramified_roots_inside == 1);
    const ClusterNode& twin = pic.nodes[pic.root().children[0]];
    CHECK(twin.size == 2);
    CHECK(twin.rho == Rat(0));
    CHECK(twin.eps == Rat(-1));
    CHECK(twin.unramified_roots_inside == 2);
}

TEST_CASE("oracle: rational-root products match brute force") {
    std::mt19937 rng(4242);
    int done = 0;
    for (int trial = 0; trial < 60 && done < 30; ++trial) {
        unsigned long p = std::vector<unsigned long>{3, 5, 7}[rng() % 3];
        long np = static_cast<long>(p);
        long count = 4 + rng() % 3;
        std::vector<Rat> roots;
        while (static_cast<long>(roots.size()) < count) {
            Rat r(0);
            Rat scale(1);
            if (rng() % 5 == 0) scale = Rat(1, np);
            for (int d = 0; d < 4; ++d)
                r += Rat(static_cast<long>(rng() % p)) * pow_rat(Rat(np), d);
            r *= scale;
            if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
        }
        auto brute = brute_picture(roots, p);
        if (brute.empty()) continue;  // all roots pairwise distance-0: no proper cluster? skip
        ++done;

        ClusterPicture pic = rational_picture(from_roots(roots), p);
        REQUIRE(pic.nodes.size() == brute.size());
        for (auto& bn : brute) {
            // find the produced node by (size, rho, eps)
            int hit = -1;
            for (auto& n : pic.nodes) {
                if (n.size != static_cast<long>(bn.roots.size()) || n.rho != bn.rho ||
                    n.eps != bn.eps)
                    continue;
                // its rational centre must cut out exactly this root set
                bool match = true;
                for (size_t j = 0; j < roots.size(); ++j) {
                    Val v = valuation(roots[j] - n.rat_centre, p);
                    bool in = v.is_inf() || Rat(v.finite()) >= n.rho;
                    if (in != (bn.roots.count(j) > 0)) match = false;
                }
                if (match) {
                    hit = n.id;
                    break;
                }
            }
            REQUIRE(hit >= 0);
            // unramified singleton count: size minus children sizes
            long expect_k = static_cast<long>(bn.roots.size());
            for (auto& other : brute)
                if (other.parent >= 0 && &brute[other.parent] == &bn)
                    expect_k -= static_cast<long>(other.roots.size());
            CHECK(pic.nodes[hit].unramified_roots_inside == expect_k);
            CHECK(pic.nodes[hit].k_rational);
        }
        // structural invariants on the produced tree
        for (auto& n : pic.nodes) {
            if (n.parent >= 0) CHECK(pic.nodes[n.parent].rho < n.rho);
            long child_copies = 0;
            for (int c : n.children) child_copies += pic.nodes[c].orbit_size;
            if (child_copies >= 2)
                CHECK(is_integer(n.rho));  // two child discs force an integral radius
        }
        CHECK(pic.almost_rational == TriState::Yes);
    }
    CHECK(done >= 25);
}

TEST_CASE("reduced polynomials goldens") {
    ClusterPicture pic = rational_picture(example_f(), 3);
    int s6 = pic.root().children[0];
    ReducedPolys rp = reduced_polynomials(pic, s6);
    CHECK(rp.fbar.degree() == 2);  // -(z^2 + 1) after desubstitution
    auto F = rp.fbar.F;
    CHECK(rp.fbar.c[0] == F->from_int(Int(-1)));
    CHECK(rp.fbar.c[1] == F->zero());
    CHECK(rp.fbar.c[2] == F->from_int(Int(-1)));
    // g-bar: even cluster, eps - |s|rho = 1 odd so gamma = 2, degree 1
    CHECK(rp.gbar.degree() == 1);
    CHECK(rp.unit == F->from_int(Int(-1)));  // a_6 / 3 = -1
    REQUIRE(rp.gbar0.has_value());
    CHECK(rp.gbar0->degree() == 1);  // p0 = 2, gamma0 = 2 (eps = 3 odd)
    // D = 1: no tilde factors
    CHECK(pf_eq(rp.ftilde, rp.fbar));

    ClusterPicture g4 = rational_picture(genus4_f(), 3);
    int t4 = g4.root().children[1];
    ReducedPolys rp4 = reduced_polynomials(g4, t4);
    CHECK(rp4.fbar.degree() == 1);  // single wild triple: z - c
    CHECK(rp4.notes.empty());
    int t3 = g4.root().children[0];
    ReducedPolys rp3 = reduced_polynomials(g4, t3);
    CHECK(rp3.fbar.degree() == 2);  // two wild triples: (z-1)(z+1) up to unit
}

TEST_CASE("json round trip") {
    ClusterPicture pic = rational_picture(genus4_f(), 3);
    std::string js = picture_to_json(pic);
    ClusterPicture back = picture_from_json(js, 3);
    REQUIRE(back.nodes.size() == pic.nodes.size());
    CHECK_FALSE(back.has_poly);
    for (size_t i = 0; i < pic.nodes.size(); ++i) {
        CHECK(back.nodes[i].size == pic.nodes[i].size);
        CHECK(back.nodes[i].rho == pic.nodes[i].rho);
        CHECK(back.nodes[i].eps == pic.nodes[i].eps);
        CHECK(back.nodes[i].children == pic.nodes[i].children);
        CHECK(back.nodes[i].unramified_roots_inside == pic.nodes[i].unramified_roots_inside);
    }
    // invariants computed from the combinatorial form agree
    for (auto& n : pic.nodes) {
        ClusterInvariants a = invariants(pic, n.id);
        ClusterInvariants b = invariants(back, n.id);
        CHECK(a.b == b.b);
        CHECK(a.D == b.D);
        CHECK(a.m == b.m);
        CHECK(a.genus == b.genus);
    }
}

TEST_CASE("meets and preorder") {
    ClusterPicture pic = rational_picture(genus4_f(), 3);
    auto order = pic.preorder();
    REQUIRE(order.size() == 3);
    CHECK(order[0] == pic.root_id);
    int t3 = pic.root().children[0], t4 = pic.root().children[1];
    CHECK(pic.meet(t3, t4) == pic.root_id);
    CHECK(pic.rho_meet(t3, t4) == Rat(1));
    CHECK(pic.meet(t3, t3) == t3);
}
