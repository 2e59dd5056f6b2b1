#ifndef HCLIB_CLUSTERS_HPP
#define HCLIB_CLUSTERS_HPP

#include <optional>
#include <string>
#include <vector>

#include "hclib/newton.hpp"
#include "hclib/poly.hpp"

namespace hc {

enum class TriState { Yes, No, NeedsExtension };

// A wild residue class: a multiple root of an edge reduction that cannot be
// separated by an unramified translation. Carries the clause-(b) data of the
// disk characterisation of almost-rationality.
struct WildClass {
    Rat rho;           // slope radius of the edge
    long size;         // number of roots of f lying over the class
    bool clause_b_ok;  // size is a p-power p^m, m>=1, and v_p(size*rho) <= 0
    std::string detail;
};

struct ClusterNode {
    int id = -1;
    int parent = -1;
    std::vector<int> children;
    long size = 0;          // |s|, counting all roots in the disc
    Rat rho;                // radius
    Rat eps;                // epsilon
    NfEl centre;            // representative centre in the working ring
    bool k_rational = true; // disc admits a centre in Q_p itself
    Rat rat_centre;         // a rational centre (valid when k_rational)
    long orbit_size = 1;    // Frobenius orbit size of the disc
    std::optional<Rat> depth;          // d_s, when forced or supplied
    long unramified_roots_inside = 0;  // roots of f in K^nr lying in s but in no proper child
    bool centre_is_root = false;       // f(w_s) = 0 (to working precision)
    std::vector<WildClass> wild;       // terminal wild classes attached at this node

    bool minimal() const { return children.empty(); }
    bool odd() const { return size % 2 != 0; }
    bool even() const { return size % 2 == 0; }
};

struct ClusterPicture {
    unsigned long p = 0;
    PolyRat f;            // empty for hand-authored pictures
    bool has_poly = true;
    long deg = 0;
    long genus = 0;       // g with deg f = 2g+1 or 2g+2
    Rat v_cf;             // v(c_f)
    NfCtxPtr R;           // working ring (degree 1 unless extensions were needed)
    std::vector<ClusterNode> nodes;
    int root_id = -1;
    TriState almost_rational = TriState::Yes;
    bool y_regular = true;
    std::vector<std::string> diagnostics;
    std::optional<Rat> disc_val;  // v_p(disc f)
    bool extension_blocked = false;  // the residue cap cut a branch short

    const ClusterNode& root() const { return nodes[root_id]; }
    // node ids ordered: parents before children, then by (size desc, rho asc)
    std::vector<int> preorder() const;
    // radius of the meet s wedge t (lowest common ancestor)
    Rat rho_meet(int a, int b) const;
    int meet(int a, int b) const;
};

// Nested chain of clusters centred at w: (size, rho^w, eps^w) per the
// polygon/cluster correspondence, innermost first.
struct CentredCluster {
    long size;
    Rat rho;
    Rat eps;
};
std::vector<CentredCluster> centred_picture(const PolyRat& f, const Rat& w, unsigned long p);

// Full rational cluster picture over the maximal unramified extension, built
// by breadth-first refinement of centres. Conjugate discs are merged into
// Frobenius orbits (orbit_size). residue_cap bounds the residue extension
// degree; hitting it records a needs-extension verdict instead of failing.
ClusterPicture rational_picture(const PolyRat& f, unsigned long p, unsigned long residue_cap = 12);

struct AlmostRationalReport {
    TriState verdict;
    std::vector<std::string> diagnostics;
};
AlmostRationalReport almost_rational_check(const ClusterPicture& pic);

bool y_regular_check(const ClusterPicture& pic);

struct NonIntegralBsEpsilon : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InexactDivision : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CentreOutsideResidueRing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ClusterInvariants {
    long b;        // denominator of rho
    int D;         // 1 or 2
    long m;        // multiplicity (3-D)b
    int parity;    // p_s: 1 odd, 2 even
    Rat slope;     // s_s
    int gamma;     // gamma_s
    int p0;        // p_s^0
    Rat slope0;    // s_s^0
    int gamma0;    // gamma_s^0
    long genus;    // g(s)
    long tilde_count;     // |tilde_s| (conjugates counted, empty-set case included)
    bool tilde_has_empty; // whether the empty cluster belongs to tilde_s
    bool uberreven;       // all children even (and no loose odd part)
};

ClusterInvariants invariants(const ClusterPicture& pic, int node_id);

// Reductions attached to a proper cluster (needs the polynomial). fbar is
// computed from the edge reduction of f(x + w_s), dividing out the child
// directions exactly and desubstituting x^{b_s} -> x.
struct ReducedPolys {
    PolyFq fbar;               // \bar f_s
    PolyFq gbar;               // \bar g_s = y^{p_s/gamma_s} - u
    std::optional<PolyFq> gbar0;  // \bar g_s^0 (minimal clusters only)
    PolyFq ftilde;             // \tilde f_s
    Fq unit;                   // the reduced unit constant of gbar
    std::vector<std::string> notes;
};
ReducedPolys reduced_polynomials(const ClusterPicture& pic, int node_id);

// Combinatorial JSON form (hand-authorable): tree of
// {size, rho:[num,den], centre:"rat", epsilon:[num,den], depth:[num,den]?, children:[...]}
ClusterPicture picture_from_json(const std::string& json_text, unsigned long p);
std::string picture_to_json(const ClusterPicture& pic);

}  // namespace hc

#endif
