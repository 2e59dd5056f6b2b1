#ifndef HCLIB_NEWTON_HPP
#define HCLIB_NEWTON_HPP

#include <optional>

#include "hclib/poly.hpp"

namespace hc {

struct InfiniteSlopeEdge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One edge of a lower Newton polygon. Slopes are finite here; the x^k factor
// of a polynomial divisible by x is recorded separately as a pseudo-edge of
// slope +infinity on the left.
struct NpEdge {
    long i0, i1;       // x-range, i0 < i1
    Rat v0, v1;        // valuations at the endpoints
    Rat slope;         // (v1 - v0) / (i1 - i0)
    long length;       // i1 - i0; the polynomial has this many roots of valuation -slope
    long denom;        // denominator of the slope
};

struct NewtonPolygon {
    std::vector<std::pair<long, Val>> points;  // (i, v(a_i)) for nonzero a_i
    std::vector<std::pair<long, Rat>> vertices;
    std::vector<NpEdge> edges;
    long x_multiplicity = 0;  // k with x^k || f (the infinite-slope pseudo-edge)
};

// Lower convex hull of {(i, v(a_i))}; works from a valuation list so the
// cluster module can reuse it for polynomials over the working ring.
NewtonPolygon newton_polygon_from_vals(const std::vector<Val>& vals);
NewtonPolygon newton_polygon(const PolyRat& f, unsigned long p);

// Restriction to an edge and its residue reduction: f|_L picks the
// coefficients a_{n i + i0}, and the reduction divides out p^{v} along the
// edge (a pure valuation shift, no root finding).
struct EdgeReduction {
    NpEdge edge;
    PolyRat restriction;  // f|_L over Q
    PolyFq reduction;     // over F_p
    Rat c;                // normalising valuation (v(a_{i0}))
};

EdgeReduction edge_reduction(const PolyRat& f, const NpEdge& e, unsigned long p);

// Reduction only, generic over the working ring (for shifted polynomials in
// the cluster search). Residues land in R->residue_field().
PolyFq edge_reduction_nf(const PolyNf& f, const NpEdge& e);

struct NpRegularity {
    bool regular;
    // on failure: the offending edge and a multiple factor of its reduction
    std::optional<NpEdge> witness_edge;
    std::optional<PolyFq> witness_factor;
};

NpRegularity is_np_regular(const PolyRat& f, unsigned long p);

}  // namespace hc

#endif
