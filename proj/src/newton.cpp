#include "hclib/newton.hpp"

namespace hc {

NewtonPolygon newton_polygon_from_vals(const std::vector<Val>& vals) {
    if (vals.empty()) throw ZeroPolynomial("Newton polygon of 0");
    NewtonPolygon np;
    for (size_t i = 0; i < vals.size(); ++i)
        if (!vals[i].is_inf()) np.points.emplace_back(static_cast<long>(i), vals[i]);
    if (np.points.empty()) throw ZeroPolynomial("Newton polygon of 0");
    np.x_multiplicity = np.points.front().first;

    // lower convex hull, strict (collinear interior points dropped)
    std::vector<std::pair<long, Rat>> hull;
    for (auto& [i, v] : np.points) {
        std::pair<long, Rat> c{i, Rat(v.finite())};
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            Rat cross = Rat(b.first - a.first) * (c.second - a.second) -
                        (b.second - a.second) * Rat(c.first - a.first);
            if (cross <= 0) hull.pop_back();
            else break;
        }
        hull.push_back(std::move(c));
    }
    np.vertices = hull;
    for (size_t j = 0; j + 1 < hull.size(); ++j) {
        NpEdge e;
        e.i0 = hull[j].first;
        e.i1 = hull[j + 1].first;
        e.v0 = hull[j].second;
        e.v1 = hull[j + 1].second;
        e.length = e.i1 - e.i0;
        e.slope = (e.v1 - e.v0) / Rat(e.length);
        e.denom = to_long(Int(e.slope.get_den()));
        np.edges.push_back(e);
    }
    return np;
}

NewtonPolygon newton_polygon(const PolyRat& f, unsigned long p) {
    if (f.is_zero()) throw ZeroPolynomial("Newton polygon of 0");
    std::vector<Val> vals;
    for (auto& c : f.c) vals.push_back(valuation(c, p));
    return newton_polygon_from_vals(vals);
}

EdgeReduction edge_reduction(const PolyRat& f, const NpEdge& e, unsigned long p) {
    EdgeReduction er;
    er.edge = e;
    long n = e.denom;
    long r = to_long(Int(e.slope.get_num()));  // slope = r/n in lowest terms
    long steps = e.length / n;
    std::vector<Rat> rest;
    for (long i = 0; i <= steps; ++i) rest.push_back(f.coeff(n * i + e.i0));
    er.restriction = PolyRat(rest);
    er.c = e.v0;
    long c = to_long(Int(e.v0.get_num()));  // edge endpoint valuations are integers here
    auto F = std::make_shared<FqCtx>(p);
    std::vector<Fq> red;
    for (long i = 0; i <= steps; ++i) {
        Rat a = f.coeff(n * i + e.i0);
        if (a == 0) {
            red.push_back(F->zero());
            continue;
        }
        Rat shifted = a * pow_rat(Rat(static_cast<long>(p)), -(c + r * i));
        red.push_back(F->from_rat(shifted));
    }
    er.reduction = PolyFq(F, std::move(red));
    return er;
}

PolyFq edge_reduction_nf(const PolyNf& f, const NpEdge& e) {
    const NfCtxPtr& R = f.R;
    long n = e.denom;
    long r = to_long(Int(e.slope.get_num()));
    long c = to_long(Int(e.v0.get_num()));
    long steps = e.length / n;
    FqCtxPtr F = R->residue_field();
    std::vector<Fq> red;
    for (long i = 0; i <= steps; ++i) {
        long idx = n * i + e.i0;
        if (idx >= static_cast<long>(f.c.size())) {
            red.push_back(F->zero());
            continue;
        }
        red.push_back(R->to_residue(f.c[idx], c + r * i));
    }
    return PolyFq(F, std::move(red));
}

NpRegularity is_np_regular(const PolyRat& f, unsigned long p) {
    if (!pr_separable(f)) throw InseparablePolynomial("Np-regularity needs separable f");
    NewtonPolygon np = newton_polygon(f, p);
    for (auto& e : np.edges) {
        EdgeReduction er = edge_reduction(f, e, p);
        for (auto& [factor, mult] : pf_squarefree(er.reduction)) {
            if (mult < 2) continue;
            // multiple factors at x = 0 are excluded, but reductions have a
            // nonzero constant term by construction, so x never divides them
            return NpRegularity{false, e, factor};
        }
    }
    return NpRegularity{true, std::nullopt, std::nullopt};
}

}  // namespace hc
