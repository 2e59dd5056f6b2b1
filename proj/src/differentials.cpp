#include "hclib/differentials.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <sstream>

namespace hc {

namespace {

using nlohmann::json;

long floor_long(const Rat& x) { return to_long(floor_rat(x)); }

json rat_pair(const Rat& x) {
    return json::array({x.get_num().get_str(), x.get_den().get_str()});
}

// geometric expansion of the picture: one entry per conjugate copy of each
// node, copy c of a node hanging under copy c mod (parent copies)
struct GeomNode {
    int node;
    long copy;
    int parent;  // index into the geometric list, -1 at the root
    int depth;
};

std::vector<GeomNode> geometric_tree(const ClusterPicture& pic) {
    std::vector<GeomNode> gn;
    std::map<std::pair<int, long>, int> at;
    for (int id : pic.preorder()) {
        const ClusterNode& n = pic.nodes[id];
        for (long c = 0; c < n.orbit_size; ++c) {
            GeomNode g;
            g.node = id;
            g.copy = c;
            if (n.parent < 0) {
                g.parent = -1;
                g.depth = 0;
            } else {
                long pc = c % pic.nodes[n.parent].orbit_size;
                g.parent = at.at({n.parent, pc});
                g.depth = gn[g.parent].depth + 1;
            }
            at[{id, c}] = static_cast<int>(gn.size());
            gn.push_back(g);
        }
    }
    return gn;
}

// radius of the meet of two geometric clusters (lowest common ancestor)
Rat geom_meet_rho(const ClusterPicture& pic, const std::vector<GeomNode>& gn,
                  int a, int b) {
    while (gn[a].depth > gn[b].depth) a = gn[a].parent;
    while (gn[b].depth > gn[a].depth) b = gn[b].parent;
    while (a != b) {
        a = gn[a].parent;
        b = gn[b].parent;
    }
    return pic.nodes[gn[a].node].rho;
}

bool is_ancestor(const std::vector<GeomNode>& gn, int anc, int x) {
    while (x >= 0) {
        if (x == anc) return true;
        x = gn[x].parent;
    }
    return false;
}

std::string centre_label(const ClusterPicture& pic, int node, long copy) {
    const ClusterNode& n = pic.nodes[node];
    if (n.k_rational) return rat_str(n.rat_centre);
    std::ostringstream os;
    os << "w(s" << node;
    if (copy > 0) os << "#" << copy;
    os << ")";
    return os.str();
}

void finish_basis(DifferentialBasis& b, const ClusterPicture& pic, long g) {
    b.v_det_A = 0;
    for (auto& e : b.entries) b.v_det_A += e.exponent;
    if (pic.has_poly && pic.disc_val && g > 0) {
        b.has_delta = true;
        b.delta = *pic.disc_val;
        if (pic.p == 2) b.delta += Rat(4 * g);
        b.delta_min = b.delta - Rat(8 * g + 4, g) * Rat(b.v_det_A);
        b.delta_min.canonicalize();
    }
}

void require_verdicts(const ClusterPicture& pic) {
    if (pic.almost_rational != TriState::Yes)
        throw PreconditionNotMet("picture is not known to be almost rational");
    if (!pic.y_regular) throw PreconditionNotMet("curve is not y-regular");
}

}  // namespace

Rat disc_valuation(const PolyRat& f, unsigned long p, long g) {
    Rat disc = pr_discriminant(f);
    if (disc == 0) throw PreconditionNotMet("discriminant vanishes");
    Val v = valuation(disc, p);
    Rat out = Rat(v.finite());
    if (p == 2) out += Rat(4 * g);
    return out;
}

DifferentialBasis nested_basis(const ClusterPicture& pic, long g) {
    require_verdicts(pic);
    if (g < 1) throw PreconditionNotMet("genus must be at least 1");

    // the proper clusters must form a chain with one shared rational centre
    std::vector<int> chain;  // innermost first
    for (auto& n : pic.nodes) {
        if (n.size < 2) continue;
        if (n.orbit_size != 1)
            throw PreconditionNotMet("proper cluster is not rational over K");
        if (!n.k_rational)
            throw PreconditionNotMet("proper cluster has no rational centre");
        int proper_children = 0;
        for (int c : n.children)
            if (pic.nodes[c].size >= 2) ++proper_children;
        if (proper_children > 1)
            throw PreconditionNotMet("proper clusters do not form a chain");
        chain.push_back(n.id);
    }
    std::sort(chain.begin(), chain.end(), [&](int a, int b) {
        return pic.nodes[a].size < pic.nodes[b].size;
    });
    Rat w = pic.nodes[chain.front()].rat_centre;
    for (int id : chain)
        if (pic.nodes[id].rat_centre != w)
            throw PreconditionNotMet("proper clusters have different centres");

    DifferentialBasis b;
    PolyRat lin({-w, Rat(1)});  // x - w
    PolyRat prod = pr_const(Rat(1));
    for (long j = 0; j < g; ++j) {
        const ClusterNode* s = nullptr;
        for (int id : chain)
            if (2 * (j + 1) <= pic.nodes[id].size) {
                s = &pic.nodes[id];
                break;
            }
        if (!s) throw PreconditionNotMet("cluster sizes below 2(j+1)");
        DiffEntry en;
        en.e = s->eps / 2 - Rat(j + 1) * s->rho;
        en.e.canonicalize();
        en.exponent = floor_long(en.e);
        en.cluster = s->id;
        en.factors.assign(static_cast<size_t>(j), rat_str(w));
        en.factor_poly = prod;
        b.entries.push_back(std::move(en));
        prod = pr_mul(prod, lin);
    }
    finish_basis(b, pic, g);
    return b;
}

namespace {

struct GreedyPick {
    std::vector<int> chosen;  // geometric indices s_0..s_{g-1}
    std::vector<Rat> e;
    std::vector<bool> tie;
};

GreedyPick greedy_select(const ClusterPicture& pic,
                         const std::vector<GeomNode>& gn, long g) {
    GreedyPick out;
    std::vector<int> proper;
    for (size_t i = 0; i < gn.size(); ++i)
        if (pic.nodes[gn[i].node].size >= 2) proper.push_back(static_cast<int>(i));
    if (proper.empty()) throw PreconditionNotMet("no proper clusters");

    for (long i = 0; i < g; ++i) {
        std::vector<Rat> obj(proper.size());
        Rat best;
        bool have = false;
        for (size_t k = 0; k < proper.size(); ++k) {
            const ClusterNode& t = pic.nodes[gn[proper[k]].node];
            Rat v = t.eps / 2 - t.rho;
            for (int sj : out.chosen) v -= geom_meet_rho(pic, gn, sj, proper[k]);
            v.canonicalize();
            obj[k] = v;
            if (!have || v > best) {
                best = v;
                have = true;
            }
        }
        std::vector<int> arg;
        for (size_t k = 0; k < proper.size(); ++k)
            if (obj[k] == best) arg.push_back(proper[k]);
        // nested tie: keep only maximal elements under inclusion
        std::vector<int> maximal;
        for (int a : arg) {
            bool dominated = false;
            for (int c : arg)
                if (c != a && is_ancestor(gn, c, a)) dominated = true;
            if (!dominated) maximal.push_back(a);
        }
        bool tied = maximal.size() > 1;
        std::sort(maximal.begin(), maximal.end(), [&](int a, int b) {
            const ClusterNode& na = pic.nodes[gn[a].node];
            const ClusterNode& nb = pic.nodes[gn[b].node];
            if (na.size != nb.size) return na.size > nb.size;
            if (na.rho != nb.rho) return na.rho < nb.rho;
            if (gn[a].node != gn[b].node) return gn[a].node < gn[b].node;
            return gn[a].copy < gn[b].copy;
        });
        out.chosen.push_back(maximal.front());
        out.e.push_back(best);
        out.tie.push_back(tied);
    }
    return out;
}

}  // namespace

DifferentialBasis greedy_basis(const ClusterPicture& pic, long g) {
    require_verdicts(pic);
    if (g < 1) throw PreconditionNotMet("genus must be at least 1");
    std::vector<GeomNode> gn = geometric_tree(pic);
    GreedyPick pick = greedy_select(pic, gn, g);

    DifferentialBasis b;
    PolyRat prod = pr_const(Rat(1));
    bool exact = true;
    for (long i = 0; i < g; ++i) {
        const GeomNode& s = gn[pick.chosen[i]];
        DiffEntry en;
        en.e = pick.e[i];
        en.exponent = floor_long(en.e);
        en.cluster = s.node;
        en.copy = s.copy;
        en.tie_flag = pick.tie[i];
        if (en.tie_flag)
            b.notes.push_back("entry " + std::to_string(i) +
                              ": incomparable tie resolved deterministically");
        for (long j = 0; j < i; ++j)
            en.factors.push_back(
                centre_label(pic, gn[pick.chosen[j]].node, gn[pick.chosen[j]].copy));
        en.factor_poly = prod;
        en.factor_exact = exact;
        b.entries.push_back(std::move(en));
        // extend the product for the next entry
        const ClusterNode& n = pic.nodes[s.node];
        if (n.k_rational)
            prod = pr_mul(prod, PolyRat({-n.rat_centre, Rat(1)}));
        else
            exact = false;  // irrational centre: see trace_basis
    }
    if (!exact)
        b.notes.push_back(
            "some centres live in a residue extension; factor polynomials "
            "are partial, use trace_basis for rational coefficients");
    finish_basis(b, pic, g);
    return b;
}

DifferentialBasis trace_basis(const ClusterPicture& pic, long g) {
    require_verdicts(pic);
    if (g < 1) throw PreconditionNotMet("genus must be at least 1");
    std::vector<GeomNode> gn = geometric_tree(pic);
    GreedyPick pick = greedy_select(pic, gn, g);

    bool all_rational = true;
    for (int s : pick.chosen)
        if (!pic.nodes[gn[s].node].k_rational) all_rational = false;
    if (all_rational) {
        DifferentialBasis b = greedy_basis(pic, g);
        b.notes.push_back("all centres rational: beta = 1");
        return b;
    }
    if (!pic.has_poly || !pic.R)
        throw PreconditionNotMet("trace expansion needs the working ring");

    const NfCtxPtr& R = pic.R;
    FqCtxPtr F = R->residue_field();
    // smallest residue element with nonzero absolute trace
    Fq beta_bar = F->one();
    for (Int idx = 1;; ++idx) {
        beta_bar = F->elem_from_index(idx);
        if (F->trace(beta_bar) != 0) break;
    }
    NfEl beta = R->lift(beta_bar);

    DifferentialBasis b;
    b.trace_beta = F->to_string(beta_bar);
    long D = static_cast<long>(R->deg());
    Rat prec_half = Rat(R->precision()) / 2;

    // centres of the chosen clusters, conjugated to the right copy
    std::vector<NfEl> ws;
    for (int s : pick.chosen) {
        NfEl w = pic.nodes[gn[s].node].centre;
        for (long c = 0; c < gn[s].copy; ++c) w = R->frobenius(w);
        ws.push_back(w);
    }

    for (long i = 0; i < g; ++i) {
        const GeomNode& s = gn[pick.chosen[i]];
        DiffEntry en;
        en.e = pick.e[i];
        en.exponent = floor_long(en.e);
        en.cluster = s.node;
        en.copy = s.copy;
        en.tie_flag = pick.tie[i];
        for (long j = 0; j < i; ++j)
            en.factors.push_back(centre_label(pic, gn[pick.chosen[j]].node,
                                              gn[pick.chosen[j]].copy));

        // beta * prod_{j<i} (x - w_j) over the working ring
        std::vector<NfEl> c{beta};
        for (long j = 0; j < i; ++j) {
            std::vector<NfEl> nc(c.size() + 1, R->zero());
            for (size_t m = 0; m < c.size(); ++m) {
                nc[m + 1] = R->add(nc[m + 1], c[m]);
                nc[m] = R->sub(nc[m], R->mul(c[m], ws[j]));
            }
            c = std::move(nc);
        }
        // coefficientwise trace: sum of the Frobenius orbit
        std::vector<Rat> rc(c.size());
        for (size_t m = 0; m < c.size(); ++m) {
            NfEl acc = c[m];
            NfEl cur = c[m];
            for (long a = 1; a < D; ++a) {
                cur = R->frobenius(cur);
                acc = R->add(acc, cur);
            }
            if (!R->rational_within(acc, prec_half, &rc[m])) {
                en.factor_exact = false;
                b.notes.push_back("entry " + std::to_string(i) +
                                  ": trace lift fell below working precision");
                break;
            }
        }
        if (en.factor_exact) en.factor_poly = PolyRat(std::move(rc));
        b.entries.push_back(std::move(en));
    }
    b.notes.push_back("trace expansion is exact modulo the working precision");
    finish_basis(b, pic, g);
    return b;
}

std::string basis_json(const DifferentialBasis& b) {
    json j;
    j["entries"] = json::array();
    for (auto& e : b.entries) {
        json je;
        je["exponent"] = e.exponent;
        je["e"] = rat_pair(e.e);
        je["factors"] = e.factors;
        if (e.factor_exact) {
            json coeffs = json::array();
            for (auto& c : e.factor_poly.c) coeffs.push_back(rat_str(c));
            je["factor_poly"] = coeffs;
        }
        je["cluster"] = e.cluster;
        if (e.copy) je["copy"] = e.copy;
        if (e.tie_flag) je["tie"] = true;
        j["entries"].push_back(je);
    }
    j["v_det_A"] = b.v_det_A;
    if (b.has_delta) {
        j["delta"] = rat_pair(b.delta);
        j["delta_min"] = rat_pair(b.delta_min);
        j["delta_normalisation"] = "v_p(2^{4g} disc f)";
    }
    if (!b.trace_beta.empty()) j["beta"] = b.trace_beta;
    if (!b.notes.empty()) j["notes"] = b.notes;
    return j.dump(2);
}

}  // namespace hc
