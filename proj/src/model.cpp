#include "hclib/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace hc {

namespace {

Int ceil_div(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

bool is_odd_int(const Rat& x) {
    return x.get_den() == 1 && mpz_odd_p(x.get_num().get_mpz_t());
}
bool is_even_int(const Rat& x) {
    return x.get_den() == 1 && mpz_even_p(x.get_num().get_mpz_t());
}

}  // namespace

std::vector<long> chain_p1(long alpha, const Rat& a, const Rat& b) {
    if (!(a > b)) throw InvalidRange("chain_p1: need a > b");
    Rat A = Rat(alpha) * a, B = Rat(alpha) * b;
    A.canonicalize();
    B.canonicalize();
    Int n = A.get_num(), d = A.get_den();
    Int N = B.get_num(), D = B.get_den();
    std::vector<long> out;
    while (n * D - N * d != 1) {
        // smallest-denominator fraction x/y with n*y - x*d = 1 and x/y >= B;
        // the value x/y increases with y, so this is the farthest step down
        Int g, u, v;
        mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t(),
                   d.get_mpz_t());
        Int x0 = -v, y0 = u;  // n*y0 - x0*d = 1
        Int delta = n * D - N * d;
        Int t = ceil_div(N * y0 - x0 * D, delta);
        Int t2 = ceil_div(Int(1) - y0, d);
        if (t2 > t) t = t2;
        Int x = x0 + t * n, y = y0 + t * d;
        out.push_back(mpz_get_si(Int(Int(alpha) * y).get_mpz_t()));
        n = x;
        d = y;
        if (out.size() > 100000)
            throw InternalInconsistency("chain_p1: runaway chain");
    }
    return out;
}

std::vector<long> chain_p1_open(long alpha, const Rat& a) {
    Rat aa = Rat(alpha) * a;
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), Rat(aa - 1).get_num().get_mpz_t(),
               Rat(aa - 1).get_den().get_mpz_t());
    return chain_p1(alpha, a, Rat(fl) / alpha);
}

long SpecialFibre::intersections(int i, int j) const {
    long n = 0;
    for (auto& e : edges)
        if ((e.first == i && e.second == j) || (e.first == j && e.second == i))
            ++n;
    return n;
}

std::vector<ContractibleHit> detect_contractible(const ClusterPicture& pic) {
    std::vector<ContractibleHit> hits;
    long g = pic.genus;
    for (int id : pic.preorder()) {
        const ClusterNode& s = pic.nodes[id];
        ClusterInvariants inv = invariants(pic, id);
        if (s.size == 2 && inv.b > 1 && is_odd_int(s.eps) && s.parent != -1 &&
            pic.nodes[s.parent].rho <= s.rho - Rat(1, 2)) {
            hits.push_back({id, 1});
            continue;
        }
        if (id == pic.root_id && s.size == 2 * g + 2) {
            // geometric proper children
            long nkids = 0;
            bool all_odd = true, rho_big1 = true;
            long kid_total = 0;
            int big_child = -1;
            for (int c : s.children) {
                long rel = pic.nodes[c].orbit_size / s.orbit_size;
                nkids += rel;
                kid_total += rel * pic.nodes[c].size;
                if (pic.nodes[c].size % 2 == 0) all_odd = false;
                if (pic.nodes[c].rho < s.rho + 1) rho_big1 = false;
                if (pic.nodes[c].size == 2 * g && rel == 1) big_child = c;
            }
            if (big_child != -1 && inv.b > 1 && is_odd_int(pic.v_cf) &&
                pic.nodes[big_child].rho >= s.rho + Rat(1, 2)) {
                hits.push_back({id, 2});
                continue;
            }
            if (nkids == 2 && all_odd && kid_total == s.size &&
                is_odd_int(pic.v_cf) && rho_big1) {
                hits.push_back({id, 3});
                continue;
            }
        }
    }
    return hits;
}

namespace {

struct Builder {
    const ClusterPicture& pic;
    SpecialFibre fib;
    // (node, copy, half) -> component id
    std::map<std::tuple<int, int, int>, int> principal;
    int next_orbit = 0;

    explicit Builder(const ClusterPicture& p) : pic(p) {}

    int add_comp(Component c) {
        c.id = static_cast<int>(fib.components.size());
        fib.components.push_back(std::move(c));
        return fib.components.back().id;
    }

    void add_chain(int from, const std::vector<long>& mults, int to,
                   const std::string& label_prefix, int orbit, long osize,
                   bool oknown) {
        int prev = from;
        for (size_t i = 0; i < mults.size(); ++i) {
            Component c;
            c.kind = Component::ChainLink;
            c.multiplicity = mults[i];
            c.genus = 0;
            c.label = label_prefix + "." + std::to_string(i);
            c.orbit = orbit;
            c.orbit_size = osize;
            c.orbit_known = oknown;
            int cid = add_comp(c);
            if (prev != -1) fib.edges.push_back({prev, cid});
            prev = cid;
        }
        if (to != -1) {
            if (prev != -1)
                fib.edges.push_back({prev, to});
        }
    }
};

// number of distinct roots of y^e - c (c != 0) over an algebraically closed
// field of characteristic p
long distinct_power_roots(long e, unsigned long p) {
    while (e % static_cast<long>(p) == 0) e /= static_cast<long>(p);
    return e;
}

}  // namespace

SpecialFibre build_fibre(const ClusterPicture& pic, bool minimal) {
    Builder B(pic);
    SpecialFibre& fib = B.fib;
    fib.p = pic.p;
    fib.curve_genus = pic.genus;

    bool ok_reg = pic.almost_rational == TriState::Yes && pic.y_regular;
    if (!ok_reg) {
        fib.flag = SpecialFibre::ProperFlatOnly;
        fib.notes.push_back(
            "preconditions not met (almost rational + y-regular); proper flat "
            "description only, no regularity claims");
        minimal = false;
    } else {
        fib.flag = minimal ? SpecialFibre::MinimalSNC : SpecialFibre::RegularSNC;
    }

    // removability: drop the top cluster if it has a child of size 2g+1
    long g = pic.genus;
    int top = pic.root_id;
    std::set<int> removed;
    for (int c : pic.nodes[pic.root_id].children) {
        if (pic.nodes[c].size == 2 * g + 1 &&
            pic.nodes[c].orbit_size == pic.nodes[pic.root_id].orbit_size) {
            removed.insert(pic.root_id);
            top = c;
            fib.notes.push_back("top cluster removable (child of size 2g+1)");
            break;
        }
    }

    std::vector<int> order = pic.preorder();

    // principal components first
    struct NodeData {
        ClusterInvariants inv;
        bool split = false;
        long copies = 1;
        bool unit_square_known = false;
        bool unit_is_square = false;
        std::optional<ReducedPolys> rp;
    };
    std::map<int, NodeData> data;
    for (int id : order) {
        if (removed.count(id)) continue;
        const ClusterNode& s = pic.nodes[id];
        NodeData nd;
        nd.inv = invariants(pic, id);
        nd.copies = s.orbit_size;
        nd.split = nd.inv.uberreven && is_even_int(s.eps);
        if (pic.has_poly && !pic.extension_blocked) {
            try {
                nd.rp.emplace(reduced_polynomials(pic, id));
                const FqCtx& F = *nd.rp->fbar.F;
                if (F.p() != 2) {
                    Int h = (F.order() - 1) / 2;
                    nd.unit_is_square =
                        F.pow(nd.rp->unit, h) == F.one();
                    nd.unit_square_known = true;
                }
            } catch (const std::exception& e) {
                fib.notes.push_back(std::string("residue data unavailable for s") +
                                    std::to_string(id) + ": " + e.what());
            }
        }
        if (!ok_reg && nd.split)
            fib.notes.push_back("s" + std::to_string(id) +
                                ": reducibility-unknown (proper flat fallback)");
        for (long copy = 0; copy < nd.copies; ++copy) {
            int halves = nd.split ? 2 : 1;
            int orbit = B.next_orbit++;
            long osize = nd.copies;
            bool oknown = true;
            if (nd.split) {
                if (nd.unit_square_known && !nd.unit_is_square)
                    osize = nd.copies * 2;
                else if (!nd.unit_square_known)
                    oknown = false;
            }
            for (int h = 0; h < halves; ++h) {
                Component c;
                c.kind = Component::Principal;
                c.cluster = id;
                c.copy = static_cast<int>(copy);
                c.half = h;
                c.multiplicity = nd.inv.m;
                c.genus = nd.split ? 0 : nd.inv.genus;
                c.label = "s" + std::to_string(id);
                if (nd.copies > 1) c.label += "#" + std::to_string(copy);
                if (nd.split) c.label += (h == 0 ? "+" : "-");
                c.orbit = orbit;
                c.orbit_size = osize;
                c.orbit_known = oknown;
                if (nd.rp && !nd.split) {
                    c.residue_equation = "y^" + std::to_string(nd.inv.D) +
                                         " = " + pf_str(nd.rp->ftilde);
                }
                B.principal[{id, static_cast<int>(copy), h}] = B.add_comp(c);
            }
        }
        data[id] = std::move(nd);
    }

    // chains and side components
    for (int id : order) {
        if (removed.count(id)) continue;
        const ClusterNode& s = pic.nodes[id];
        NodeData& nd = data[id];
        const ClusterInvariants& inv = nd.inv;
        long e_g = inv.parity / inv.gamma;
        long n_g = distinct_power_roots(e_g, pic.p);
        bool leaf = s.children.empty();

        for (long copy = 0; copy < nd.copies; ++copy) {
            std::string base = "s" + std::to_string(id);
            if (nd.copies > 1) base += "#" + std::to_string(copy);
            auto anchor = [&](long r) {
                int h = nd.split ? static_cast<int>(r % 2) : 0;
                return B.principal.at({id, static_cast<int>(copy), h});
            };

            if (id == top) {
                // open chains P1(gamma_s, s_s) from the maximal cluster
                std::vector<long> M = chain_p1_open(inv.gamma, inv.slope);
                for (long r = 0; r < n_g; ++r) {
                    bool ok = n_g == 1 || nd.unit_square_known;
                    B.add_chain(anchor(r), M, -1,
                                base + ":o" + std::to_string(r),
                                B.next_orbit++, nd.copies, ok);
                }
            } else {
                // chains to the parent
                int pid = s.parent;
                NodeData& pd = data.at(pid);
                long pcopies = pd.copies;
                int pcopy = static_cast<int>(copy % pcopies);
                const ClusterNode& par = pic.nodes[pid];
                Rat bend = inv.slope -
                           Rat(inv.parity) * (s.rho - par.rho) / 2;
                std::vector<long> M = chain_p1(inv.gamma, inv.slope, bend);
                for (long r = 0; r < n_g; ++r) {
                    int ph = pd.split ? static_cast<int>(r % 2) : 0;
                    int pa = B.principal.at({pid, pcopy, ph});
                    if (M.empty()) {
                        fib.edges.push_back({anchor(r), pa});
                    } else {
                        bool ok = n_g == 1 || nd.unit_square_known;
                        B.add_chain(anchor(r), M, pa,
                                    base + ":p" + std::to_string(r),
                                    B.next_orbit++, nd.copies, ok);
                    }
                }
            }

            if (leaf) {
                // open chains P1(gamma0, -s0) from minimal clusters
                long e0 = inv.p0 / inv.gamma0;
                long n0 = distinct_power_roots(e0, pic.p);
                std::vector<long> M = chain_p1_open(inv.gamma0, -inv.slope0);
                for (long r = 0; r < n0; ++r) {
                    B.add_chain(anchor(0), M, -1,
                                base + ":z" + std::to_string(r),
                                B.next_orbit++, nd.copies, n0 == 1);
                }
            }

            if (inv.D == 1) {
                // open-ended P1s of multiplicity b_s indexed by roots of fbar
                std::vector<std::pair<long, long>> sides;  // (count, orbitsz)
                bool oknown = false;
                if (nd.rp) {
                    // distinct nonzero roots, grouped by irreducible factor
                    for (auto& [fac, mult] : pf_factor(nd.rp->fbar)) {
                        if (fac.degree() < 1) continue;
                        bool is_x = fac.degree() == 1 &&
                                    fac.F->is_zero(fac.c[0]);
                        if (is_x) continue;
                        sides.push_back({fac.degree(), fac.degree()});
                    }
                    oknown = nd.rp->fbar.F->deg() == 1;
                } else {
                    long tot = s.size;
                    for (int c : s.children)
                        tot -= (pic.nodes[c].orbit_size / s.orbit_size) *
                               pic.nodes[c].size;
                    long degf = (tot - (2 - inv.p0)) / inv.b;
                    if (degf > 0) sides.push_back({degf, 1});
                    if (degf > 0)
                        fib.notes.push_back(
                            base + ": side components counted combinatorially "
                                   "(assumed separable)");
                }
                long j = 0;
                for (auto& [cnt, osz] : sides) {
                    int orbit = B.next_orbit++;
                    for (long i = 0; i < cnt; ++i, ++j) {
                        Component c;
                        c.kind = Component::SideP1;
                        c.cluster = id;
                        c.copy = static_cast<int>(copy);
                        c.multiplicity = inv.b;
                        c.genus = 0;
                        c.label = base + ":f" + std::to_string(j);
                        c.orbit = orbit;
                        c.orbit_size = osz * nd.copies;
                        c.orbit_known = oknown;
                        int cid = B.add_comp(c);
                        fib.edges.push_back({anchor(0), cid});
                    }
                }
            }
        }
    }

    if (minimal) {
        // blow down contractible clusters
        auto self_ints = [&](void) {
            std::vector<long> si(fib.components.size(), 0);
            std::vector<Int> acc(fib.components.size(), Int(0));
            for (auto& e : fib.edges) {
                acc[e.first] += fib.components[e.second].multiplicity;
                acc[e.second] += fib.components[e.first].multiplicity;
            }
            for (size_t i = 0; i < fib.components.size(); ++i) {
                Int m(fib.components[i].multiplicity);
                Int q, r;
                mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), acc[i].get_mpz_t(),
                            m.get_mpz_t());
                if (r != 0)
                    throw InternalInconsistency(
                        "non-integral self-intersection during contraction");
                si[i] = -mpz_get_si(q.get_mpz_t());
            }
            return si;
        };
        for (const ContractibleHit& hit : detect_contractible(pic)) {
            if (removed.count(hit.node)) continue;
            NodeData& nd = data.at(hit.node);
            for (long copy = 0; copy < nd.copies; ++copy) {
                int cid = B.principal.at({hit.node, static_cast<int>(copy), 0});
                std::vector<long> si = self_ints();
                if (si[cid] != -1)
                    throw InternalInconsistency(
                        "contractible component has self-intersection != -1");
                // neighbours, one entry per intersection point
                std::vector<int> nb;
                std::vector<std::pair<int, int>> kept;
                for (auto& e : fib.edges) {
                    if (e.first == cid)
                        nb.push_back(e.second);
                    else if (e.second == cid)
                        nb.push_back(e.first);
                    else
                        kept.push_back(e);
                }
                for (size_t i = 0; i < nb.size(); ++i)
                    for (size_t j = i + 1; j < nb.size(); ++j)
                        kept.push_back({nb[i], nb[j]});
                fib.edges = std::move(kept);
                fib.contracted.push_back(fib.components[cid].label +
                                         " (case " +
                                         std::to_string(hit.case_tag) + ")");
                fib.components[cid].multiplicity = 0;  // mark deleted
            }
        }
        // compact: drop deleted components, remap edges
        std::vector<int> remap(fib.components.size(), -1);
        std::vector<Component> comps;
        for (auto& c : fib.components) {
            if (c.multiplicity == 0) continue;
            remap[c.id] = static_cast<int>(comps.size());
            Component cc = c;
            cc.id = remap[c.id];
            comps.push_back(std::move(cc));
        }
        std::vector<std::pair<int, int>> edges;
        for (auto& e : fib.edges)
            edges.push_back({remap[e.first], remap[e.second]});
        fib.components = std::move(comps);
        fib.edges = std::move(edges);
    }

    return fib;
}

GenusCheck verify_genus(const SpecialFibre& fib, long g) {
    GenusCheck out;
    size_t n = fib.components.size();
    if (n == 0) {
        out.error = "empty fibre";
        return out;
    }
    std::vector<Int> acc(n, Int(0));
    std::vector<std::vector<int>> adj(n);
    for (auto& e : fib.edges) {
        acc[e.first] += fib.components[e.second].multiplicity;
        acc[e.second] += fib.components[e.first].multiplicity;
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    out.self_int.assign(n, 0);
    for (size_t i = 0; i < n; ++i) {
        Int m(fib.components[i].multiplicity);
        Int q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), acc[i].get_mpz_t(),
                    m.get_mpz_t());
        if (r != 0) {
            out.integral = false;
            out.error = "self-intersection of " + fib.components[i].label +
                        " is not integral";
            return out;
        }
        out.self_int[i] = -mpz_get_si(q.get_mpz_t());
    }
    // connectivity
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    out.connected =
        std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    // p_a = 1 + 1/2 sum m_i (2 g_i - 2 - G_i^2)
    Int total(0);
    for (size_t i = 0; i < n; ++i) {
        total += Int(fib.components[i].multiplicity) *
                 Int(2 * fib.components[i].genus - 2 - out.self_int[i]);
    }
    if (mpz_odd_p(total.get_mpz_t())) {
        out.error = "adjunction sum is odd";
        return out;
    }
    out.p_a = 1 + mpz_get_si(Int(total / 2).get_mpz_t());
    // minimality re-scan: (-1)-curves of genus 0 meeting the rest in <= 2
    // points could still be blown down keeping normal crossings
    if (fib.flag == SpecialFibre::MinimalSNC) {
        for (size_t i = 0; i < n; ++i) {
            if (fib.components[i].genus == 0 && out.self_int[i] == -1 &&
                adj[i].size() <= 2)
                out.minimality_violations.push_back(fib.components[i].label);
        }
    }
    out.ok = out.integral && out.connected && out.p_a == g;
    if (!out.ok && out.error.empty())
        out.error = out.connected ? "arithmetic genus mismatch"
                                  : "special fibre is disconnected";
    return out;
}

std::string dual_graph_dot(const SpecialFibre& fib) {
    std::ostringstream os;
    os << "graph fibre {\n";
    os << "  // flag: "
       << (fib.flag == SpecialFibre::MinimalSNC
               ? "minimal-SNC"
               : fib.flag == SpecialFibre::RegularSNC ? "regular-SNC"
                                                      : "proper-flat-only")
       << "\n";
    for (auto& c : fib.components) {
        os << "  c" << c.id << " [label=\"" << c.label << "\\nm=" << c.multiplicity
           << " g=" << c.genus << "\"];\n";
    }
    std::vector<std::pair<int, int>> es = fib.edges;
    for (auto& e : es)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(es.begin(), es.end());
    for (auto& e : es) os << "  c" << e.first << " -- c" << e.second << ";\n";
    os << "}\n";
    return os.str();
}

std::string dual_graph_json(const SpecialFibre& fib) {
    std::ostringstream os;
    os << "{\n  \"flag\": \""
       << (fib.flag == SpecialFibre::MinimalSNC
               ? "minimal-SNC"
               : fib.flag == SpecialFibre::RegularSNC ? "regular-SNC"
                                                      : "proper-flat-only")
       << "\",\n  \"components\": [\n";
    for (size_t i = 0; i < fib.components.size(); ++i) {
        const Component& c = fib.components[i];
        os << "    {\"id\": " << c.id << ", \"label\": \"" << c.label
           << "\", \"kind\": \""
           << (c.kind == Component::Principal
                   ? "principal"
                   : c.kind == Component::SideP1 ? "side" : "chain")
           << "\", \"multiplicity\": " << c.multiplicity
           << ", \"genus\": " << c.genus << ", \"orbit\": " << c.orbit
           << ", \"orbit_size\": " << c.orbit_size << ", \"orbit_known\": "
           << (c.orbit_known ? "true" : "false") << "}";
        os << (i + 1 < fib.components.size() ? ",\n" : "\n");
    }
    os << "  ],\n  \"edges\": [";
    std::vector<std::pair<int, int>> es = fib.edges;
    for (auto& e : es)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(es.begin(), es.end());
    for (size_t i = 0; i < es.size(); ++i) {
        os << "[" << es[i].first << ", " << es[i].second << "]"
           << (i + 1 < es.size() ? ", " : "");
    }
    os << "],\n  \"contracted\": [";
    for (size_t i = 0; i < fib.contracted.size(); ++i)
        os << "\"" << fib.contracted[i] << "\""
           << (i + 1 < fib.contracted.size() ? ", " : "");
    os << "]\n}\n";
    return os.str();
}

}  // namespace hc
