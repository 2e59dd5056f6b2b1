#include "hclib/clusters.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace hc {

namespace {

using nlohmann::json;

long ceil_rat(const Rat& x) { return to_long(-floor_rat(-x)); }

bool val_ge(const Val& v, const Rat& bound) {
    return v.is_inf() || Rat(v.finite()) >= bound;
}

bool in_2Z(const Rat& x) {
    return is_integer(x) && mpz_even_p(x.get_num().get_mpz_t());
}

// canonical representative of x mod p^k (k may be <= 0)
Rat canon_mod(const Rat& x, unsigned long p, long k) {
    Rat pk = pow_rat(Rat(static_cast<long>(p)), k);
    return x - pk * Rat(floor_rat(x / pk));
}

bool is_p_power_ge2(long s, unsigned long p) {
    if (s < 2) return false;
    while (s % static_cast<long>(p) == 0) s /= static_cast<long>(p);
    return s == 1;
}

// coefficient valuations with everything at or above the working precision
// treated as zero (the Z[t]/(m, p^N) semantics)
std::vector<Val> capped_vals(const PolyNf& fw, long N) {
    std::vector<Val> vals;
    for (auto& c : fw.c) {
        Val v = fw.R->val(c);
        if (!v.is_inf() && v.finite() >= N) v = Val::infinity();
        vals.push_back(v);
    }
    while (!vals.empty() && vals.back().is_inf()) vals.pop_back();
    return vals;
}

// ---------------------------------------------------------------------------
// breadth-first refinement of centres

struct IntEdgeData {
    long rho;
    long simple_deg = 0;          // degrees of multiplicity-1 factors: unramified roots
    std::vector<int> children;    // centre indices behind multiple linear factors
    bool blocked = false;         // a multiple factor needed a residue extension past the cap
};

struct CentreData {
    NfEl w;
    long birth;                   // level the centre was enqueued at
    bool explored = false;
    long x_mult = 0;
    std::vector<IntEdgeData> edges;
};

struct RawCluster {
    int cidx;
    Rat rho;
    long size;
    Rat eps;
};

struct WildRaw {
    int cidx;
    Rat rho;
    long sub_size;   // size of one wild subcluster over the class
    bool ok;
    std::string detail;
};

struct BfsOut {
    std::vector<CentreData> centres;
    std::vector<RawCluster> raw;
    std::vector<WildRaw> wild;
    bool blocked = false;
    unsigned long need_deg = 1;   // residue degree a restart should use
    std::vector<std::string> diags;
};

BfsOut run_bfs(const PolyRat& f, const NfCtxPtr& R, unsigned long cap) {
    const unsigned long p = R->p();
    const long N = R->precision();
    BfsOut out;
    out.need_deg = R->deg();
    PolyNf F0 = pn_from_rat(R, f);

    auto find_or_enqueue = [&](const NfEl& w, long level,
                               std::vector<std::pair<int, long>>& queue) -> int {
        for (size_t i = 0; i < out.centres.size(); ++i) {
            Val d = R->val(R->sub(w, out.centres[i].w));
            if (val_ge(d, Rat(level + 1))) return static_cast<int>(i);
        }
        out.centres.push_back(CentreData{w, level, false, 0, {}});
        int idx = static_cast<int>(out.centres.size()) - 1;
        queue.emplace_back(idx, level);
        return idx;
    };

    std::vector<std::pair<int, long>> queue;
    find_or_enqueue(R->zero(), -(1L << 20), queue);
    size_t qpos = 0;
    while (qpos < queue.size()) {
        if (out.centres.size() > 10000)
            throw std::runtime_error("cluster search did not terminate");
        int ci = queue[qpos++].first;
        NfEl w = out.centres[ci].w;
        out.centres[ci].explored = true;

        PolyNf fw = pn_shift(F0, w);
        std::vector<Val> vals = capped_vals(fw, N);
        NewtonPolygon np = newton_polygon_from_vals(vals);
        out.centres[ci].x_mult = np.x_multiplicity;
        if (np.x_multiplicity > 1)
            out.diags.push_back("centre with root multiplicity > 1 at working precision");

        for (auto& e : np.edges) {
            Rat rho = -e.slope;
            long size = e.i1;
            Rat eps = e.v1 + Rat(size) * rho;
            if (size >= 2) out.raw.push_back(RawCluster{ci, rho, size, eps});

            PolyFq red = edge_reduction_nf(fw, e);
            auto facs = pf_factor(red);
            if (e.denom == 1) {
                long rl = to_long(Int(rho.get_num()));
                IntEdgeData ed;
                ed.rho = rl;
                for (auto& [h, mu] : facs) {
                    if (mu == 1) {
                        ed.simple_deg += h.degree();
                        continue;
                    }
                    if (h.degree() == 1) {
                        if (rl >= N) {
                            out.diags.push_back("refinement hit the precision bound");
                            continue;
                        }
                        Fq root = red.F->neg(h.c[0]);
                        NfEl wn = R->add(w, R->scale(R->lift(root),
                                                     pow_rat(Rat(static_cast<long>(p)), rl)));
                        ed.children.push_back(find_or_enqueue(wn, rl, queue));
                    } else {
                        unsigned long nd = R->deg() * static_cast<unsigned long>(h.degree());
                        if (nd <= cap) {
                            out.need_deg = std::lcm(out.need_deg, nd);
                        } else {
                            ed.blocked = true;
                            out.blocked = true;
                            out.diags.push_back(
                                "residue extension of degree " + std::to_string(nd) +
                                " needed past cap " + std::to_string(cap));
                        }
                    }
                }
                out.centres[ci].edges.push_back(std::move(ed));
            } else {
                long pe = 1, n = e.denom;
                while (n % static_cast<long>(p) == 0) {
                    n /= static_cast<long>(p);
                    pe *= static_cast<long>(p);
                }
                for (auto& [h, mu] : facs) {
                    long S = pe * static_cast<long>(mu);
                    if (S < 2) continue;
                    bool okb = is_p_power_ge2(S, p) &&
                               valuation(Rat(S) * rho, p).finite() <= 0;
                    std::ostringstream d;
                    d << "wild class: rho=" << rat_str(rho) << " subcluster size " << S
                      << " (edge denom " << e.denom << ", factor degree " << h.degree()
                      << ", multiplicity " << mu << ")";
                    out.wild.push_back(WildRaw{ci, rho, S, okb, d.str()});
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// counting unramified roots in discs from the stored refinement data

struct UCounter {
    const std::vector<CentreData>* centres;
    std::map<std::pair<int, long>, long> memo;
    bool incomplete = false;

    long count(int ci, long level) {
        auto key = std::make_pair(ci, level);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const CentreData& c = (*centres)[ci];
        long total = c.x_mult;
        for (auto& e : c.edges) {
            if (e.rho < level) continue;
            total += e.simple_deg;
            if (e.blocked) incomplete = true;
            for (int ch : e.children) total += count(ch, e.rho + 1);
        }
        memo[key] = total;
        return total;
    }
};

// ---------------------------------------------------------------------------
// refining a centre of a minimal cluster onto a root (for p_s^0 = 1)

struct ChaseResult {
    NfEl w;
    unsigned long need_deg = 0;  // nonzero: restart with this residue degree
    bool blocked = false;
    bool found = false;
};

ChaseResult chase_root(const PolyNf& F0, const NfEl& start, long level, unsigned long cap) {
    const NfCtxPtr& R = F0.R;
    const long N = R->precision();
    ChaseResult res;
    res.w = start;
    long lv = level;
    for (int guard = 0; guard < 2 * N + 8; ++guard) {
        PolyNf fw = pn_shift(F0, res.w);
        std::vector<Val> vals = capped_vals(fw, N);
        NewtonPolygon np = newton_polygon_from_vals(vals);
        if (np.x_multiplicity >= 1) {
            res.found = true;
            return res;
        }
        bool stepped = false;
        for (auto& e : np.edges) {
            if (e.denom != 1) continue;
            Rat rho = -e.slope;
            long rl = to_long(Int(rho.get_num()));
            if (rl < lv) continue;
            PolyFq red = edge_reduction_nf(fw, e);
            auto facs = pf_factor(red);
            for (auto& [h, mu] : facs) {
                if (mu != 1) continue;
                if (h.degree() == 1) {
                    Fq root = red.F->neg(h.c[0]);
                    res.w = R->add(res.w, R->scale(R->lift(root),
                                                   pow_rat(Rat(static_cast<long>(R->p())), rl)));
                    lv = rl + 1;
                    stepped = true;
                    break;
                }
                unsigned long nd = R->deg() * static_cast<unsigned long>(h.degree());
                if (nd <= cap) {
                    res.need_deg = nd;
                    return res;
                }
                res.blocked = true;
            }
            if (stepped) break;
        }
        if (!stepped) return res;  // no unramified root reachable from here
    }
    return res;
}

// working node while the tree is assembled
struct WNode {
    NfEl centre;
    int cidx;
    Rat rho;
    long size;
    Rat eps;
    int parent = -1;
    std::vector<int> children;
    long orbit = 1;
    bool merged = false;
    long unram = 0;
    bool centre_is_root = false;
    std::vector<WildClass> wild;
};

bool same_disc(const NfCtx& R, const NfEl& w1, const Rat& r1, const NfEl& w2, const Rat& r2) {
    Rat m = std::min(r1, r2);
    return val_ge(R.val(R.sub(w1, w2)), m);
}

Rat parse_rat(const std::string& s) {
    Rat r(s);
    r.canonicalize();
    return r;
}

json rat_pair(const Rat& x) {
    return json::array({to_long(Int(x.get_num())), to_long(Int(x.get_den()))});
}

Rat rat_from_json(const json& j) {
    if (j.is_array()) return Rat(j.at(0).get<long>(), j.at(1).get<long>());
    if (j.is_string()) return parse_rat(j.get<std::string>());
    return Rat(j.get<long>());
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<CentredCluster> centred_picture(const PolyRat& f, const Rat& w, unsigned long p) {
    PolyRat fw = pr_shift(f, w);
    NewtonPolygon np = newton_polygon(fw, p);
    std::vector<CentredCluster> out;
    for (auto& e : np.edges) {
        Rat rho = -e.slope;
        long size = e.i1;
        if (size < 2) continue;  // only proper clusters
        out.push_back(CentredCluster{size, rho, e.v1 + Rat(size) * rho});
    }
    return out;
}

ClusterPicture rational_picture(const PolyRat& f, unsigned long p, unsigned long residue_cap) {
    if (f.degree() < 2) throw std::invalid_argument("rational_picture needs deg f >= 2");
    if (!pr_separable(f)) throw InseparablePolynomial("cluster picture needs separable f");

    Rat disc = pr_discriminant(f);
    long vdisc = valuation(disc, p).finite();
    long vcf = valuation(f.lc(), p).finite();
    // Working precision: polygon vertex heights are bounded by
    // |v(c_f)| + d * rho_max, where the largest root distance rho_max obeys
    // v(disc) = (2d-2) v(c_f) + 2 sum of pairwise distances and every distance
    // is at least the smallest root valuation (read off the initial polygon).
    long d = f.degree();
    NewtonPolygon np0 = newton_polygon(f, p);
    Rat mneg(0), mpos(1);
    for (auto& e : np0.edges) {
        Rat rho = -e.slope;
        if (rho < mneg) mneg = rho;
        if (rho > mpos) mpos = rho;
    }
    Rat vd2 = Rat(vdisc) - Rat(2 * d - 2) * Rat(vcf);
    Rat rho_max = vd2 / 2 - Rat(d * (d - 1) / 2 - 1) * mneg;
    if (rho_max < mpos) rho_max = mpos;
    Rat height = Rat(std::abs(vcf)) + Rat(d) * (rho_max > -mneg ? rho_max : -mneg);
    long N = to_long(-floor_rat(-height)) + 4;

    ClusterPicture pic;
    pic.p = p;
    pic.f = f;
    pic.has_poly = true;
    pic.deg = f.degree();
    pic.genus = (pic.deg - 1) / 2;
    pic.v_cf = Rat(vcf);
    pic.disc_val = Rat(vdisc);

    NfCtxPtr R;
    BfsOut bfs;
    std::vector<WNode> wn;
    unsigned long want = 1;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 8) throw std::runtime_error("residue extension did not stabilise");
        if (want == 1) {
            R = std::make_shared<NfCtx>(p, N);
        } else {
            FqCtx probe(p, want);
            std::vector<Int> m;
            for (unsigned long c : probe.modulus()) m.emplace_back(static_cast<long>(c));
            R = std::make_shared<NfCtx>(p, m, N);
        }
        bfs = run_bfs(f, R, residue_cap);
        if (bfs.need_deg > want) {
            want = bfs.need_deg;
            continue;
        }

        // merge raw detections of the same cluster, keeping the true radius
        wn.clear();
        for (auto& rc : bfs.raw) {
            bool dup = false;
            for (auto& n : wn) {
                if (n.size != rc.size) continue;
                if (!same_disc(*R, n.centre, n.rho, bfs.centres[rc.cidx].w, rc.rho)) continue;
                dup = true;
                if (rc.rho > n.rho) {
                    n.centre = bfs.centres[rc.cidx].w;
                    n.cidx = rc.cidx;
                    n.rho = rc.rho;
                    n.eps = rc.eps;
                }
                break;
            }
            if (!dup) {
                WNode n;
                n.centre = bfs.centres[rc.cidx].w;
                n.cidx = rc.cidx;
                n.rho = rc.rho;
                n.size = rc.size;
                n.eps = rc.eps;
                wn.push_back(std::move(n));
            }
        }

        // inclusion tree: parent is the tightest strictly larger cluster
        for (size_t i = 0; i < wn.size(); ++i) {
            int best = -1;
            for (size_t j = 0; j < wn.size(); ++j) {
                if (i == j || wn[j].size <= wn[i].size) continue;
                if (wn[j].rho > wn[i].rho) continue;
                if (!val_ge(R->val(R->sub(wn[i].centre, wn[j].centre)), wn[j].rho)) continue;
                if (best < 0 || wn[j].rho > wn[best].rho) best = static_cast<int>(j);
            }
            wn[i].parent = best;
            if (best >= 0) wn[best].children.push_back(static_cast<int>(i));
        }

        // unramified-root counts
        UCounter uc{&bfs.centres, {}, false};
        std::vector<long> utotal(wn.size());
        for (size_t i = 0; i < wn.size(); ++i)
            utotal[i] = uc.count(wn[i].cidx, ceil_rat(wn[i].rho));
        for (size_t i = 0; i < wn.size(); ++i) {
            long k = utotal[i];
            for (int ch : wn[i].children) k -= utotal[ch];
            wn[i].unram = std::max(0L, k);
        }
        if (uc.incomplete)
            bfs.diags.push_back("unramified-root counts incomplete (extension cap)");

        // minimal clusters containing an unramified root get a root as centre
        PolyNf F0 = pn_from_rat(R, f);
        unsigned long restart = 0;
        for (auto& n : wn) {
            if (!n.children.empty() || n.unram == 0) continue;
            ChaseResult cr = chase_root(F0, n.centre, ceil_rat(n.rho), residue_cap);
            if (cr.need_deg > 0) {
                restart = std::lcm(want, cr.need_deg);
                break;
            }
            if (cr.found) {
                n.centre = cr.w;
                n.centre_is_root = true;
            } else if (cr.blocked) {
                bfs.blocked = true;
                bfs.diags.push_back("root centre needs residue extension past the cap");
            } else {
                bfs.diags.push_back("expected unramified root not reachable by refinement");
            }
        }
        if (restart > want) {
            want = restart;
            continue;
        }
        break;
    }

    pic.R = R;
    pic.extension_blocked = bfs.blocked;
    for (auto& d : bfs.diags) pic.diagnostics.push_back(d);

    if (wn.empty()) throw std::runtime_error("no proper clusters found");

    // epsilon consistency: tree walk against the polygon vertex values
    for (size_t i = 0; i < wn.size(); ++i) {
        Rat eps = pic.v_cf + Rat(wn[i].size) * wn[i].rho;
        long inner = wn[i].size;
        for (int t = wn[i].parent; t >= 0; t = wn[t].parent) {
            eps += Rat(wn[t].size - inner) * wn[t].rho;
            inner = wn[t].size;
        }
        if (eps != wn[i].eps)
            pic.diagnostics.push_back("epsilon tree-walk mismatch at cluster of size " +
                                      std::to_string(wn[i].size));
    }

    // Frobenius orbits of discs
    if (R->deg() > 1) {
        for (size_t i = 0; i < wn.size(); ++i) {
            if (wn[i].merged) continue;
            std::vector<size_t> orbit{i};
            NfEl cur = wn[i].centre;
            for (unsigned long k = 1; k <= R->deg(); ++k) {
                cur = R->frobenius(cur);
                if (val_ge(R->val(R->sub(cur, wn[i].centre)), wn[i].rho)) break;
                bool found = false;
                for (size_t j = 0; j < wn.size(); ++j) {
                    if (j == i || wn[j].merged || wn[j].size != wn[i].size ||
                        wn[j].rho != wn[i].rho)
                        continue;
                    if (val_ge(R->val(R->sub(cur, wn[j].centre)), wn[i].rho)) {
                        if (std::find(orbit.begin(), orbit.end(), j) == orbit.end())
                            orbit.push_back(j);
                        found = true;
                        break;
                    }
                }
                if (!found)
                    pic.diagnostics.push_back("conjugate disc missing from the search");
            }
            wn[i].orbit = static_cast<long>(orbit.size());
            for (size_t k = 1; k < orbit.size(); ++k) wn[orbit[k]].merged = true;
            for (size_t k = 1; k < orbit.size(); ++k) wn[orbit[k]].orbit = wn[i].orbit;
        }
        // rebuild the tree over orbit representatives; containment is tested
        // up to conjugacy since a representative's parent copy may be another
        // conjugate of its original parent
        for (auto& n : wn) {
            if (n.merged) continue;
            n.parent = -1;
            n.children.clear();
        }
        for (size_t i = 0; i < wn.size(); ++i) {
            if (wn[i].merged) continue;
            int best = -1;
            for (size_t j = 0; j < wn.size(); ++j) {
                if (i == j || wn[j].merged || wn[j].size <= wn[i].size) continue;
                if (wn[j].rho > wn[i].rho) continue;
                bool inside = false;
                NfEl cur = wn[i].centre;
                for (unsigned long k = 0; k < R->deg() && !inside; ++k) {
                    if (k > 0) cur = R->frobenius(cur);
                    inside = val_ge(R->val(R->sub(cur, wn[j].centre)), wn[j].rho);
                }
                if (!inside) continue;
                if (best < 0 || wn[j].rho > wn[best].rho) best = static_cast<int>(j);
            }
            wn[i].parent = best;
            if (best >= 0) wn[best].children.push_back(static_cast<int>(i));
        }
    }

    // attach wild classes to the tightest enclosing cluster, up to conjugacy
    for (auto& wr : bfs.wild) {
        int best = -1;
        for (size_t i = 0; i < wn.size(); ++i) {
            if (wn[i].merged || wn[i].rho > wr.rho) continue;
            bool inside = false;
            NfEl cur = bfs.centres[wr.cidx].w;
            for (unsigned long k = 0; k < R->deg() && !inside; ++k) {
                if (k > 0) cur = R->frobenius(cur);
                inside = val_ge(R->val(R->sub(cur, wn[i].centre)), wn[i].rho);
            }
            if (!inside) continue;
            if (best < 0 || wn[i].rho > wn[best].rho) best = static_cast<int>(i);
        }
        if (best < 0) {
            pic.diagnostics.push_back("wild class without an enclosing cluster");
            continue;
        }
        bool dup = false;
        for (auto& e : wn[best].wild)
            if (e.rho == wr.rho && e.size == wr.sub_size) dup = true;
        if (!dup) wn[best].wild.push_back(WildClass{wr.rho, wr.sub_size, wr.ok, wr.detail});
    }

    // deterministic ids: preorder, children by (size desc, rho asc, centre)
    int root = -1;
    for (size_t i = 0; i < wn.size(); ++i)
        if (!wn[i].merged && wn[i].parent < 0) root = static_cast<int>(i);
    if (root < 0) throw std::runtime_error("cluster tree has no root");

    std::vector<int> order;
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        order.push_back(id);
        std::vector<int> ch = wn[id].children;
        std::sort(ch.begin(), ch.end(), [&](int a, int b) {
            if (wn[a].size != wn[b].size) return wn[a].size > wn[b].size;
            if (wn[a].rho != wn[b].rho) return wn[a].rho < wn[b].rho;
            return R->to_string(wn[a].centre) < R->to_string(wn[b].centre);
        });
        wn[id].children = ch;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    std::map<int, int> newid;
    for (size_t k = 0; k < order.size(); ++k) newid[order[k]] = static_cast<int>(k);

    pic.nodes.resize(order.size());
    for (size_t k = 0; k < order.size(); ++k) {
        WNode& n = wn[order[k]];
        ClusterNode& c = pic.nodes[k];
        c.id = static_cast<int>(k);
        c.parent = n.parent < 0 ? -1 : newid[n.parent];
        for (int ch : n.children) c.children.push_back(newid[ch]);
        c.size = n.size;
        c.rho = n.rho;
        c.eps = n.eps;
        c.centre = n.centre;
        c.orbit_size = n.orbit;
        c.unramified_roots_inside = n.unram;
        c.centre_is_root = n.centre_is_root ||
                           val_ge(R->val(pn_eval(pn_from_rat(R, f), n.centre)), Rat(N));
        c.k_rational = R->rational_within(n.centre, n.rho, &c.rat_centre);
        if (c.k_rational) c.rat_centre = canon_mod(c.rat_centre, p, ceil_rat(n.rho));
        c.wild = n.wild;
    }
    pic.root_id = 0;

    // centres of non-minimal clusters must come from a minimal subcluster,
    // otherwise a loose root can sit at the centre and vanish from f-bar;
    // preorder ids mean a reverse sweep propagates leaf centres upward
    PolyNf fN = pn_from_rat(R, f);
    for (size_t k = pic.nodes.size(); k-- > 0;) {
        ClusterNode& c = pic.nodes[k];
        if (c.children.empty()) continue;
        c.centre = pic.nodes[c.children[0]].centre;
        c.centre_is_root = val_ge(R->val(pn_eval(fN, c.centre)), Rat(N));
        c.k_rational = R->rational_within(c.centre, c.rho, &c.rat_centre);
        if (c.k_rational) c.rat_centre = canon_mod(c.rat_centre, p, ceil_rat(c.rho));
    }

    AlmostRationalReport ar = almost_rational_check(pic);
    pic.almost_rational = ar.verdict;
    for (auto& d : ar.diagnostics) pic.diagnostics.push_back(d);
    pic.y_regular = y_regular_check(pic);
    return pic;
}

AlmostRationalReport almost_rational_check(const ClusterPicture& pic) {
    AlmostRationalReport rep;
    rep.verdict = TriState::Yes;
    for (auto& n : pic.nodes) {
        for (auto& w : n.wild) {
            if (!w.clause_b_ok) {
                rep.verdict = TriState::No;
                rep.diagnostics.push_back("almost-rational witness: " + w.detail);
            } else {
                rep.diagnostics.push_back("wild cluster certified by clause (b): " + w.detail);
            }
        }
    }
    if (rep.verdict == TriState::Yes && pic.extension_blocked) {
        rep.verdict = TriState::NeedsExtension;
        rep.diagnostics.push_back("verdict limited by the residue extension cap");
    }
    return rep;
}

bool y_regular_check(const ClusterPicture& pic) {
    if (pic.p != 2) return true;
    for (auto& n : pic.nodes)
        if (invariants(pic, n.id).D != 1) return false;
    return true;
}

// ---------------------------------------------------------------------------
// invariants

std::vector<int> ClusterPicture::preorder() const {
    std::vector<int> order;
    std::vector<int> stack{root_id};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        order.push_back(id);
        auto& ch = nodes[id].children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return order;
}

int ClusterPicture::meet(int a, int b) const {
    std::set<int> anc;
    for (int t = a; t >= 0; t = nodes[t].parent) anc.insert(t);
    for (int t = b; t >= 0; t = nodes[t].parent)
        if (anc.count(t)) return t;
    return root_id;
}

Rat ClusterPicture::rho_meet(int a, int b) const { return nodes[meet(a, b)].rho; }

ClusterInvariants invariants(const ClusterPicture& pic, int node_id) {
    const ClusterNode& s = pic.nodes[node_id];
    ClusterInvariants iv{};
    iv.b = to_long(Int(s.rho.get_den()));
    Rat be = Rat(iv.b) * s.eps;
    if (!is_integer(be))
        throw NonIntegralBsEpsilon("b_s * epsilon_s is not an integer for cluster of size " +
                                   std::to_string(s.size));
    iv.D = mpz_odd_p(be.get_num().get_mpz_t()) ? 1 : 2;
    iv.m = (3 - iv.D) * iv.b;
    iv.parity = s.even() ? 2 : 1;
    iv.slope = (Rat(s.size) * s.rho + Rat(iv.parity) * s.rho - s.eps) / 2;
    iv.gamma = (s.even() && is_odd_integer(s.eps - Rat(s.size) * s.rho)) ? 2 : 1;
    iv.p0 = (s.minimal() && s.unramified_roots_inside > 0) ? 1 : 2;
    iv.slope0 = -s.eps / 2 + s.rho;
    iv.gamma0 = (iv.p0 == 2 && is_odd_integer(s.eps)) ? 2 : 1;

    // genus bookkeeping
    long sum_children = s.unramified_roots_inside;  // F-rational singletons
    bool all_even = true;
    for (int c : s.children) {
        long rel = pic.nodes[c].orbit_size / std::max(1L, s.orbit_size);
        sum_children += rel * pic.nodes[c].size;
        if (pic.nodes[c].size % 2 != 0) all_even = false;
    }
    long leftover = s.size - sum_children;
    iv.uberreven = s.even() && all_even && s.unramified_roots_inside == 0;
    if (leftover > 0) {
        if (s.wild.empty()) {
            iv.uberreven = false;
        } else {
            for (auto& w : s.wild)
                if (w.size % 2 != 0) iv.uberreven = false;
        }
    }

    // c with c*rho - 1/b integral
    long cpar = 0;
    if (iv.b > 1) {
        Int a = s.rho.get_num() % iv.b;
        if (a < 0) a += iv.b;
        Int inv;
        if (mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), Int(iv.b).get_mpz_t()) == 0)
            throw std::logic_error("radius numerator not invertible mod denominator");
        cpar = to_long(inv);
    }
    auto in_tilde = [&](long child_size) {
        return !in_2Z(Rat(child_size) / Rat(iv.b) - Rat(cpar) * s.eps);
    };
    iv.tilde_count = 0;
    iv.tilde_has_empty = false;
    if (iv.D == 2) {
        for (int c : s.children) {
            long rel = pic.nodes[c].orbit_size / std::max(1L, s.orbit_size);
            if (in_tilde(pic.nodes[c].size)) iv.tilde_count += rel;
        }
        if (in_tilde(1)) iv.tilde_count += s.unramified_roots_inside;
        if (s.minimal() && iv.p0 == 2 && in_tilde(0)) {
            iv.tilde_count += 1;
            iv.tilde_has_empty = true;
        }
        Rat X = Rat(s.size - sum_children) / Rat(iv.b) + Rat(iv.tilde_count);
        if (!is_integer(X))
            throw InexactDivision("genus count (|s| - sum children)/b is not an integer");
        long Xl = to_long(Int(X.get_num()));
        iv.genus = Xl >= 1 ? (Xl - 1) / 2 : 0;
    } else {
        iv.genus = 0;
    }
    return iv;
}

// ---------------------------------------------------------------------------
// reduced polynomials

ReducedPolys reduced_polynomials(const ClusterPicture& pic, int node_id) {
    if (!pic.has_poly)
        throw std::logic_error("reduced polynomials need the defining polynomial");
    const ClusterNode& s = pic.nodes[node_id];
    const NfCtxPtr& R = pic.R;
    const long N = R->precision();
    ClusterInvariants iv = invariants(pic, node_id);
    ReducedPolys out;

    PolyNf F0 = pn_from_rat(R, pic.f);
    PolyNf fw = pn_shift(F0, s.centre);
    std::vector<Val> vals = capped_vals(fw, N);
    NewtonPolygon np = newton_polygon_from_vals(vals);
    const NpEdge* edge = nullptr;
    for (auto& e : np.edges)
        if (-e.slope == s.rho) edge = &e;
    if (!edge) throw std::logic_error("no polygon edge at the cluster radius");

    PolyFq g = edge_reduction_nf(fw, *edge);
    FqCtxPtr F = g.F;
    long b = iv.b;
    Rat brho = Rat(b) * s.rho;
    long a_int = to_long(Int(brho.get_num()));  // b*rho in Z

    // divide out the directions of the proper children sitting at radius rho
    std::map<Int, long> dirs;  // residue element index -> total x-exponent
    std::map<Int, Fq> dirval;
    long centred_child_size = 0;
    for (int cid : s.children) {
        const ClusterNode& c = pic.nodes[cid];
        NfEl cur = c.centre;
        for (long k = 0; k < c.orbit_size; ++k) {
            if (k > 0) cur = R->frobenius(cur);
            Val d = R->val(R->sub(cur, s.centre));
            if (!val_ge(d, s.rho)) continue;  // conjugate copy outside this parent copy
            if (!d.is_inf() && Rat(d.finite()) == s.rho) {
                NfEl diff = R->sub(cur, s.centre);
                NfEl pw = R->one();
                for (long i = 0; i < b; ++i) pw = R->mul(pw, diff);
                Fq zh = R->to_residue(pw, a_int);
                Int idx = F->elem_index(zh);
                dirs[idx] += c.size;
                dirval[idx] = zh;
            } else {
                centred_child_size += c.size;
            }
        }
    }
    for (auto& [idx, T] : dirs) {
        if (T % b != 0)
            throw InexactDivision("child direction exponent not divisible by b");
        PolyFq lin(F, {F->neg(dirval[idx]), F->one()});
        for (long e = 0; e < T / b; ++e) {
            auto [q, r] = pf_divrem(g, lin);
            if (!r.is_zero()) throw InexactDivision("child direction does not divide f-bar");
            g = q;
        }
    }

    // a singleton strictly inside the disc (not at a child) shows up as a
    // shifted left endpoint; with b = 1 it contributes a root at 0
    long expected_left = iv.p0 == 1 ? 1 : centred_child_size;
    long extra = edge->i0 - expected_left;
    if (extra > 0) {
        if (b == 1) {
            PolyFq z = pf_x(F);
            for (long e = 0; e < extra; ++e) g = pf_mul(g, z);
            out.notes.push_back("deep singleton contributes a zero root to f-bar");
        } else {
            out.notes.push_back("deep singleton at non-integral radius: f-bar approximate");
        }
    }
    out.fbar = g;

    // unit constants from the polygon vertices
    Rat vtop = edge->v1;
    if (!is_integer(vtop)) throw std::logic_error("vertex valuation not integral");
    Fq ubar = R->to_residue(fw.c[edge->i1], to_long(Int(vtop.get_num())));
    out.unit = ubar;
    long eg = iv.parity / iv.gamma;
    {
        std::vector<Fq> c(static_cast<size_t>(eg) + 1, F->zero());
        c[0] = F->neg(ubar);
        c[static_cast<size_t>(eg)] = F->one();
        out.gbar = PolyFq(F, std::move(c));
    }
    if (s.minimal()) {
        Rat v0 = iv.p0 == 1 ? s.eps - s.rho : s.eps;
        if (is_integer(v0)) {
            size_t ci = iv.p0 == 1 ? 1 : 0;
            Fq u0 = R->to_residue(fw.c[ci], to_long(Int(v0.get_num())));
            long e0 = iv.p0 / iv.gamma0;
            std::vector<Fq> c(static_cast<size_t>(e0) + 1, F->zero());
            c[0] = F->neg(u0);
            c[static_cast<size_t>(e0)] = F->one();
            out.gbar0 = PolyFq(F, std::move(c));
        } else {
            out.notes.push_back("g-bar^0 skipped: epsilon data not integral at the centre");
        }
    }

    // f-tilde: tack on the tilde directions
    long cpar = 0;
    if (b > 1) {
        Int a = s.rho.get_num() % b;
        if (a < 0) a += b;
        Int inv;
        mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), Int(b).get_mpz_t());
        cpar = to_long(inv);
    }
    auto in_tilde = [&](long sz) { return !in_2Z(Rat(sz) / Rat(b) - Rat(cpar) * s.eps); };
    PolyFq ft = out.fbar;
    if (iv.D == 2) {
        for (int cid : s.children) {
            const ClusterNode& c = pic.nodes[cid];
            if (!in_tilde(c.size)) continue;
            NfEl cur = c.centre;
            for (long k = 0; k < c.orbit_size; ++k) {
                if (k > 0) cur = R->frobenius(cur);
                Val d = R->val(R->sub(cur, s.centre));
                if (!val_ge(d, s.rho)) continue;
                if (!d.is_inf() && Rat(d.finite()) == s.rho) {
                    NfEl diff = R->sub(cur, s.centre);
                    NfEl pw = R->one();
                    for (long i = 0; i < b; ++i) pw = R->mul(pw, diff);
                    Fq zh = R->to_residue(pw, a_int);
                    ft = pf_mul(ft, PolyFq(F, {F->neg(zh), F->one()}));
                } else {
                    ft = pf_mul(ft, pf_x(F));  // child in the centre direction
                }
            }
        }
        if (b == 1 && s.unramified_roots_inside > 0 && in_tilde(1)) {
            // singleton directions are the simple factors of the edge reduction
            PolyFq red = edge_reduction_nf(fw, *edge);
            for (auto& [h, mu] : pf_factor(red))
                if (mu == 1) ft = pf_mul(ft, h);
        }
        if (s.minimal() && iv.p0 == 2 && in_tilde(0)) ft = pf_mul(ft, pf_x(F));
    }
    out.ftilde = ft;
    return out;
}

// ---------------------------------------------------------------------------
// JSON forms

namespace {

json node_to_json(const ClusterPicture& pic, int id) {
    const ClusterNode& n = pic.nodes[id];
    json j;
    j["size"] = n.size;
    j["rho"] = rat_pair(n.rho);
    j["epsilon"] = rat_pair(n.eps);
    if (n.k_rational) j["centre"] = rat_str(n.rat_centre);
    else j["centre"] = nullptr;
    if (n.orbit_size != 1) j["orbit"] = n.orbit_size;
    if (n.depth) j["depth"] = rat_pair(*n.depth);
    j["unramified_roots"] = n.unramified_roots_inside;
    if (n.centre_is_root) j["centre_is_root"] = true;
    if (!n.wild.empty()) {
        json w = json::array();
        for (auto& x : n.wild)
            w.push_back({{"rho", rat_pair(x.rho)},
                         {"size", x.size},
                         {"clause_b_ok", x.clause_b_ok}});
        j["wild"] = w;
    }
    json ch = json::array();
    for (int c : n.children) ch.push_back(node_to_json(pic, c));
    j["children"] = ch;
    return j;
}

int node_from_json(const json& j, ClusterPicture& pic, int parent) {
    ClusterNode n;
    n.id = static_cast<int>(pic.nodes.size());
    n.parent = parent;
    n.size = j.at("size").get<long>();
    n.rho = rat_from_json(j.at("rho"));
    if (j.contains("epsilon")) n.eps = rat_from_json(j.at("epsilon"));
    n.rat_centre = j.contains("centre") && !j.at("centre").is_null()
                       ? parse_rat(j.at("centre").is_string()
                                       ? j.at("centre").get<std::string>()
                                       : std::to_string(j.at("centre").get<long>()))
                       : Rat(0);
    n.k_rational = !(j.contains("centre") && j.at("centre").is_null());
    n.centre = pic.R->from_rat(n.rat_centre);
    n.orbit_size = j.contains("orbit") ? j.at("orbit").get<long>() : 1;
    if (j.contains("depth")) n.depth = rat_from_json(j.at("depth"));
    pic.nodes.push_back(n);
    int id = n.id;
    long child_sum = 0;
    if (j.contains("children"))
        for (auto& cj : j.at("children")) {
            int cid = node_from_json(cj, pic, id);
            pic.nodes[id].children.push_back(cid);
            child_sum += pic.nodes[cid].orbit_size * pic.nodes[cid].size;
        }
    long rel_sum = child_sum / std::max(1L, pic.nodes[id].orbit_size);
    if (j.contains("unramified_roots"))
        pic.nodes[id].unramified_roots_inside = j.at("unramified_roots").get<long>();
    else
        pic.nodes[id].unramified_roots_inside = std::max(0L, pic.nodes[id].size - rel_sum);
    pic.nodes[id].centre_is_root =
        pic.nodes[id].children.empty() && pic.nodes[id].unramified_roots_inside > 0;
    return id;
}

// epsilon from the tree walk when the JSON omits it (all-or-nothing: a
// picture either carries epsilons or they are all derived from the radii)
void fill_epsilons(ClusterPicture& pic, int id, std::vector<std::pair<long, Rat>> chain) {
    ClusterNode& n = pic.nodes[id];
    chain.emplace_back(n.size, n.rho);
    Rat eps = pic.v_cf + Rat(n.size) * n.rho;
    long inner = n.size;
    for (size_t k = chain.size() - 1; k-- > 0;) {
        eps += Rat(chain[k].first - inner) * chain[k].second;
        inner = chain[k].first;
    }
    n.eps = eps;
    for (int c : n.children) fill_epsilons(pic, c, chain);
}

}  // namespace

ClusterPicture picture_from_json(const std::string& json_text, unsigned long p) {
    json j = json::parse(json_text);
    ClusterPicture pic;
    pic.p = p;
    pic.has_poly = false;
    pic.R = std::make_shared<NfCtx>(p, 1);
    pic.v_cf = j.contains("v_cf") ? rat_from_json(j.at("v_cf")) : Rat(0);
    const json& tree = j.contains("tree") ? j.at("tree") : j;
    pic.root_id = node_from_json(tree, pic, -1);
    pic.deg = pic.nodes[pic.root_id].size;
    pic.genus = (pic.deg - 1) / 2;
    bool any_eps = tree.contains("epsilon");
    if (!any_eps) fill_epsilons(pic, pic.root_id, {});
    pic.almost_rational = TriState::Yes;
    pic.y_regular = y_regular_check(pic);
    return pic;
}

std::string picture_to_json(const ClusterPicture& pic) {
    json j;
    j["p"] = pic.p;
    j["degree"] = pic.deg;
    j["genus"] = pic.genus;
    j["v_cf"] = rat_pair(pic.v_cf);
    j["almost_rational"] = pic.almost_rational == TriState::Yes              ? "yes"
                           : pic.almost_rational == TriState::No             ? "no"
                                                                             : "needs-extension";
    j["y_regular"] = pic.y_regular;
    if (!pic.diagnostics.empty()) j["diagnostics"] = pic.diagnostics;
    j["tree"] = node_to_json(pic, pic.root_id);
    return j.dump(2);
}

}  // namespace hc
