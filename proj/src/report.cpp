#include "hclib/report.hpp"

#include <cctype>
#include <json.hpp>
#include <sstream>

#include "hclib/differentials.hpp"
#include "hclib/model.hpp"
#include "hclib/newton.hpp"

namespace hc {

namespace {

using nlohmann::json;

json rat_pair(const Rat& x) {
    return json::array({x.get_num().get_str(), x.get_den().get_str()});
}

// ---------------------------------------------------------------------------
// expression parser

struct Parser {
    const std::string& s;
    size_t i = 0;

    explicit Parser(const std::string& src) : s(src) {}

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }

    Int integer() {
        skip();
        size_t j = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (j == i) throw ParseError("expected a number at position " + std::to_string(j));
        return Int(s.substr(j, i - j));
    }

    PolyRat primary() {
        char c = peek();
        if (c == '(') {
            eat('(');
            PolyRat e = expr();
            if (!eat(')')) throw ParseError("missing closing parenthesis");
            return e;
        }
        if (c == 'x' || c == 'X') {
            ++i;
            return pr_x();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return pr_const(Rat(integer()));
        throw ParseError(std::string("unexpected character '") + c + "'");
    }

    PolyRat power() {
        PolyRat base = primary();
        if (eat('^')) {
            Int e = integer();
            if (e < 0) throw ParseError("negative exponent");
            return pr_pow(base, e.get_ui());
        }
        return base;
    }

    PolyRat unary() {
        if (eat('-')) return pr_scale(unary(), Rat(-1));
        if (eat('+')) return unary();
        return power();
    }

    PolyRat term() {
        PolyRat a = unary();
        for (;;) {
            if (eat('*')) {
                a = pr_mul(a, unary());
            } else if (eat('/')) {
                PolyRat b = unary();
                if (b.degree() != 0 || b.is_zero())
                    throw ParseError("division only by a nonzero constant");
                a = pr_scale(a, Rat(1) / b.c[0]);
            } else {
                return a;
            }
        }
    }

    PolyRat expr() {
        PolyRat a = term();
        for (;;) {
            if (eat('+'))
                a = pr_add(a, term());
            else if (peek() == '-') {
                eat('-');
                a = pr_sub(a, term());
            } else {
                return a;
            }
        }
    }
};

bool is_prime_ul(unsigned long n) {
    if (n < 2) return false;
    for (unsigned long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::string rat_sub(const Rat& x) {
    std::ostringstream os;
    os << x.get_num();
    if (x.get_den() != 1) os << "/" << x.get_den();
    return os.str();
}

std::string ascii_node(const ClusterPicture& pic, int id) {
    const ClusterNode& n = pic.nodes[id];
    std::ostringstream os;
    if (n.parent >= 0 && n.orbit_size > pic.nodes[n.parent].orbit_size)
        os << (n.orbit_size / pic.nodes[n.parent].orbit_size) << "x";
    else if (n.parent < 0 && n.orbit_size > 1)
        os << n.orbit_size << "x";
    os << "(";
    long accounted = 0;
    for (int c : n.children) {
        os << ascii_node(pic, c) << " ";
        accounted += pic.nodes[c].size * (pic.nodes[c].orbit_size / n.orbit_size);
    }
    for (long k = 0; k < n.unramified_roots_inside; ++k) os << "* ";
    long rest = n.size - accounted - n.unramified_roots_inside;
    for (long k = 0; k < rest; ++k) os << "o ";
    std::string body = os.str();
    if (!body.empty() && body.back() == ' ') body.pop_back();
    return body + ")_{" + rat_sub(n.rho) + "}";
}

json newton_section(const PolyRat& f, unsigned long p) {
    json j;
    NewtonPolygon np = newton_polygon(f, p);
    j["x_multiplicity"] = np.x_multiplicity;
    j["vertices"] = json::array();
    for (auto& [i, v] : np.vertices) j["vertices"].push_back({i, rat_pair(v)});
    j["edges"] = json::array();
    for (auto& e : np.edges) {
        json je;
        je["i0"] = e.i0;
        je["i1"] = e.i1;
        je["slope"] = rat_pair(e.slope);
        je["length"] = e.length;
        EdgeReduction er = edge_reduction(f, e, p);
        je["reduction"] = pf_str(er.reduction);
        j["edges"].push_back(je);
    }
    NpRegularity reg = is_np_regular(f, p);
    j["np_regular"] = reg.regular;
    if (!reg.regular && reg.witness_factor)
        j["witness_factor"] = pf_str(*reg.witness_factor);
    return j;
}

json invariant_table(const ClusterPicture& pic, std::vector<std::string>& errors) {
    json arr = json::array();
    for (auto& n : pic.nodes) {
        if (n.size < 2) continue;
        json r;
        r["node"] = n.id;
        r["size"] = n.size;
        r["rho"] = rat_pair(n.rho);
        r["epsilon"] = rat_pair(n.eps);
        if (n.orbit_size != 1) r["orbit"] = n.orbit_size;
        try {
            ClusterInvariants iv = invariants(pic, n.id);
            r["b"] = iv.b;
            r["D"] = iv.D;
            r["m"] = iv.m;
            r["slope"] = rat_pair(iv.slope);
            r["gamma"] = iv.gamma;
            r["p0"] = iv.p0;
            r["slope0"] = rat_pair(iv.slope0);
            r["gamma0"] = iv.gamma0;
            r["genus"] = iv.genus;
            r["uebereven"] = iv.uberreven;
        } catch (const std::exception& e) {
            r["error"] = e.what();
            errors.push_back(std::string("invariants of s") + std::to_string(n.id) +
                             ": " + e.what());
        }
        arr.push_back(r);
    }
    return arr;
}

void ascii_fibre(std::ostringstream& os, const SpecialFibre& fib) {
    const char* flag = fib.flag == SpecialFibre::ProperFlatOnly ? "proper flat only"
                       : fib.flag == SpecialFibre::RegularSNC   ? "regular SNC"
                                                                : "minimal regular SNC";
    os << "special fibre (" << flag << "):\n";
    for (auto& c : fib.components) {
        os << "  " << c.label << "  mult " << c.multiplicity << "  genus " << c.genus;
        if (!c.residue_equation.empty()) os << "  " << c.residue_equation;
        os << "\n";
    }
    os << "  edges:";
    for (auto& [a, b] : fib.edges)
        os << " (" << fib.components[a].label << "," << fib.components[b].label << ")";
    os << "\n";
    for (auto& n : fib.notes) os << "  note: " << n << "\n";
}

}  // namespace

PolyRat parse_poly(const std::string& expr) {
    Parser p(expr);
    PolyRat f = p.expr();
    p.skip();
    if (p.i != expr.size())
        throw ParseError("trailing input at position " + std::to_string(p.i));
    return f;
}

std::string ascii_picture(const ClusterPicture& pic) {
    if (pic.nodes.empty()) return "";
    return ascii_node(pic, pic.root_id);
}

CurveReport run_curve(const CurveInput& in) {
    CurveReport rep;
    json j;
    std::ostringstream txt;

    j["input"]["p"] = in.p;
    j["input"]["minimal"] = in.minimal;
    if (!is_prime_ul(in.p)) {
        rep.errors.push_back("p = " + std::to_string(in.p) + " is not prime");
        j["errors"] = rep.errors;
        rep.json_text = j.dump(2);
        rep.ascii_text = "error: p is not prime\n";
        return rep;
    }

    PolyRat f;
    bool have_poly = false;
    if (!in.poly_expr.empty()) {
        j["input"]["poly"] = in.poly_expr;
        try {
            f = parse_poly(in.poly_expr);
            have_poly = true;
        } catch (const ParseError& e) {
            rep.errors.push_back(std::string("parse error: ") + e.what());
        }
        if (have_poly && !pr_separable(f)) {
            rep.errors.push_back("polynomial is not separable");
            have_poly = false;
        }
        if (have_poly && f.degree() < 5)
            rep.errors.push_back("degree < 5: genus below 2, partial pipeline");
    }

    if (have_poly) {
        j["input"]["f"] = pr_str(f);
        txt << "p = " << in.p << ", f = " << pr_str(f) << "\n\n";
        try {
            j["newton"] = newton_section(f, in.p);
            txt << "Newton polygon: " << j["newton"]["edges"].size() << " edge(s), "
                << (j["newton"]["np_regular"].get<bool>() ? "Np-regular"
                                                          : "not Np-regular")
                << "\n\n";
        } catch (const std::exception& e) {
            rep.errors.push_back(std::string("newton: ") + e.what());
        }
    }

    ClusterPicture pic;
    bool have_pic = false;
    try {
        if (!in.picture_json.empty()) {
            pic = picture_from_json(in.picture_json, in.p);
            have_pic = true;
        } else if (have_poly && f.degree() >= 3) {
            pic = rational_picture(f, in.p, in.residue_cap);
            have_pic = true;
        }
    } catch (const std::exception& e) {
        rep.errors.push_back(std::string("clusters: ") + e.what());
    }

    if (have_pic) {
        json jc;
        jc["picture"] = json::parse(picture_to_json(pic));
        jc["ascii"] = ascii_picture(pic);
        jc["almost_rational"] = pic.almost_rational == TriState::Yes  ? "yes"
                                : pic.almost_rational == TriState::No ? "no"
                                                                      : "needs extension";
        jc["y_regular"] = pic.y_regular;
        jc["diagnostics"] = pic.diagnostics;
        jc["invariants"] = invariant_table(pic, rep.errors);
        j["clusters"] = jc;
        txt << "cluster picture: " << ascii_picture(pic) << "\n";
        txt << "almost rational: " << jc["almost_rational"].get<std::string>()
            << ", y-regular: " << (pic.y_regular ? "yes" : "no") << "\n\n";
        if (pic.almost_rational != TriState::Yes || !pic.y_regular)
            rep.errors.push_back("preconditions of the model theorems not met");

        try {
            SpecialFibre fib = build_fibre(pic, in.minimal);
            j["model"] = json::parse(dual_graph_json(fib));
            rep.dot_text = dual_graph_dot(fib);
            GenusCheck gc = verify_genus(fib, pic.genus);
            rep.genus_ok = gc.ok;
            j["model"]["p_a"] = gc.p_a;
            j["model"]["genus_ok"] = gc.ok;
            if (!gc.error.empty()) j["model"]["genus_error"] = gc.error;
            ascii_fibre(txt, fib);
            txt << "  arithmetic genus " << gc.p_a << " (curve genus " << pic.genus
                << ")\n\n";
        } catch (const std::exception& e) {
            rep.errors.push_back(std::string("model: ") + e.what());
        }

        try {
            DifferentialBasis b = trace_basis(pic, pic.genus);
            j["differentials"] = json::parse(basis_json(b));
            txt << "integral differentials: v(det A) = " << b.v_det_A;
            if (b.has_delta)
                txt << ", delta = " << b.delta << ", delta_min = " << b.delta_min;
            txt << "\n";
            for (auto& e : b.entries)
                txt << "  mu: p^" << e.exponent << " * (" << pr_str(e.factor_poly)
                    << ") dx/2y\n";
        } catch (const std::exception& e) {
            rep.errors.push_back(std::string("differentials: ") + e.what());
        }
    }

    if (!rep.errors.empty()) {
        j["errors"] = rep.errors;
        for (auto& e : rep.errors) txt << "error: " << e << "\n";
    }
    rep.json_text = j.dump(2);
    rep.ascii_text = txt.str();
    return rep;
}

}  // namespace hc
