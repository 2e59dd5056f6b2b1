#ifndef HCLIB_DIFFERENTIALS_HPP
#define HCLIB_DIFFERENTIALS_HPP

#include <string>
#include <vector>

#include "hclib/clusters.hpp"

namespace hc {

struct PreconditionNotMet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One basis differential mu_i = p^exponent * (product of factors) * dx/2y.
struct DiffEntry {
    long exponent = 0;       // floor(e_i)
    Rat e;                   // exact e_i
    std::vector<std::string> factors;  // centres w_{s_j}, j < i, in order
    PolyRat factor_poly;     // expanded monic product over Q
    bool factor_exact = true;  // false when centres are irrational (greedy)
                               // or the trace lift fell below precision
    int cluster = -1;        // picture node of the chosen s_i
    long copy = 0;           // geometric conjugate copy of that node
    bool tie_flag = false;   // an incomparable tie was broken deterministically
};

struct DifferentialBasis {
    std::vector<DiffEntry> entries;
    long v_det_A = 0;        // sum of the exponents (A is lower triangular)
    bool has_delta = false;  // delta fields are set (needs the polynomial)
    Rat delta;               // v_p(2^{4g} disc f)
    Rat delta_min;           // delta - (8g+4)/g * v_det_A
    std::string trace_beta;  // residue element beta-bar ("" means beta = 1)
    std::vector<std::string> notes;
};

// Nested closed form: all proper clusters share one rational centre w and
// form a chain s_1 c ... c s_n; i_j = min{i : 2(j+1) <= |s_i|} and
// e_j = eps_{s_{i_j}}/2 - (j+1) rho_{s_{i_j}}, mu_j = p^{floor e_j}(x-w)^j.
DifferentialBasis nested_basis(const ClusterPicture& pic, long g);

// General greedy selection: for i = 0..g-1 pick a proper rational cluster
// maximising eps_t/2 - rho_t - sum_{j<i} rho_{s_j ^ t}; nested ties go to
// the larger cluster, incomparable ties are resolved deterministically and
// flagged. mu_i = p^{floor e_i} prod_{j<i}(x - w_{s_j}) dx/2y.
DifferentialBasis greedy_basis(const ClusterPicture& pic, long g);

// Unramified-trace variant: same selection and exponents as greedy_basis;
// when chosen centres live in a residue extension, each factor product is
// replaced by Tr(beta * prod (x - w_{s_j})) with Tr(beta-bar) != 0, expanded
// to rational coefficients by Frobenius-orbit summation at working precision.
DifferentialBasis trace_basis(const ClusterPicture& pic, long g);

// v_p(2^{4g} disc f), the discriminant normalisation used for delta.
Rat disc_valuation(const PolyRat& f, unsigned long p, long g);

std::string basis_json(const DifferentialBasis& b);

}  // namespace hc

#endif
