#ifndef HCLIB_MODEL_HPP
#define HCLIB_MODEL_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hclib/clusters.hpp"

namespace hc {

struct InvalidRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalInconsistency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Multiplicities alpha*d_i of the minimal chain of fractions
// alpha*a = n_0/d_0 > n_1/d_1 > ... > n_{r+1}/d_{r+1} = alpha*b with
// n_i*d_{i+1} - n_{i+1}*d_i = 1 throughout and r minimal.
std::vector<long> chain_p1(long alpha, const Rat& a, const Rat& b);
// One-argument form: chain down to floor(alpha*a - 1)/alpha (open chain).
std::vector<long> chain_p1_open(long alpha, const Rat& a);

struct Component {
    int id = -1;
    enum Kind { Principal, SideP1, ChainLink } kind = Principal;
    int cluster = -1;  // picture node the component originates from
    int copy = 0;      // geometric conjugate copy of that cluster
    int half = 0;      // 1 = the minus half of a split (uebereven) component
    long multiplicity = 1;
    long genus = 0;
    std::string label;
    int orbit = -1;         // frobenius orbit id (best effort)
    long orbit_size = 1;    // size of that orbit
    bool orbit_known = true;
    std::string residue_equation;  // y^D = ftilde(x) for principal parts
};

struct SpecialFibre {
    enum Flag { ProperFlatOnly, RegularSNC, MinimalSNC } flag = RegularSNC;
    unsigned long p = 0;
    long curve_genus = 0;
    std::vector<Component> components;
    std::vector<std::pair<int, int>> edges;  // transverse intersection points
    std::vector<std::string> notes;
    std::vector<std::string> contracted;  // labels of blown-down components

    // number of intersection points between components i and j
    long intersections(int i, int j) const;
};

// Special fibre of the model over O_{K^nr}, following the construction
// theorem; minimal=true applies removability and blows down contractible
// clusters. If the picture is not almost rational + y-regular, the
// proper-flat description is emitted with flag ProperFlatOnly.
SpecialFibre build_fibre(const ClusterPicture& pic, bool minimal);

struct ContractibleHit {
    int node;      // picture node id
    int case_tag;  // clause 1, 2 or 3 of the definition
};
std::vector<ContractibleHit> detect_contractible(const ClusterPicture& pic);

struct GenusCheck {
    bool ok = false;
    bool integral = true;   // self-intersection solve stayed integral
    bool connected = true;
    long p_a = 0;
    std::vector<long> self_int;  // per component
    std::vector<std::string> minimality_violations;
    std::string error;
};
// Solves m_i*G_i^2 = -sum_j m_j (G_i . G_j), then checks
// p_a = 1 + 1/2 sum_i m_i (2 g_i - 2 - G_i^2) against g.
GenusCheck verify_genus(const SpecialFibre& fib, long g);

std::string dual_graph_dot(const SpecialFibre& fib);
std::string dual_graph_json(const SpecialFibre& fib);

}  // namespace hc

#endif
