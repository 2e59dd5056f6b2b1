#ifndef HCLIB_REPORT_HPP
#define HCLIB_REPORT_HPP

#include <string>
#include <vector>

#include "hclib/clusters.hpp"

namespace hc {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Expression parser: +, -, *, /, ^, parentheses, integer literals, variable x.
PolyRat parse_poly(const std::string& expr);

// Nesting diagram of the picture: roots as *, non-rational leftovers as o,
// each cluster bracketed with its radius subscript and orbit multiplier.
std::string ascii_picture(const ClusterPicture& pic);

struct CurveInput {
    unsigned long p = 0;
    std::string poly_expr;     // expression form of f (empty with an override)
    std::string picture_json;  // combinatorial picture override (empty with f)
    bool minimal = true;
    unsigned long residue_cap = 12;
};

struct CurveReport {
    std::string json_text;
    std::string dot_text;
    std::string ascii_text;
    std::vector<std::string> errors;  // structured errors; report is partial
    bool genus_ok = false;            // verify_genus agreed with the curve genus
    bool ok() const { return errors.empty(); }
};

// Full pipeline on one curve; never throws, failures become partial reports.
CurveReport run_curve(const CurveInput& in);

}  // namespace hc

#endif
