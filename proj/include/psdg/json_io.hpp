#pragma once

// JSON serialization for every value the command-line tool reads or writes.
//
// Wire conventions:
//   * matrix polynomials: {"n": int, "mode": "exact"|"float",
//     "coeffs": [[[ [re,im], ... ] ... ] ... ]} indexed coeffs[m][row][col];
//     exact entries are rational strings "p/q", float entries are numbers.
//   * semialgebraic sets: {"pieces": [{"point": "p/q"} |
//     {"lo": "p/q"|"-inf", "hi": "p/q"|"+inf"}]}.
//   * descriptions: {"generators": [{"poly": <1x1 exact matrix polynomial>,
//     "role": str, gap bounds when role == "gap"}]}.
//   * certificates: {"S": description, "n": int, "d": int, "mode": str,
//     "blocks": [{"e": [ints], "Q": matrix, "clip": float}],
//     "residual": float} with the residual of the whole representation at
//     top level and the per-block eigenvalue clip inside each block.
//   * unit-circle sets: angles as rational multiples of pi, "p/q·π".
//
// Dumping is deterministic: objects keep insertion order and floats are
// printed with a fixed number of significant digits (17 by default, which
// round-trips IEEE doubles exactly).  Parsing errors always name the
// offending field.

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "json.hpp"
#include "psdg/certsearch.hpp"
#include "psdg/circle.hpp"
#include "psdg/counterexamples.hpp"
#include "psdg/matrixpoly.hpp"
#include "psdg/poly.hpp"
#include "psdg/reduction.hpp"
#include "psdg/scalars.hpp"
#include "psdg/semialg.hpp"

namespace psdg {

using Json = nlohmann::ordered_json;

/* ------------------------------------------------------------------ */
/* Deterministic dumping                                               */
/* ------------------------------------------------------------------ */

// Pretty (two-space indent) unless compact; floats via "%.{digits}g";
// non-finite floats become null.  Trailing newline is NOT appended.
std::string json_dump(const Json& j, bool compact = false, int float_digits = 17);

/* ------------------------------------------------------------------ */
/* Field access that names the offending field                         */
/* ------------------------------------------------------------------ */

const Json& json_field(const Json& j, const std::string& name, const std::string& where);
std::string json_string(const Json& j, const std::string& name, const std::string& where);
int json_int(const Json& j, const std::string& name, const std::string& where);
double json_double(const Json& j, const std::string& name, const std::string& where);
bool json_bool(const Json& j, const std::string& name, const std::string& where);

/* ------------------------------------------------------------------ */
/* Scalars                                                             */
/* ------------------------------------------------------------------ */

// Accepts a rational string "p/q", an integer, or (exactly, via the dyadic
// expansion) a finite double.  `where` names the field in error messages.
Rational rational_from_json(const Json& j, const std::string& where);

/* ------------------------------------------------------------------ */
/* Matrix polynomials                                                  */
/* ------------------------------------------------------------------ */

Json matrix_poly_to_json(const MatrixPoly<Gaussian>& f);               // mode "exact"
Json matrix_poly_to_json(const MatrixPoly<std::complex<double>>& f);  // mode "float"

// Either mode parses; float entries convert to their exact dyadic
// rational value, so the conversion is lossless.
MatrixPoly<Gaussian> matrix_poly_exact_from_json(const Json& j);
MatrixPoly<std::complex<double>> matrix_poly_float_from_json(const Json& j);

// Scalar polynomials travel as 1x1 exact matrix polynomials.
Json poly_to_json(const Poly<Gaussian>& p);
Json poly_to_json(const Poly<Rational>& p);
Poly<Rational> poly_rational_from_json(const Json& j);

/* ------------------------------------------------------------------ */
/* Sets and descriptions                                               */
/* ------------------------------------------------------------------ */

Json semialg_to_json(const SemialgSet& K);
SemialgSet semialg_from_json(const Json& j);

Json description_to_json(const Description& S);
Description description_from_json(const Json& j);

/* ------------------------------------------------------------------ */
/* Dense complex matrices (Gram blocks)                                */
/* ------------------------------------------------------------------ */

Json cmatrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd cmatrix_from_json(const Json& j, const std::string& where);

/* ------------------------------------------------------------------ */
/* Certificates and reports                                            */
/* ------------------------------------------------------------------ */

Json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);

Json membership_report_to_json(const MembershipReport& r);
Json fejer_riesz_to_json(const FejerRieszResult& r);
Json two_unbounded_to_json(const TwoUnboundedResult& r);
Json denominator_result_to_json(const DenominatorResult& r);
Json certificate_plan_to_json(const CertificatePlan& p);
Json classification_to_json(const Classification& c);

/* ------------------------------------------------------------------ */
/* The counterexample family                                           */
/* ------------------------------------------------------------------ */

Json fk_conditions_to_json(const FkConditions& c);
Json fk_instance_to_json(const FkInstance& inst);
Json fk_psd_report_to_json(const FkPsdReport& r);
Json claim1_to_json(const Claim1Refutation& r);
Json claim2_to_json(const Claim2Outcome& o);

/* ------------------------------------------------------------------ */
/* Unit-circle sets                                                    */
/* ------------------------------------------------------------------ */

// "p/q·π"; parsing also accepts the ASCII spelling "p/q*pi".
std::string angle_to_json_string(const Rational& a);
Rational angle_from_json_string(const std::string& s, const std::string& where);

Json circle_set_to_json(const CircleSet& c);
CircleSet circle_set_from_json(const Json& j);

}  // namespace psdg
