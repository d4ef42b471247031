#pragma once

// Closed semialgebraic subsets of the real line: finite unions of points and
// closed intervals (bounded or not), kept in a canonical sorted, disjoint,
// non-adjacent form.  This module computes
//
//   * the set K_S described by finitely many polynomial inequalities
//     g_j(x) >= 0 (exact real-root isolation, Sturm sequences),
//   * the natural description of a set: x - a for a least element a,
//     b - x for a greatest element b, and (x - u)(x - v) for every gap
//     (u, v) between consecutive pieces,
//   * the endpoint-derivative test for saturated descriptions of compact
//     sets, and
//   * the structural classification of a set together with the
//     known/conjectured saturation verdict for matrix polynomials.

#include <string>
#include <vector>

#include "psdg/poly.hpp"
#include "psdg/scalars.hpp"

namespace psdg {

/* ------------------------------------------------------------------ */
/* Pieces and sets                                                     */
/* ------------------------------------------------------------------ */

struct Piece {
    enum class Kind { Point, Interval };

    Kind kind = Kind::Point;
    bool lo_unbounded = false;  // lo = -infinity (Interval only)
    bool hi_unbounded = false;  // hi = +infinity (Interval only)
    Rational lo, hi;            // Point stores its value in both

    static Piece point(const Rational& a);
    // Bounded interval [lo, hi], lo < hi.
    static Piece interval(const Rational& lo, const Rational& hi);
    static Piece ray_below(const Rational& hi);  // (-inf, hi]
    static Piece ray_above(const Rational& lo);  // [lo, +inf)
    static Piece whole_line();

    bool is_unbounded() const { return lo_unbounded || hi_unbounded; }
    bool contains(const Rational& x) const;

    friend bool operator==(const Piece& a, const Piece& b);
    friend bool operator!=(const Piece& a, const Piece& b) { return !(a == b); }
};

class SemialgSet {
public:
    SemialgSet() = default;  // empty set

    // Canonicalize: sort, merge overlapping/touching pieces, absorb points.
    static SemialgSet from_pieces(std::vector<Piece> pieces);
    static SemialgSet empty_set() { return SemialgSet(); }
    static SemialgSet real_line() { return from_pieces({Piece::whole_line()}); }

    const std::vector<Piece>& pieces() const { return pieces_; }
    bool is_empty() const { return pieces_.empty(); }
    bool is_compact() const;
    bool contains(const Rational& x) const;

    bool has_least_element() const;
    bool has_greatest_element() const;
    Rational least_element() const;
    Rational greatest_element() const;

    friend bool operator==(const SemialgSet& a, const SemialgSet& b) { return a.pieces_ == b.pieces_; }
    friend bool operator!=(const SemialgSet& a, const SemialgSet& b) { return !(a == b); }

private:
    std::vector<Piece> pieces_;
};

/* ------------------------------------------------------------------ */
/* Descriptions                                                        */
/* ------------------------------------------------------------------ */

enum class GeneratorRole { LeastElement, GreatestElement, Gap, Other };

std::string generator_role_name(GeneratorRole role);
GeneratorRole generator_role_from_name(const std::string& name);

struct DescGenerator {
    Poly<Rational> poly;
    GeneratorRole role = GeneratorRole::Other;
    Rational gap_lo, gap_hi;  // valid when role == Gap
};

struct Description {
    std::vector<DescGenerator> generators;

    static Description from_polys(const std::vector<Poly<Rational>>& polys);
};

// Generators mandated by the least/greatest/gap rules, nothing else.
Description natural_description(const SemialgSet& K);

// Endpoint-derivative test for compact K: every left endpoint x_j needs some
// generator with g(x_j) = 0 and g'(x_j) > 0, every right endpoint y_j some
// generator with g(y_j) = 0 and g'(y_j) < 0; a point is both kinds at once.
bool is_saturated_description(const Description& S, const SemialgSet& K);

/* ------------------------------------------------------------------ */
/* Realization                                                         */
/* ------------------------------------------------------------------ */

struct RealizeOptions {
    // Endpoints that cannot be certified rational are an error unless the
    // caller opts into snapping them to a rational representative taken from
    // an isolating interval refined below snap_width.
    bool snap_irrational = false;
    Rational snap_width = make_rational(1, 1000000000);
};

// K_S = { x : g(x) >= 0 for every generator g }.  Identically-zero
// generators are vacuous and skipped; an unsatisfiable constant generator
// yields the empty set.
SemialgSet realize(const Description& S, const RealizeOptions& opts = {});
SemialgSet realize(const std::vector<Poly<Rational>>& gens, const RealizeOptions& opts = {});

/* ------------------------------------------------------------------ */
/* Classification                                                      */
/* ------------------------------------------------------------------ */

enum class ClassLabel {
    Bounded,
    UnboundedInterval,
    UnboundedIntervalPlusOnePoint,
    UnboundedIntervalPlusManyPoints,
    TwoUnboundedIntervals,
    TwoUnboundedIntervalsPlusOnePoint,
    TwoUnboundedIntervalsPlusManyPoints,
    MixedBoundedUnboundedIntervals,
};

enum class Verdict { Yes, No, Conjecture };

struct Classification {
    ClassLabel label;
    Verdict verdict;
};

std::string class_label_name(ClassLabel label);
std::string verdict_name(Verdict v);

Classification classify(const SemialgSet& K);

/* ------------------------------------------------------------------ */
/* Exact real-root isolation                                           */
/* ------------------------------------------------------------------ */

struct IsolatedRoot {
    bool is_rational = false;
    Rational value;    // valid when is_rational
    Rational lo, hi;   // enclosing interval; lo = hi = value for rational roots
};

struct RootIsolation {
    std::vector<IsolatedRoot> roots;  // ascending
    // False when the divisor enumeration used to certify rational roots hit
    // its effort cap; irrational-looking roots are then uncertified.
    bool certification_complete = true;
    // Squarefree factor carrying the non-rational roots (sign changes on
    // each isolating interval); used for refinement.
    Poly<Rational> irrational_part;
};

// Isolates the distinct real roots of p (p nonzero, any multiplicities).
RootIsolation isolate_real_roots(const Poly<Rational>& p);

// Number of distinct real roots of p in (a, b]; p(a), p(b) must be nonzero.
int count_roots_in(const Poly<Rational>& p, const Rational& a, const Rational& b);

// One bisection step on an isolating interval of p (p has a sign change on
// (lo, hi)); keeps the sign change.
void refine_root_interval(const Poly<Rational>& p, Rational& lo, Rational& hi);

}  // namespace psdg
