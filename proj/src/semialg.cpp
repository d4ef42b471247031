#include "psdg/semialg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace psdg {

/* ------------------------------------------------------------------ */
/* Piece                                                               */
/* ------------------------------------------------------------------ */

Piece Piece::point(const Rational& a) {
    Piece p;
    p.kind = Kind::Point;
    p.lo = a;
    p.hi = a;
    return p;
}

Piece Piece::interval(const Rational& lo, const Rational& hi) {
    if (lo >= hi) throw std::invalid_argument("Piece::interval: requires lo < hi (use point for a singleton)");
    Piece p;
    p.kind = Kind::Interval;
    p.lo = lo;
    p.hi = hi;
    return p;
}

Piece Piece::ray_below(const Rational& hi) {
    Piece p;
    p.kind = Kind::Interval;
    p.lo_unbounded = true;
    p.hi = hi;
    return p;
}

Piece Piece::ray_above(const Rational& lo) {
    Piece p;
    p.kind = Kind::Interval;
    p.hi_unbounded = true;
    p.lo = lo;
    return p;
}

Piece Piece::whole_line() {
    Piece p;
    p.kind = Kind::Interval;
    p.lo_unbounded = true;
    p.hi_unbounded = true;
    return p;
}

bool Piece::contains(const Rational& x) const {
    if (kind == Kind::Point) return x == lo;
    if (!lo_unbounded && x < lo) return false;
    if (!hi_unbounded && x > hi) return false;
    return true;
}

bool operator==(const Piece& a, const Piece& b) {
    if (a.kind != b.kind || a.lo_unbounded != b.lo_unbounded || a.hi_unbounded != b.hi_unbounded) return false;
    if (!a.lo_unbounded && a.lo != b.lo) return false;
    if (!a.hi_unbounded && a.hi != b.hi) return false;
    return true;
}

/* ------------------------------------------------------------------ */
/* SemialgSet                                                          */
/* ------------------------------------------------------------------ */

namespace {

// -1 / 0 / +1 comparison of lower bounds, -infinity smallest.
int cmp_lower(const Piece& a, const Piece& b) {
    if (a.lo_unbounded && b.lo_unbounded) return 0;
    if (a.lo_unbounded) return -1;
    if (b.lo_unbounded) return 1;
    return cmp(a.lo, b.lo);
}

// Does b touch or overlap a, assuming lower(a) <= lower(b)?
bool touches(const Piece& a, const Piece& b) {
    if (a.hi_unbounded) return true;
    if (b.lo_unbounded) return true;
    return b.lo <= a.hi;
}

}  // namespace

SemialgSet SemialgSet::from_pieces(std::vector<Piece> pieces) {
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
        int c = cmp_lower(a, b);
        if (c != 0) return c < 0;
        // tie: unbounded-above last so merging scans see the widest reach
        return !a.hi_unbounded && b.hi_unbounded;
    });
    std::vector<Piece> out;
    for (const Piece& p : pieces) {
        if (!out.empty() && touches(out.back(), p)) {
            Piece& c = out.back();
            // extend the upper end
            if (p.hi_unbounded) {
                c.hi_unbounded = true;
            } else if (!c.hi_unbounded && p.hi > c.hi) {
                c.hi = p.hi;
            }
            c.kind = (!c.lo_unbounded && !c.hi_unbounded && c.lo == c.hi) ? Piece::Kind::Point : Piece::Kind::Interval;
        } else {
            out.push_back(p);
        }
    }
    SemialgSet s;
    s.pieces_ = std::move(out);
    return s;
}

bool SemialgSet::is_compact() const {
    for (const Piece& p : pieces_)
        if (p.is_unbounded()) return false;
    return true;
}

bool SemialgSet::contains(const Rational& x) const {
    for (const Piece& p : pieces_)
        if (p.contains(x)) return true;
    return false;
}

bool SemialgSet::has_least_element() const {
    return !pieces_.empty() && !pieces_.front().lo_unbounded;
}

bool SemialgSet::has_greatest_element() const {
    return !pieces_.empty() && !pieces_.back().hi_unbounded;
}

Rational SemialgSet::least_element() const {
    if (!has_least_element()) throw std::invalid_argument("SemialgSet::least_element: none");
    return pieces_.front().lo;
}

Rational SemialgSet::greatest_element() const {
    if (!has_greatest_element()) throw std::invalid_argument("SemialgSet::greatest_element: none");
    return pieces_.back().hi;
}

/* ------------------------------------------------------------------ */
/* Descriptions                                                        */
/* ------------------------------------------------------------------ */

std::string generator_role_name(GeneratorRole role) {
    switch (role) {
        case GeneratorRole::LeastElement: return "least_element";
        case GeneratorRole::GreatestElement: return "greatest_element";
        case GeneratorRole::Gap: return "gap";
        case GeneratorRole::Other: return "other";
    }
    throw std::logic_error("generator_role_name: bad role");
}

GeneratorRole generator_role_from_name(const std::string& name) {
    if (name == "least_element") return GeneratorRole::LeastElement;
    if (name == "greatest_element") return GeneratorRole::GreatestElement;
    if (name == "gap") return GeneratorRole::Gap;
    if (name == "other") return GeneratorRole::Other;
    throw std::invalid_argument("generator_role_from_name: unknown role '" + name + "'");
}

Description Description::from_polys(const std::vector<Poly<Rational>>& polys) {
    Description d;
    d.generators.reserve(polys.size());
    for (const auto& p : polys) d.generators.push_back({p, GeneratorRole::Other, Rational(0), Rational(0)});
    return d;
}

Description natural_description(const SemialgSet& K) {
    if (K.is_empty()) throw std::invalid_argument("natural_description: empty set");
    Description d;
    const auto& ps = K.pieces();
    Poly<Rational> x = Poly<Rational>::x();
    if (K.has_least_element()) {
        Rational a = K.least_element();
        d.generators.push_back({x - Poly<Rational>::constant(a), GeneratorRole::LeastElement, Rational(0), Rational(0)});
    }
    for (size_t i = 0; i + 1 < ps.size(); ++i) {
        Rational u = ps[i].hi;      // right end of the piece before the gap
        Rational v = ps[i + 1].lo;  // left end of the piece after the gap
        Poly<Rational> g = (x - Poly<Rational>::constant(u)) * (x - Poly<Rational>::constant(v));
        d.generators.push_back({g, GeneratorRole::Gap, u, v});
    }
    if (K.has_greatest_element()) {
        Rational b = K.greatest_element();
        d.generators.push_back({Poly<Rational>::constant(b) - x, GeneratorRole::GreatestElement, Rational(0), Rational(0)});
    }
    return d;
}

bool is_saturated_description(const Description& S, const SemialgSet& K) {
    if (K.is_empty()) throw std::invalid_argument("is_saturated_description: empty set");
    if (!K.is_compact()) throw std::invalid_argument("is_saturated_description: set must be compact");
    auto endpoint_ok = [&](const Rational& pt, bool left) {
        for (const auto& gen : S.generators) {
            if (sgn(gen.poly.eval(pt)) != 0) continue;
            int ds = sgn(gen.poly.derivative().eval(pt));
            if (left && ds > 0) return true;
            if (!left && ds < 0) return true;
        }
        return false;
    };
    for (const Piece& p : K.pieces()) {
        if (!endpoint_ok(p.lo, /*left=*/true)) return false;
        if (!endpoint_ok(p.hi, /*left=*/false)) return false;
    }
    return true;
}

/* ------------------------------------------------------------------ */
/* Sturm sequences                                                     */
/* ------------------------------------------------------------------ */

namespace {

std::vector<Poly<Rational>> sturm_chain(const Poly<Rational>& p) {
    std::vector<Poly<Rational>> chain;
    chain.push_back(p);
    Poly<Rational> d = p.derivative();
    if (d.is_zero()) return chain;
    chain.push_back(d);
    while (true) {
        Poly<Rational> r = chain[chain.size() - 2].divmod(chain.back()).second;
        if (r.is_zero()) break;
        chain.push_back(-r);
    }
    return chain;
}

int sign_variations_at(const std::vector<Poly<Rational>>& chain, const Rational& x) {
    int count = 0, prev = 0;
    for (const auto& q : chain) {
        int s = sgn(q.eval(x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

// Strict bound B with every real root in (-B, B).
Rational cauchy_root_bound(const Poly<Rational>& p) {
    Rational m(0);
    Rational lead = abs(p.leading());
    for (int k = 0; k < p.degree(); ++k) {
        Rational a = abs(p.coeff(k)) / lead;
        if (a > m) m = a;
    }
    return m + 1;
}

// All positive divisors of |n|, or incomplete if the trial-division budget
// runs out.
std::vector<mpz_class> bounded_divisors(mpz_class n, long iter_cap, bool* complete) {
    n = abs(n);
    std::vector<mpz_class> divs;
    if (n == 0) { *complete = false; return divs; }
    mpz_class i(1);
    long iters = 0;
    while (i * i <= n) {
        if (++iters > iter_cap) { *complete = false; return divs; }
        if (n % i == 0) {
            divs.push_back(i);
            mpz_class other = n / i;
            if (other != i) divs.push_back(other);
        }
        ++i;
    }
    return divs;
}

// Candidate rational roots p/q of an integer polynomial: p | a0, q | alead.
std::vector<Rational> rational_root_candidates(const Poly<Rational>& p, bool* complete) {
    // clear denominators
    mpz_class den_lcm(1);
    for (int k = 0; k <= p.degree(); ++k) {
        mpz_class d = p.coeff(k).get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
        den_lcm = den_lcm / g * d;
    }
    std::vector<mpz_class> ic(static_cast<size_t>(p.degree()) + 1);
    for (int k = 0; k <= p.degree(); ++k) {
        Rational c = p.coeff(k) * Rational(den_lcm);
        ic[static_cast<size_t>(k)] = c.get_num();
    }
    const mpz_class a0 = ic.front();  // caller guarantees nonzero
    const mpz_class an = ic.back();
    constexpr long kTrialCap = 200000;
    constexpr size_t kCandidateCap = 50000;
    std::vector<mpz_class> dn = bounded_divisors(a0, kTrialCap, complete);
    std::vector<mpz_class> dd = bounded_divisors(an, kTrialCap, complete);
    std::set<Rational> cands;
    for (const auto& num : dn) {
        for (const auto& den : dd) {
            Rational r(num, den);
            r.canonicalize();
            cands.insert(r);
            cands.insert(-r);
            if (cands.size() > kCandidateCap) { *complete = false; break; }
        }
        if (cands.size() > kCandidateCap) break;
    }
    return {cands.begin(), cands.end()};
}

}  // namespace

int count_roots_in(const Poly<Rational>& p, const Rational& a, const Rational& b) {
    if (p.is_zero()) throw std::invalid_argument("count_roots_in: zero polynomial");
    if (a >= b) throw std::invalid_argument("count_roots_in: requires a < b");
    if (sgn(p.eval(a)) == 0 || sgn(p.eval(b)) == 0)
        throw std::invalid_argument("count_roots_in: endpoints must not be roots");
    auto chain = sturm_chain(p);
    return sign_variations_at(chain, a) - sign_variations_at(chain, b);
}

void refine_root_interval(const Poly<Rational>& p, Rational& lo, Rational& hi) {
    int slo = sgn(p.eval(lo));
    if (slo == 0 || sgn(p.eval(hi)) == 0 || slo * sgn(p.eval(hi)) > 0)
        throw std::invalid_argument("refine_root_interval: requires a sign change on (lo, hi)");
    // Pick an interior split point that is not a root; a handful of evenly
    // spaced candidates always contains one because p has finitely many roots.
    const int kSlots = std::max(4, p.degree() + 2);
    for (int k = 1; k < kSlots; ++k) {
        Rational m = lo + (hi - lo) * Rational(k) / Rational(kSlots);
        int sm = sgn(p.eval(m));
        if (sm == 0) continue;
        if (sm == slo) lo = m; else hi = m;
        return;
    }
    throw std::runtime_error("refine_root_interval: no usable split point");
}

RootIsolation isolate_real_roots(const Poly<Rational>& p_in) {
    if (p_in.is_zero()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
    RootIsolation out;
    Poly<Rational> p = squarefree_part(p_in);
    std::vector<Rational> rational_roots;

    if (p.degree() >= 1 && sgn(p.coeff(0)) == 0) {
        rational_roots.push_back(Rational(0));
        p = p.divmod(Poly<Rational>::x()).first;
    }
    if (p.degree() >= 1) {
        bool complete = true;
        std::vector<Rational> cands = rational_root_candidates(p, &complete);
        out.certification_complete = complete;
        for (const Rational& c : cands) {
            if (p.degree() < 1) break;
            if (sgn(p.eval(c)) == 0) {
                rational_roots.push_back(c);
                Poly<Rational> lin(std::vector<Rational>{-c, Rational(1)});
                p = p.divmod(lin).first;
            }
        }
    }

    struct Enclosure { Rational lo, hi; };
    std::vector<Enclosure> intervals;
    if (p.degree() >= 1) {
        Rational B = cauchy_root_bound(p);
        auto chain = sturm_chain(p);
        struct Task { Rational a, b; int count; };
        std::vector<Task> stack;
        int total = sign_variations_at(chain, -B) - sign_variations_at(chain, B);
        if (total > 0) stack.push_back({-B, B, total});
        while (!stack.empty()) {
            Task t = stack.back();
            stack.pop_back();
            if (t.count == 1) {
                intervals.push_back({t.a, t.b});
                continue;
            }
            // split at a non-root interior point
            Rational m;
            bool found = false;
            const int kSlots = std::max(4, p.degree() + 2);
            for (int k = 1; k < kSlots; ++k) {
                Rational cand = t.a + (t.b - t.a) * Rational(k) / Rational(kSlots);
                if (sgn(p.eval(cand)) != 0) { m = cand; found = true; break; }
                // A rational root slipped past certification: record and deflate.
                rational_roots.push_back(cand);
                Poly<Rational> lin(std::vector<Rational>{-cand, Rational(1)});
                p = p.divmod(lin).first;
                chain = sturm_chain(p);
                out.certification_complete = false;
            }
            if (!found) throw std::runtime_error("isolate_real_roots: no usable split point");
            int left = sign_variations_at(chain, t.a) - sign_variations_at(chain, m);
            int right = sign_variations_at(chain, m) - sign_variations_at(chain, t.b);
            if (left > 0) stack.push_back({t.a, m, left});
            if (right > 0) stack.push_back({m, t.b, right});
        }
    }
    out.irrational_part = p.degree() >= 1 ? p : Poly<Rational>::constant(Rational(1));

    // Shrink enclosures until they avoid all rational roots; bisection-tree
    // leaves are already pairwise disjoint.
    for (auto& e : intervals) {
        for (const Rational& r : rational_roots) {
            while (r > e.lo && r < e.hi) refine_root_interval(out.irrational_part, e.lo, e.hi);
        }
    }

    std::vector<IsolatedRoot> roots;
    for (const Rational& r : rational_roots) {
        IsolatedRoot ir;
        ir.is_rational = true;
        ir.value = r;
        ir.lo = r;
        ir.hi = r;
        roots.push_back(ir);
    }
    for (const auto& e : intervals) {
        IsolatedRoot ir;
        ir.is_rational = false;
        ir.lo = e.lo;
        ir.hi = e.hi;
        roots.push_back(ir);
    }
    std::sort(roots.begin(), roots.end(), [](const IsolatedRoot& a, const IsolatedRoot& b) {
        return a.lo + a.hi < b.lo + b.hi;  // midpoints; enclosures are disjoint
    });
    out.roots = std::move(roots);
    return out;
}

/* ------------------------------------------------------------------ */
/* realize                                                             */
/* ------------------------------------------------------------------ */

namespace {

// Exact sign of g at the root described by ir (a root of radical Q when
// irrational).  Refines ir's enclosure as needed.
int sign_at_root(const Poly<Rational>& g, IsolatedRoot& ir, const Poly<Rational>& Q) {
    if (ir.is_rational) return sgn(g.eval(ir.value));
    Poly<Rational> gsf = squarefree_part(g);
    Poly<Rational> common = poly_gcd(Q, gsf);
    if (common.degree() >= 1 && sgn(common.eval(ir.lo)) * sgn(common.eval(ir.hi)) < 0)
        return 0;  // the root is shared with g
    for (int iter = 0; iter < 20000; ++iter) {
        int sa = sgn(gsf.eval(ir.lo));
        int sb = sgn(gsf.eval(ir.hi));
        if (sa != 0 && sb != 0 && count_roots_in(gsf, ir.lo, ir.hi) == 0)
            return sgn(g.eval(ir.lo));
        refine_root_interval(Q, ir.lo, ir.hi);
    }
    throw std::runtime_error("sign_at_root: failed to separate root from the generator's roots");
}

}  // namespace

SemialgSet realize(const std::vector<Poly<Rational>>& gens, const RealizeOptions& opts) {
    bool infeasible_constant = false;
    std::vector<Poly<Rational>> work;
    for (const auto& g : gens) {
        if (g.is_zero()) continue;  // vacuous constraint 0 >= 0
        if (g.degree() == 0) {
            if (sgn(g.coeff(0)) < 0) infeasible_constant = true;
            continue;
        }
        work.push_back(g);
    }
    if (infeasible_constant) return SemialgSet::empty_set();
    if (work.empty()) return SemialgSet::real_line();

    Poly<Rational> radical = Poly<Rational>::constant(Rational(1));
    for (const auto& g : work) radical = radical * squarefree_part(g);
    radical = squarefree_part(radical);

    RootIsolation iso = isolate_real_roots(radical);
    const Poly<Rational>& Q = iso.irrational_part;
    auto& roots = iso.roots;
    const size_t m = roots.size();

    // Enforce strict separation between consecutive enclosures so that
    // in-between sample points are guaranteed to lie strictly between roots.
    for (size_t i = 0; i + 1 < m; ++i) {
        while (!(roots[i].hi < roots[i + 1].lo)) {
            if (!roots[i].is_rational) refine_root_interval(Q, roots[i].lo, roots[i].hi);
            else if (!roots[i + 1].is_rational) refine_root_interval(Q, roots[i + 1].lo, roots[i + 1].hi);
            else throw std::runtime_error("realize: duplicate rational roots after radical");
        }
    }

    // Sample points: one per open region between consecutive roots plus the
    // two outer rays.
    std::vector<Rational> samples(m + 1);
    if (m == 0) {
        samples[0] = Rational(0);
    } else {
        samples[0] = roots.front().lo - 1;
        for (size_t i = 0; i + 1 < m; ++i) samples[i + 1] = (roots[i].hi + roots[i + 1].lo) / 2;
        samples[m] = roots.back().hi + 1;
    }

    std::vector<bool> region_ok(m + 1, true);
    for (size_t i = 0; i <= m; ++i)
        for (const auto& g : work)
            if (sgn(g.eval(samples[i])) < 0) { region_ok[i] = false; break; }

    std::vector<bool> root_ok(m, true);
    for (size_t i = 0; i < m; ++i)
        for (const auto& g : work)
            if (sign_at_root(g, roots[i], Q) < 0) { root_ok[i] = false; break; }

    // Emit an endpoint value, snapping or refusing irrational roots.
    auto endpoint_value = [&](size_t root_idx) -> Rational {
        IsolatedRoot& r = roots[root_idx];
        if (r.is_rational) return r.value;
        if (!opts.snap_irrational)
            throw std::domain_error("realize: boundary point cannot be certified rational; enable snapping to approximate it");
        while (r.hi - r.lo >= opts.snap_width) refine_root_interval(Q, r.lo, r.hi);
        return (r.lo + r.hi) / 2;
    };

    // Walk the alternating sequence region_0, root_1, region_1, ...
    // positions 0..2m: even = region idx/2, odd = root (idx-1)/2.
    auto flag_at = [&](size_t pos) { return pos % 2 == 0 ? region_ok[pos / 2] : root_ok[(pos - 1) / 2]; };
    std::vector<Piece> pieces;
    size_t pos = 0;
    const size_t npos = 2 * m + 1;
    while (pos < npos) {
        if (!flag_at(pos)) { ++pos; continue; }
        size_t start = pos;
        while (pos < npos && flag_at(pos)) ++pos;
        size_t end = pos - 1;  // inclusive
        // A maximal run must start and end at a root position unless it
        // reaches an outer region; anything else contradicts continuity.
        bool lo_unbounded = (start == 0);
        bool hi_unbounded = (end == npos - 1);
        if (!lo_unbounded && start % 2 == 0)
            throw std::runtime_error("realize: sign analysis inconsistency (open region without boundary)");
        if (!hi_unbounded && end % 2 == 0)
            throw std::runtime_error("realize: sign analysis inconsistency (open region without boundary)");
        if (lo_unbounded && hi_unbounded) {
            pieces.push_back(Piece::whole_line());
        } else if (lo_unbounded) {
            pieces.push_back(Piece::ray_below(endpoint_value((end - 1) / 2)));
        } else if (hi_unbounded) {
            pieces.push_back(Piece::ray_above(endpoint_value((start - 1) / 2)));
        } else {
            Rational a = endpoint_value((start - 1) / 2);
            if (start == end) {
                pieces.push_back(Piece::point(a));
            } else {
                pieces.push_back(Piece::interval(a, endpoint_value((end - 1) / 2)));
            }
        }
    }
    return SemialgSet::from_pieces(std::move(pieces));
}

SemialgSet realize(const Description& S, const RealizeOptions& opts) {
    std::vector<Poly<Rational>> polys;
    polys.reserve(S.generators.size());
    for (const auto& g : S.generators) polys.push_back(g.poly);
    return realize(polys, opts);
}

/* ------------------------------------------------------------------ */
/* classify                                                            */
/* ------------------------------------------------------------------ */

std::string class_label_name(ClassLabel label) {
    switch (label) {
        case ClassLabel::Bounded: return "Bounded";
        case ClassLabel::UnboundedInterval: return "UnboundedInterval";
        case ClassLabel::UnboundedIntervalPlusOnePoint: return "UnboundedIntervalPlusOnePoint";
        case ClassLabel::UnboundedIntervalPlusManyPoints: return "UnboundedIntervalPlusManyPoints";
        case ClassLabel::TwoUnboundedIntervals: return "TwoUnboundedIntervals";
        case ClassLabel::TwoUnboundedIntervalsPlusOnePoint: return "TwoUnboundedIntervalsPlusOnePoint";
        case ClassLabel::TwoUnboundedIntervalsPlusManyPoints: return "TwoUnboundedIntervalsPlusManyPoints";
        case ClassLabel::MixedBoundedUnboundedIntervals: return "MixedBoundedUnboundedIntervals";
    }
    throw std::logic_error("class_label_name: bad label");
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "Yes";
        case Verdict::No: return "No";
        case Verdict::Conjecture: return "Conjecture";
    }
    throw std::logic_error("verdict_name: bad verdict");
}

Classification classify(const SemialgSet& K) {
    if (K.is_empty()) throw std::invalid_argument("classify: empty set");
    int unbounded = 0, bounded_intervals = 0, points = 0;
    for (const Piece& p : K.pieces()) {
        if (p.is_unbounded()) ++unbounded;
        else if (p.kind == Piece::Kind::Interval) ++bounded_intervals;
        else ++points;
    }
    if (unbounded == 0) return {ClassLabel::Bounded, Verdict::Yes};
    if (bounded_intervals > 0) return {ClassLabel::MixedBoundedUnboundedIntervals, Verdict::No};
    if (unbounded == 1) {
        if (points == 0) return {ClassLabel::UnboundedInterval, Verdict::Yes};
        if (points == 1) return {ClassLabel::UnboundedIntervalPlusOnePoint, Verdict::Conjecture};
        return {ClassLabel::UnboundedIntervalPlusManyPoints, Verdict::No};
    }
    // canonical form admits at most two unbounded pieces
    if (points == 0) return {ClassLabel::TwoUnboundedIntervals, Verdict::Yes};
    if (points == 1) return {ClassLabel::TwoUnboundedIntervalsPlusOnePoint, Verdict::Conjecture};
    return {ClassLabel::TwoUnboundedIntervalsPlusManyPoints, Verdict::No};
}

}  // namespace psdg
