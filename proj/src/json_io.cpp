#include "psdg/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace psdg {

namespace {

/* ------------------------------------------------------------------ */
/* Dumping                                                             */
/* ------------------------------------------------------------------ */

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (ch < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += static_cast<char>(ch);  // UTF-8 passes through raw
                }
        }
    }
    out += '"';
}

void append_double(std::string& out, double v, int digits) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    out += buf;
    // "%g" of an integral value prints no decimal point; keep it a float on
    // re-parse so dump(parse(dump(x))) is the identity.
    std::string_view sv(buf);
    if (sv.find('.') == std::string_view::npos && sv.find('e') == std::string_view::npos &&
        sv.find("inf") == std::string_view::npos && sv.find("nan") == std::string_view::npos)
        out += ".0";
}

void append_indent(std::string& out, int depth) { out.append(2 * static_cast<size_t>(depth), ' '); }

void dump_rec(std::string& out, const Json& j, bool compact, int digits, int depth) {
    switch (j.type()) {
        case Json::value_t::null:
            out += "null";
            return;
        case Json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            return;
        case Json::value_t::number_integer:
            out += std::to_string(j.get<long long>());
            return;
        case Json::value_t::number_unsigned:
            out += std::to_string(j.get<unsigned long long>());
            return;
        case Json::value_t::number_float:
            append_double(out, j.get<double>(), digits);
            return;
        case Json::value_t::string:
            append_escaped(out, j.get_ref<const std::string&>());
            return;
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const Json& item : j) {
                if (!first) out += compact ? "," : ",";
                if (!compact) {
                    out += '\n';
                    append_indent(out, depth + 1);
                }
                dump_rec(out, item, compact, digits, depth + 1);
                first = false;
            }
            if (!compact) {
                out += '\n';
                append_indent(out, depth);
            }
            out += ']';
            return;
        }
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",";
                if (!compact) {
                    out += '\n';
                    append_indent(out, depth + 1);
                }
                append_escaped(out, it.key());
                out += compact ? ":" : ": ";
                dump_rec(out, it.value(), compact, digits, depth + 1);
                first = false;
            }
            if (!compact) {
                out += '\n';
                append_indent(out, depth);
            }
            out += '}';
            return;
        }
        default:
            out += "null";
            return;
    }
}

/* ------------------------------------------------------------------ */
/* Scalar parsing helpers                                              */
/* ------------------------------------------------------------------ */

Rational rational_scalar(const Json& v, const std::string& where, bool allow_float) {
    if (v.is_string()) {
        try {
            return rational_from_string(v.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + ": " + e.what());
        }
    }
    if (v.is_number_integer()) return Rational(static_cast<long>(v.get<long long>()));
    if (v.is_number_unsigned()) return rational_from_string(std::to_string(v.get<unsigned long long>()));
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw std::invalid_argument(where + ": non-finite number");
        if (!allow_float)
            throw std::invalid_argument(where +
                                        ": non-integer number in \"exact\" mode; "
                                        "use a rational string \"p/q\" or mode \"float\"");
        Rational q(d);  // exact dyadic value of the double
        q.canonicalize();
        return q;
    }
    throw std::invalid_argument(where + ": expected a rational string or a number");
}

double double_scalar(const Json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return to_double(rational_from_string(v.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + ": " + e.what());
        }
    }
    if (v.is_number()) return v.get<double>();
    throw std::invalid_argument(where + ": expected a number or a rational string");
}

// coeffs[m][row][col] = [re, im]; shape and entry arity are validated here.
template <typename S, typename EntryParser>
MatrixPoly<S> matrix_poly_from_json_impl(const Json& j, EntryParser parse_entry) {
    const std::string where = "matrix polynomial";
    if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    const int n = json_int(j, "n", where);
    if (n <= 0) throw std::invalid_argument(where + ": field 'n' must be a positive integer");
    const std::string mode = json_string(j, "mode", where);
    if (mode != "exact" && mode != "float")
        throw std::invalid_argument(where + ": field 'mode' must be \"exact\" or \"float\"");
    const Json& coeffs = json_field(j, "coeffs", where);
    if (!coeffs.is_array() || coeffs.empty())
        throw std::invalid_argument(where + ": field 'coeffs' must be a non-empty array");

    const bool allow_float = mode == "float";
    std::vector<Mat<S>> cs;
    cs.reserve(coeffs.size());
    for (size_t m = 0; m < coeffs.size(); ++m) {
        const Json& cm = coeffs[m];
        const std::string pm = "coeffs[" + std::to_string(m) + "]";
        if (!cm.is_array() || static_cast<int>(cm.size()) != n)
            throw std::invalid_argument(where + ": " + pm + " must be an array of " +
                                        std::to_string(n) + " rows");
        Mat<S> c(n, n);
        for (int r = 0; r < n; ++r) {
            const Json& row = cm[r];
            const std::string pr = pm + "[" + std::to_string(r) + "]";
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw std::invalid_argument(where + ": " + pr + " must be an array of " +
                                            std::to_string(n) + " entries");
            for (int col = 0; col < n; ++col) {
                const Json& entry = row[col];
                const std::string pe = pr + "[" + std::to_string(col) + "]";
                if (!entry.is_array() || entry.size() != 2)
                    throw std::invalid_argument(where + ": " + pe + " must be a pair [re, im]");
                c(r, col) = parse_entry(entry[0], entry[1], pe, allow_float);
            }
        }
        cs.push_back(std::move(c));
    }
    return MatrixPoly<S>(std::move(cs));
}

Json rational_pair_json(const Rational& re, const Rational& im) {
    return Json::array({rational_to_string(re), rational_to_string(im)});
}

template <typename PolyLike>
Json square_matrix_poly_json(const PolyLike& f, const char* mode) {
    if (f.rows() == 0 || f.cols() == 0)
        throw std::invalid_argument("matrix_poly_to_json: empty matrix polynomial");
    if (f.rows() != f.cols())
        throw std::invalid_argument("matrix_poly_to_json: only square matrix polynomials serialize");
    Json j;
    j["n"] = f.rows();
    j["mode"] = mode;
    j["coeffs"] = Json::array();
    const int top = std::max(0, f.degree());
    for (int m = 0; m <= top; ++m) {
        const auto coeff_m = f.coeff(m);
        Json cm = Json::array();
        for (int r = 0; r < f.rows(); ++r) {
            Json row = Json::array();
            for (int c = 0; c < f.cols(); ++c) {
                const auto e = coeff_m(r, c);
                if constexpr (std::is_same_v<std::decay_t<decltype(e)>, Gaussian>) {
                    row.push_back(rational_pair_json(e.re, e.im));
                } else {
                    row.push_back(Json::array({e.real(), e.imag()}));
                }
            }
            cm.push_back(std::move(row));
        }
        j["coeffs"].push_back(std::move(cm));
    }
    return j;
}

/* ------------------------------------------------------------------ */
/* Piece helpers                                                       */
/* ------------------------------------------------------------------ */

Json piece_to_json(const Piece& p) {
    Json j;
    if (p.kind == Piece::Kind::Point) {
        j["point"] = rational_to_string(p.lo);
        return j;
    }
    j["lo"] = p.lo_unbounded ? Json("-inf") : Json(rational_to_string(p.lo));
    j["hi"] = p.hi_unbounded ? Json("+inf") : Json(rational_to_string(p.hi));
    return j;
}

Piece piece_from_json(const Json& j, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    if (j.contains("point")) return Piece::point(rational_scalar(j.at("point"), where + ".point", true));
    const Json& lo = json_field(j, "lo", where);
    const Json& hi = json_field(j, "hi", where);
    const bool lo_inf = lo.is_string() && lo.get<std::string>() == "-inf";
    const bool hi_inf = hi.is_string() && hi.get<std::string>() == "+inf";
    if (lo_inf && hi_inf) return Piece::whole_line();
    if (lo_inf) return Piece::ray_below(rational_scalar(hi, where + ".hi", true));
    if (hi_inf) return Piece::ray_above(rational_scalar(lo, where + ".lo", true));
    const Rational a = rational_scalar(lo, where + ".lo", true);
    const Rational b = rational_scalar(hi, where + ".hi", true);
    if (a == b) return Piece::point(a);  // degenerate interval collapses
    return Piece::interval(a, b);
}

Json points_pairs_json(const std::vector<std::pair<Rational, Rational>>& pts) {
    Json arr = Json::array();
    for (const auto& [x, v] : pts) arr.push_back(rational_pair_json(x, v));
    return arr;
}

Json fk_fact_json(const FkPsdFact& f) {
    Json j;
    j["name"] = f.name;
    j["pass"] = f.pass;
    j["points"] = points_pairs_json(f.points);
    j["note"] = f.note;
    return j;
}

}  // namespace

/* ------------------------------------------------------------------ */
/* Dumping                                                             */
/* ------------------------------------------------------------------ */

std::string json_dump(const Json& j, bool compact, int float_digits) {
    if (float_digits < 1) float_digits = 1;
    if (float_digits > 30) float_digits = 30;
    std::string out;
    dump_rec(out, j, compact, float_digits, 0);
    return out;
}

/* ------------------------------------------------------------------ */
/* Field access                                                        */
/* ------------------------------------------------------------------ */

const Json& json_field(const Json& j, const std::string& name, const std::string& where) {
    if (!j.is_object())
        throw std::invalid_argument(where + ": expected a JSON object with field '" + name + "'");
    auto it = j.find(name);
    if (it == j.end()) throw std::invalid_argument(where + ": missing field '" + name + "'");
    return *it;
}

std::string json_string(const Json& j, const std::string& name, const std::string& where) {
    const Json& v = json_field(j, name, where);
    if (!v.is_string()) throw std::invalid_argument(where + ": field '" + name + "' must be a string");
    return v.get<std::string>();
}

int json_int(const Json& j, const std::string& name, const std::string& where) {
    const Json& v = json_field(j, name, where);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw std::invalid_argument(where + ": field '" + name + "' must be an integer");
    return static_cast<int>(v.get<long long>());
}

double json_double(const Json& j, const std::string& name, const std::string& where) {
    const Json& v = json_field(j, name, where);
    if (!v.is_number())
        throw std::invalid_argument(where + ": field '" + name + "' must be a number");
    return v.get<double>();
}

bool json_bool(const Json& j, const std::string& name, const std::string& where) {
    const Json& v = json_field(j, name, where);
    if (!v.is_boolean())
        throw std::invalid_argument(where + ": field '" + name + "' must be a boolean");
    return v.get<bool>();
}

/* ------------------------------------------------------------------ */
/* Scalars                                                             */
/* ------------------------------------------------------------------ */

Rational rational_from_json(const Json& j, const std::string& where) {
    return rational_scalar(j, where, true);
}

/* ------------------------------------------------------------------ */
/* Matrix polynomials                                                  */
/* ------------------------------------------------------------------ */

Json matrix_poly_to_json(const MatrixPoly<Gaussian>& f) { return square_matrix_poly_json(f, "exact"); }

Json matrix_poly_to_json(const MatrixPoly<std::complex<double>>& f) {
    return square_matrix_poly_json(f, "float");
}

MatrixPoly<Gaussian> matrix_poly_exact_from_json(const Json& j) {
    return matrix_poly_from_json_impl<Gaussian>(
        j, [](const Json& re, const Json& im, const std::string& pe, bool allow_float) {
            return Gaussian(rational_scalar(re, pe + "[0]", allow_float),
                            rational_scalar(im, pe + "[1]", allow_float));
        });
}

MatrixPoly<std::complex<double>> matrix_poly_float_from_json(const Json& j) {
    return matrix_poly_from_json_impl<std::complex<double>>(
        j, [](const Json& re, const Json& im, const std::string& pe, bool) {
            return std::complex<double>(double_scalar(re, pe + "[0]"), double_scalar(im, pe + "[1]"));
        });
}

Json poly_to_json(const Poly<Gaussian>& p) {
    std::vector<Mat<Gaussian>> cs;
    const int top = std::max(0, p.degree());
    for (int m = 0; m <= top; ++m) {
        Mat<Gaussian> c(1, 1);
        c(0, 0) = p.coeff(m);
        cs.push_back(std::move(c));
    }
    return matrix_poly_to_json(MatrixPoly<Gaussian>(std::move(cs)));
}

Json poly_to_json(const Poly<Rational>& p) {
    std::vector<Mat<Gaussian>> cs;
    const int top = std::max(0, p.degree());
    for (int m = 0; m <= top; ++m) {
        Mat<Gaussian> c(1, 1);
        c(0, 0) = Gaussian(p.coeff(m), Rational(0));
        cs.push_back(std::move(c));
    }
    return matrix_poly_to_json(MatrixPoly<Gaussian>(std::move(cs)));
}

Poly<Rational> poly_rational_from_json(const Json& j) {
    const MatrixPoly<Gaussian> f = matrix_poly_exact_from_json(j);
    if (f.rows() != 1 || f.cols() != 1)
        throw std::invalid_argument("polynomial: field 'n' must be 1 for a scalar polynomial");
    std::vector<Rational> cs;
    const int top = std::max(0, f.degree());
    for (int m = 0; m <= top; ++m) {
        const Gaussian g = f.coeff(m)(0, 0);
        if (!g.is_real())
            throw std::invalid_argument("polynomial: coefficient " + std::to_string(m) +
                                        " must be real (field 'coeffs')");
        cs.push_back(g.re);
    }
    return Poly<Rational>(std::move(cs));
}

/* ------------------------------------------------------------------ */
/* Sets and descriptions                                               */
/* ------------------------------------------------------------------ */

Json semialg_to_json(const SemialgSet& K) {
    Json j;
    j["pieces"] = Json::array();
    for (const Piece& p : K.pieces()) j["pieces"].push_back(piece_to_json(p));
    return j;
}

SemialgSet semialg_from_json(const Json& j) {
    const std::string where = "set";
    const Json& pieces = json_field(j, "pieces", where);
    if (!pieces.is_array()) throw std::invalid_argument(where + ": field 'pieces' must be an array");
    std::vector<Piece> ps;
    ps.reserve(pieces.size());
    for (size_t i = 0; i < pieces.size(); ++i)
        ps.push_back(piece_from_json(pieces[i], where + ".pieces[" + std::to_string(i) + "]"));
    return SemialgSet::from_pieces(std::move(ps));
}

Json description_to_json(const Description& S) {
    Json j;
    j["generators"] = Json::array();
    for (const DescGenerator& g : S.generators) {
        Json gj;
        gj["poly"] = poly_to_json(g.poly);
        gj["role"] = generator_role_name(g.role);
        if (g.role == GeneratorRole::Gap) {
            gj["gap_lo"] = rational_to_string(g.gap_lo);
            gj["gap_hi"] = rational_to_string(g.gap_hi);
        }
        j["generators"].push_back(std::move(gj));
    }
    return j;
}

Description description_from_json(const Json& j) {
    const std::string where = "description";
    const Json& gens = json_field(j, "generators", where);
    if (!gens.is_array())
        throw std::invalid_argument(where + ": field 'generators' must be an array");
    Description S;
    for (size_t i = 0; i < gens.size(); ++i) {
        const std::string wg = where + ".generators[" + std::to_string(i) + "]";
        const Json& gj = gens[i];
        DescGenerator g;
        g.poly = poly_rational_from_json(json_field(gj, "poly", wg));
        try {
            g.role = generator_role_from_name(json_string(gj, "role", wg));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(wg + ": " + e.what());
        }
        if (g.role == GeneratorRole::Gap) {
            g.gap_lo = rational_scalar(json_field(gj, "gap_lo", wg), wg + ".gap_lo", true);
            g.gap_hi = rational_scalar(json_field(gj, "gap_hi", wg), wg + ".gap_hi", true);
        }
        S.generators.push_back(std::move(g));
    }
    return S;
}

/* ------------------------------------------------------------------ */
/* Dense complex matrices                                              */
/* ------------------------------------------------------------------ */

Json cmatrix_to_json(const Eigen::MatrixXcd& m) {
    Json j = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        j.push_back(std::move(row));
    }
    return j;
}

Eigen::MatrixXcd cmatrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) throw std::invalid_argument(where + ": expected an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXcd(0, 0);
    if (!j[0].is_array()) throw std::invalid_argument(where + "[0]: expected an array");
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<size_t>(r)];
        const std::string pr = where + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument(pr + ": ragged matrix row");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& e = row[static_cast<size_t>(c)];
            const std::string pe = pr + "[" + std::to_string(c) + "]";
            if (!e.is_array() || e.size() != 2)
                throw std::invalid_argument(pe + ": must be a pair [re, im]");
            m(r, c) = std::complex<double>(double_scalar(e[0], pe + "[0]"),
                                           double_scalar(e[1], pe + "[1]"));
        }
    }
    return m;
}

/* ------------------------------------------------------------------ */
/* Certificates and reports                                            */
/* ------------------------------------------------------------------ */

Json certificate_to_json(const Certificate& c) {
    Json j;
    j["S"] = description_to_json(c.S);
    j["n"] = c.n;
    j["d"] = c.d;
    j["mode"] = trunc_mode_name(c.mode);
    j["blocks"] = Json::array();
    for (const CertificateBlock& b : c.blocks) {
        Json bj;
        bj["e"] = Json(b.e);
        bj["Q"] = cmatrix_to_json(b.gram);
        bj["clip"] = b.clip;
        j["blocks"].push_back(std::move(bj));
    }
    j["residual"] = c.residual;
    return j;
}

Certificate certificate_from_json(const Json& j) {
    const std::string where = "certificate";
    Certificate c;
    c.S = description_from_json(json_field(j, "S", where));
    c.n = json_int(j, "n", where);
    c.d = json_int(j, "d", where);
    try {
        c.mode = trunc_mode_from_name(json_string(j, "mode", where));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + ".mode: " + e.what());
    }
    const Json& blocks = json_field(j, "blocks", where);
    if (!blocks.is_array()) throw std::invalid_argument(where + ": field 'blocks' must be an array");
    for (size_t i = 0; i < blocks.size(); ++i) {
        const std::string wb = where + ".blocks[" + std::to_string(i) + "]";
        const Json& bj = blocks[i];
        CertificateBlock b;
        const Json& e = json_field(bj, "e", wb);
        if (!e.is_array()) throw std::invalid_argument(wb + ": field 'e' must be an array");
        for (const Json& v : e) {
            if (!v.is_number_integer() && !v.is_number_unsigned())
                throw std::invalid_argument(wb + ": field 'e' must hold integers");
            b.e.push_back(static_cast<int>(v.get<long long>()));
        }
        b.gram = cmatrix_from_json(json_field(bj, "Q", wb), wb + ".Q");
        b.clip = json_double(bj, "clip", wb);
        c.blocks.push_back(std::move(b));
    }
    c.residual = json_double(j, "residual", where);
    return c;
}

Json membership_report_to_json(const MembershipReport& r) {
    Json j;
    j["status"] = membership_status_name(r.status);
    if (r.status == MembershipStatus::Member) j["certificate"] = certificate_to_json(r.certificate);
    if (r.status == MembershipStatus::NotMemberAtDegree) j["witness"] = Json(r.witness);
    j["note"] = r.note;
    return j;
}

Json fejer_riesz_to_json(const FejerRieszResult& r) {
    Json j;
    j["status"] = "FACTORED";
    j["factor"] = matrix_poly_to_json(r.factor);
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    return j;
}

Json two_unbounded_to_json(const TwoUnboundedResult& r) {
    Json j;
    j["status"] = "FACTORED";
    j["G"] = matrix_poly_to_json(r.G);
    j["H"] = matrix_poly_to_json(r.H);
    j["residual"] = r.residual;
    j["membership_degree"] = r.membership_degree;
    return j;
}

Json denominator_result_to_json(const DenominatorResult& r) {
    Json j;
    j["status"] = r.found ? "FOUND" : "EXHAUSTED";
    j["found"] = r.found;
    if (r.found) {
        j["k"] = r.k;
        j["d_used"] = r.d_used;
        j["certificate"] = certificate_to_json(r.certificate);
    }
    j["attempts"] = Json::array();
    for (const DenominatorAttempt& a : r.attempts) {
        Json aj;
        aj["k"] = a.k;
        aj["d"] = a.d;
        aj["status"] = membership_status_name(a.status);
        j["attempts"].push_back(std::move(aj));
    }
    j["note"] = r.note;
    return j;
}

Json certificate_plan_to_json(const CertificatePlan& p) {
    Json j;
    j["h"] = poly_to_json(p.h);
    j["target"] = matrix_poly_to_json(p.target);
    Json cone;
    cone["S"] = description_to_json(p.cone.S);
    cone["n"] = p.cone.n;
    cone["d"] = p.cone.d;
    cone["mode"] = trunc_mode_name(p.cone.mode);
    j["cone"] = std::move(cone);
    j["certificate"] = certificate_to_json(p.certificate);
    j["levels"] = Json::array();
    for (const ReductionLevel& lvl : p.levels) {
        Json lj;
        lj["size"] = lvl.size;
        lj["c"] = poly_to_json(lvl.c);
        lj["m"] = lvl.m;
        lj["pivot_case"] = pivot_case_name(lvl.pivot.kase);
        lj["k0"] = lvl.pivot.k0;
        lj["l0"] = lvl.pivot.l0;
        lj["pivot"] = poly_to_json(lvl.pivot.pivot);
        lj["pivot_scalar"] = poly_to_json(lvl.pivot_scalar);
        lj["congruence"] = matrix_poly_to_json(lvl.congruence);
        lj["d"] = poly_to_json(lvl.d);
        lj["D"] = matrix_poly_to_json(lvl.D);
        lj["h_level"] = poly_to_json(lvl.h_level);
        lj["scalar_certificate"] = certificate_to_json(lvl.scalar_certificate);
        j["levels"].push_back(std::move(lj));
    }
    return j;
}

Json classification_to_json(const Classification& c) {
    Json j;
    j["label"] = class_label_name(c.label);
    j["saturated"] = verdict_name(c.verdict);
    return j;
}

/* ------------------------------------------------------------------ */
/* The counterexample family                                           */
/* ------------------------------------------------------------------ */

Json fk_conditions_to_json(const FkConditions& c) {
    Json j;
    j["k"] = rational_to_string(c.k);
    j["k_positive"] = c.k_positive;
    j["dsq"] = rational_to_string(c.dsq);
    j["dsq_positive"] = c.dsq_positive;
    j["vertex_value"] = rational_to_string(c.vertex_value);
    j["vertex_positive"] = c.vertex_positive;
    j["all"] = c.all();
    return j;
}

Json fk_instance_to_json(const FkInstance& inst) {
    Json j;
    j["x1"] = rational_to_string(inst.x1);
    j["x2"] = rational_to_string(inst.x2);
    j["x3"] = rational_to_string(inst.x3);
    j["k"] = rational_to_string(inst.k);
    j["A"] = rational_to_string(inst.A);
    j["B"] = rational_to_string(inst.B);
    j["C"] = rational_to_string(inst.C);
    j["Dsq"] = rational_to_string(inst.Dsq);
    j["exact"] = inst.exact;
    if (inst.exact) j["D_exact"] = rational_to_string(inst.D_exact);
    j["D_approx"] = rational_to_string(inst.D_approx);
    j["D_decimal"] = inst.D_decimal;
    if (inst.exact) j["F_exact"] = matrix_poly_to_json(inst.F_exact);
    j["F"] = matrix_poly_to_json(inst.F);
    j["det_residual"] = inst.det_residual;
    return j;
}

Json fk_psd_report_to_json(const FkPsdReport& r) {
    Json j;
    j["top_left"] = fk_fact_json(r.top_left);
    j["bottom_right"] = fk_fact_json(r.bottom_right);
    j["determinant"] = fk_fact_json(r.determinant);
    j["all_pass"] = r.all_pass;
    return j;
}

Json claim1_to_json(const Claim1Refutation& r) {
    Json j;
    j["refuted"] = r.refuted;
    j["midpoint"] = rational_to_string(r.midpoint);
    j["q_zero_at_midpoint"] = rational_to_string(r.q_zero_at_midpoint);
    j["zero_weight_refuted"] = r.zero_weight_refuted;
    j["corner_factor"] = rational_to_string(r.corner_factor);
    j["grid"] = points_pairs_json(r.grid);
    j["positive_weight_refuted"] = r.positive_weight_refuted;
    j["note"] = r.note;
    return j;
}

Json claim2_to_json(const Claim2Outcome& o) {
    Json j;
    j["refuted"] = o.refuted;
    j["report"] = membership_report_to_json(o.report);
    j["note"] = o.note;
    return j;
}

/* ------------------------------------------------------------------ */
/* Unit-circle sets                                                    */
/* ------------------------------------------------------------------ */

// UTF-8 bytes for the middle dot and the lowercase pi.
static const char kAngleSuffix[] = "\xc2\xb7\xcf\x80";

std::string angle_to_json_string(const Rational& a) { return rational_to_string(a) + kAngleSuffix; }

Rational angle_from_json_string(const std::string& s, const std::string& where) {
    std::string body = s;
    const std::string utf8(kAngleSuffix);
    if (body.size() >= utf8.size() && body.compare(body.size() - utf8.size(), utf8.size(), utf8) == 0)
        body.erase(body.size() - utf8.size());
    else if (body.size() >= 3 && body.compare(body.size() - 3, 3, "*pi") == 0)
        body.erase(body.size() - 3);
    else
        throw std::invalid_argument(where + ": angle '" + s +
                                    "' must be a rational multiple of pi, \"p/q" + utf8 + "\"");
    try {
        return rational_from_string(body);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + ": " + e.what());
    }
}

Json circle_set_to_json(const CircleSet& c) {
    Json j;
    j["arcs"] = Json::array();
    for (const CircleArc& a : c.arcs) {
        Json aj;
        aj["from_angle"] = angle_to_json_string(a.from_angle);
        aj["to_angle"] = angle_to_json_string(a.to_angle);
        j["arcs"].push_back(std::move(aj));
    }
    j["points"] = Json::array();
    for (const Rational& p : c.points) j["points"].push_back(angle_to_json_string(p));
    return j;
}

CircleSet circle_set_from_json(const Json& j) {
    const std::string where = "circle set";
    CircleSet c;
    const Json& arcs = json_field(j, "arcs", where);
    if (!arcs.is_array()) throw std::invalid_argument(where + ": field 'arcs' must be an array");
    for (size_t i = 0; i < arcs.size(); ++i) {
        const std::string wa = where + ".arcs[" + std::to_string(i) + "]";
        CircleArc a;
        a.from_angle = angle_from_json_string(json_string(arcs[i], "from_angle", wa), wa + ".from_angle");
        a.to_angle = angle_from_json_string(json_string(arcs[i], "to_angle", wa), wa + ".to_angle");
        c.arcs.push_back(std::move(a));
    }
    const Json& points = json_field(j, "points", where);
    if (!points.is_array()) throw std::invalid_argument(where + ": field 'points' must be an array");
    for (size_t i = 0; i < points.size(); ++i) {
        const std::string wp = where + ".points[" + std::to_string(i) + "]";
        if (!points[i].is_string()) throw std::invalid_argument(wp + ": angle must be a string");
        c.points.push_back(angle_from_json_string(points[i].get<std::string>(), wp));
    }
    return c;
}

}  // namespace psdg
