// psdg — positivity certificates for Hermitian matrix polynomials on
// subsets of the real line.
//
// Every subcommand is a thin wrapper around one library entry point: the
// tool parses JSON, calls the library, serializes the result, and maps the
// outcome to an exit code.  No mathematical decisions are made here.
//
// Exit codes:
//   0  success (including confirmed refutations asked for by name)
//   1  negative mathematical result: the computation succeeded and the
//      answer is "no" (NOT_MEMBER_AT_DEGREE, a certificate that fails
//      verification); distinguished by the "status" field of the report
//   2  usage or input error (bad flags, malformed JSON, invalid values)
//   3  indeterminate: UNKNOWN outcomes, non-convergence, exhausted searches

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psdg/json_io.hpp"

namespace {

using namespace psdg;

struct IoOptions {
    std::string output = "-";
    bool compact = false;
    int digits = 17;
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(what + ": malformed JSON: " + e.what());
    }
}

Json load_json(const std::string& path, const std::string& what) {
    return parse_json_text(read_input(path), what);
}

void emit(const Json& j, const IoOptions& io) {
    const std::string text = json_dump(j, io.compact, io.digits) + "\n";
    if (io.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(io.output, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + io.output);
    f << text;
}

int fail(const std::string& message, int code, const IoOptions& io) {
    Json j;
    j["status"] = "ERROR";
    j["error"] = message;
    std::cout << json_dump(j, io.compact, io.digits) << "\n";
    std::cerr << "psdg: " << message << "\n";
    return code;
}

// The input file's own "mode" field must agree with --mode when given.
void enforce_mode(const Json& pj, const std::string& want, const std::string& what) {
    if (want == "auto") return;
    const std::string have = json_string(pj, "mode", what);
    if (have != want)
        throw std::invalid_argument(what + ": field 'mode' is \"" + have + "\" but --mode " +
                                    want + " was requested");
}

// A --set file holds either {"pieces": ...} or {"generators": ...}.
SemialgSet set_from_json_any(const Json& j) {
    if (j.is_object() && j.contains("pieces")) return semialg_from_json(j);
    if (j.is_object() && j.contains("generators")) return realize(description_from_json(j));
    throw std::invalid_argument("set: expected field 'pieces' or 'generators'");
}

Description description_from_set_json(const Json& j) {
    if (j.is_object() && j.contains("pieces")) return natural_description(semialg_from_json(j));
    if (j.is_object() && j.contains("generators")) return description_from_json(j);
    throw std::invalid_argument("set: expected field 'pieces' or 'generators'");
}

int membership_exit(MembershipStatus s) {
    switch (s) {
        case MembershipStatus::Member: return 0;
        case MembershipStatus::NotMemberAtDegree: return 1;
        case MembershipStatus::Unknown: return 3;
    }
    return 3;
}

Rational parse_rational_flag(const std::string& s, const std::string& flag) {
    try {
        return rational_from_string(s);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(flag + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "positivity certificates for Hermitian matrix polynomials on subsets of the real line"};
    app.require_subcommand(1);

    IoOptions io;
    if (const char* env = std::getenv("PSDG_PRECISION")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != nullptr && *end == '\0' && v >= 1 && v <= 30) io.digits = static_cast<int>(v);
    }
    auto add_io = [&](CLI::App* sub) {
        sub->add_option("-o,--output", io.output,
                        "write the JSON report to this path instead of stdout ('-' = stdout)");
        sub->add_flag("--compact", io.compact, "single-line JSON output");
        sub->add_option("--precision", io.digits,
                        "significant digits for floats in JSON output "
                        "(default 17; env PSDG_PRECISION overrides the default)")
            ->check(CLI::Range(1, 30));
    };
    const std::vector<std::string> mode_values{"auto", "exact", "float"};

    // ---- factor ----------------------------------------------------
    auto* factor = app.add_subcommand(
        "factor",
        "factor F = G*G for F PSD on the line; with --set (-inf,a] U [b,+inf), "
        "factor F = G*G + H*H (x-a)(x-b)");
    std::string factor_poly, factor_set, factor_mode = "auto";
    double factor_tol = 1e-8;
    factor->add_option("poly,--poly", factor_poly, "matrix polynomial JSON ('-' = stdin)")->required();
    factor->add_option("--set", factor_set, "set JSON: two unbounded intervals");
    factor->add_option("--tol", factor_tol, "solver tolerance");
    factor->add_option("--mode", factor_mode, "require this input mode")->check(CLI::IsMember(mode_values));
    add_io(factor);

    // ---- member ----------------------------------------------------
    auto* member = app.add_subcommand(
        "member", "decide membership of F in the truncated cone over a description of K "
                  "at one fixed degree");
    std::string member_poly, member_set, member_trunc = "QUADRATIC_MODULE", member_mode = "auto";
    int member_degree = 0, member_escalate = 0;
    double member_tol = 1e-8;
    member->add_option("--poly", member_poly, "matrix polynomial JSON ('-' = stdin)")->required();
    member->add_option("--set", member_set, "set JSON ({\"pieces\"} or {\"generators\"})")->required();
    member->add_option("--degree", member_degree, "total degree bound d")->required()->check(CLI::NonNegativeNumber);
    member->add_option("--trunc-mode", member_trunc, "QUADRATIC_MODULE or PREORDERING")
        ->check(CLI::IsMember({"QUADRATIC_MODULE", "PREORDERING"}));
    member->add_option("--escalate", member_escalate,
                       "retry up to this many times with degree d+2, d+4, ... on failure")
        ->check(CLI::NonNegativeNumber);
    member->add_option("--tol", member_tol, "solver tolerance");
    member->add_option("--mode", member_mode, "require this input mode")->check(CLI::IsMember(mode_values));
    add_io(member);

    // ---- certify ---------------------------------------------------
    auto* certify = app.add_subcommand(
        "certify", "produce a multiplier h with h(x0) != 0 and a verified certificate that "
                   "h^2 F lies in the truncated cone over a description of a compact K");
    std::string certify_poly, certify_set, certify_x0 = "0", certify_x0_im = "0",
                certify_mode = "auto";
    double certify_tol = 1e-8, certify_plan_tol = 1e-6;
    certify->add_option("--poly", certify_poly, "matrix polynomial JSON ('-' = stdin)")->required();
    certify->add_option("--set", certify_set, "compact set JSON")->required();
    certify->add_option("--x0", certify_x0, "real part of x0, a rational string");
    certify->add_option("--x0-im", certify_x0_im, "imaginary part of x0, a rational string");
    certify->add_option("--tol", certify_tol, "per-solve tolerance");
    certify->add_option("--plan-tol", certify_plan_tol, "final residual gate for the assembled plan");
    certify->add_option("--mode", certify_mode, "require this input mode")->check(CLI::IsMember(mode_values));
    add_io(certify);

    // ---- denom -----------------------------------------------------
    auto* denom = app.add_subcommand(
        "denom", "search for the smallest k with ((x-conj w)(x-w))^k F in the truncated cone");
    std::string denom_poly, denom_set, denom_w_re = "0", denom_w_im = "1",
                denom_trunc = "QUADRATIC_MODULE", denom_mode = "auto";
    int denom_k_max = 12, denom_doublings = 1;
    double denom_tol = 1e-8;
    denom->add_option("--poly", denom_poly, "matrix polynomial JSON ('-' = stdin)")->required();
    denom->add_option("--set", denom_set, "set JSON")->required();
    denom->add_option("--w-re", denom_w_re, "real part of w, a rational string");
    denom->add_option("--w-im", denom_w_im, "imaginary part of w, a rational string (nonzero)");
    denom->add_option("--k-max", denom_k_max, "largest denominator power to try")->check(CLI::NonNegativeNumber);
    denom->add_option("--doublings", denom_doublings,
                      "extra attempts per power, doubling the degree bound on UNKNOWN")
        ->check(CLI::NonNegativeNumber);
    denom->add_option("--trunc-mode", denom_trunc, "QUADRATIC_MODULE or PREORDERING")
        ->check(CLI::IsMember({"QUADRATIC_MODULE", "PREORDERING"}));
    denom->add_option("--tol", denom_tol, "solver tolerance");
    denom->add_option("--mode", denom_mode, "require this input mode")->check(CLI::IsMember(mode_values));
    add_io(denom);

    // ---- counterexample --------------------------------------------
    auto* cex = app.add_subcommand(
        "counterexample",
        "build the two-parameter family instance F at (x1, x2, x3, k) and run both refutations");
    std::string cex_x1, cex_x2, cex_x3, cex_k;
    int cex_num_bound = 40, cex_den_bound = 12;
    std::vector<std::string> cex_points;
    double cex_tol = 1e-8;
    cex->add_option("--x1", cex_x1, "rational string, x1 < x2 < x3")->required();
    cex->add_option("--x2", cex_x2, "rational string")->required();
    cex->add_option("--x3", cex_x3, "rational string")->required();
    cex->add_option("--k", cex_k, "rational parameter k > 0; omitted: search for an exact instance");
    cex->add_option("--num-bound", cex_num_bound, "numerator bound for the k search")->check(CLI::PositiveNumber);
    cex->add_option("--den-bound", cex_den_bound, "denominator bound for the k search")->check(CLI::PositiveNumber);
    cex->add_option("--claim2-point", cex_points,
                    "isolated points beyond x3 for the second refutation's set "
                    "(rational strings; default: the single point x3 + (x3 - x2))");
    cex->add_option("--tol", cex_tol, "solver tolerance for the SDP refutation");
    add_io(cex);

    // ---- verify ----------------------------------------------------
    auto* verify = app.add_subcommand(
        "verify", "independently re-check a certificate against a matrix polynomial");
    std::string verify_cert, verify_poly, verify_mode = "auto";
    double verify_tol = 1e-6;
    verify->add_option("--cert", verify_cert, "certificate JSON ('-' = stdin)")->required();
    verify->add_option("--poly", verify_poly, "matrix polynomial JSON")->required();
    verify->add_option("--tol", verify_tol, "acceptance tolerance");
    verify->add_option("--mode", verify_mode, "require this input mode")->check(CLI::IsMember(mode_values));
    add_io(verify);

    // ---- classify --------------------------------------------------
    auto* classify_cmd = app.add_subcommand(
        "classify", "classify a set's shape and report the saturation verdict for its "
                    "natural description");
    std::string classify_set;
    classify_cmd->add_option("--set", classify_set, "set JSON ('-' = stdin)")->required();
    add_io(classify_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(factor)) {
            const Json pj = load_json(factor_poly, "poly");
            enforce_mode(pj, factor_mode, "poly");
            const MatrixPoly<Gaussian> F = matrix_poly_exact_from_json(pj);
            if (!factor_set.empty()) {
                const SemialgSet K = set_from_json_any(load_json(factor_set, "set"));
                const auto& ps = K.pieces();
                const bool two_rays = ps.size() == 2 && ps[0].kind == Piece::Kind::Interval &&
                                      ps[1].kind == Piece::Kind::Interval && ps[0].lo_unbounded &&
                                      !ps[0].hi_unbounded && ps[1].hi_unbounded &&
                                      !ps[1].lo_unbounded;
                if (!two_rays)
                    throw std::invalid_argument(
                        "factor: --set must describe (-inf, a] U [b, +inf), two unbounded intervals");
                const TwoUnboundedResult r = two_unbounded_factorize(F, ps[0].hi, ps[1].lo, factor_tol);
                emit(two_unbounded_to_json(r), io);
                return 0;
            }
            const FejerRieszResult r = fejer_riesz(F, factor_tol);
            emit(fejer_riesz_to_json(r), io);
            return 0;
        }

        if (app.got_subcommand(member)) {
            const Json pj = load_json(member_poly, "poly");
            enforce_mode(pj, member_mode, "poly");
            const MatrixPoly<Gaussian> F = matrix_poly_exact_from_json(pj);
            TruncatedPreordering t;
            t.S = description_from_set_json(load_json(member_set, "set"));
            t.n = F.rows();
            t.d = member_degree;
            t.mode = trunc_mode_from_name(member_trunc);
            MembershipReport rep = check_membership(F, t, member_tol);
            for (int round = 0; rep.status != MembershipStatus::Member && round < member_escalate;
                 ++round) {
                t.d += 2;
                rep = check_membership(F, t, member_tol);
            }
            emit(membership_report_to_json(rep), io);
            return membership_exit(rep.status);
        }

        if (app.got_subcommand(certify)) {
            const Json pj = load_json(certify_poly, "poly");
            enforce_mode(pj, certify_mode, "poly");
            const MatrixPoly<Gaussian> F = matrix_poly_exact_from_json(pj);
            const Json sj = load_json(certify_set, "set");
            SemialgSet K;
            Description S;
            if (sj.is_object() && sj.contains("pieces")) {
                K = semialg_from_json(sj);
                S = natural_description(K);
            } else if (sj.is_object() && sj.contains("generators")) {
                S = description_from_json(sj);
                K = realize(S);
            } else {
                throw std::invalid_argument("set: expected field 'pieces' or 'generators'");
            }
            const Gaussian x0(parse_rational_flag(certify_x0, "--x0"),
                              parse_rational_flag(certify_x0_im, "--x0-im"));
            H2FOptions opts;
            opts.tol = certify_tol;
            opts.plan_tol = certify_plan_tol;
            const CertificatePlan plan = h2f_reduce(F, K, S, x0, opts);
            emit(certificate_plan_to_json(plan), io);
            return 0;
        }

        if (app.got_subcommand(denom)) {
            const Json pj = load_json(denom_poly, "poly");
            enforce_mode(pj, denom_mode, "poly");
            const MatrixPoly<Gaussian> F = matrix_poly_exact_from_json(pj);
            const Description S = description_from_set_json(load_json(denom_set, "set"));
            const Gaussian w(parse_rational_flag(denom_w_re, "--w-re"),
                             parse_rational_flag(denom_w_im, "--w-im"));
            DenominatorOptions o;
            o.k_max = denom_k_max;
            o.doublings = denom_doublings;
            o.mode = trunc_mode_from_name(denom_trunc);
            o.tol = denom_tol;
            const DenominatorResult r = denominator_search(F, S, w, o);
            emit(denominator_result_to_json(r), io);
            return r.found ? 0 : 3;
        }

        if (app.got_subcommand(cex)) {
            const Rational x1 = parse_rational_flag(cex_x1, "--x1");
            const Rational x2 = parse_rational_flag(cex_x2, "--x2");
            const Rational x3 = parse_rational_flag(cex_x3, "--x3");
            Rational k;
            if (!cex_k.empty()) {
                k = parse_rational_flag(cex_k, "--k");
            } else {
                const std::optional<Rational> found =
                    fk_search_exact_k(x1, x2, x3, cex_num_bound, cex_den_bound);
                if (!found) {
                    Json j;
                    j["status"] = "NO_EXACT_PARAMETER_FOUND";
                    j["note"] = "no k = p/q with p <= " + std::to_string(cex_num_bound) +
                                ", q <= " + std::to_string(cex_den_bound) +
                                " makes the instance exact; pass --k explicitly";
                    emit(j, io);
                    return 3;
                }
                k = *found;
            }
            const FkConditions conds = fk_conditions(x1, x2, x3, k);
            if (!conds.all()) {
                Json j;
                j["status"] = "CONDITIONS_FAILED";
                j["conditions"] = fk_conditions_to_json(conds);
                emit(j, io);
                return 2;
            }
            const FkInstance inst = fk_build(x1, x2, x3, k);
            const SemialgSet K =
                SemialgSet::from_pieces({Piece::interval(x1, x2), Piece::ray_above(x3)});
            const FkPsdReport psd = fk_psd_report(inst, K);
            const Claim1Refutation c1 = fk_refute_claim1(inst, K);
            // The second refutation runs over [x1, x2] ∪ {x3} ∪ {further points};
            // it needs at least one point beyond x3 (with only {x3} the truncated
            // cone is rich enough to contain F).
            std::vector<Piece> ps2{Piece::interval(x1, x2), Piece::point(x3)};
            if (cex_points.empty()) {
                ps2.push_back(Piece::point(x3 + (x3 - x2)));
            } else {
                for (const std::string& p : cex_points)
                    ps2.push_back(Piece::point(parse_rational_flag(p, "--claim2-point")));
            }
            const SemialgSet K2 = SemialgSet::from_pieces(std::move(ps2));
            const Claim2Outcome c2 = fk_refute_claim2_sdp(inst, natural_description(K2), cex_tol);
            const bool ok = psd.all_pass && c1.refuted && c2.refuted;
            Json j;
            j["status"] = ok ? "REFUTATIONS_CONFIRMED" : "INDETERMINATE";
            j["conditions"] = fk_conditions_to_json(conds);
            j["instance"] = fk_instance_to_json(inst);
            j["set"] = semialg_to_json(K);
            j["psd_report"] = fk_psd_report_to_json(psd);
            j["claim1"] = claim1_to_json(c1);
            j["claim2_set"] = semialg_to_json(K2);
            j["claim2"] = claim2_to_json(c2);
            emit(j, io);
            return ok ? 0 : 3;
        }

        if (app.got_subcommand(verify)) {
            const Certificate c = certificate_from_json(load_json(verify_cert, "cert"));
            const Json pj = load_json(verify_poly, "poly");
            enforce_mode(pj, verify_mode, "poly");
            const MatrixPoly<Gaussian> F = matrix_poly_exact_from_json(pj);
            TruncatedPreordering t;
            t.S = c.S;
            t.n = c.n;
            t.d = c.d;
            t.mode = c.mode;
            const bool ok = verify_certificate(F, t, c, verify_tol);
            const double residual = matrix_poly_max_norm(certificate_value(c) - to_float(F));
            double lambda_min = 0.0;
            bool first = true;
            for (const CertificateBlock& b : c.blocks) {
                if (b.gram.rows() == 0) continue;
                const Eigen::MatrixXcd h = 0.5 * (b.gram + b.gram.adjoint());
                const double mn = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(
                                      h, Eigen::EigenvaluesOnly)
                                      .eigenvalues()
                                      .minCoeff();
                lambda_min = first ? mn : std::min(lambda_min, mn);
                first = false;
            }
            Json j;
            j["status"] = ok ? "VERIFIED" : "REJECTED";
            j["verified"] = ok;
            j["residual"] = residual;
            j["claimed_residual"] = c.residual;
            j["gram_lambda_min"] = lambda_min;
            j["tolerance"] = verify_tol;
            emit(j, io);
            return ok ? 0 : 1;
        }

        if (app.got_subcommand(classify_cmd)) {
            const SemialgSet K = set_from_json_any(load_json(classify_set, "set"));
            const Classification c = classify(K);
            Json j;
            j["status"] = "CLASSIFIED";
            j.update(classification_to_json(c));
            j["is_compact"] = K.is_compact();
            j["pieces"] = semialg_to_json(K)["pieces"];
            j["natural_description"] = description_to_json(natural_description(K));
            emit(j, io);
            return 0;
        }

        throw std::logic_error("no subcommand dispatched");
    } catch (const std::invalid_argument& e) {
        return fail(e.what(), 2, io);
    } catch (const std::domain_error& e) {
        return fail(e.what(), 2, io);
    } catch (const std::exception& e) {
        return fail(e.what(), 3, io);
    }
}
