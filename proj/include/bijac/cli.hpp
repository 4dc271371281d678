#pragma once

// Command-line front end. Every subcommand builds a CertReport from a
// RunConfig; run() adds argument parsing, output and exit codes.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bipoly.hpp"
#include "field.hpp"
#include "ivhs.hpp"
#include "jacring.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "sigma.hpp"

namespace bijac::cli {

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"dims", "smooth",       "oracle", "top",  "duality",
                                                "ramification", "mu", "ivhs",   "bounds", "verify-all"};
    return names;
}

struct RunConfig {
    std::string subcommand = "verify-all";
    int d = 3;
    int e = 3;
    std::string curve;  // literal polynomial or path to a file holding one
    std::optional<std::uint64_t> curve_seed;
    std::string field = "p";  // p, Q or hybrid
    std::uint32_t prime = kDefaultPrime;
    std::size_t trials = 20;
    std::uint64_t seed = 42;
    std::int64_t height = 100;
    std::optional<int> cap_a, cap_b;
    std::size_t mu_probes = 10;
    int twist_min = -2;
    int twist_max = 3;
    std::optional<int> a_min, a_max, b_min, b_max;  // dims rectangle
    unsigned threads = 1;
    std::string json_path;
};

/// Fills defaults that depend on (d,e) and rejects inconsistent settings.
inline RunConfig resolve(RunConfig c) {
    if (std::find(subcommands().begin(), subcommands().end(), c.subcommand) == subcommands().end())
        throw InputError("unknown subcommand '" + c.subcommand + "'");
    if (c.d < 1 || c.e < 1) throw InputError("bidegree must satisfy d,e >= 1");
    if (c.field != "p" && c.field != "Q" && c.field != "hybrid") throw InputError("field must be p, Q or hybrid");
    if (c.trials < 1) throw InputError("trials must be at least 1");
    if (c.height < 0) throw InputError("height must be nonnegative");
    if (c.threads < 1) throw InputError("threads must be at least 1");
    if (c.twist_min > c.twist_max) throw InputError("twist range is empty");
    if (!is_prime_u32(c.prime) || c.prime == 2) throw InputError("prime " + std::to_string(c.prime) + " is not an odd prime");
    if (c.curve.empty() && !c.curve_seed) c.curve_seed = c.seed;
    if (!c.cap_a) c.cap_a = 4 * c.d;
    if (!c.cap_b) c.cap_b = 4 * c.e;
    if (*c.cap_a < c.d || *c.cap_b < c.e) throw InputError("cap must be at least (d,e)");
    if (!c.a_min) c.a_min = 0;
    if (!c.b_min) c.b_min = 0;
    if (!c.a_max) c.a_max = std::max(0, 3 * c.d - 4);
    if (!c.b_max) c.b_max = std::max(0, 3 * c.e - 4);
    if (*c.a_min > *c.a_max || *c.b_min > *c.b_max) throw InputError("dims rectangle is empty");
    return c;
}

inline std::string curve_source(const RunConfig& c) {
    if (c.curve.empty()) return "seed";
    return std::filesystem::is_regular_file(c.curve) ? "file" : "literal";
}

inline BiPoly load_curve(const RunConfig& c) {
    const BiDegree deg{c.d, c.e};
    if (c.curve.empty()) return random_bipoly(deg, *c.curve_seed, c.height);
    std::string text = c.curve;
    if (std::filesystem::is_regular_file(c.curve)) {
        std::ifstream in(c.curve);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse_bipoly(text, deg);
}

/// Everything needed to rerun; thread count and output path do not affect the report.
inline Json config_json(const RunConfig& c) {
    Json j;
    j["subcommand"] = c.subcommand;
    j["d"] = c.d;
    j["e"] = c.e;
    j["curve_source"] = curve_source(c);
    if (c.curve_seed) j["curve_seed"] = *c.curve_seed;
    j["height"] = c.height;
    j["field"] = c.field;
    j["prime"] = c.prime;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["cap"] = Json::array({*c.cap_a, *c.cap_b});
    j["mu_probes"] = c.mu_probes;
    j["twist_range"] = Json::array({c.twist_min, c.twist_max});
    if (c.subcommand == "dims") j["rectangle"] = Json::array({*c.a_min, *c.a_max, *c.b_min, *c.b_max});
    return j;
}

inline Json curve_json(const BiPoly& f) {
    Json j;
    j["bidegree"] = to_json(f.degree());
    j["genus"] = (f.degree().a - 1) * (f.degree().b - 1);
    j["F"] = format(f);
    return j;
}

inline std::uint64_t mu_probe_seed(std::uint64_t seed, std::size_t i) {
    return derive_seed(splitmix64(seed ^ 0x6d755f70726f6265ULL), i);
}

// ---------------------------------------------------------------------------
// Checks. Each runs in one field and records that field among its inputs.

inline CheckRecord not_applicable(std::string name, std::string reason) {
    CheckRecord r{std::move(name)};
    r.outputs["applicable"] = false;
    r.outputs["reason"] = std::move(reason);
    r.verdict = Verdict::vacuous_pass;
    return r;
}

template <Field K>
CheckRecord check_smoothness(const CurveContext<K>& ctx, const RunConfig& c) {
    CheckRecord r{"smoothness"};
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["cap"] = Json::array({*c.cap_a, *c.cap_b});
    auto v = certify_smooth(ctx, {*c.cap_a, *c.cap_b});
    r.outputs["status"] = to_string(v.status);
    r.outputs["certifying_degree"] = v.certifying_degree ? to_json(*v.certifying_degree) : Json();
    r.outputs["trace"] = Json::array();
    for (const auto& s : v.trace)
        r.outputs["trace"].push_back({{"degree", to_json(s.degree)}, {"dim_S", s.dim_S}, {"dim_J", s.dim_J}});
    if (v.witness) r.outputs["witness"] = Json::array({(*v.witness)[0], (*v.witness)[1], (*v.witness)[2], (*v.witness)[3]});
    r.verdict = v.status == SmoothStatus::certified_smooth ? Verdict::pass : Verdict::undecided;
    return r;
}

template <Field K>
CheckRecord check_euler(const CurveContext<K>& ctx, const RunConfig&) {
    CheckRecord r{"euler"};
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["degree"] = to_json(ctx.degree());
    auto [ex, ey] = euler_defect(ctx.F());
    const K& k = ctx.field();
    auto piece = jacobian_piece(ctx, ctx.degree());
    const bool f_in_j = contains(k, piece->J, ctx.F().coords(k));
    r.outputs["defect_x"] = format(ex);
    r.outputs["defect_y"] = format(ey);
    r.outputs["F_in_J"] = f_in_j;
    r.outputs["generators"] = jacobian_generators(ctx, ctx.degree()).size();
    r.outputs["dim_J"] = piece->dim_J();
    r.verdict = ex.is_zero() && ey.is_zero() && f_in_j && piece->dim_J() <= 7 ? Verdict::pass : Verdict::fail;
    return r;
}

template <Field K>
CheckRecord check_sigma_oracle(const CurveContext<K>& ctx, const RunConfig& c) {
    CheckRecord r{"sigma-oracle"};
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["twist_range"] = Json::array({c.twist_min, c.twist_max});
    r.outputs["twists"] = Json::array();
    bool all = true;
    for (int a = c.twist_min; a <= c.twist_max; ++a)
        for (int b = c.twist_min; b <= c.twist_max; ++b) {
            const BiDegree tw{a, b};
            const auto enumerated = sigma_basis(tw).size();
            const bool count_ok = static_cast<long>(enumerated) == sigma_dim(a, b);
            const bool equal = oracle_equiv(ctx, tw);
            all = all && count_ok && equal;
            r.outputs["twists"].push_back({{"twist", to_json(tw)},
                                           {"target", to_json(tw + ctx.degree())},
                                           {"sections", enumerated},
                                           {"image_dim", image_dF(ctx, tw).dim()},
                                           {"dim_J", hilbert(ctx, tw + ctx.degree()).dim_J},
                                           {"equal", equal}});
        }
    r.verdict = all ? Verdict::pass : Verdict::fail;
    return r;
}

template <Field K>
CheckRecord check_dimensions(const CurveContext<K>& ctx, const RunConfig&) {
    const int d = ctx.d(), e = ctx.e();
    if (d < 2 || e < 2) return not_applicable("dimensions", "needs d,e >= 2");
    CheckRecord r{"dimensions"};
    r.inputs["field"] = ctx.field().descriptor();
    r.outputs["items"] = Json::array();
    bool ok = true;
    auto item = [&](const std::string& what, BiDegree deg, long value, long expected, bool asserted, bool holds) {
        r.outputs["items"].push_back({{"quantity", what},
                                      {"degree", to_json(deg)},
                                      {"value", value},
                                      {"expected", expected},
                                      {"asserted", asserted},
                                      {"holds", holds}});
        if (asserted) ok = ok && holds;
    };
    auto dimR = [&](BiDegree g) { return static_cast<long>(hilbert(ctx, g).dim_R); };
    auto dimJ = [&](BiDegree g) { return static_cast<long>(hilbert(ctx, g).dim_J); };
    const long g = ctx.genus();
    item("dim R", {d - 2, e - 2}, dimR({d - 2, e - 2}), g, true, dimR({d - 2, e - 2}) == g);
    item("dim J", {d - 1, e - 1}, dimJ({d - 1, e - 1}), 0, true, dimJ({d - 1, e - 1}) == 0);
    item("dim J", {d - 1, e}, dimJ({d - 1, e}), 2, true, dimJ({d - 1, e}) == 2);
    item("dim J", {d, e - 1}, dimJ({d, e - 1}), 2, true, dimJ({d, e - 1}) == 2);
    // at most 7 always; equality is recorded only
    item("dim J", {d, e}, dimJ({d, e}), 7, false, dimJ({d, e}) == 7);
    const long h0 = sigma_dim(0, 0);
    item("h0 Sigma_L", {0, 0}, static_cast<long>(sigma_basis({0, 0}).size()), 7, true,
         h0 == 7 && static_cast<long>(sigma_basis({0, 0}).size()) == 7);
    r.verdict = ok && dimJ({d, e}) <= 7 ? Verdict::pass : Verdict::fail;
    return r;
}

template <Field K>
CheckRecord check_top(const CurveContext<K>& ctx, const RunConfig&) {
    if (ctx.d() < 2 || ctx.e() < 2) return not_applicable("top-piece", "needs d,e >= 2");
    CheckRecord r{"top-piece"};
    r.inputs["field"] = ctx.field().descriptor();
    auto t = top_piece_check(ctx);
    r.inputs["degree"] = to_json(t.degree);
    const bool asserted = ctx.d() >= 3 && ctx.e() >= 3;
    r.outputs["dim_S"] = t.dim_S;
    r.outputs["dim_R"] = t.dim_R;
    r.outputs["asserted"] = asserted;
    if (asserted)
        r.verdict = t.pass ? Verdict::pass : Verdict::fail;
    else
        r.verdict = t.pass ? Verdict::pass : Verdict::vacuous_pass;
    return r;
}

inline Json to_json(const DualityItem& it) {
    return {{"applicable", it.applicable}, {"decided", it.decided}, {"rows", it.rows},          {"cols", it.cols},
            {"rank", it.rank},             {"kernel_dim", it.kernel_dim}, {"pass", it.pass}};
}

template <Field K>
CheckRecord check_duality(const CurveContext<K>& ctx, const RunConfig&) {
    if (ctx.d() < 2 || ctx.e() < 2) return not_applicable("duality", "needs d,e >= 2");
    CheckRecord r{"duality"};
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["degrees"] = Json::array({to_json(BiDegree{2 * ctx.d() - 4, 2 * ctx.e() - 4}),
                                       to_json(BiDegree{2 * ctx.d() - 2, 2 * ctx.e() - 2})});
    auto rep = duality_report(ctx);
    r.outputs["top_dim"] = rep.top_dim;
    r.outputs["iso_K2L2"] = to_json(rep.iso_K2L2);
    r.outputs["injective_K2L2"] = to_json(rep.injective_K2L2);
    r.outputs["kernel_KL2"] = to_json(rep.kernel_KL2);
    bool fail = false, undecided = false;
    for (const auto* it : {&rep.iso_K2L2, &rep.injective_K2L2, &rep.kernel_KL2}) {
        if (!it->applicable) continue;
        if (!it->decided)
            undecided = true;
        else if (!it->pass)
            fail = true;
    }
    r.verdict = fail ? Verdict::fail : undecided ? Verdict::undecided : Verdict::pass;
    return r;
}

template <Field K>
CheckRecord check_ramification(const CurveContext<K>& ctx, const RunConfig& c) {
    CheckRecord r{"ramification"};
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["generators"] = Json::array({"F", "F_x0", "F_x1"});
    r.inputs["cap"] = Json::array({*c.cap_a, *c.cap_b});
    const long expected = 2L * ctx.genus() - 2 + 2L * ctx.d();
    auto len = scheme_length(ctx.field(), {ctx.F(), ctx.partial(Var::x0), ctx.partial(Var::x1)}, {*c.cap_a, *c.cap_b});
    r.outputs["length"] = len.length;
    r.outputs["stabilized"] = len.stabilized;
    r.outputs["expected"] = expected;
    r.outputs["trace"] = Json::array();
    for (const auto& [deg, codim] : len.trace) r.outputs["trace"].push_back({{"degree", to_json(deg)}, {"codim", codim}});
    if (!len.stabilized)
        r.verdict = Verdict::undecided;
    else
        r.verdict = static_cast<long>(len.length) == expected ? Verdict::pass : Verdict::fail;
    return r;
}

template <Field K>
CheckRecord check_mu(const CurveContext<K>& ctx, const RunConfig& c) {
    if (ctx.d() < 3 || ctx.e() < 3) return not_applicable("mu-probes", "needs d,e >= 3");
    CheckRecord r{"mu-probes"};
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["probes"] = c.mu_probes;
    r.inputs["seed"] = c.seed;
    r.inputs["height"] = c.height;
    r.inputs["domain"] = to_json(BiDegree{ctx.d() - 4, ctx.e() - 4});
    r.outputs["probes"] = Json::array();
    bool all_zero = true, rejected = false;
    for (std::size_t i = 0; i < c.mu_probes; ++i) {
        const auto s = mu_probe_seed(c.seed, i);
        Json p{{"index", i}, {"seed", s}};
        try {
            const auto k = mu_kernel_dim(ctx, sample_jacobian_element(ctx, s, c.height));
            p["kernel_dim"] = k;
            all_zero = all_zero && k == 0;
        } catch (const std::invalid_argument&) {
            p["rejected"] = "G proportional to F";
            rejected = true;
        }
        r.outputs["probes"].push_back(std::move(p));
    }
    if (c.mu_probes == 0)
        r.verdict = Verdict::vacuous_pass;
    else if (!all_zero)
        r.verdict = Verdict::fail;
    else
        r.verdict = rejected ? Verdict::undecided : Verdict::pass;
    return r;
}

inline Json to_json(const SquaringRoute& s) {
    return {{"source_degree", to_json(s.source_degree)},
            {"dim_source", s.dim_source},
            {"dim_J_source", s.dim_J_source},
            {"pairing_rank", s.pairing_rank},
            {"trace_independent", s.trace_independent},
            {"decided", s.decided},
            {"injective", s.injective}};
}

struct IvhsOutcome {
    CheckRecord record;
    std::optional<std::size_t> best_trial;  // witness, or first trial of maximal rank
    bool full_rank = false;
    bool unique_trace = false;
};

template <Field K>
IvhsOutcome check_ivhs(const CurveContext<K>& ctx, const RunConfig& c) {
    IvhsOutcome out;
    auto& r = out.record;
    r.name = "ivhs";
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["trials"] = c.trials;
    r.inputs["seed"] = c.seed;
    r.inputs["height"] = c.height;
    r.inputs["tau_degree"] = to_json(ctx.degree());
    auto cert = certify_max_ivhs(ctx, c.trials, c.seed, c.height, c.threads);
    r.outputs["g"] = cert.genus;
    r.outputs["top_dim"] = cert.top_dim;
    r.outputs["route"] = cert.route;
    r.outputs["ranks"] = cert.ranks;
    Json hist = Json::object();
    for (const auto& [rank, count] : cert.histogram) hist[std::to_string(rank)] = count;
    r.outputs["histogram"] = hist;
    r.outputs["max_rank"] = cert.max_rank;
    r.outputs["witness_trial"] = cert.witness_trial ? Json(*cert.witness_trial) : Json();
    r.outputs["witness_seed"] = cert.witness_seed ? Json(*cert.witness_seed) : Json();
    r.outputs["non_generic_sample"] = cert.max_rank < static_cast<std::size_t>(cert.genus);
    if (cert.squaring) r.outputs["squaring_route"] = to_json(*cert.squaring);
    r.outputs["result"] = to_string(cert.verdict);
    r.verdict = cert.verdict == IvhsVerdict::success ? Verdict::pass : Verdict::undecided;

    out.unique_trace = cert.top_dim == 1;
    out.full_rank = cert.max_rank == static_cast<std::size_t>(cert.genus);
    if (cert.witness_trial && cert.route == "trace")
        out.best_trial = cert.witness_trial;
    else
        for (std::size_t t = 0; t < cert.ranks.size(); ++t)
            if (cert.ranks[t] == cert.max_rank) {
                out.best_trial = t;
                break;
            }
    return out;
}

/// Kernel-square property at tau_star. It is asserted only when tau_star
/// has rank g; otherwise the hypothesis fails and the record is diagnostic.
template <Field K>
CheckRecord check_kernel_square(const CurveContext<K>& ctx, const RunConfig& c, const IvhsOutcome& ivhs) {
    if (!ivhs.unique_trace) return not_applicable("kernel-square", "trace on the top piece is not unique");
    if (!ivhs.best_trial) return not_applicable("kernel-square", "no trial available");
    CheckRecord r{"kernel-square"};
    const std::size_t t = *ivhs.best_trial;
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["tau_trial"] = t;
    r.inputs["tau_seed"] = derive_seed(c.seed, t);
    r.inputs["height"] = c.height;
    const auto tr = trace_functional(ctx);
    auto rec = kernel_square_check(ctx, tr, sample_tau(ctx.degree(), c.seed, t, c.height));
    r.outputs["kernel_dim"] = rec.kernel_dim;
    r.outputs["asserted"] = ivhs.full_rank;
    r.outputs["evaluations"] = Json::array();
    for (const auto& row : rec.evaluations) {
        Json jr = Json::array();
        for (const auto& v : row) jr.push_back(ctx.field().to_string(v));
        r.outputs["evaluations"].push_back(std::move(jr));
    }
    r.outputs["all_vanish"] = rec.all_vanish;
    if (rec.vacuous || !ivhs.full_rank)
        r.verdict = Verdict::vacuous_pass;
    else
        r.verdict = rec.all_vanish ? Verdict::pass : Verdict::fail;
    return r;
}

template <Field K>
CheckRecord check_bounds(const CurveContext<K>& ctx, const RunConfig&) {
    if (ctx.d() < 3 || ctx.e() < 3) return not_applicable("bounds", "needs d,e >= 3");
    CheckRecord r{"bounds"};
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["degree"] = to_json(ctx.degree());
    auto b = bounds_report(ctx);
    r.outputs["lower"] = b.bounds.lower;
    r.outputs["upper"] = b.bounds.upper;
    r.outputs["contradiction"] = b.bounds.contradiction;
    r.outputs["dim_J_K2L2"] = b.dim_J_K2L2;
    r.outputs["dim_R_K2L2"] = b.dim_R_K2L2;
    r.outputs["dim_R_L"] = b.dim_R_L;
    r.outputs["dim_J_L"] = b.dim_J_L;
    r.outputs["mu_image_dim"] = b.mu_image_dim;
    r.outputs["strict_bound"] = b.strict_bound;
    r.outputs["chain_value"] = b.chain_value;
    r.outputs["h0_sigma"] = b.h0_sigma;
    r.outputs["chain_bound"] = b.chain_bound;
    r.outputs["r_dims_equal"] = b.r_dims_equal;
    r.outputs["chain_consistent"] = b.chain_consistent;
    r.verdict = b.pass ? Verdict::pass : Verdict::fail;
    return r;
}

template <Field K>
CheckRecord check_dims(const CurveContext<K>& ctx, const RunConfig& c) {
    CheckRecord r{"dims"};
    r.inputs["field"] = ctx.field().descriptor();
    r.inputs["rectangle"] = Json::array({*c.a_min, *c.a_max, *c.b_min, *c.b_max});
    r.outputs["smoothness"] = to_string(certify_smooth(ctx, {*c.cap_a, *c.cap_b}).status);
    r.outputs["rows"] = Json::array();
    for (int a = *c.a_min; a <= *c.a_max; ++a)
        for (int b = *c.b_min; b <= *c.b_max; ++b) {
            auto h = hilbert(ctx, {a, b});
            r.outputs["rows"].push_back(
                {{"degree", Json::array({a, b})}, {"dim_S", h.dim_S}, {"dim_J", h.dim_J}, {"dim_R", h.dim_R}});
        }
    r.verdict = Verdict::pass;
    return r;
}

// ---------------------------------------------------------------------------
// Field dispatch. In hybrid mode a check that fails, stays undecided or throws
// over F_p is recomputed over Q and the rational record replaces it. Once the
// smoothness check has escalated the reduction mod p is bad, so every later
// check goes straight to Q.

class Contexts {
public:
    Contexts(const RunConfig& c, BiPoly f) : cfg_(c), f_(std::move(f)) {}

    const CurveContext<PrimeField>& prime() {
        if (!p_) p_.emplace(f_, PrimeField(cfg_.prime));
        return *p_;
    }
    const CurveContext<RationalField>& rational() {
        if (!q_) q_.emplace(f_, RationalField{});
        return *q_;
    }

    bool over_q() const { return cfg_.field == "Q" || bad_reduction_; }

    template <class Fn>
    auto run(Fn&& fn) {
        if (cfg_.field == "Q") return fn(rational());
        if (bad_reduction_) return escalate(fn);
        if (cfg_.field != "hybrid") return fn(prime());
        try {
            prime();
        } catch (const std::domain_error&) {
            bad_reduction_ = true;
            return escalate(fn);
        }
        try {
            auto rec = fn(prime());
            const CheckRecord& head = record_of(rec);
            if (head.verdict != Verdict::fail && head.verdict != Verdict::undecided) return rec;
        } catch (const std::domain_error&) {
        }
        auto redo = escalate(fn);
        if (record_of(redo).name == "smoothness") bad_reduction_ = true;
        return redo;
    }

private:
    template <class Fn>
    auto escalate(Fn& fn) {
        auto redo = fn(rational());
        record_of(redo).inputs["escalated_from"] = PrimeField(cfg_.prime).descriptor();
        return redo;
    }

    static CheckRecord& record_of(CheckRecord& r) { return r; }
    static CheckRecord& record_of(IvhsOutcome& o) { return o.record; }

    const RunConfig& cfg_;
    BiPoly f_;
    std::optional<CurveContext<PrimeField>> p_;
    std::optional<CurveContext<RationalField>> q_;
    bool bad_reduction_ = false;
};

inline void require_degree(const RunConfig& c, int lo, const std::string& what) {
    if (c.d < lo || c.e < lo) throw InputError(what + " needs d,e >= " + std::to_string(lo));
}

/// Builds the report for an already resolved configuration.
inline CertReport execute(const RunConfig& c) {
    const BiPoly f = load_curve(c);
    CertReport rep;
    rep.config = config_json(c);
    rep.curve = curve_json(f);
    Contexts cx(c, f);
    auto& checks = rep.checks;
    auto add = [&](auto fn) { checks.push_back(cx.run(fn)); };
    const std::string& s = c.subcommand;

    if (s == "dims") {
        add([&](const auto& ctx) { return check_dims(ctx, c); });
    } else if (s == "smooth") {
        add([&](const auto& ctx) { return check_smoothness(ctx, c); });
    } else if (s == "oracle") {
        add([&](const auto& ctx) { return check_sigma_oracle(ctx, c); });
    } else if (s == "top") {
        require_degree(c, 2, "top");
        add([&](const auto& ctx) { return check_top(ctx, c); });
    } else if (s == "duality") {
        require_degree(c, 2, "duality");
        add([&](const auto& ctx) { return check_duality(ctx, c); });
    } else if (s == "ramification") {
        add([&](const auto& ctx) { return check_ramification(ctx, c); });
    } else if (s == "mu") {
        require_degree(c, 3, "mu");
        add([&](const auto& ctx) { return check_mu(ctx, c); });
    } else if (s == "bounds") {
        require_degree(c, 3, "bounds");
        add([&](const auto& ctx) { return check_bounds(ctx, c); });
    } else if (s == "ivhs") {
        require_degree(c, 2, "ivhs");
        add([&](const auto& ctx) { return check_smoothness(ctx, c); });
        if (checks.back().verdict == Verdict::pass)
            checks.push_back(cx.run([&](const auto& ctx) { return check_ivhs(ctx, c); }).record);
        else
            checks.back().outputs["skipped"] = Json::array({"ivhs"});
    } else if (s == "verify-all") {
        add([&](const auto& ctx) { return check_smoothness(ctx, c); });
        if (checks.back().verdict != Verdict::pass) {
            checks.back().outputs["skipped"] = Json::array({"euler", "sigma-oracle", "dimensions", "top-piece", "duality",
                                                            "ramification", "mu-probes", "ivhs", "kernel-square",
                                                            "bounds"});
        } else {
            add([&](const auto& ctx) { return check_euler(ctx, c); });
            add([&](const auto& ctx) { return check_sigma_oracle(ctx, c); });
            add([&](const auto& ctx) { return check_dimensions(ctx, c); });
            add([&](const auto& ctx) { return check_top(ctx, c); });
            add([&](const auto& ctx) { return check_duality(ctx, c); });
            add([&](const auto& ctx) { return check_ramification(ctx, c); });
            add([&](const auto& ctx) { return check_mu(ctx, c); });
            if (c.d >= 2 && c.e >= 2) {
                auto ivhs = cx.run([&](const auto& ctx) { return check_ivhs(ctx, c); });
                checks.push_back(ivhs.record);
                const bool over_q = cx.over_q() || ivhs.record.inputs.contains("escalated_from");
                auto ks = over_q ? check_kernel_square(cx.rational(), c, ivhs) : check_kernel_square(cx.prime(), c, ivhs);
                checks.push_back(std::move(ks));
            } else {
                checks.push_back(not_applicable("ivhs", "needs d,e >= 2"));
                checks.push_back(not_applicable("kernel-square", "needs d,e >= 2"));
            }
            add([&](const auto& ctx) { return check_bounds(ctx, c); });
        }
    }
    rep.verdict = combine(checks);
    return rep;
}

// ---------------------------------------------------------------------------

inline std::string summary_line(const CheckRecord& r) {
    const Json& o = r.outputs;
    std::ostringstream s;
    if (o.contains("reason")) {
        s << o["reason"].get<std::string>();
    } else if (r.name == "smoothness") {
        s << o["status"].get<std::string>();
        if (!o["certifying_degree"].is_null()) s << " at " << o["certifying_degree"].dump();
    } else if (r.name == "ivhs") {
        s << o["result"].get<std::string>() << ", max rank " << o["max_rank"].dump() << " of g=" << o["g"].dump();
        if (!o["witness_trial"].is_null()) s << ", witness trial " << o["witness_trial"].dump();
    } else if (r.name == "ramification") {
        s << "length " << o["length"].dump() << ", expected " << o["expected"].dump();
    } else if (r.name == "top-piece") {
        s << "dim R_top = " << o["dim_R"].dump();
    } else if (r.name == "bounds") {
        s << "lower " << o["lower"].dump() << ", upper " << o["upper"].dump();
    } else if (r.name == "kernel-square") {
        s << "kernel dim " << o["kernel_dim"].dump();
    }
    return s.str();
}

inline void print_table(std::ostream& out, const CertReport& rep) {
    if (rep.checks.size() == 1 && rep.checks[0].name == "dims") {
        const Json& o = rep.checks[0].outputs;
        out << "smoothness: " << o["smoothness"].get<std::string>() << "\n";
        out << std::setw(10) << "(a,b)" << std::setw(8) << "dim S" << std::setw(8) << "dim J" << std::setw(8) << "dim R"
            << "\n";
        for (const auto& row : o["rows"]) {
            const std::string deg = "(" + row["degree"][0].dump() + "," + row["degree"][1].dump() + ")";
            out << std::setw(10) << deg << std::setw(8) << row["dim_S"].dump() << std::setw(8) << row["dim_J"].dump()
                << std::setw(8) << row["dim_R"].dump() << "\n";
        }
    }
    for (const auto& r : rep.checks)
        out << std::left << std::setw(15) << r.name << std::setw(14) << to_string(r.verdict) << summary_line(r)
            << std::right << "\n";
    out << "verdict: " << to_string(rep.verdict) << "\n";
}

/// Parses arguments, runs one subcommand and writes the report. Exit codes:
/// 0 pass, 1 fail, 2 input error, 3 undecided.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bigraded Jacobian rings of curves on P1xP1 and IVHS rank certificates", "bijac"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file mirroring the long options");

    RunConfig c;
    std::optional<std::uint64_t> curve_seed;
    std::optional<int> cap_a, cap_b, a_min, a_max, b_min, b_max;
    auto env = [](std::string name) {
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return ch == '-' ? '_' : std::toupper(ch); });
        return "BIJAC_" + name;
    };
    auto opt = [&](const std::string& name, auto& var, const std::string& help) {
        return app.add_option("--" + name, var, help)->envname(env(name));
    };
    opt("d", c.d, "first bidegree d")->capture_default_str();
    opt("e", c.e, "second bidegree e")->capture_default_str();
    auto* curve_opt = opt("curve", c.curve, "curve polynomial, or a file containing one");
    opt("curve-seed", curve_seed, "derive F from (d, e, curve-seed, height); defaults to --seed")->excludes(curve_opt);
    opt("field", c.field, "p, Q or hybrid")->check(CLI::IsMember({"p", "Q", "hybrid"}))->capture_default_str();
    opt("prime", c.prime, "modulus for the prime field")->capture_default_str();
    opt("trials", c.trials, "tau samples for ivhs")->capture_default_str();
    opt("seed", c.seed, "master seed")->capture_default_str();
    opt("height", c.height, "coefficient bound for random polynomials")->capture_default_str();
    opt("cap-a", cap_a, "escalation cap, first degree (default 4d)");
    opt("cap-b", cap_b, "escalation cap, second degree (default 4e)");
    opt("mu-probes", c.mu_probes, "number of random G for mu")->capture_default_str();
    opt("twist-min", c.twist_min, "oracle sweep lower twist")->capture_default_str();
    opt("twist-max", c.twist_max, "oracle sweep upper twist")->capture_default_str();
    opt("a-min", a_min, "dims rectangle (default 0)");
    opt("a-max", a_max, "dims rectangle (default 3d-4)");
    opt("b-min", b_min, "dims rectangle (default 0)");
    opt("b-max", b_max, "dims rectangle (default 3e-4)");
    opt("threads", c.threads, "worker threads for ivhs trials")->capture_default_str();
    opt("json", c.json_path, "write the JSON report here ('-' for stdout)");
    static const std::map<std::string, std::string> help{
        {"dims", "dim S, J, R over a rectangle of bidegrees"},
        {"smooth", "certify smoothness: J fills S_{kd,ke} for some k up to the cap"},
        {"oracle", "compare the Sigma_L image with J over a twist range"},
        {"top", "dimension of the top piece R_{3d-4,3e-4}"},
        {"duality", "multiplication pairings into the top piece"},
        {"ramification", "length of the scheme F = F_x0 = F_x1"},
        {"mu", "injectivity of mu_G for random G in J_{d,e}"},
        {"ivhs", "rank of B_tau for random tau; maximal IVHS certificate"},
        {"bounds", "bound arithmetic and the dimension chain"},
        {"verify-all", "every check, gated on smoothness"},
    };
    for (const auto& name : subcommands()) app.add_subcommand(name, help.at(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    c.curve_seed = curve_seed;
    c.cap_a = cap_a;
    c.cap_b = cap_b;
    c.a_min = a_min;
    c.a_max = a_max;
    c.b_min = b_min;
    c.b_max = b_max;

    CertReport rep;
    try {
        c = resolve(c);
        rep = execute(c);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {  // includes BidegreeError and InputError
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    const std::string text = rep.to_json().dump(2) + "\n";
    if (c.json_path == "-") {
        out << text;
    } else {
        if (!c.json_path.empty()) {
            std::ofstream f(c.json_path, std::ios::binary);
            if (!f) {
                err << "error: cannot write " << c.json_path << "\n";
                return 2;
            }
            f << text;
        }
        print_table(out, rep);
    }
    return exit_code(rep.verdict);
}

}  // namespace bijac::cli
