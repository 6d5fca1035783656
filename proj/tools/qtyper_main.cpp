// Command-line front end.  Subcommands:
//
//   infer FILE [--trace] [--normalize]   inferred output type of a circuit
//   check FILE [--strict]                compare against the file's EXPECT
//   normalize TYPE                       normal form of a type expression
//   separable TYPE --qubits LIST         separability across a qubit subset
//   measure FILE                         union type after MEAS statements
//   tbound FILE|GATE                     lower bound on T gates
//   synth TYPE                           preparation circuit for a type
//   verify FILE --oracle [--seed N]      dense-matrix check of the judgment
//
// Global flags: --json (machine-readable report), --numeric (snap decimal
// coefficients to exact ring values).  Exit codes: 0 pass, 1 check failure,
// 2 usage or parse error, 3 unsupported analysis.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qtyper/infer.hpp"
#include "qtyper/measurement.hpp"
#include "qtyper/normal_form.hpp"
#include "qtyper/oracle.hpp"
#include "qtyper/parser.hpp"
#include "qtyper/report.hpp"
#include "qtyper/separability.hpp"
#include "qtyper/synth.hpp"
#include "qtyper/types.hpp"

using namespace qtyper;
using report::json;

namespace {

struct CliState {
    bool as_json = false;
    bool numeric = false;
};

void emit(const json& j, const CliState& st) {
    if (st.as_json)
        std::cout << j.dump(2) << "\n";
}

ParseOptions parse_opts(const CliState& st) {
    ParseOptions o;
    o.numeric = st.numeric;
    if (st.numeric)
        o.snap = [](double x) { return oracle::exactify(x); };
    return o;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Initial type: the file's INIT clause, or the all-zeros Z basis.
QType initial_type(const Program& p) {
    if (p.init)
        return *p.init;
    Branch b(p.n);
    for (uint32_t q = 0; q < p.n; ++q)
        b.terms.push_back(AdditiveOperator::from_pauli(PauliString::single(p.n, q, Letter::Z)));
    QType t;
    t.n = p.n;
    t.branches.push_back(std::move(b));
    return t;
}

/// Per-branch normal form; contradictory (uninhabited) branches are dropped
/// and reported through `notes`.
QType normalize_type(const QType& t, std::vector<std::string>& notes) {
    QType out;
    for (const Branch& b : t.branches) {
        NormalizeResult nr = normalize_branch(b, true);
        if (nr.ok())
            out.branches.push_back(nr.branch);
        else
            notes.push_back("dropped branch " + branch_str(b) + ": " + nr.diagnostic);
    }
    return union_simplify(out);
}

std::string prob_str(const Branch& b) {
    if (b.prob)
        return b.prob->str();
    if (b.prob_num) {
        std::ostringstream ss;
        ss << *b.prob_num;
        return ss.str();
    }
    return "?";
}

std::string outcomes_str(const Branch& b) {
    std::string s;
    for (int o : b.outcomes) {
        if (!s.empty())
            s += " ";
        s += o > 0 ? "+" : "-";
    }
    return s;
}

json probabilities_json(const QType& t) {
    json arr = json::array();
    for (const Branch& b : t.branches) {
        json e;
        e["outcomes"] = b.outcomes;
        e["p"] = b.prob ? report::coeff_json(*b.prob) : json(nullptr);
        if (b.prob_num)
            e["p_num"] = *b.prob_num;
        else if (b.prob)
            e["p_num"] = b.prob->value();
        arr.push_back(e);
    }
    return arr;
}

int cmd_infer(const CliState& st, const std::string& file, bool trace, bool do_norm,
              bool keep_impossible) {
    Program p = parse_program(read_file(file), parse_opts(st));
    InferOptions io;
    io.trace = trace;
    io.keep_impossible = keep_impossible;
    InferResult r = infer(p, initial_type(p), io);
    std::vector<std::string> notes = r.notes;
    QType out = do_norm ? normalize_type(r.type, notes) : r.type;

    json j = report::base_report("ok");
    j["inferred"] = report::type_json(out);
    if (trace)
        j["trace"] = report::trace_json(r.trace);
    for (const auto& nline : notes)
        j["diagnostics"].push_back(nline);
    emit(j, st);
    if (!st.as_json) {
        if (trace)
            for (const auto& step : r.trace)
                std::cout << "after " << step.op << ": " << step.type << "\n";
        std::cout << type_str(out) << "\n";
        for (const auto& nline : notes)
            std::cout << "note: " << nline << "\n";
    }
    return 0;
}

int cmd_check(const CliState& st, const std::string& file, bool strict) {
    Program p = parse_program(read_file(file), parse_opts(st));
    if (!p.expect)
        throw std::runtime_error("'" + file + "' has no EXPECT clause to check against");
    CheckResult c = check(p, initial_type(p), *p.expect, {}, strict);

    json j = report::base_report(c.pass ? "pass" : "fail");
    j["inferred"] = report::type_json(c.inferred);
    j["expected"] = report::type_json(c.expected);
    if (!c.diff.empty()) {
        std::stringstream ds(c.diff);
        std::string line;
        while (std::getline(ds, line))
            if (!line.empty())
                j["diagnostics"].push_back(line);
    }
    emit(j, st);
    if (!st.as_json) {
        if (c.pass) {
            std::cout << "PASS: " << type_str(c.inferred) << "\n";
        } else {
            std::cout << "FAIL\n  inferred: " << type_str(c.inferred)
                      << "\n  expected: " << type_str(c.expected) << "\n";
            if (!c.diff.empty())
                std::cout << c.diff << "\n";
        }
    }
    return c.pass ? 0 : 1;
}

int cmd_normalize(const CliState& st, const std::string& text) {
    QType t = parse_type(text, parse_opts(st));
    std::vector<std::string> notes;
    QType out = normalize_type(t, notes);
    bool inhabited = !out.branches.empty();

    json j = report::base_report(inhabited ? "ok" : "uninhabited");
    j["inferred"] = report::type_json(out);
    for (const auto& nline : notes)
        j["diagnostics"].push_back(nline);
    emit(j, st);
    if (!st.as_json) {
        std::cout << (inhabited ? type_str(out) : "uninhabited") << "\n";
        for (const auto& nline : notes)
            std::cout << "note: " << nline << "\n";
    }
    return inhabited ? 0 : 1;
}

int cmd_separable(const CliState& st, const std::string& text, const std::string& qubits) {
    QType t = parse_type(text, parse_opts(st));
    if (t.branches.size() != 1)
        throw unsupported_measurement("separability is only decided for a single branch");
    std::vector<uint32_t> K;
    std::stringstream ss(qubits);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size() || v < 1)
            throw std::runtime_error("--qubits wants a comma-separated list of 1-based indices");
        K.push_back(static_cast<uint32_t>(v - 1));
    }
    SeparabilityResult r = separable_subset(t.branches[0], K);

    json j = report::base_report(r.granted ? "granted" : "denied");
    if (r.granted) {
        QType out;
        out.branches.push_back(r.factored);
        j["inferred"] = report::type_json(out);
    } else {
        j["diagnostics"].push_back(r.reason);
    }
    emit(j, st);
    if (!st.as_json) {
        if (r.granted)
            std::cout << branch_str(r.factored) << "\n";
        else
            std::cout << "not separable: " << r.reason << "\n";
    }
    return r.granted ? 0 : 1;
}

int cmd_measure(const CliState& st, const std::string& file) {
    Program p = parse_program(read_file(file), parse_opts(st));
    InferResult r = infer(p, initial_type(p), {});

    json j = report::base_report("ok");
    j["inferred"] = report::type_json(r.type);
    if (p.has_meas())
        j["probabilities"] = probabilities_json(r.type);
    for (const auto& nline : r.notes)
        j["diagnostics"].push_back(nline);
    emit(j, st);
    if (!st.as_json) {
        std::cout << type_str(r.type) << "\n";
        if (p.has_meas())
            for (const Branch& b : r.type.branches)
                std::cout << "outcome [" << outcomes_str(b) << "]  p = " << prob_str(b) << ":  "
                          << branch_str(b) << "\n";
        for (const auto& nline : r.notes)
            std::cout << "note: " << nline << "\n";
    }
    return 0;
}

/// Gate-name resolution for `tbound`: a builtin name, or a builtin prefixed
/// by one 'C' per control wire (CCZ, CCCX, ...).
std::optional<GateSemantics> gate_by_name(std::string name) {
    for (char& c : name)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (auto code = opcode_by_name(name))
        return builtin_semantics(*code);
    uint32_t k = 0;
    while (k < name.size() && name[k] == 'C')
        ++k;
    if (k == 0 || k >= name.size())
        return std::nullopt;
    auto code = opcode_by_name(name.substr(k));
    if (!code || opcode_arity(*code) != 1)
        return std::nullopt;
    ReImParts parts = re_im_parts(builtin_expansion(*code));
    return controlled_semantics(builtin_semantics(*code), parts, k);
}

int cmd_tbound(const CliState& st, const std::string& arg) {
    std::optional<unsigned> bound;
    std::ifstream probe(arg);
    if (probe.good()) {
        Program p = parse_program(read_file(arg), parse_opts(st));
        bound = tcount_lower_bound_program(p);
    } else {
        auto sem = gate_by_name(arg);
        if (!sem)
            throw std::runtime_error("'" + arg +
                                        "' is neither a readable file nor a known gate name");
        bound = tcount_lower_bound(*sem);
    }

    json j = report::base_report(bound ? "ok" : "unbounded");
    if (bound)
        j["tbound"] = *bound;
    emit(j, st);
    if (!st.as_json)
        std::cout << (bound ? std::to_string(*bound) : std::string("unbounded")) << "\n";
    if (!bound)
        throw unsupported_measurement("no finite denominator exponent");
    return 0;
}

int cmd_synth(const CliState& st, const std::string& text) {
    QType t = parse_type(text, parse_opts(st));
    if (t.branches.size() != 1)
        throw unsupported_measurement("synthesis takes a single branch, not a union");
    SynthResult r = prep_clifford_plus_T(t.branches[0]);

    json j = report::base_report(r.certificate.exact ? "ok" : "mismatch");
    j["circuit"] = print_program(r.circuit);
    j["t_count"] = r.t_count;
    j["inferred"] = report::type_json(r.certificate.inferred);
    j["expected"] = report::type_json(r.certificate.requested);
    emit(j, st);
    if (!st.as_json) {
        std::cout << print_program(r.circuit);
        std::cout << "# t-count " << r.t_count << ", certificate "
                  << (r.certificate.exact ? "exact" : "MISMATCH") << "\n";
    }
    return r.certificate.exact ? 0 : 1;
}

int cmd_verify(const CliState& st, const std::string& file, uint64_t seed) {
    Program p = parse_program(read_file(file), parse_opts(st));
    oracle::Tolerances tol;
    tol.qubit_cap = 7;
    oracle::check_cap(p.n, tol);
    json j = report::base_report("pass");
    std::vector<std::string> failures;

    if (!p.has_meas()) {
        GateSemantics sem = track_semantics(p);
        oracle::Mat u = oracle::matrix_of(p, tol);
        for (uint32_t q = 0; q < p.n; ++q) {
            PauliString xq = PauliString::single(p.n, q, Letter::X);
            PauliString zq = PauliString::single(p.n, q, Letter::Z);
            if (!oracle::verify_arrow(u, AdditiveOperator::from_pauli(xq), sem.ximg[q], tol))
                failures.push_back("image of " + xq.str() + " fails against the oracle");
            if (!oracle::verify_arrow(u, AdditiveOperator::from_pauli(zq), sem.zimg[q], tol))
                failures.push_back("image of " + zq.str() + " fails against the oracle");
        }
        std::mt19937_64 rng(seed);
        for (int trial = 0; trial < 16; ++trial) {
            PauliString w = PauliString::identity(p.n);
            for (uint32_t q = 0; q < p.n; ++q)
                w.w.set_letter(q, static_cast<Letter>(rng() % 4));
            if (!oracle::verify_arrow(u, AdditiveOperator::from_pauli(w),
                                      sem.image_of_word(w.w), tol))
                failures.push_back("image of " + w.str() + " fails against the oracle");
        }
    } else {
        // Replay each inferred measurement branch against Born's rule.
        InferResult r = infer(p, initial_type(p), {});
        QType init = initial_type(p);
        if (init.branches.size() != 1)
            throw unsupported_measurement("verification of measured programs needs a single "
                                          "initial branch");
        auto psi0 = oracle::state_of(init.branches[0], tol);
        if (!psi0)
            throw unsupported_measurement("the initial type does not pin a unique state");
        json probs = json::array();
        for (const Branch& b : r.type.branches) {
            oracle::Vec psi = *psi0;
            double prob = 1.0;
            size_t next_meas = 0;
            for (const Op& op : p.ops) {
                if (!op.meas) {
                    oracle::apply_op(psi, op, p.n);
                    continue;
                }
                if (next_meas >= b.outcomes.size())
                    throw unsupported_measurement("branch misses an outcome record");
                int want = b.outcomes[next_meas++];
                oracle::BornResult br = oracle::born_measure(psi, op.qubits[0], p.n, tol);
                prob *= want > 0 ? br.p_plus : br.p_minus;
                auto& post = want > 0 ? br.post_plus : br.post_minus;
                if (!post) {
                    prob = 0.0;
                    break;
                }
                psi = *post;
            }
            double claimed = b.prob_num ? *b.prob_num : (b.prob ? b.prob->value() : 1.0);
            if (std::abs(claimed - prob) > tol.equality)
                failures.push_back("branch [" + outcomes_str(b) + "]: claimed p = " +
                                   prob_str(b) + ", oracle got " + std::to_string(prob));
            if (prob > tol.equality) {
                QType single;
                single.branches.push_back(b);
                if (!oracle::verify_inhabitation(psi, single, tol))
                    failures.push_back("branch [" + outcomes_str(b) +
                                       "]: post-state fails inhabitation");
            }
            json e;
            e["outcomes"] = b.outcomes;
            e["p"] = b.prob ? report::coeff_json(*b.prob) : json(nullptr);
            e["p_num"] = prob;
            probs.push_back(e);
        }
        j["probabilities"] = probs;
        j["inferred"] = report::type_json(r.type);
    }

    bool pass = failures.empty();
    j["verdict"] = pass ? "pass" : "fail";
    for (const auto& f : failures)
        j["diagnostics"].push_back(f);
    emit(j, st);
    if (!st.as_json) {
        std::cout << (pass ? "PASS" : "FAIL") << ": oracle "
                  << (pass ? "confirms" : "rejects") << " the inferred judgment\n";
        for (const auto& f : failures)
            std::cout << "  " << f << "\n";
    }
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CliState st;
    CLI::App app{"symbolic type checker and inference engine for quantum circuits"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--json", st.as_json, "emit a machine-readable report");
    app.add_flag("--numeric", st.numeric, "snap decimal coefficients to exact ring values");

    std::string file, type_text, qubits;
    bool trace = false, do_norm = false, keep_impossible = false, strict = false;
    bool use_oracle = false;
    uint64_t seed = 1;

    auto* c_infer = app.add_subcommand("infer", "infer the output type of a circuit");
    c_infer->add_option("file", file, "circuit file")->required();
    c_infer->add_flag("--trace", trace, "record the type after every statement");
    c_infer->add_flag("--normalize", do_norm, "normalize the result");
    c_infer->add_flag("--keep-impossible", keep_impossible, "keep zero-probability branches");

    auto* c_check = app.add_subcommand("check", "check a circuit against its EXPECT clause");
    c_check->add_option("file", file, "circuit file")->required();
    c_check->add_flag("--strict", strict, "compare raw syntax instead of normal forms");

    auto* c_norm = app.add_subcommand("normalize", "normal form of a type expression");
    c_norm->add_option("type", type_text, "type expression")->required();

    auto* c_sep = app.add_subcommand("separable", "separability across a qubit subset");
    c_sep->add_option("type", type_text, "type expression")->required();
    c_sep->add_option("--qubits", qubits, "comma-separated 1-based qubit list")->required();

    auto* c_meas = app.add_subcommand("measure", "union type after MEAS statements");
    c_meas->add_option("file", file, "circuit file")->required();

    auto* c_tb = app.add_subcommand("tbound", "lower bound on T gates");
    c_tb->add_option("target", file, "circuit file or gate name")->required();

    auto* c_synth = app.add_subcommand("synth", "preparation circuit for a type");
    c_synth->add_option("type", type_text, "type expression")->required();

    auto* c_verify = app.add_subcommand("verify", "dense-matrix check of the judgment");
    c_verify->add_option("file", file, "circuit file")->required();
    c_verify->add_flag("--oracle", use_oracle, "run the dense-matrix oracle")->required();
    c_verify->add_option("--seed", seed, "seed for sampled generator words");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_infer->parsed())
            return cmd_infer(st, file, trace, do_norm, keep_impossible);
        if (c_check->parsed())
            return cmd_check(st, file, strict);
        if (c_norm->parsed())
            return cmd_normalize(st, type_text);
        if (c_sep->parsed())
            return cmd_separable(st, type_text, qubits);
        if (c_meas->parsed())
            return cmd_measure(st, file);
        if (c_tb->parsed())
            return cmd_tbound(st, file);
        if (c_synth->parsed())
            return cmd_synth(st, type_text);
        if (c_verify->parsed())
            return cmd_verify(st, file, seed);
    } catch (const unsupported_measurement& e) {
        json j = report::base_report("unsupported");
        j["diagnostics"].push_back(e.what());
        emit(j, st);
        if (!st.as_json)
            std::cerr << "unsupported: " << e.what() << "\n";
        return 3;
    } catch (const synth_error& e) {
        bool unsupported = std::string(e.what()).rfind("unsupported shape", 0) == 0;
        json j = report::base_report(unsupported ? "unsupported" : "error");
        j["diagnostics"].push_back(e.what());
        emit(j, st);
        if (!st.as_json)
            std::cerr << "synthesis: " << e.what() << "\n";
        return unsupported ? 3 : 2;
    } catch (const oracle::oracle_error& e) {
        json j = report::base_report("unsupported");
        j["diagnostics"].push_back(e.what());
        emit(j, st);
        if (!st.as_json)
            std::cerr << "oracle: " << e.what() << "\n";
        return 3;
    } catch (const infer_error& e) {
        json j = report::base_report("unsupported");
        j["diagnostics"].push_back(e.what());
        emit(j, st);
        if (!st.as_json)
            std::cerr << "inference: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        json j = report::base_report("error");
        j["diagnostics"].push_back(e.what());
        emit(j, st);
        if (!st.as_json)
            std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
