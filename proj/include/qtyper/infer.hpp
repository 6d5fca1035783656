#pragma once
// Typing-judgment engine: pushes types through programs gate by gate,
// delegating MEAS statements to the measurement module and folding the
// union/intersection structure branch-wise.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gates.hpp"
#include "measurement.hpp"
#include "normal_form.hpp"
#include "program.hpp"
#include "types.hpp"

namespace qtyper {

class infer_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct InferOptions {
    bool trace = false;            ///< record the type after every statement
    bool keep_impossible = false;  ///< retain zero-probability measurement branches
    size_t max_summands = 65536;   ///< pre-combination cap per term per gate
    size_t max_branches = 4096;    ///< union width cap
};

struct InferStats {
    size_t max_raw_summands = 0;  ///< largest pre-combination expansion of one term
    size_t max_terms = 0;         ///< largest combined term ever held
    size_t measurements = 0;
};

struct TraceStep {
    std::string op;    ///< statement text, 1-based indices
    std::string type;  ///< type after the statement
};

struct InferResult {
    QType type;
    InferStats stats;
    std::vector<TraceStep> trace;
    std::vector<std::string> notes;  ///< measurement caveats etc.
};

namespace detail {

/// In-place conjugation for a single-Pauli term under a Clifford builtin.
/// Returns false when the term or the gate does not qualify.
inline bool clifford_fast_path(AdditiveOperator& t, OpCode code,
                               const std::vector<uint32_t>& qs) {
    if (!t.is_single_pauli())
        return false;
    auto& slot = t.terms[0];
    PauliString p(std::move(slot.word), slot.c.is_one() ? 0u : 2u);
    switch (code) {
        case OpCode::I: break;
        case OpCode::X: apply_x(p, qs[0]); break;
        case OpCode::Y: apply_y(p, qs[0]); break;
        case OpCode::Z: apply_z(p, qs[0]); break;
        case OpCode::H: apply_h(p, qs[0]); break;
        case OpCode::S: apply_s(p, qs[0]); break;
        case OpCode::SDG: apply_sdg(p, qs[0]); break;
        case OpCode::CNOT: apply_cnot(p, qs[0], qs[1]); break;
        case OpCode::CZ: apply_cz(p, qs[0], qs[1]); break;
        case OpCode::T:
        case OpCode::TDG:
            // not Clifford: restore and fall back
            slot.word = std::move(p.w);
            return false;
    }
    slot.word = std::move(p.w);
    slot.c = RingCoeff::integer(p.sign());
    return true;
}

/// General conjugation of one additive term: every summand's letters at
/// `at` are replaced by their image under the gate semantics, the result
/// combined exactly.  `raw` reports the pre-combination summand count.
inline AdditiveOperator conjugate_term(const AdditiveOperator& t, const GateSemantics& g,
                                       const std::vector<uint32_t>& at, size_t cap,
                                       size_t& raw, const std::string& where) {
    const uint32_t k = static_cast<uint32_t>(at.size());
    std::map<PauliBits, RingCoeff> acc;
    raw = 0;
    for (auto& s : t.terms) {
        PauliBits sub(k);
        PauliBits rest = s.word;
        for (uint32_t i = 0; i < k; ++i) {
            sub.set_letter(i, s.word.letter(at[i]));
            rest.set_letter(at[i], Letter::I);
        }
        const AdditiveOperator& img = g.image_of_word(sub);
        raw += img.terms.size();
        if (raw > cap)
            throw infer_error("summand cap (" + std::to_string(cap) + ") exceeded at " +
                              where);
        // image letters land on qubits the rest-word leaves as identity,
        // so the product carries no extra phase
        for (auto& u : img.terms) {
            PauliBits w = rest;
            for (uint32_t i = 0; i < k; ++i)
                w.set_letter(at[i], u.word.letter(i));
            acc[w] += s.c * u.c;
        }
    }
    return AdditiveOperator::from_map(t.n, acc);
}

}  // namespace detail

/// Conjugate every term of a branch by one gate statement.
inline void apply_gate(Branch& b, const Op& op, const InferOptions& opt, InferStats& st,
                       const std::string& where) {
    const GateSemantics& g = builtin_semantics(op.code);
    b.drop_partitions_touching(op.qubits);
    for (auto& t : b.terms) {
        if (detail::clifford_fast_path(t, op.code, op.qubits)) {
            st.max_raw_summands = std::max(st.max_raw_summands, size_t{1});
            continue;
        }
        size_t raw = 0;
        t = detail::conjugate_term(t, g, op.qubits, opt.max_summands, raw, where);
        st.max_raw_summands = std::max(st.max_raw_summands, raw);
        st.max_terms = std::max(st.max_terms, t.terms.size());
        if (t.empty())
            throw infer_error("internal: term vanished under conjugation at " + where);
    }
}

namespace detail {

/// Measurement step: expands every branch into its outcome branches,
/// folds cumulative probabilities and the outcome history, and
/// union-simplifies the result.
inline void apply_meas(QType& q, uint32_t qubit, const InferOptions& opt, InferStats& st,
                       std::vector<std::string>& notes, const std::string& where) {
    std::vector<Branch> next;
    for (auto& b : q.branches) {
        MeasurementOutcome out = measure_branch(b, qubit, opt.keep_impossible);
        for (auto& ob : out.branches) {
            Branch nb = std::move(ob.post);
            nb.outcomes = b.outcomes;
            nb.outcomes.push_back(ob.sign);
            // cumulative probability: exact while every step is exact
            if (ob.prob && (b.prob || b.outcomes.empty()))
                nb.prob = b.prob.value_or(RingCoeff::one()) * *ob.prob;
            if (nb.prob)
                nb.prob_num = nb.prob->value();
            else if (ob.prob_num && (b.prob_num || b.outcomes.empty()))
                nb.prob_num = b.prob_num.value_or(1.0) * *ob.prob_num;
            if (!ob.exact)
                notes.push_back(where + " outcome " + (ob.sign > 0 ? "+" : "-") + ": " +
                                ob.note);
            next.push_back(std::move(nb));
        }
    }
    q.branches = std::move(next);
    q = union_simplify(q);
    if (q.branches.empty())
        throw infer_error("no inhabitable branch survives " + where);
    if (q.branches.size() > opt.max_branches)
        throw infer_error("branch cap exceeded at " + where);
    ++st.measurements;
}

}  // namespace detail

/// Push a type through a whole program.
inline InferResult infer(const Program& p, const QType& init,
                         const InferOptions& opt = {}) {
    if (init.n != p.n)
        throw infer_error("initial type is " + std::to_string(init.n) +
                          " qubits wide, program declares " + std::to_string(p.n));
    InferResult r;
    r.type = init;
    size_t pos = 0;
    for (auto& op : p.ops) {
        ++pos;
        std::string where = "statement " + std::to_string(pos) + " (" + op.text + ")";
        if (op.meas)
            detail::apply_meas(r.type, op.qubits[0], opt, r.stats, r.notes, where);
        else
            for (auto& b : r.type.branches)
                apply_gate(b, op, opt, r.stats, where);
        if (opt.trace)
            r.trace.push_back({op.text, type_str(r.type)});
    }
    return r;
}

/// Arrow semantics of a measurement-free program: the images of all 2n
/// Pauli generators under conjugation by the whole circuit.
inline GateSemantics track_semantics(const Program& p, const InferOptions& opt = {}) {
    if (p.has_meas())
        throw infer_error("arrow semantics is undefined for programs that measure");
    GateSemantics g("program", p.n);
    InferStats st;
    InferOptions o = opt;
    for (uint32_t q = 0; q < p.n; ++q) {
        Branch bx(p.n), bz(p.n);
        bx.terms = {AdditiveOperator::from_pauli(PauliString::single(p.n, q, Letter::X))};
        bz.terms = {AdditiveOperator::from_pauli(PauliString::single(p.n, q, Letter::Z))};
        size_t pos = 0;
        for (auto& op : p.ops) {
            ++pos;
            std::string where = "statement " + std::to_string(pos) + " (" + op.text + ")";
            apply_gate(bx, op, o, st, where);
            apply_gate(bz, op, o, st, where);
        }
        g.ximg[q] = bx.terms[0];
        g.zimg[q] = bz.terms[0];
    }
    return g;
}

/// T-count lower bound of a measurement-free program.
inline std::optional<unsigned> tcount_lower_bound_program(const Program& p) {
    return tcount_lower_bound(track_semantics(p));
}

struct CheckResult {
    bool pass = false;
    QType inferred;        ///< raw engine output
    QType expected;        ///< as given
    std::string diff;      ///< human-readable mismatch summary, empty on pass
    InferResult detail;    ///< stats/trace/notes from the inference run
};

namespace detail {

inline std::vector<std::string> branch_keys(const QType& t) {
    std::vector<std::string> keys;
    for (auto& b : t.branches) {
        NormalizeResult nr = normalize_branch(b);
        keys.push_back(nr.ok() ? branch_str(nr.branch) : "!" + branch_str(b));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

}  // namespace detail

/// Infer and compare against a claimed type up to normalization.
inline CheckResult check(const Program& p, const QType& init, const QType& claimed,
                         const InferOptions& opt = {}, bool strict = false) {
    CheckResult c;
    c.detail = infer(p, init, opt);
    c.inferred = c.detail.type;
    c.expected = claimed;
    c.pass = strict ? type_str(c.inferred) == type_str(claimed)
                    : types_equal(c.inferred, claimed);
    if (!c.pass) {
        if (strict) {
            c.diff = "inferred `" + type_str(c.inferred) + "` != expected `" +
                     type_str(claimed) + "` (strict)";
        } else {
            auto got = detail::branch_keys(c.inferred);
            auto want = detail::branch_keys(claimed);
            std::vector<std::string> missing, surplus;
            std::set_difference(want.begin(), want.end(), got.begin(), got.end(),
                                std::back_inserter(missing));
            std::set_difference(got.begin(), got.end(), want.begin(), want.end(),
                                std::back_inserter(surplus));
            auto show = [](const std::string& k) {
                return k.starts_with("!") ? k.substr(1) + " (not normalizable)" : k;
            };
            c.diff = "inferred `" + type_str(c.inferred) + "`";
            for (auto& m : missing)
                c.diff += "\n  expected branch not derived: " + show(m);
            for (auto& s : surplus)
                c.diff += "\n  derived branch not expected: " + show(s);
        }
    }
    return c;
}

/// Optional rewrite honoring the deferred-measurement principle: a MEAS
/// commutes with any later gate that does not touch the measured qubit
/// (there is no classical control in the language), so such measurements
/// sink toward the end of the program.
inline Program defer_measurements(const Program& p) {
    Program r = p;
    bool moved = true;
    while (moved) {
        moved = false;
        for (size_t i = 0; i + 1 < r.ops.size(); ++i) {
            if (!r.ops[i].meas || r.ops[i + 1].meas)
                continue;
            uint32_t q = r.ops[i].qubits[0];
            auto& g = r.ops[i + 1].qubits;
            if (std::find(g.begin(), g.end(), q) == g.end()) {
                std::swap(r.ops[i], r.ops[i + 1]);
                moved = true;
            }
        }
    }
    return r;
}

}  // namespace qtyper
