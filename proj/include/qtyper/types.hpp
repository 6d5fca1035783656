#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "qtyper/additive.hpp"

namespace qtyper {

/**
 * A separability annotation: the listed terms of the owning branch are
 * jointly supported on `qubits` and pin that subsystem, so the branch
 * factors across the cut.  Annotations are granted by the separability
 * check and retained as long as later gates stay inside the block.
 */
struct Partition {
    std::vector<uint32_t> qubits;        // ascending
    std::vector<size_t> term_indices;    // indices into Branch::terms

    friend bool operator==(const Partition&, const Partition&) = default;
};

/**
 * An intersection of type terms: a state has this type iff it is a +1
 * eigenstate of every term.  Pure Pauli terms form a stabilizer-style
 * intersection; additive terms extend it beyond the Clifford fragment.
 * Measurement bookkeeping (branch probability, outcome history) rides
 * along and is ignored by equality.
 */
struct Branch {
    uint32_t n = 0;
    std::vector<AdditiveOperator> terms;
    std::vector<Partition> partitions;

    std::optional<RingCoeff> prob;    // exact branch probability, if known
    std::optional<double> prob_num;   // numeric fallback when outside the ring
    std::vector<int> outcomes;        // measurement sign history (+1/-1)

    Branch() = default;
    explicit Branch(uint32_t n_) : n(n_) {}

    bool all_pauli() const {
        for (auto& t : terms)
            if (!t.is_single_pauli())
                return false;
        return true;
    }

    std::vector<PauliString> pauli_terms() const {
        std::vector<PauliString> v;
        for (auto& t : terms)
            if (t.is_single_pauli())
                v.push_back(t.as_pauli());
        return v;
    }

    std::vector<AdditiveOperator> additive_terms() const {
        std::vector<AdditiveOperator> v;
        for (auto& t : terms)
            if (!t.is_single_pauli())
                v.push_back(t);
        return v;
    }

    void drop_partitions_touching(const std::vector<uint32_t>& qubits) {
        auto inside = [&](const Partition& p) {
            for (uint32_t q : qubits)
                if (!std::binary_search(p.qubits.begin(), p.qubits.end(), q))
                    return false;
            return true;
        };
        auto disjoint = [&](const Partition& p) {
            for (uint32_t q : qubits)
                if (std::binary_search(p.qubits.begin(), p.qubits.end(), q))
                    return false;
            return true;
        };
        std::erase_if(partitions,
                      [&](const Partition& p) { return !inside(p) && !disjoint(p); });
    }
};

/// A union of branches: the state inhabits at least one of them.
struct QType {
    uint32_t n = 0;
    std::vector<Branch> branches;

    QType() = default;
    explicit QType(uint32_t n_) : n(n_) {}
    static QType single(Branch b) {
        QType t(b.n);
        t.branches.push_back(std::move(b));
        return t;
    }
};

// ----------------------------------------------------------------- print ---

inline std::string term_str(const AdditiveOperator& m) { return m.str(); }

inline std::string qubit_list_str(const std::vector<uint32_t>& qs) {
    std::string s = "{";
    for (size_t i = 0; i < qs.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(qs[i] + 1);  // user-facing indices are 1-based
    }
    return s + "}";
}

/// Re-index a full-width term onto the partition's local qubits.
inline AdditiveOperator localize(const AdditiveOperator& m, const std::vector<uint32_t>& qs) {
    AdditiveOperator r(static_cast<uint32_t>(qs.size()));
    for (auto& t : m.terms) {
        PauliBits w(r.n);
        for (uint32_t i = 0; i < r.n; ++i)
            w.set_letter(i, t.word.letter(qs[i]));
        r.terms.push_back({w, t.c});
    }
    std::sort(r.terms.begin(), r.terms.end());
    return r;
}

inline std::string branch_str(const Branch& b) {
    std::vector<bool> in_partition(b.terms.size(), false);
    std::vector<std::string> parts;
    for (auto& p : b.partitions) {
        std::vector<std::string> locals;
        bool single_pauli = p.term_indices.size() == 1;
        for (size_t i : p.term_indices) {
            in_partition[i] = true;
            AdditiveOperator loc = localize(b.terms[i], p.qubits);
            if (!loc.is_single_pauli())
                single_pauli = false;
            locals.push_back(loc.str());
        }
        std::string body;
        for (size_t i = 0; i < locals.size(); ++i)
            body += (i ? " & " : "") + locals[i];
        if (single_pauli)
            parts.push_back(body + "@" + qubit_list_str(p.qubits));
        else
            parts.push_back("(" + body + ")@" + qubit_list_str(p.qubits));
    }
    for (size_t i = 0; i < b.terms.size(); ++i)
        if (!in_partition[i])
            parts.push_back(b.terms[i].str());
    if (parts.empty())
        return "I";
    std::string s;
    for (size_t i = 0; i < parts.size(); ++i)
        s += (i ? " & " : "") + parts[i];
    return s;
}

inline std::string type_str(const QType& t) {
    if (t.branches.empty())
        return "<uninhabited>";
    std::string s;
    for (size_t i = 0; i < t.branches.size(); ++i) {
        if (i)
            s += " | ";
        bool wrap = t.branches.size() > 1 && t.branches[i].terms.size() > 1;
        s += wrap ? "(" + branch_str(t.branches[i]) + ")" : branch_str(t.branches[i]);
    }
    return s;
}

}  // namespace qtyper
