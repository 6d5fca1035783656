#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "qtyper/normal_form.hpp"

namespace qtyper {

/**
 * Separability decisions.  A qubit set K is granted iff after
 * normalization every qubit of K is pinned by a constraint that lives
 * entirely inside K (its pivot row, or a single-qubit additive term),
 * and no term straddles the cut.  The pinning terms are independent
 * and commuting, so they determine the K-side state uniquely: every
 * inhabitant factors as psi_K tensor psi_rest.
 */
struct SeparabilityResult {
    bool granted = false;
    std::string reason;        // on denial
    Branch factored;           // on grant: branch with partition annotations
};

namespace detail {

inline bool support_subset(const std::vector<uint32_t>& sup, const std::vector<bool>& in_k) {
    for (uint32_t q : sup)
        if (!in_k[q])
            return false;
    return true;
}

inline bool support_disjoint(const std::vector<uint32_t>& sup, const std::vector<bool>& in_k) {
    for (uint32_t q : sup)
        if (in_k[q])
            return false;
    return true;
}

}  // namespace detail

/**
 * Decide separability of the qubit set K (0-based) for a branch.
 * On success the returned branch carries two partition annotations,
 * one for K and one for the complement (when the complement owns any
 * terms); the terms themselves are unchanged.
 */
inline SeparabilityResult separable_subset(const Branch& b, std::vector<uint32_t> K) {
    SeparabilityResult res;
    std::sort(K.begin(), K.end());
    K.erase(std::unique(K.begin(), K.end()), K.end());
    if (!K.empty() && K.back() >= b.n) {
        res.reason = "qubit index out of range";
        return res;
    }

    NormalizeResult nr = normalize_branch(b);
    if (!nr.ok()) {
        res.reason = "branch does not normalize: " + nr.diagnostic;
        return res;
    }
    const Branch& nb = nr.branch;

    std::vector<bool> in_k(b.n, false);
    for (uint32_t q : K)
        in_k[q] = true;

    // The full set and the empty set factor trivially.
    if (K.empty() || K.size() == b.n) {
        res.granted = true;
        res.factored = nb;
        Partition p;
        p.qubits.resize(b.n);
        for (uint32_t q = 0; q < b.n; ++q)
            p.qubits[q] = q;
        for (size_t i = 0; i < nb.terms.size(); ++i)
            p.term_indices.push_back(i);
        res.factored.partitions = {p};
        return res;
    }

    // No term may straddle the cut.
    std::vector<size_t> local, remote;
    for (size_t i = 0; i < nb.terms.size(); ++i) {
        auto sup = nb.terms[i].support();
        if (detail::support_subset(sup, in_k))
            local.push_back(i);
        else if (detail::support_disjoint(sup, in_k))
            remote.push_back(i);
        else {
            res.reason = "term " + nb.terms[i].str() + " straddles the cut";
            return res;
        }
    }

    // A cut factors when at least one side is fully pinned: Pauli rows
    // pin their pivot column; a single-qubit additive term pins its
    // qubit (a valid traceless one-qubit operator has a 1-dimensional
    // +1 eigenspace).  A pinned side is in a unique pure state, so the
    // whole system is a product across the cut.
    auto side_pinned = [&](const std::vector<size_t>& side_terms, bool want_in_k) {
        std::vector<bool> pinned(b.n, false);
        std::vector<PauliString> rows;
        for (size_t i : side_terms)
            if (nb.terms[i].is_single_pauli())
                rows.push_back(nb.terms[i].as_pauli());
        NormalForm nf = normalize_pauli(rows);
        if (!nf.ok())
            return false;
        for (uint32_t c : nf.pivots)
            pinned[c] = true;
        for (size_t i : side_terms) {
            const AdditiveOperator& t = nb.terms[i];
            if (!t.is_single_pauli()) {
                auto sup = t.support();
                if (sup.size() == 1 && t.traceless_part() == t)
                    pinned[sup[0]] = true;
            }
        }
        for (uint32_t q = 0; q < b.n; ++q)
            if (in_k[q] == want_in_k && !pinned[q])
                return false;
        return true;
    };
    if (!side_pinned(local, true) && !side_pinned(remote, false)) {
        res.reason = "neither side of the cut is pinned by its own constraints";
        return res;
    }

    res.granted = true;
    res.factored = nb;
    Partition pk;
    pk.qubits = K;
    pk.term_indices = local;
    res.factored.partitions.push_back(pk);
    if (!remote.empty()) {
        Partition pr;
        for (uint32_t q = 0; q < b.n; ++q)
            if (!in_k[q])
                pr.qubits.push_back(q);
        pr.term_indices = remote;
        res.factored.partitions.push_back(pr);
    }
    // Canonical block order: ascending by first qubit, so the cut and its
    // complement print the same factored branch.
    std::sort(res.factored.partitions.begin(), res.factored.partitions.end(),
              [](const Partition& x, const Partition& y) {
                  return x.qubits.front() < y.qubits.front();
              });
    return res;
}

/// Single-qubit separability: the K = {k} case.
inline bool separable_single(const Branch& b, uint32_t k) {
    return separable_subset(b, {k}).granted;
}

}  // namespace qtyper
