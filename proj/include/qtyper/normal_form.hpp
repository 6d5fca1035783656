#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtyper/types.hpp"

namespace qtyper {

/**
 * Canonical form of a Pauli intersection.  Rows are rewritten by term
 * multiplication (which preserves the stabilizer group and hence the
 * type) until each carries a unique pivot column: the first column
 * where the row has an X (or, failing that, a Z) component that no
 * other row shares.  Rows are then ordered by pivot.
 *
 * Inputs that are not a legal intersection are reported instead:
 *  - anticommuting: two terms anticommute, so no state satisfies both;
 *  - contradiction: a product of terms equals -I (uninhabited);
 *  - redundant: a product of terms equals +I (dependent generator).
 */
struct NormalForm {
    enum class Status { ok, anticommuting, contradiction, redundant };

    Status status = Status::ok;
    std::vector<PauliString> rows;   // sorted by pivot column on success
    std::vector<uint32_t> pivots;    // pivot column of each row
    std::vector<bool> pivot_is_x;    // X-type or Z-type pivot

    // Witness for failures: offending term indices (anticommuting) or
    // nothing further (the dependency itself is the witness).
    size_t witness_i = 0, witness_j = 0;

    bool ok() const { return status == Status::ok; }

    std::string diagnostic() const {
        switch (status) {
            case Status::ok: return "ok";
            case Status::anticommuting:
                return "terms " + std::to_string(witness_i + 1) + " and " +
                       std::to_string(witness_j + 1) +
                       " anticommute; the intersection is uninhabited";
            case Status::contradiction:
                return "terms multiply to -I; the intersection is uninhabited";
            case Status::redundant:
                return "a term is a product of the others (redundant generator)";
        }
        return "";
    }
};

/**
 * Normalize a list of hermitian +-1 Pauli terms.  With drop_redundant,
 * rows that reduce to +I are silently removed (used internally where a
 * rewrite deliberately introduces a dependent generator); otherwise
 * they are reported.
 */
inline NormalForm normalize_pauli(std::vector<PauliString> rows, bool drop_redundant = false) {
    NormalForm nf;
    const uint32_t n = rows.empty() ? 0 : rows[0].n();

    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = i + 1; j < rows.size(); ++j)
            if (!commutes(rows[i].w, rows[j].w)) {
                nf.status = NormalForm::Status::anticommuting;
                nf.witness_i = i;
                nf.witness_j = j;
                return nf;
            }

    std::vector<bool> pivoted(rows.size(), false);
    std::vector<uint32_t> pivot_col(rows.size(), 0);
    std::vector<bool> pivot_x(rows.size(), false);

    for (uint32_t col = 0; col < n; ++col) {
        // Prefer an X-component pivot; fall back to a Z-component one.
        for (bool want_x : {true, false}) {
            size_t piv = rows.size();
            for (size_t j = 0; j < rows.size(); ++j) {
                if (pivoted[j])
                    continue;
                bool has = want_x ? rows[j].w.xbit(col) : rows[j].w.zbit(col);
                if (has) {
                    piv = j;
                    break;
                }
            }
            if (piv == rows.size())
                continue;
            for (size_t k = 0; k < rows.size(); ++k) {
                if (k == piv)
                    continue;
                bool has = want_x ? rows[k].w.xbit(col) : rows[k].w.zbit(col);
                if (has)
                    rows[k] = rows[k] * rows[piv];
            }
            pivoted[piv] = true;
            pivot_col[piv] = col;
            pivot_x[piv] = want_x;
            break;
        }
    }

    // Unpivoted rows have been reduced to +-I: dependencies.
    std::vector<size_t> keep;
    for (size_t j = 0; j < rows.size(); ++j) {
        if (pivoted[j]) {
            keep.push_back(j);
            continue;
        }
        assert(rows[j].w.is_identity());
        if (rows[j].phase == 2) {
            nf.status = NormalForm::Status::contradiction;
            nf.witness_i = j;
            return nf;
        }
        if (!drop_redundant) {
            nf.status = NormalForm::Status::redundant;
            nf.witness_i = j;
            return nf;
        }
    }

    std::sort(keep.begin(), keep.end(),
              [&](size_t a, size_t b) { return pivot_col[a] < pivot_col[b]; });
    for (size_t j : keep) {
        nf.rows.push_back(rows[j]);
        nf.pivots.push_back(pivot_col[j]);
        nf.pivot_is_x.push_back(pivot_x[j]);
    }
    return nf;
}

/**
 * Decide whether +-p lies in the group generated by canonical rows.
 * Pivot columns are exclusive to their rows, so the exponent of each
 * generator can be read off p directly; the residual product decides
 * membership and sign.  Returns +1 / -1 for membership, nothing else.
 */
inline std::optional<int> group_sign_of(const NormalForm& nf, const PauliString& p) {
    if (!p.is_hermitian())
        return std::nullopt;
    PauliString acc = PauliString::identity(p.n());
    for (size_t j = 0; j < nf.rows.size(); ++j) {
        bool bit = nf.pivot_is_x[j] ? p.w.xbit(nf.pivots[j]) : p.w.zbit(nf.pivots[j]);
        if (bit)
            acc = acc * nf.rows[j];
    }
    if (!(acc.w == p.w))
        return std::nullopt;
    return acc.phase == p.phase ? +1 : -1;
}

// ------------------------------------------------------ branch normalize ---

struct NormalizeResult {
    NormalForm::Status status = NormalForm::Status::ok;
    std::string diagnostic;
    Branch branch;

    bool ok() const { return status == NormalForm::Status::ok; }
};

/**
 * Normalize a branch: Pauli terms are brought to canonical row order;
 * additive terms (which have no normal form) are kept, deduplicated
 * and sorted.  Partition annotations are re-derived by the caller.
 */
inline NormalizeResult normalize_branch(const Branch& b, bool drop_redundant = false) {
    NormalizeResult res;
    std::vector<PauliString> rows;
    std::vector<AdditiveOperator> additive;
    for (auto& t : b.terms) {
        if (t.is_single_pauli())
            rows.push_back(t.as_pauli());
        else
            additive.push_back(t);
    }
    NormalForm nf = normalize_pauli(std::move(rows), drop_redundant);
    res.status = nf.status;
    res.diagnostic = nf.diagnostic();
    if (!nf.ok())
        return res;

    Branch out(b.n);
    out.prob = b.prob;
    out.prob_num = b.prob_num;
    out.outcomes = b.outcomes;
    for (auto& r : nf.rows)
        out.terms.push_back(AdditiveOperator::from_pauli(r));
    std::sort(additive.begin(), additive.end());
    additive.erase(std::unique(additive.begin(), additive.end()), additive.end());
    for (auto& m : additive)
        out.terms.push_back(m);
    res.branch = std::move(out);
    return res;
}

// ----------------------------------------------------------- type equality ---

namespace detail {

/// Canonical comparison key of a branch, or nullopt if not normalizable.
inline std::optional<std::string> branch_key(const Branch& b) {
    NormalizeResult r = normalize_branch(b);
    if (!r.ok())
        return std::nullopt;
    std::string key;
    for (auto& t : r.branch.terms)
        key += t.str() + ";";
    return key;
}

}  // namespace detail

/**
 * Semantic equality of types: branches compare via canonical keys
 * (normal form for the Pauli part, canonical sums for the rest) as
 * unordered sets.  Partition annotations and probability bookkeeping
 * are derived data and do not participate.  Branches that fail to
 * normalize compare by their raw printed form.
 */
inline bool types_equal(const QType& a, const QType& b) {
    if (a.n != b.n)
        return false;
    auto keys = [](const QType& t) {
        std::vector<std::string> ks;
        for (auto& br : t.branches) {
            auto k = detail::branch_key(br);
            ks.push_back(k ? *k : "!" + branch_str(br));
        }
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        return ks;
    };
    return keys(a) == keys(b);
}

/**
 * Simplify a union: drop uninhabited branches, deduplicate, and drop
 * branches subsumed by a weaker one (every constraint of the weaker
 * branch is implied by the stronger branch's group).
 */
inline QType union_simplify(const QType& t) {
    auto fold_prob = [](Branch& into, const Branch& from) {
        if (into.prob && from.prob)
            *into.prob += *from.prob;
        else
            into.prob.reset();
        if (into.prob_num && from.prob_num)
            *into.prob_num += *from.prob_num;
        else
            into.prob_num.reset();
    };

    QType out(t.n);
    std::vector<std::string> seen;
    for (auto& br : t.branches) {
        NormalizeResult r = normalize_branch(br);
        if (r.status == NormalForm::Status::anticommuting ||
            r.status == NormalForm::Status::contradiction)
            continue;
        auto key = detail::branch_key(br);
        std::string k = key ? *key : "!" + branch_str(br);
        auto it = std::find(seen.begin(), seen.end(), k);
        if (it != seen.end()) {
            fold_prob(out.branches[it - seen.begin()], br);
            continue;
        }
        seen.push_back(k);
        out.branches.push_back(br);
    }

    // Subsumption is only decided for pure Pauli branches.
    auto subsumes = [](const Branch& weak, const Branch& strong) {
        if (!weak.all_pauli() || !strong.all_pauli())
            return false;
        NormalForm nfs = normalize_pauli(strong.pauli_terms());
        if (!nfs.ok())
            return false;
        for (auto& t : weak.pauli_terms()) {
            auto s = group_sign_of(nfs, t);
            if (!s || *s != +1)
                return false;
        }
        return true;
    };
    std::vector<bool> drop(out.branches.size(), false);
    for (size_t i = 0; i < out.branches.size(); ++i)
        for (size_t j = 0; j < out.branches.size(); ++j) {
            if (i == j || drop[i] || drop[j])
                continue;
            // branch j's states all satisfy branch i: j is redundant.
            if (subsumes(out.branches[i], out.branches[j])) {
                fold_prob(out.branches[i], out.branches[j]);
                drop[j] = true;
            }
        }
    QType final_t(t.n);
    for (size_t i = 0; i < out.branches.size(); ++i)
        if (!drop[i])
            final_t.branches.push_back(out.branches[i]);
    return final_t;
}

}  // namespace qtyper
