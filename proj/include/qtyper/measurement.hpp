#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtyper/normal_form.hpp"
#include "qtyper/separability.hpp"

namespace qtyper {

struct measurement_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for shapes the additive measurement theory does not cover.
struct unsupported_measurement : measurement_error {
    using measurement_error::measurement_error;
};

struct OutcomeBranch {
    int sign = +1;                   // measured eigenvalue of Z_q
    Branch post;
    std::optional<RingCoeff> prob;   // exact probability when defined
    std::optional<double> prob_num;  // numeric fallback
    bool exact = true;               // false when renormalization left the ring
    std::string note;                // set when exactness was lost
};

struct MeasurementOutcome {
    uint32_t qubit = 0;
    bool deterministic = false;
    enum class Method { stabilizer, additive_2q, iz_lemma } method = Method::stabilizer;
    std::vector<OutcomeBranch> branches;
};

// ------------------------------------------------------------ stabilizer ---

/**
 * Z-basis measurement of a pure Pauli intersection (the stabilizer
 * algorithm).  Three cases:
 *  - some term has an X/Y at the qubit: the outcome is random (1/2
 *    each); that term is consumed to repair the others, and both signed
 *    branches are emitted;
 *  - +-Z_q is already in the group: the outcome is deterministic; the
 *    terms are rewritten to expose it;
 *  - otherwise the type underdetermines the probability: both branches
 *    are emitted without probabilities.
 */
inline MeasurementOutcome measure_stabilizer(const Branch& b, uint32_t q) {
    if (q >= b.n)
        throw measurement_error("measured qubit out of range");
    if (!b.all_pauli())
        throw measurement_error("measure_stabilizer requires a pure Pauli branch");

    NormalForm nf = normalize_pauli(b.pauli_terms());
    if (!nf.ok())
        throw measurement_error("branch does not normalize: " + nf.diagnostic());
    std::vector<PauliString> rows = nf.rows;

    MeasurementOutcome out;
    out.qubit = q;
    out.method = MeasurementOutcome::Method::stabilizer;

    const PauliString zq = PauliString::single(b.n, q, Letter::Z);
    auto make_branch = [&](int sign, std::vector<PauliString> terms) {
        std::vector<PauliString> all;
        all.push_back(sign > 0 ? zq : -zq);
        for (auto& t : terms)
            all.push_back(t);
        NormalForm post = normalize_pauli(all, /*drop_redundant=*/true);
        if (!post.ok())
            throw measurement_error("post-measurement branch is inconsistent");
        Branch br(b.n);
        for (auto& r : post.rows)
            br.terms.push_back(AdditiveOperator::from_pauli(r));
        return br;
    };

    size_t xrow = rows.size();
    for (size_t j = 0; j < rows.size(); ++j)
        if (rows[j].w.xbit(q)) {
            xrow = j;
            break;
        }

    if (xrow != rows.size()) {
        // Random outcome: repair other X-carrying terms with the pivot,
        // then drop it.
        std::vector<PauliString> rest;
        for (size_t j = 0; j < rows.size(); ++j) {
            if (j == xrow)
                continue;
            rest.push_back(rows[j].w.xbit(q) ? rows[j] * rows[xrow] : rows[j]);
        }
        const RingCoeff half = RingCoeff::dyadic(1, 1);
        for (int sign : {+1, -1}) {
            OutcomeBranch ob;
            ob.sign = sign;
            ob.post = make_branch(sign, rest);
            ob.prob = half;
            out.branches.push_back(std::move(ob));
        }
        return out;
    }

    if (auto s = group_sign_of(nf, zq)) {
        // Deterministic: expose the signed Z_q.
        PauliString szq = *s > 0 ? zq : -zq;
        std::vector<PauliString> rewritten;
        for (auto& r : rows)
            rewritten.push_back(r.w.zbit(q) ? r * szq : r);
        OutcomeBranch ob;
        ob.sign = *s;
        ob.post = make_branch(*s, rewritten);
        ob.prob = RingCoeff::one();
        out.branches.push_back(std::move(ob));
        out.deterministic = true;
        return out;
    }

    // Underdetermined: the type cannot assign probabilities.
    for (int sign : {+1, -1}) {
        OutcomeBranch ob;
        ob.sign = sign;
        ob.post = make_branch(sign, rows);
        out.branches.push_back(std::move(ob));
    }
    return out;
}

// --------------------------------------------------------------- additive ---

/// Born probabilities for measuring a single qubit of type m: with
/// m = aX + bY + cZ (+ tI), Pr(+1) = (1+c)/2 and Pr(-1) = (1-c)/2.
inline std::pair<RingCoeff, RingCoeff> meas_prob_1q(const AdditiveOperator& m) {
    if (m.n != 1 || !m.is_valid())
        throw measurement_error("meas_prob_1q expects a valid one-qubit operator");
    PauliBits zw(1);
    zw.set_letter(0, Letter::Z);
    RingCoeff c = m.coeff(zw);
    const RingCoeff half = RingCoeff::dyadic(1, 1);
    return {(RingCoeff::one() + c) * half, (RingCoeff::one() - c) * half};
}

/**
 * The I/Z-term rewrite: when M = I (x) N0 + Z (x) N3 relative to the
 * measured qubit, the post-measurement operator for outcome +-1 is
 * N0 +- N3, which squares to the identity automatically.  Returned on
 * n-1 qubits.
 */
inline std::pair<AdditiveOperator, AdditiveOperator> measure_additive_IZ_term(
    const AdditiveOperator& m, uint32_t q) {
    if (q >= m.n)
        throw measurement_error("measured qubit out of range");
    if (m.has_x_or_y_at(q))
        throw unsupported_measurement(
            "term has an X/Y component on the measured qubit; the general "
            "n-qubit additive case is not covered");
    auto parts = m.split_at(q);
    const AdditiveOperator& n0 = parts[static_cast<unsigned>(Letter::I)];
    const AdditiveOperator& n3 = parts[static_cast<unsigned>(Letter::Z)];
    return {n0 + n3, n0 - n3};
}

namespace detail {

/// Swap the letters of two qubits in every summand.
inline AdditiveOperator swap_qubits(const AdditiveOperator& m, uint32_t a, uint32_t b) {
    AdditiveOperator r(m.n);
    for (auto& t : m.terms) {
        PauliBits w = t.word;
        Letter la = w.letter(a), lb = w.letter(b);
        w.set_letter(a, lb);
        w.set_letter(b, la);
        r.terms.push_back({w, t.c});
    }
    std::sort(r.terms.begin(), r.terms.end());
    return r;
}

/**
 * Probabilities for a complete branch: expand E = prod_j (I + M_j);
 * completeness makes the identity coefficient of E equal to 1, and
 * then Pr(+-1) = (1 +- [coefficient of Z_q in E]) / 2.
 */
inline std::optional<std::pair<RingCoeff, RingCoeff>> complete_branch_probs(
    const std::vector<AdditiveOperator>& terms, uint32_t n, uint32_t q) {
    if (terms.size() != n || n > 8)
        return std::nullopt;
    ComplexExpansion e = ComplexExpansion::identity(n);
    for (auto& m : terms) {
        ComplexExpansion f = ComplexExpansion::identity(n) + m.complex();
        e = e * f;
    }
    auto it = e.terms.find(PauliBits(n));
    if (it == e.terms.end() || !(it->second == CRing::real(RingCoeff::one())))
        return std::nullopt;  // not actually a complete independent set
    PauliBits zq(n);
    zq.set_letter(q, Letter::Z);
    RingCoeff c = RingCoeff::zero();
    if (auto zt = e.terms.find(zq); zt != e.terms.end()) {
        if (!zt->second.is_real())
            return std::nullopt;
        c = zt->second.re;
    }
    const RingCoeff half = RingCoeff::dyadic(1, 1);
    RingCoeff pp = (RingCoeff::one() + c) * half;
    RingCoeff pm = (RingCoeff::one() - c) * half;
    if (pp.value() < -1e-12 || pp.value() > 1.0 + 1e-12)
        return std::nullopt;
    return std::make_pair(pp, pm);
}

}  // namespace detail

/**
 * Measurement of the first (or, by symmetry, second) qubit of a
 * two-term two-qubit additive intersection.  Decomposing each of
 * M1, M2 and M3 = M1 M2 by the letter at the measured qubit as
 * I (x) Nj0 + ... + Z (x) Nj3, the probabilities are
 *   p(+-) = (1 + t +- c) / 2,  c = sum_j [I coeff of Nj3],
 *                              t = sum_j [I coeff of Nj0],
 * and the surviving qubit has type
 *   M(+-) = 1/(2 p(+-)) * sum_j traceless(Nj0 +- Nj3).
 * M1 and M2 must be traceless (t comes only from M3).  When the
 * renormalization leaves the ring the coefficients are reported
 * numerically and the branch is flagged inexact.
 */
inline MeasurementOutcome measure_additive_2q(const AdditiveOperator& m1_in,
                                              const AdditiveOperator& m2_in, uint32_t q) {
    if (m1_in.n != 2 || m2_in.n != 2 || q > 1)
        throw measurement_error("measure_additive_2q expects two 2-qubit operators");
    if (!m1_in.is_valid() || !m2_in.is_valid())
        throw measurement_error("inputs must be valid type terms");
    if (m1_in == m2_in || m1_in == -m2_in)
        throw measurement_error("inputs must be independent");
    if (!additive_commute(m1_in, m2_in))
        throw measurement_error("inputs must commute");
    if (!m1_in.is_traceless() || !m2_in.is_traceless())
        throw unsupported_measurement("terms with an identity component are not covered");

    AdditiveOperator m1 = q == 0 ? m1_in : detail::swap_qubits(m1_in, 0, 1);
    AdditiveOperator m2 = q == 0 ? m2_in : detail::swap_qubits(m2_in, 0, 1);
    AdditiveOperator m3 = real_product(m1, m2);

    const PauliBits id1(1);
    RingCoeff c = RingCoeff::zero(), t = RingCoeff::zero();
    std::array<AdditiveOperator, 3> n_plus, n_minus;
    size_t j = 0;
    for (const AdditiveOperator* m : {&m1, &m2, &m3}) {
        auto parts = m->split_at(0);
        const AdditiveOperator& n0 = parts[static_cast<unsigned>(Letter::I)];
        const AdditiveOperator& n3 = parts[static_cast<unsigned>(Letter::Z)];
        c += n3.coeff(id1);
        t += n0.coeff(id1);
        n_plus[j] = (n0 + n3).traceless_part();
        n_minus[j] = (n0 - n3).traceless_part();
        ++j;
    }
    // Commuting independent traceless +-1 operators have a traceless
    // product, so the probabilities below sum to 1.
    if (!t.is_zero())
        throw measurement_error("internal: product of traceless terms has a trace");

    const RingCoeff half = RingCoeff::dyadic(1, 1);
    RingCoeff p_plus = (RingCoeff::one() + c) * half;
    RingCoeff p_minus = (RingCoeff::one() - c) * half;

    MeasurementOutcome out;
    out.qubit = q;
    out.method = MeasurementOutcome::Method::additive_2q;

    const uint32_t other = 1 - q;
    for (int sign : {+1, -1}) {
        const RingCoeff& p = sign > 0 ? p_plus : p_minus;
        if (p.is_zero())
            continue;
        AdditiveOperator s(1);
        for (auto& nj : (sign > 0 ? n_plus : n_minus))
            s = s + nj;

        OutcomeBranch ob;
        ob.sign = sign;
        ob.prob = p;

        RingCoeff denom = p + p;  // 2 p
        AdditiveOperator m_out(1);
        try {
            for (auto& term : s.terms)
                m_out.terms.push_back({term.word, term.c / denom});
        } catch (const ring_error&) {
            ob.exact = false;
            ob.note = "post coefficients (" + s.str() + ") / " + denom.str() +
                      " leave the exact ring";
        }

        Branch post(2);
        post.terms.push_back(AdditiveOperator::from_pauli(
            PauliString::single(2, q, Letter::Z, sign < 0)));
        if (ob.exact) {
            if (!m_out.is_valid())
                throw measurement_error("internal: post operator does not square to I");
            post.terms.push_back(m_out.embed(2, {other}));
        }
        ob.post = std::move(post);
        out.branches.push_back(std::move(ob));
    }
    if (out.branches.size() == 1)
        out.deterministic = true;
    return out;
}

// ------------------------------------------------------------- dispatcher ---

/**
 * Measure one qubit of a branch, selecting the applicable theory:
 * pure Pauli branches use the stabilizer algorithm; branches whose
 * terms are all I/Z on the measured qubit use the I/Z-term rewrite
 * (with exact probabilities when the branch is complete); two-term
 * two-qubit branches use the additive measurement theorem.  Anything
 * else is a typed unsupported error.
 */
inline MeasurementOutcome measure_branch(const Branch& b, uint32_t q,
                                         bool keep_impossible = false) {
    if (q >= b.n)
        throw measurement_error("measured qubit out of range");
    NormalizeResult nr = normalize_branch(b);
    if (!nr.ok())
        throw measurement_error("branch does not normalize: " + nr.diagnostic);
    const Branch& nb = nr.branch;

    if (nb.all_pauli()) {
        MeasurementOutcome out = measure_stabilizer(nb, q);
        if (!keep_impossible)
            std::erase_if(out.branches,
                          [](const OutcomeBranch& ob) { return ob.prob && ob.prob->is_zero(); });
        return out;
    }

    bool all_iz = true;
    for (auto& t : nb.terms)
        if (t.has_x_or_y_at(q))
            all_iz = false;

    if (all_iz) {
        MeasurementOutcome out;
        out.qubit = q;
        out.method = MeasurementOutcome::Method::iz_lemma;
        auto probs = detail::complete_branch_probs(nb.terms, nb.n, q);
        for (int sign : {+1, -1}) {
            std::optional<RingCoeff> p;
            if (probs)
                p = sign > 0 ? probs->first : probs->second;
            if (p && p->is_zero() && !keep_impossible)
                continue;
            Branch post(nb.n);
            post.terms.push_back(AdditiveOperator::from_pauli(
                PauliString::single(nb.n, q, Letter::Z, sign < 0)));
            bool uninhabited = false;
            for (auto& t : nb.terms) {
                auto [plus, minus] = measure_additive_IZ_term(t, q);
                AdditiveOperator& pick = sign > 0 ? plus : minus;
                if (pick.is_identity_term())
                    continue;  // constraint became trivial
                if ((-pick).is_identity_term()) {
                    uninhabited = true;
                    break;
                }
                if (!pick.is_valid())
                    throw measurement_error("internal: rewritten term does not square to I");
                std::vector<uint32_t> rest;
                for (uint32_t p2 = 0; p2 < nb.n; ++p2)
                    if (p2 != q)
                        rest.push_back(p2);
                post.terms.push_back(pick.embed(nb.n, rest));
            }
            if (uninhabited)
                continue;
            OutcomeBranch ob;
            ob.sign = sign;
            ob.post = std::move(post);
            ob.prob = p;
            out.branches.push_back(std::move(ob));
        }
        if (out.branches.size() == 1) {
            out.deterministic = bool(probs);
            if (probs)
                out.branches[0].prob =
                    out.branches[0].sign > 0 ? probs->first : probs->second;
        }
        return out;
    }

    if (nb.n == 2 && nb.terms.size() == 2)
        return measure_additive_2q(nb.terms[0], nb.terms[1], q);

    throw unsupported_measurement(
        "post-measurement types are only derivable for Pauli branches, I/Z-supported "
        "terms, and two-term two-qubit additive intersections");
}

}  // namespace qtyper
