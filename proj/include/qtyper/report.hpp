#pragma once

// Machine-readable reports.  Renders types, judgments, and analysis verdicts
// as JSON with a stable, versioned layout.  Ring coefficients appear as
// {a, b, k} triples (the value (a + b*sqrt(2)) / 2^k), so every type value
// round-trips exactly; display strings ride along for humans.

#include <string>

#include "json.hpp"
#include "qtyper/infer.hpp"
#include "qtyper/ring.hpp"
#include "qtyper/types.hpp"

namespace qtyper::report {

using json = nlohmann::json;

constexpr int schema_version = 1;

inline json coeff_json(const RingCoeff& c) {
    return json{{"a", c.a}, {"b", c.b}, {"k", c.k}};
}

inline json term_json(const AdditiveOperator& t) {
    json summands = json::array();
    for (const auto& s : t.terms)
        summands.push_back(json{{"word", s.word.letters()}, {"coeff", coeff_json(s.c)}});
    return json{{"str", t.str()}, {"summands", summands}};
}

inline json branch_json(const Branch& b) {
    json terms = json::array();
    for (const auto& t : b.terms)
        terms.push_back(term_json(t));
    json j{{"str", branch_str(b)}, {"terms", terms}};
    if (!b.partitions.empty()) {
        json parts = json::array();
        for (const auto& p : b.partitions) {
            json qs = json::array(), ts = json::array();
            for (uint32_t q : p.qubits)
                qs.push_back(q + 1);
            for (size_t t : p.term_indices)
                ts.push_back(t);
            parts.push_back(json{{"qubits", qs}, {"terms", ts}});
        }
        j["partitions"] = parts;
    }
    if (b.prob)
        j["prob"] = coeff_json(*b.prob);
    if (b.prob_num)
        j["prob_num"] = *b.prob_num;
    if (!b.outcomes.empty())
        j["outcomes"] = b.outcomes;
    return j;
}

inline json type_json(const QType& t) {
    json branches = json::array();
    for (const auto& b : t.branches)
        branches.push_back(branch_json(b));
    return json{{"str", type_str(t)}, {"branches", branches}};
}

inline json trace_json(const std::vector<TraceStep>& steps) {
    json tr = json::array();
    for (const auto& s : steps)
        tr.push_back(json{{"op", s.op}, {"type", s.type}});
    return tr;
}

/// Skeleton every subcommand fills in: schema marker, verdict, diagnostics.
inline json base_report(const std::string& verdict) {
    json j;
    j["schema"] = schema_version;
    j["verdict"] = verdict;
    j["diagnostics"] = json::array();
    return j;
}

}  // namespace qtyper::report
