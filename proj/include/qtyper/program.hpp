#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtyper/gates.hpp"
#include "qtyper/types.hpp"

namespace qtyper {

/**
 * One primitive statement: a builtin gate application or a z-basis
 * measurement.  Composite gate definitions are inlined by the parser,
 * so the engine only ever sees these.  `text` preserves the source
 * rendering for traces.
 */
struct Op {
    bool meas = false;
    OpCode code = OpCode::I;
    std::vector<uint32_t> qubits;  // 0-based; size = arity (1 for MEAS)
    std::string text;

    static Op gate(OpCode c, std::vector<uint32_t> qs) {
        Op op;
        op.code = c;
        op.qubits = std::move(qs);
        op.text = opcode_name(c);
        for (uint32_t q : op.qubits)
            op.text += " " + std::to_string(q + 1);
        return op;
    }
    static Op measure(uint32_t q) {
        Op op;
        op.meas = true;
        op.qubits = {q};
        op.text = "MEAS " + std::to_string(q + 1);
        return op;
    }
};

struct Program {
    uint32_t n = 0;
    std::optional<QType> init;
    std::optional<QType> expect;
    std::vector<Op> ops;

    Program() = default;
    explicit Program(uint32_t n_) : n(n_) {}

    bool has_meas() const {
        for (auto& op : ops)
            if (op.meas)
                return true;
        return false;
    }

    size_t gate_count() const {
        size_t c = 0;
        for (auto& op : ops)
            if (!op.meas)
                ++c;
        return c;
    }
};

}  // namespace qtyper
