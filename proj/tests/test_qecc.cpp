// Stabilizer codes: the Steane code, logical operators, encoder
// verification, and transversality verdicts.
#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "qtyper/oracle.hpp"
#include "qtyper/parser.hpp"
#include "qtyper/qecc.hpp"

using namespace qtyper;

namespace {

Program transversal(OpCode c, uint32_t n) {
    Program p(n);
    for (uint32_t q = 0; q < n; ++q) p.ops.push_back(Op::gate(c, {q}));
    return p;
}

PauliString P(const std::string& s) {
    auto p = parse_pauli(s);
    REQUIRE(p);
    return *p;
}

const std::string kEncoderSrc =
    "QUBITS 7\n"
    "CNOT 1 2; CNOT 1 3\n"
    "H 5; H 6; H 7\n"
    "CNOT 7 4; CNOT 7 2; CNOT 7 1\n"
    "CNOT 6 4; CNOT 6 3; CNOT 6 1\n"
    "CNOT 5 4; CNOT 5 3; CNOT 5 2\n";

}  // namespace

TEST_CASE("the code-file parser reproduces the builtin Steane code", "[qecc]") {
    const std::string file =
        "# Steane [[7,1,3]]\nN 7\nGEN IIIXXXX\nGEN IXXIIXX\nGEN XIXIXIX\n"
        "GEN IIIZZZZ\nGEN IZZIIZZ\nGEN ZIZIZIZ\nLOGX XXXXXXX\nLOGZ ZZZZZZZ\n";
    StabilizerCode c = parse_code_file(file);
    StabilizerCode steane = steane_code();
    CHECK(c.generators == steane.generators);
    CHECK(c.logical_x == steane.logical_x);
    CHECK(c.logical_z == steane.logical_z);
}

TEST_CASE("the shipped code file round trips from disk", "[qecc]") {
    std::ifstream in(std::string(QTYPER_SOURCE_DIR) + "/codes/steane.code");
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    StabilizerCode c = parse_code_file(ss.str());
    CHECK(c.generators == steane_code().generators);
    CHECK(c.logical_x == steane_code().logical_x);
}

TEST_CASE("invalid code definitions are rejected with witnesses", "[qecc]") {
    // X_L anticommuting with a generator
    CHECK_THROWS_WITH(make_code(2, {P("XX"), P("ZZ")}, P("XI"), P("ZI")),
                      Catch::Matchers::ContainsSubstring("anticommutes with generator"));
    // dependent generator rows
    CHECK_THROWS_WITH(
        make_code(3, {P("XXI"), P("IXX"), P("XIX")}, P("ZZZ"), P("XXX")),
        Catch::Matchers::ContainsSubstring("product of earlier"));
    // the trivial code on one bare qubit is fine
    StabilizerCode triv = make_code(1, {}, P("X"), P("Z"));
    CHECK(triv.logical_y().w.letter(0) == Letter::Y);
}

TEST_CASE("the Steane logical Y picks up a sign against letterwise Y",
          "[qecc]") {
    StabilizerCode steane = steane_code();
    PauliString y = steane.logical_y();
    CHECK(y.is_hermitian());
    oracle::Tolerances tol = oracle::default_tol();
    tol.qubit_cap = 7;
    auto my = oracle::matrix_of(y, tol);
    auto y7 = oracle::matrix_of(P("YYYYYYY"), tol);
    // Y applied to every wire realizes -Y_L, not Y_L
    CHECK(oracle::max_abs(my + y7) < tol.equality);
}

TEST_CASE("the encoder maps both bases onto the code space", "[qecc]") {
    StabilizerCode steane = steane_code();
    Program enc = parse_program(kEncoderSrc);
    EncoderReport rz = encoder_check(steane, enc, Letter::Z);
    INFO("inferred: " << rz.inferred << "\nexpected: " << rz.expected);
    CHECK(rz.pass);
    EncoderReport rx = encoder_check(steane, enc, Letter::X);
    CHECK(rx.pass);
    // the empty program is not an encoder
    Program ident(7);
    CHECK_FALSE(encoder_check(steane, ident, Letter::Z).pass);
}

TEST_CASE("the logical-Z branch pins a unique codeword", "[qecc]") {
    StabilizerCode steane = steane_code();
    oracle::Tolerances tol = oracle::default_tol();
    tol.qubit_cap = 7;
    Branch zl = logical_branch(steane, Letter::Z);
    CHECK(oracle::branch_rank(zl, tol) == 1);
    CHECK(oracle::state_of(zl, tol));
}

TEST_CASE("transversal H implements logical H", "[qecc]") {
    StabilizerCode steane = steane_code();
    TransversalityReport r = transversality_check(
        steane, transversal(OpCode::H, 7), builtin_semantics(OpCode::H));
    CHECK(r.pass);
    CHECK_FALSE(r.logical_map.empty());
}

TEST_CASE("transversal S fails with a -Y_L witness and Z;S repairs it",
          "[qecc]") {
    StabilizerCode steane = steane_code();
    TransversalityReport rS = transversality_check(
        steane, transversal(OpCode::S, 7), builtin_semantics(OpCode::S));
    CHECK_FALSE(rS.pass);
    CHECK(rS.failure == TransversalityReport::Failure::logical_defect);
    CHECK(rS.witness.find("-Y_L") != std::string::npos);

    // prefixing each wire with Z flips the offending sign
    Program zs(7);
    for (uint32_t q = 0; q < 7; ++q) {
        zs.ops.push_back(Op::gate(OpCode::Z, {q}));
        zs.ops.push_back(Op::gate(OpCode::S, {q}));
    }
    CHECK(transversality_check(steane, zs, builtin_semantics(OpCode::S)).pass);
}

TEST_CASE("transversal T escapes the Pauli group", "[qecc]") {
    StabilizerCode steane = steane_code();
    TransversalityReport rT = transversality_check(
        steane, transversal(OpCode::T, 7), builtin_semantics(OpCode::T));
    CHECK_FALSE(rT.pass);
    CHECK(rT.failure == TransversalityReport::Failure::additive_escape);
    CHECK_FALSE(rT.witness.empty());
}

TEST_CASE("blockwise CNOT is transversal across two code blocks", "[qecc]") {
    StabilizerCode steane = steane_code();
    Program cnots(14);
    for (uint32_t q = 0; q < 7; ++q)
        cnots.ops.push_back(Op::gate(OpCode::CNOT, {q, q + 7}));
    TransversalityReport r =
        transversality_check(steane, cnots, builtin_semantics(OpCode::CNOT));
    CHECK(r.pass);
}

TEST_CASE("transversality verdicts ignore the order within a layer", "[qecc]") {
    StabilizerCode steane = steane_code();
    Program hrev(7);
    for (int q = 6; q >= 0; --q)
        hrev.ops.push_back(Op::gate(OpCode::H, {static_cast<uint32_t>(q)}));
    CHECK(transversality_check(steane, hrev, builtin_semantics(OpCode::H)).pass);
}

TEST_CASE("two-block logical tensors carry the right generator counts",
          "[qecc]") {
    StabilizerCode steane = steane_code();
    CHECK(logical_tensor(steane, Letter::X, Letter::I).terms.size() == 13);
    CHECK(logical_tensor(steane, Letter::I, Letter::I).terms.size() == 12);
    Branch zz = logical_tensor(steane, Letter::Z, Letter::Z);
    REQUIRE(zz.terms.size() == 13);
    CHECK(zz.terms.back() == AdditiveOperator::from_pauli(P("ZZZZZZZZZZZZZZ")));
}
