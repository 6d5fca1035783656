// The inference engine: pushing types through programs, tracing,
// checking claimed arrows, and measurement branching.
#include <catch2/catch_amalgamated.hpp>

#include "qtyper/infer.hpp"
#include "qtyper/oracle.hpp"
#include "qtyper/parser.hpp"

using namespace qtyper;

namespace {

AdditiveOperator P(const std::string& s) {
    auto p = parse_pauli(s);
    REQUIRE(p);
    return AdditiveOperator::from_pauli(*p);
}

QType zinit(uint32_t n) {
    Branch b(n);
    for (uint32_t q = 0; q < n; ++q)
        b.terms.push_back(
            AdditiveOperator::from_pauli(PauliString::single(n, q, Letter::Z)));
    return QType::single(std::move(b));
}

}  // namespace

TEST_CASE("the GHZ preparation infers the canonical stabilizer presentation",
          "[infer]") {
    Program p(3);
    p.ops = {Op::gate(OpCode::H, {0}), Op::gate(OpCode::CNOT, {0, 1}),
             Op::gate(OpCode::CNOT, {1, 2})};
    InferResult r = infer(p, zinit(3));
    CHECK(type_str(r.type) == "XXX & ZZI & IZZ");
}

TEST_CASE("the balanced Deutsch circuit types the answer qubit to -X",
          "[infer]") {
    // oracle qubit prepared in |1>, query answered by Uf = CNOT
    Program p(2);
    p.ops = {Op::gate(OpCode::X, {1}), Op::gate(OpCode::H, {0}),
             Op::gate(OpCode::H, {1}), Op::gate(OpCode::CNOT, {0, 1}),
             Op::gate(OpCode::H, {0})};
    Branch b(2);
    b.terms = {P("IZ"), P("ZI")};
    InferResult r = infer(p, QType::single(b), {.trace = true});

    Branch want(2);
    want.terms = {P("-IX"), P("-ZI")};
    CHECK(types_equal(r.type, QType::single(want)));
    NormalizeResult nr = normalize_branch(r.type.branches[0]);
    REQUIRE(nr.ok());
    CHECK(branch_str(nr.branch) == "-ZI & -IX");

    // the trace records one step per operation
    REQUIRE(r.trace.size() == p.ops.size());
    for (const auto& step : r.trace) {
        CHECK_FALSE(step.op.empty());
        CHECK_FALSE(step.type.empty());
    }
}

TEST_CASE("measuring GHZ twice yields two correlated deterministic branches",
          "[infer]") {
    Program p(3);
    p.ops = {Op::gate(OpCode::H, {0}), Op::gate(OpCode::CNOT, {0, 1}),
             Op::gate(OpCode::CNOT, {1, 2}), Op::measure(0), Op::measure(1)};
    InferResult r = infer(p, zinit(3));
    REQUIRE(r.type.branches.size() == 2);
    for (const auto& b : r.type.branches) {
        REQUIRE(b.prob);
        CHECK(b.prob->str() == "1/2");
        // the second readout is pinned to the first
        REQUIRE(b.outcomes.size() == 2);
        CHECK(b.outcomes[0] == b.outcomes[1]);
    }
}

TEST_CASE("the Toffoli decomposition contracts back to four summands",
          "[infer]") {
    Program p(3);
    auto G = [](OpCode c, std::vector<uint32_t> q) { return Op::gate(c, q); };
    p.ops = {G(OpCode::H, {2}),       G(OpCode::CNOT, {1, 2}),
             G(OpCode::TDG, {2}),     G(OpCode::CNOT, {0, 2}),
             G(OpCode::T, {2}),       G(OpCode::CNOT, {1, 2}),
             G(OpCode::TDG, {2}),     G(OpCode::CNOT, {0, 2}),
             G(OpCode::T, {1}),       G(OpCode::T, {2}),
             G(OpCode::H, {2}),       G(OpCode::CNOT, {0, 1}),
             G(OpCode::T, {0}),       G(OpCode::TDG, {1}),
             G(OpCode::CNOT, {0, 1})};
    Branch b(3);
    b.terms = {P("IIZ")};
    InferResult r = infer(p, QType::single(b));

    // Z on the target maps to 1/2(IIZ + IZZ + ZIZ - ZZZ); the additive
    // blowup along the way stays within one level of doubling
    REQUIRE(r.type.branches.size() == 1);
    REQUIRE(r.type.branches[0].terms.size() == 1);
    CHECK(r.type.branches[0].terms[0].terms.size() == 4);
    CHECK(r.stats.max_raw_summands <= 16);

    // dense certification of the inferred image
    oracle::Tolerances tol = oracle::default_tol();
    auto U = oracle::matrix_of(p);
    auto A = oracle::matrix_of(P("IIZ"), tol);
    auto B = oracle::matrix_of(r.type.branches[0].terms[0], tol);
    CHECK(oracle::max_abs(U * A * U.adjoint() - B) < tol.equality);
}

TEST_CASE("tracked whole-program semantics feed the T-count bound", "[infer]") {
    Program p(1);
    p.ops = {Op::gate(OpCode::T, {0})};
    GateSemantics g = track_semantics(p);
    auto tb = tcount_lower_bound(g);
    REQUIRE(tb);
    CHECK(*tb == 1);
}

TEST_CASE("check accepts a correct claim and diffs a wrong one", "[infer]") {
    Program p(3);
    p.ops = {Op::gate(OpCode::H, {0}), Op::gate(OpCode::CNOT, {0, 1}),
             Op::gate(OpCode::CNOT, {1, 2})};

    Branch wrong(3);
    wrong.terms = {P("XXX"), P("ZZI"), P("IIZ")};  // third row not stabilized
    CheckResult c = check(p, zinit(3), QType::single(wrong));
    CHECK_FALSE(c.pass);
    CHECK_FALSE(c.diff.empty());

    Branch right(3);
    right.terms = {P("XXX"), P("IZZ"), P("ZZI")};  // same group, reordered
    CheckResult c2 = check(p, zinit(3), QType::single(right));
    CHECK(c2.pass);
}

TEST_CASE("inference composes across every program cut", "[infer]") {
    Program p(2);
    p.ops = {Op::gate(OpCode::H, {0}), Op::gate(OpCode::T, {0}),
             Op::gate(OpCode::CNOT, {0, 1}), Op::gate(OpCode::S, {1}),
             Op::gate(OpCode::H, {1})};
    QType full = infer(p, zinit(2)).type;
    for (size_t cut = 0; cut <= p.ops.size(); ++cut) {
        Program p1(2), p2(2);
        p1.ops.assign(p.ops.begin(), p.ops.begin() + cut);
        p2.ops.assign(p.ops.begin() + cut, p.ops.end());
        QType mid = infer(p1, zinit(2)).type;
        QType two = infer(p2, mid).type;
        CHECK(types_equal(two, full));
    }
}

TEST_CASE("defer_measurements floats gates past unrelated readouts",
          "[infer]") {
    Program p(2);
    p.ops = {Op::measure(0), Op::gate(OpCode::H, {1})};
    Program d = defer_measurements(p);
    REQUIRE(d.ops.size() == 2);
    CHECK_FALSE(d.ops[0].meas);
    CHECK(d.ops[1].meas);
}

TEST_CASE("a hundred thousand Clifford gates infer in seconds", "[infer]") {
    Program p(20);
    uint64_t s = 12345;
    auto rnd = [&]() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return s >> 33;
    };
    for (int i = 0; i < 100000; ++i) {
        switch (rnd() % 4) {
            case 0: p.ops.push_back(Op::gate(OpCode::H, {uint32_t(rnd() % 20)})); break;
            case 1: p.ops.push_back(Op::gate(OpCode::S, {uint32_t(rnd() % 20)})); break;
            case 2: {
                uint32_t a = rnd() % 20, b = (a + 1 + rnd() % 19) % 20;
                p.ops.push_back(Op::gate(OpCode::CNOT, {a, b}));
                break;
            }
            case 3: p.ops.push_back(Op::gate(OpCode::Z, {uint32_t(rnd() % 20)})); break;
        }
    }
    Branch b(20);
    b.terms = {AdditiveOperator::from_pauli(PauliString::single(20, 0, Letter::Z))};
    auto t0 = std::chrono::steady_clock::now();
    InferResult r = infer(p, QType::single(b));
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    CHECK(r.type.branches.size() == 1);
    CHECK(ms < 3000);
}
