// Dense-matrix oracle: the independent ground truth for every symbolic claim.
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "qtyper/oracle.hpp"
#include "qtyper/parser.hpp"

using namespace qtyper;
using oracle::Mat;
using oracle::Vec;

namespace {
AdditiveOperator A(const std::string& s) { return parse_type(s).branches[0].terms[0]; }
const double kTol = 1e-9;
}  // namespace

TEST_CASE("matrix_of on words matches explicit Kronecker products", "[oracle]") {
    Mat x = oracle::matrix_of(*parse_pauli("X"));
    Mat z = oracle::matrix_of(*parse_pauli("Z"));
    Mat y = oracle::matrix_of(*parse_pauli("Y"));
    CHECK(oracle::max_abs(x * x - Mat::Identity(2, 2)) < kTol);
    CHECK(oracle::max_abs(x * z + z * x) < kTol);  // anticommute
    std::complex<double> i(0, 1);
    CHECK(oracle::max_abs(y - i * x * z) < kTol);

    Mat xz = oracle::matrix_of(*parse_pauli("XZ"));
    CHECK(xz.rows() == 4);
    CHECK(std::abs(xz(0, 2) - 1.0) < kTol);   // X on qubit 1 flips the high bit
    CHECK(std::abs(xz(1, 3) + 1.0) < kTol);   // Z on qubit 2 signs the low bit
    Mat neg = oracle::matrix_of(*parse_pauli("-XZ"));
    CHECK(oracle::max_abs(neg + xz) < kTol);
}

TEST_CASE("pauli_decompose inverts matrix_of within 1e-10", "[oracle]") {
    for (const char* s : {"1/2(II + ZI + IZ - ZZ)", "rt2/2(XX + YX)", "ZZ", "-XY"}) {
        AdditiveOperator a = A(s);
        Mat m = oracle::matrix_of(a);
        auto back = oracle::exact_additive_of(m, a.n);
        REQUIRE(back.has_value());
        CHECK(oracle::max_abs(m - oracle::matrix_of(*back)) < 1e-10);
        CHECK(*back == a);
    }
}

TEST_CASE("gate matrices are unitary and act correctly", "[oracle]") {
    for (OpCode c : {OpCode::X, OpCode::Y, OpCode::Z, OpCode::H, OpCode::S, OpCode::SDG,
                     OpCode::T, OpCode::TDG}) {
        Mat u = oracle::gate_matrix(c);
        CHECK(oracle::max_abs(u * u.adjoint() - Mat::Identity(u.rows(), u.cols())) < kTol);
    }
    Mat t = oracle::gate_matrix(OpCode::T);
    CHECK(std::abs(t(1, 1) - std::polar(1.0, M_PI / 4)) < kTol);
    // two-qubit gates materialize through programs
    for (OpCode c : {OpCode::CNOT, OpCode::CZ}) {
        Program p(2);
        p.ops = {Op::gate(c, {0, 1})};
        Mat u = oracle::matrix_of(p);
        CHECK(oracle::max_abs(u * u.adjoint() - Mat::Identity(4, 4)) < kTol);
    }
}

TEST_CASE("verify_arrow certifies known conjugations", "[oracle]") {
    Program p(1);
    p.ops = {Op::gate(OpCode::H, {0})};
    CHECK(oracle::verify_arrow(p, A("X"), A("Z")));
    CHECK(oracle::verify_arrow(p, A("Z"), A("X")));
    CHECK_FALSE(oracle::verify_arrow(p, A("X"), A("X")));

    Program t(1);
    t.ops = {Op::gate(OpCode::T, {0})};
    CHECK(oracle::verify_arrow(t, A("X"), A("rt2/2(X + Y)")));
    CHECK(oracle::verify_arrow(t, A("Z"), A("Z")));
}

TEST_CASE("state_of pins stabilizer states and verify_inhabitation accepts them",
          "[oracle]") {
    QType bell = parse_type("XX & ZZ");
    auto psi = oracle::state_of(bell.branches[0]);
    REQUIRE(psi.has_value());
    CHECK(std::abs(std::abs((*psi)(0)) - 1 / std::sqrt(2.0)) < kTol);
    CHECK(std::abs(std::abs((*psi)(3)) - 1 / std::sqrt(2.0)) < kTol);
    CHECK(std::abs((*psi)(1)) < kTol);
    CHECK(oracle::verify_inhabitation(*psi, bell));
    CHECK_FALSE(oracle::verify_inhabitation(*psi, parse_type("XX & -ZZ")));

    // An underdetermined branch has rank > 1; state_of still yields some
    // inhabitant of it.
    QType half = parse_type("ZI");
    CHECK(oracle::branch_rank(half.branches[0]) == 2);
    auto inhabitant = oracle::state_of(half.branches[0]);
    REQUIRE(inhabitant.has_value());
    CHECK(oracle::verify_inhabitation(*inhabitant, half));
    // A contradictory branch has rank 0 and no state at all.
    QType none = parse_type("ZZ & -ZZ");
    CHECK(oracle::branch_rank(none.branches[0]) == 0);
    CHECK_FALSE(oracle::state_of(none.branches[0]).has_value());
}

TEST_CASE("schmidt rank distinguishes product from entangled cuts", "[oracle]") {
    QType prod = parse_type("ZI & IZ");
    auto p0 = oracle::state_of(prod.branches[0]);
    REQUIRE(p0);
    CHECK(oracle::schmidt_rank(*p0, {0}, 2) == 1);

    QType bell = parse_type("XX & ZZ");
    auto pb = oracle::state_of(bell.branches[0]);
    REQUIRE(pb);
    CHECK(oracle::schmidt_rank(*pb, {0}, 2) == 2);

    QType ghz = parse_type("XXX & ZZI & IZZ");
    auto pg = oracle::state_of(ghz.branches[0]);
    REQUIRE(pg);
    CHECK(oracle::schmidt_rank(*pg, {0, 1}, 3) == 2);
}

TEST_CASE("born_measure matches Born's rule", "[oracle]") {
    // |+> measured in Z: 1/2 each, post-states |0> and |1>.
    Vec plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    auto r = oracle::born_measure(plus, 0, 1);
    CHECK(std::abs(r.p_plus - 0.5) < kTol);
    CHECK(std::abs(r.p_minus - 0.5) < kTol);
    REQUIRE(r.post_plus);
    REQUIRE(r.post_minus);
    CHECK(std::abs(std::abs((*r.post_plus)(0)) - 1.0) < kTol);
    CHECK(std::abs(std::abs((*r.post_minus)(1)) - 1.0) < kTol);

    // |0> measured in Z: deterministic, no minus-branch post-state.
    Vec zero(2);
    zero << 1, 0;
    auto d = oracle::born_measure(zero, 0, 1);
    CHECK(std::abs(d.p_plus - 1.0) < kTol);
    CHECK(std::abs(d.p_minus) < kTol);
    CHECK(d.post_plus);
    CHECK_FALSE(d.post_minus);
}

TEST_CASE("born_measure agrees with the one-qubit rotation lemma over a sweep",
          "[oracle][property]") {
    // For |psi> = cos(t)|0> + sin(t)|1>, p(+) = cos^2(t).
    for (int i = 0; i < 8; ++i) {
        double t = (i + 0.5) * M_PI / 8;
        Vec psi(2);
        psi << std::cos(t), std::sin(t);
        auto r = oracle::born_measure(psi, 0, 1);
        CHECK(std::abs(r.p_plus - std::cos(t) * std::cos(t)) < kTol);
        CHECK(std::abs(r.p_minus - std::sin(t) * std::sin(t)) < kTol);
    }
}

TEST_CASE("exactify snaps representable doubles and rejects others", "[oracle]") {
    auto half = oracle::exactify(0.5);
    REQUIRE(half);
    CHECK(*half == RingCoeff(1, 0, 1));
    auto irt2 = oracle::exactify(1 / std::sqrt(2.0));
    REQUIRE(irt2);
    CHECK(*irt2 == RingCoeff::inv_rt2());
    auto tcoef = oracle::exactify((2 + std::sqrt(2.0)) / 4);
    REQUIRE(tcoef);
    CHECK(*tcoef == RingCoeff(2, 1, 2));
    CHECK_FALSE(oracle::exactify(1.0 / 3.0).has_value());
    CHECK_FALSE(oracle::exactify(0.123456).has_value());
}

TEST_CASE("the qubit cap is enforced", "[oracle]") {
    Program p(9);
    p.ops = {Op::gate(OpCode::H, {0})};
    CHECK_THROWS_AS(oracle::matrix_of(p), oracle::oracle_error);
}
