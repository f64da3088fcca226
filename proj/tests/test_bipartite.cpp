#include "catch_amalgamated.hpp"

#include "eqlab/bipartite.hpp"
#include "eqlab/eigen.hpp"
#include "test_support.hpp"

using namespace eqlab;

namespace {

// ρ_S[s,s'] = Σ_b ρ[(s,b),(s',b)] by explicit loops.
ComplexMatrix trace_bath_oracle(const ComplexMatrix& rho, std::size_t dS, std::size_t dB) {
    ComplexMatrix out(dS, dS);
    for (std::size_t s = 0; s < dS; ++s)
        for (std::size_t sp = 0; sp < dS; ++sp)
            for (std::size_t b = 0; b < dB; ++b)
                for (std::size_t bp = 0; bp < dB; ++bp)
                    if (b == bp) out(s, sp) += rho(s * dB + b, sp * dB + bp);
    return out;
}

ComplexMatrix trace_system_oracle(const ComplexMatrix& rho, std::size_t dS, std::size_t dB) {
    ComplexMatrix out(dB, dB);
    for (std::size_t b = 0; b < dB; ++b)
        for (std::size_t bp = 0; bp < dB; ++bp)
            for (std::size_t s = 0; s < dS; ++s)
                for (std::size_t sp = 0; sp < dS; ++sp)
                    if (s == sp) out(b, bp) += rho(s * dB + b, sp * dB + bp);
    return out;
}

RVector nonzero_eigenvalues(const ComplexMatrix& m) {
    RVector out;
    for (double x : hermitian_eigenvalues(m))
        if (x > 1e-12) out.push_back(x);
    return out;
}

const ComplexMatrix sigma_z{{1.0, 0.0}, {0.0, -1.0}};

}  // namespace

TEST_CASE("bipartite: index convention") {
    const BipartiteSpace sp(3, 4);
    CHECK(sp.dim() == 12);
    CHECK(sp.compose_index(0, 0) == 0);
    CHECK(sp.compose_index(1, 2) == 6);
    CHECK(sp.decompose_index(6) == std::pair<std::size_t, std::size_t>{1, 2});
    CHECK_THROWS_AS(sp.compose_index(3, 0), IndexOutOfRange);
    CHECK_THROWS_AS(sp.compose_index(0, 4), IndexOutOfRange);
    CHECK_THROWS_AS(sp.decompose_index(12), IndexOutOfRange);
}

TEST_CASE("bipartite: exhaustive round trip on 4x6") {
    const BipartiteSpace sp(4, 6);
    for (std::size_t i = 0; i < 24; ++i) {
        const auto [s, b] = sp.decompose_index(i);
        CHECK(sp.compose_index(s, b) == i);
    }
}

TEST_CASE("bipartite: zero dimensions are rejected") {
    CHECK_THROWS_AS(BipartiteSpace(0, 3), DimensionMismatch);
    CHECK_THROWS_AS(BipartiteSpace(3, 0), DimensionMismatch);
}

TEST_CASE("partial trace: product states factor exactly") {
    Rng rng(21);
    const BipartiteSpace sp(3, 4);
    const ComplexMatrix rs = testing::random_density(3, rng), rb = testing::random_density(4, rng);
    const ComplexMatrix rho = kronecker_product(rs, rb);
    CHECK(max_abs_diff(partial_trace_bath(rho, sp), rs) <= 1e-12);
    CHECK(max_abs_diff(partial_trace_system(rho, sp), rb) <= 1e-12);
}

TEST_CASE("partial trace: Bell state gives I/2") {
    const BipartiteSpace sp(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    const CVector bell{r, 0.0, 0.0, r};
    const ComplexMatrix rho = ComplexMatrix::projector(bell);
    ComplexMatrix half = ComplexMatrix::identity(2);
    half *= 0.5;
    CHECK(max_abs_diff(partial_trace_bath(rho, sp), half) <= 1e-15);
    CHECK(max_abs_diff(partial_trace_system(rho, sp), half) <= 1e-15);
    CHECK(max_abs_diff(reduced_system_state(bell, sp), half) <= 1e-15);
    CHECK(max_abs_diff(reduced_bath_state(bell, sp), half) <= 1e-15);
}

TEST_CASE("partial trace: random 3x5 states match the index-sum oracle") {
    Rng rng(35);
    const BipartiteSpace sp(3, 5);
    for (int rep = 0; rep < 10; ++rep) {
        const CVector psi = testing::random_unit_vector(15, rng);
        const ComplexMatrix rho = ComplexMatrix::projector(psi);
        CHECK(max_abs_diff(partial_trace_bath(rho, sp), trace_bath_oracle(rho, 3, 5)) <= 1e-12);
        CHECK(max_abs_diff(partial_trace_system(rho, sp), trace_system_oracle(rho, 3, 5)) <= 1e-12);
        CHECK(max_abs_diff(reduced_system_state(psi, sp), trace_bath_oracle(rho, 3, 5)) <= 1e-12);
        CHECK(max_abs_diff(reduced_bath_state(psi, sp), trace_system_oracle(rho, 3, 5)) <= 1e-12);
    }
}

TEST_CASE("partial trace: Schmidt spectra of the two marginals agree") {
    Rng rng(36);
    const BipartiteSpace sp(3, 5);
    const CVector psi = testing::random_unit_vector(15, rng);
    const RVector a = nonzero_eigenvalues(reduced_system_state(psi, sp));
    const RVector b = nonzero_eigenvalues(reduced_bath_state(psi, sp));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
}

TEST_CASE("partial trace: linearity probe and trace preservation") {
    Rng rng(37);
    const BipartiteSpace sp(2, 3);
    const ComplexMatrix a = testing::random_hermitian(2, rng), b = testing::random_hermitian(3, rng);
    ComplexMatrix expected = a;
    expected *= b.trace();
    CHECK(max_abs_diff(partial_trace_bath(kronecker_product(a, b), sp), expected) <= 1e-10);

    const ComplexMatrix rho = testing::random_density(6, rng);
    CHECK(std::abs(partial_trace_bath(rho, sp).trace() - rho.trace()) <= 1e-12);
    CHECK(hermiticity_defect(partial_trace_bath(rho, sp)) == 0.0);
    CHECK(hermiticity_defect(partial_trace_system(rho, sp)) == 0.0);
}

TEST_CASE("partial trace: dimension mismatch") {
    const BipartiteSpace sp(2, 3);
    CHECK_THROWS_AS(partial_trace_bath(ComplexMatrix::identity(5), sp), DimensionMismatch);
    CHECK_THROWS_AS(partial_trace_system(ComplexMatrix(6, 5), sp), DimensionMismatch);
    CHECK_THROWS_AS(reduced_system_state(CVector(5), sp), DimensionMismatch);
}

TEST_CASE("embedding: identity and sigma_z convention") {
    const BipartiteSpace sp(2, 3);
    CHECK(embed_system_operator(ComplexMatrix::identity(2), sp) == ComplexMatrix::identity(6));
    const RVector d{1, 1, 1, -1, -1, -1};
    CHECK(embed_system_operator(sigma_z, sp) == ComplexMatrix::diagonal(d));
    const RVector e{1, -1, 1, -1};
    CHECK(embed_bath_operator(sigma_z, BipartiteSpace(2, 2)) == ComplexMatrix::diagonal(e));
    CHECK_THROWS_AS(embed_system_operator(ComplexMatrix::identity(3), sp), DimensionMismatch);
}

TEST_CASE("embedding: expectation values reduce to the subsystem") {
    Rng rng(38);
    const BipartiteSpace sp(3, 4);
    const ComplexMatrix a = testing::random_hermitian(3, rng);
    const ComplexMatrix rs = testing::random_density(3, rng), rb = testing::random_density(4, rng);
    const cplx lhs = trace_of_product(embed_system_operator(a, sp), kronecker_product(rs, rb));
    CHECK(std::abs(lhs - trace_of_product(a, rs)) <= 1e-12);
}

TEST_CASE("swap: small cases") {
    CHECK(swap_operator(1) == ComplexMatrix{{1.0}});
    const ComplexMatrix expected{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
    CHECK(swap_operator(2) == expected);
    for (std::size_t n : {2u, 3u, 4u}) {
        const ComplexMatrix s = swap_operator(n);
        CHECK(s.trace() == cplx(static_cast<double>(n)));
        CHECK(s * s == ComplexMatrix::identity(n * n));
        CHECK(hermiticity_defect(s) == 0.0);
    }
}

TEST_CASE("swap: exchanges tensor factors") {
    Rng rng(39);
    const CVector u = testing::random_unit_vector(3, rng), w = testing::random_unit_vector(3, rng);
    const CVector swapped = swap_operator(3) * kronecker_product(u, w);
    const CVector expected = kronecker_product(w, u);
    for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(swapped[i] - expected[i]) <= 1e-15);
}

TEST_CASE("swap: trace identity on random 4x4 pairs") {
    Rng rng(40);
    for (int rep = 0; rep < 50; ++rep) {
        const ComplexMatrix a = testing::random_matrix(4, 4, rng), b = testing::random_matrix(4, 4, rng);
        CHECK(std::abs(trace_of_product(a, b) - (kronecker_product(a, b) * swap_operator(4)).trace()) <= 1e-10);
    }
}

TEST_CASE("swap: dimension cap") {
    CHECK_THROWS_AS(swap_operator(65), DimensionOverflow);
}
