#pragma once

#include <string>
#include <utility>

#include "eqlab/matrix.hpp"

namespace eqlab {

/// H = H_S ⊗ H_B. Basis state |s>_S|b>_B has global index s * d_B + b.
class BipartiteSpace {
public:
    BipartiteSpace(std::size_t d_S, std::size_t d_B) : d_S_(d_S), d_B_(d_B) {
        if (d_S == 0 || d_B == 0) throw DimensionMismatch("BipartiteSpace: dimensions must be >= 1");
        require_dimension(d_S * d_B, "BipartiteSpace");
    }

    std::size_t d_S() const noexcept { return d_S_; }
    std::size_t d_B() const noexcept { return d_B_; }
    std::size_t dim() const noexcept { return d_S_ * d_B_; }

    std::size_t compose_index(std::size_t s, std::size_t b) const {
        if (s >= d_S_ || b >= d_B_)
            throw IndexOutOfRange("compose_index: (" + std::to_string(s) + "," + std::to_string(b) +
                                  ") outside " + std::to_string(d_S_) + "x" + std::to_string(d_B_));
        return s * d_B_ + b;
    }

    std::pair<std::size_t, std::size_t> decompose_index(std::size_t i) const {
        if (i >= dim()) throw IndexOutOfRange("decompose_index: " + std::to_string(i) + " >= " + std::to_string(dim()));
        return {i / d_B_, i % d_B_};
    }

    friend bool operator==(const BipartiteSpace&, const BipartiteSpace&) = default;

private:
    std::size_t d_S_;
    std::size_t d_B_;
};

namespace detail {
inline void check_global_operator(const ComplexMatrix& rho, const BipartiteSpace& space, const char* who) {
    if (rho.rows() != space.dim() || rho.cols() != space.dim())
        throw DimensionMismatch(std::string(who) + ": operator " + rho.shape() + " on space of dim " +
                                std::to_string(space.dim()));
}
}  // namespace detail

/// tr_B ρ, re-Hermitized.
inline ComplexMatrix partial_trace_bath(const ComplexMatrix& rho, const BipartiteSpace& space) {
    detail::check_global_operator(rho, space, "partial_trace_bath");
    const std::size_t dS = space.d_S(), dB = space.d_B();
    ComplexMatrix out(dS, dS);
    for (std::size_t s = 0; s < dS; ++s)
        for (std::size_t sp = 0; sp < dS; ++sp) {
            cplx acc = 0.0;
            for (std::size_t b = 0; b < dB; ++b) acc += rho(s * dB + b, sp * dB + b);
            out(s, sp) = acc;
        }
    return hermitize(out);
}

/// tr_S ρ, re-Hermitized.
inline ComplexMatrix partial_trace_system(const ComplexMatrix& rho, const BipartiteSpace& space) {
    detail::check_global_operator(rho, space, "partial_trace_system");
    const std::size_t dS = space.d_S(), dB = space.d_B();
    ComplexMatrix out(dB, dB);
    for (std::size_t s = 0; s < dS; ++s)
        for (std::size_t b = 0; b < dB; ++b)
            for (std::size_t bp = 0; bp < dB; ++bp) out(b, bp) += rho(s * dB + b, s * dB + bp);
    return hermitize(out);
}

/// tr_B |ψ><ψ| straight from amplitudes, O(d_S^2 d_B).
inline ComplexMatrix reduced_system_state(std::span<const cplx> psi, const BipartiteSpace& space) {
    if (psi.size() != space.dim()) throw DimensionMismatch("reduced_system_state: state length mismatch");
    const std::size_t dS = space.d_S(), dB = space.d_B();
    ComplexMatrix out(dS, dS);
    for (std::size_t s = 0; s < dS; ++s)
        for (std::size_t sp = s; sp < dS; ++sp) {
            cplx acc = 0.0;
            for (std::size_t b = 0; b < dB; ++b) acc += psi[s * dB + b] * std::conj(psi[sp * dB + b]);
            out(s, sp) = acc;
            out(sp, s) = std::conj(acc);
        }
    for (std::size_t s = 0; s < dS; ++s) out(s, s) = out(s, s).real();
    return out;
}

/// tr_S |ψ><ψ| straight from amplitudes, O(d_S d_B^2).
inline ComplexMatrix reduced_bath_state(std::span<const cplx> psi, const BipartiteSpace& space) {
    if (psi.size() != space.dim()) throw DimensionMismatch("reduced_bath_state: state length mismatch");
    const std::size_t dS = space.d_S(), dB = space.d_B();
    ComplexMatrix out(dB, dB);
    for (std::size_t b = 0; b < dB; ++b)
        for (std::size_t bp = b; bp < dB; ++bp) {
            cplx acc = 0.0;
            for (std::size_t s = 0; s < dS; ++s) acc += psi[s * dB + b] * std::conj(psi[s * dB + bp]);
            out(b, bp) = acc;
            out(bp, b) = std::conj(acc);
        }
    for (std::size_t b = 0; b < dB; ++b) out(b, b) = out(b, b).real();
    return out;
}

/// A_S ⊗ 1_B
inline ComplexMatrix embed_system_operator(const ComplexMatrix& a_s, const BipartiteSpace& space) {
    if (a_s.rows() != space.d_S() || a_s.cols() != space.d_S())
        throw DimensionMismatch("embed_system_operator: operator " + a_s.shape() + " but d_S = " +
                                std::to_string(space.d_S()));
    return kronecker_product(a_s, ComplexMatrix::identity(space.d_B()));
}

/// 1_S ⊗ B_B
inline ComplexMatrix embed_bath_operator(const ComplexMatrix& b_b, const BipartiteSpace& space) {
    if (b_b.rows() != space.d_B() || b_b.cols() != space.d_B())
        throw DimensionMismatch("embed_bath_operator: operator " + b_b.shape() + " but d_B = " +
                                std::to_string(space.d_B()));
    return kronecker_product(ComplexMatrix::identity(space.d_S()), b_b);
}

/// SWAP on C^dim ⊗ C^dim: S|i>|j> = |j>|i>.
inline ComplexMatrix swap_operator(std::size_t dim) {
    if (dim == 0) throw DimensionMismatch("swap_operator: dim must be >= 1");
    require_dimension(dim * dim, "swap_operator");
    ComplexMatrix s(dim * dim, dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) s(j * dim + i, i * dim + j) = 1.0;
    return s;
}

}  // namespace eqlab
