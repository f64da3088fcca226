#pragma once

#include <string>

#include "json.hpp"

#include "eqlab/hamiltonian.hpp"

namespace eqlab {

/// {"d_S", "d_B", "energies": [...], "eigenbasis": [re, im, re, im, ...]} (row-major).
inline nlohmann::json to_json(const SpectralHamiltonian& h) {
    nlohmann::json j;
    j["d_S"] = h.space().d_S();
    j["d_B"] = h.space().d_B();
    j["energies"] = h.energies();
    auto& basis = j["eigenbasis"] = nlohmann::json::array();
    for (const auto& z : h.eigenbasis().data()) {
        basis.push_back(z.real());
        basis.push_back(z.imag());
    }
    return j;
}

inline SpectralHamiltonian hamiltonian_from_json(const nlohmann::json& j) {
    try {
        const BipartiteSpace space(j.at("d_S").get<std::size_t>(), j.at("d_B").get<std::size_t>());
        RVector energies = j.at("energies").get<RVector>();
        const auto& flat = j.at("eigenbasis");
        const std::size_t d = space.dim();
        if (energies.size() != d || flat.size() != 2 * d * d)
            throw DimensionMismatch("hamiltonian_from_json: expected " + std::to_string(d) + " energies and " +
                                    std::to_string(2 * d * d) + " basis numbers");
        CVector entries(d * d);
        for (std::size_t k = 0; k < d * d; ++k) entries[k] = {flat[2 * k].get<double>(), flat[2 * k + 1].get<double>()};
        return SpectralHamiltonian(std::move(energies), ComplexMatrix(d, d, std::move(entries)), space);
    } catch (const nlohmann::json::exception& e) {
        throw DimensionMismatch(std::string("hamiltonian_from_json: ") + e.what());
    }
}

}  // namespace eqlab
