#pragma once

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace eqlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DimensionOverflow : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class DegenerateHamiltonian : public Error {
public:
    using Error::Error;
};

class ConfigInvalid : public Error {
public:
    ConfigInvalid(std::string field, const std::string& message)
        : Error("invalid config field '" + field + "': " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

inline constexpr std::size_t default_max_dimension = 4096;

/// Cap on the total Hilbert-space dimension. EQLAB_MAX_DIM overrides the default.
inline std::size_t max_dimension() {
    if (const char* env = std::getenv("EQLAB_MAX_DIM")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return default_max_dimension;
}

inline void require_dimension(std::size_t dim, const char* what) {
    if (dim > max_dimension())
        throw DimensionOverflow(std::string(what) + ": dimension " + std::to_string(dim) +
                                " exceeds maximum " + std::to_string(max_dimension()));
}

}  // namespace eqlab
