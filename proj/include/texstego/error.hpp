#ifndef TEXSTEGO_ERROR_HPP
#define TEXSTEGO_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace texstego {

/// Failure categories. Each maps onto one CLI exit status (see `exit_code`).
enum class Errc {
    io,           ///< file could not be opened, read or written
    bad_magic,    ///< container tag does not match the expected format
    truncated,    ///< payload shorter than the header promises
    dimension,    ///< zero or otherwise invalid dimensions in a header
    shape,        ///< operands have incompatible shapes
    key,          ///< key file is missing fields or violates its invariants
    parameter,    ///< out-of-range scalar parameter (alpha, side, ...)
    numeric,      ///< non-finite input or failed decomposition
    convergence,  ///< iterative fit did not converge
    usage,        ///< command-line misuse
};

inline const char* to_string(Errc code) {
    switch (code) {
        case Errc::io: return "io";
        case Errc::bad_magic: return "bad_magic";
        case Errc::truncated: return "truncated";
        case Errc::dimension: return "dimension";
        case Errc::shape: return "shape";
        case Errc::key: return "key";
        case Errc::parameter: return "parameter";
        case Errc::numeric: return "numeric";
        case Errc::convergence: return "convergence";
        case Errc::usage: return "usage";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised by the ALS fit when the iteration budget is exhausted.
class ConvergenceError : public Error {
public:
    ConvergenceError(std::size_t iterations, double last_change)
        : Error(Errc::convergence, "ALS did not converge after " + std::to_string(iterations) +
                                       " iterations (last relative change " +
                                       std::to_string(last_change) + ")"),
          iterations_(iterations),
          last_change_(last_change) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double last_change() const noexcept { return last_change_; }

private:
    std::size_t iterations_;
    double last_change_;
};

/// CLI exit status: 1 usage, 2 data/format, 3 numeric.
inline int exit_code(Errc code) {
    switch (code) {
        case Errc::usage:
        case Errc::parameter: return 1;
        case Errc::numeric:
        case Errc::convergence: return 3;
        default: return 2;
    }
}

}  // namespace texstego

#endif  // TEXSTEGO_ERROR_HPP
