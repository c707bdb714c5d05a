#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmicro {

/// Spectrum with a single distinct level: the density of states is a delta
/// distribution and has no piecewise-polynomial representation.
class degenerate_spectrum_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input exceeds a configured cap (e.g. the dense-eigensolver dimension).
class unsupported_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Omega'(E) == 0: the temperature is infinite at this energy.
class infinite_temperature_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// (Omega')^2 == Omega * Omega'': the specific heat diverges.
class divergent_heat_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Monte Carlo conditioning retained fewer samples than required.
class insufficient_statistics_error : public std::runtime_error {
public:
    insufficient_statistics_error(const std::string& what, std::size_t kept)
        : std::runtime_error(what), kept_(kept) {}
    std::size_t kept() const noexcept { return kept_; }

private:
    std::size_t kept_;
};

/// An internal identity failed beyond its numerical guard band.
class consistency_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace qmicro
