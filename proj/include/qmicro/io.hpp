#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmicro/dos.hpp"
#include "qmicro/spectrum.hpp"

namespace qmicro {

inline constexpr int kSchemaVersion = 1;

/// Spectrum file: JSON {"levels": [[energy, multiplicity], ...]} or plain text
/// with one "energy multiplicity" pair per line and '#' comments.
Spectrum load_spectrum_file(const std::string& path, double merge_tol = -1.0);
Spectrum parse_spectrum_text(const std::string& text, double merge_tol = -1.0);
Spectrum spectrum_from_json(const nlohmann::json& j, double merge_tol = -1.0);

/// Knots, per-piece coefficients, backing and normalization metadata; the
/// rational backing serializes coefficients as "p/q" strings and reloads
/// bit-exactly.
nlohmann::json dos_to_json(const DensityOfStates& d);
DensityOfStates dos_from_json(const nlohmann::json& j);

/// 17 significant digits, locale-independent.
std::string format_g17(double v);

/// Uniformly spaced midpoints of count cells over [lo, hi].
std::vector<double> half_offset_grid(double lo, double hi, int count);

}  // namespace qmicro
