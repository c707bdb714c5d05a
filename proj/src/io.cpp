#include "qmicro/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qmicro {

namespace {

Spectrum spectrum_from_pairs(std::vector<std::pair<double, int>> pairs, double merge_tol) {
    std::vector<double> values;
    for (const auto& [e, m] : pairs) {
        if (m < 1) throw std::invalid_argument("spectrum input: multiplicity must be >= 1");
        for (int k = 0; k < m; ++k) values.push_back(e);
    }
    if (values.size() < 2) {
        throw std::invalid_argument("spectrum input: need total dimension >= 2");
    }
    return from_eigenvalues(values, merge_tol);
}

}  // namespace

Spectrum spectrum_from_json(const nlohmann::json& j, double merge_tol) {
    if (!j.is_object() || !j.contains("levels") || !j["levels"].is_array()) {
        throw std::invalid_argument("spectrum json: expected {\"levels\": [[E, mult], ...]}");
    }
    std::vector<std::pair<double, int>> pairs;
    for (const auto& entry : j["levels"]) {
        if (!entry.is_array() || entry.size() < 1 || entry.size() > 2) {
            throw std::invalid_argument("spectrum json: each level is [energy, multiplicity]");
        }
        double e = entry[0].get<double>();
        int m = entry.size() == 2 ? entry[1].get<int>() : 1;
        pairs.emplace_back(e, m);
    }
    return spectrum_from_pairs(std::move(pairs), merge_tol);
}

Spectrum parse_spectrum_text(const std::string& text, double merge_tol) {
    std::string trimmed = text;
    std::size_t start = trimmed.find_first_not_of(" \t\r\n");
    if (start != std::string::npos && trimmed[start] == '{') {
        return spectrum_from_json(nlohmann::json::parse(trimmed), merge_tol);
    }
    std::vector<std::pair<double, int>> pairs;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double e;
        if (!(row >> e)) continue;  // blank or comment-only line
        int m = 1;
        row >> m;
        pairs.emplace_back(e, m);
    }
    return spectrum_from_pairs(std::move(pairs), merge_tol);
}

Spectrum load_spectrum_file(const std::string& path, double merge_tol) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open spectrum file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spectrum_text(buf.str(), merge_tol);
}

nlohmann::json dos_to_json(const DensityOfStates& d) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "density_of_states";
    j["backing"] = d.backing() == Backing::rational ? "rational" : "float";
    j["pi_power"] = d.pi_power();
    j["phase_space_volume"] = d.phase_space_volume();

    nlohmann::json levels = nlohmann::json::array();
    for (const auto& lv : d.spectrum().levels()) {
        levels.push_back({to_fraction_string(lv.energy), lv.multiplicity});
    }
    j["spectrum"] = levels;

    if (const auto* ex = d.exact_poly()) {
        nlohmann::json knots = nlohmann::json::array();
        for (const auto& k : ex->knots) knots.push_back(to_fraction_string(k));
        nlohmann::json pieces = nlohmann::json::array();
        for (const auto& piece : ex->pieces) {
            nlohmann::json coeffs = nlohmann::json::array();
            for (const auto& c : piece) coeffs.push_back(to_fraction_string(c));
            pieces.push_back(coeffs);
        }
        j["knots"] = knots;
        j["pieces"] = pieces;
    } else {
        const auto& f = d.float_poly();
        j["knots"] = f.knots;
        j["pieces"] = f.pieces;
    }
    return j;
}

DensityOfStates dos_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("kind", "") != "density_of_states") {
        throw std::invalid_argument("dos json: not a density_of_states document");
    }
    if (j.value("schema_version", 0) != kSchemaVersion) {
        throw std::invalid_argument("dos json: unsupported schema_version");
    }
    const bool rational = j.value("backing", "") == "rational";

    std::vector<SpectrumLevel> levels;
    for (const auto& entry : j.at("spectrum")) {
        levels.push_back(SpectrumLevel{rational_from_string(entry.at(0).get<std::string>()),
                                       entry.at(1).get<int>()});
    }
    Spectrum s = Spectrum::from_levels(std::move(levels), rational);

    if (rational) {
        PiecewisePoly<Rational> exact;
        for (const auto& k : j.at("knots")) {
            exact.knots.push_back(rational_from_string(k.get<std::string>()));
        }
        for (const auto& piece : j.at("pieces")) {
            Poly<Rational> coeffs;
            for (const auto& c : piece) {
                coeffs.push_back(rational_from_string(c.get<std::string>()));
            }
            exact.pieces.push_back(std::move(coeffs));
        }
        PiecewisePoly<double> approx = to_floating(exact);
        return dos_from_parts(std::move(s), Backing::rational, std::move(exact),
                              std::move(approx));
    }
    PiecewisePoly<double> approx;
    approx.knots = j.at("knots").get<std::vector<double>>();
    approx.pieces = j.at("pieces").get<std::vector<std::vector<double>>>();
    return dos_from_parts(std::move(s), Backing::floating, std::nullopt, std::move(approx));
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> half_offset_grid(double lo, double hi, int count) {
    if (count < 2) throw std::invalid_argument("grid: need at least two points");
    if (!(hi > lo)) throw std::invalid_argument("grid: empty range");
    std::vector<double> out;
    out.reserve(count);
    const double step = (hi - lo) / count;
    for (int i = 0; i < count; ++i) out.push_back(lo + (i + 0.5) * step);
    return out;
}

}  // namespace qmicro
