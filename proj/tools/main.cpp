// qmicro: microcanonical density of states, thermodynamics and Monte Carlo
// cross-checks for finite quantum spectra.

#include <clocale>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmicro/dos.hpp"
#include "qmicro/errors.hpp"
#include "qmicro/io.hpp"
#include "qmicro/mc_oracle.hpp"
#include "qmicro/spectrum.hpp"
#include "qmicro/thermo.hpp"

namespace {

using nlohmann::json;
using namespace qmicro;

struct SourceOpts {
    int ladder_n = 0;
    std::string ising;
    std::string levels;
    std::string file;
    double merge_tol = -1.0;

    int provided() const {
        return (ladder_n > 0) + !ising.empty() + !levels.empty() + !file.empty();
    }
};

void add_source_options(CLI::App* cmd, SourceOpts& src, const std::string& suffix = "") {
    cmd->add_option("--ladder" + suffix, src.ladder_n,
                    "Uniform (N+1)-level ladder with unit spacing");
    cmd->add_option("--ising" + suffix, src.ising,
                    "Cyclic three-spin chain, e.g. J=0.25,B=1");
    cmd->add_option("--levels" + suffix, src.levels,
                    "Comma-separated eigenvalues, e.g. 0,1,1,2,3");
    cmd->add_option("--file" + suffix, src.file,
                    "Spectrum file (JSON levels or 'energy multiplicity' lines)");
    cmd->add_option("--merge-tol" + suffix, src.merge_tol,
                    "Degeneracy merge tolerance (default 1e-9 x range)");
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

Spectrum resolve_spectrum(const SourceOpts& src) {
    if (src.provided() != 1) {
        throw std::invalid_argument(
            "exactly one spectrum source is required (--ladder | --ising | --levels | --file)");
    }
    if (src.ladder_n > 0) return build_uniform_ladder(src.ladder_n, 1.0);
    if (!src.ising.empty()) {
        std::optional<double> j, b;
        std::stringstream ss(src.ising);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("--ising expects J=<num>,B=<num>");
            }
            std::string key = tok.substr(0, eq);
            double val = std::stod(tok.substr(eq + 1));
            if (key == "J" || key == "j") {
                j = val;
            } else if (key == "B" || key == "b") {
                b = val;
            } else {
                throw std::invalid_argument("--ising: unknown key '" + key + "'");
            }
        }
        if (!j || !b) throw std::invalid_argument("--ising expects both J= and B=");
        return build_ising_chain(*j, *b);
    }
    if (!src.levels.empty()) {
        return from_eigenvalues(parse_number_list(src.levels), src.merge_tol);
    }
    return load_spectrum_file(src.file, src.merge_tol);
}

Backing resolve_backing(const Spectrum& s, bool force_rational, bool force_float) {
    if (force_rational) return Backing::rational;
    if (force_float) return Backing::floating;
    return s.prefer_rational() ? Backing::rational : Backing::floating;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);  // LF endings everywhere
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text(path, text);
    }
}

json smoothness_json(const DensityOfStates& d) {
    json arr = json::array();
    for (const auto& k : d.smoothness_report()) {
        arr.push_back({{"knot", k.knot},
                       {"multiplicity", k.multiplicity},
                       {"continuity_order", k.continuity_order},
                       {"jump_next_derivative", k.jump_next_derivative}});
    }
    return json{{"schema_version", kSchemaVersion}, {"smoothness", arr}};
}

// ---------------------------------------------------------------------------

struct DosCmd {
    SourceOpts src;
    std::string load_path;
    int grid = 2000;
    bool force_rational = false, force_float = false;
    double scale = 1.0;
    std::string out, json_out;

    int run() {
        DensityOfStates d = [&] {
            if (!load_path.empty()) {
                if (src.provided() != 0) {
                    throw std::invalid_argument("--load replaces the spectrum source");
                }
                std::ifstream in(load_path);
                if (!in) throw std::invalid_argument("cannot open " + load_path);
                return dos_from_json(json::parse(in));
            }
            Spectrum s = resolve_spectrum(src);
            return density_of_states(s, resolve_backing(s, force_rational, force_float));
        }();

        std::string csv = "E,Omega,dOmega,d2Omega\n";
        for (double e : half_offset_grid(d.e_min(), d.e_max(), grid)) {
            csv += format_g17(e * scale);
            csv += ',';
            csv += format_g17(d.evaluate_unchecked(e, 0) / scale);
            csv += ',';
            csv += format_g17(d.evaluate_unchecked(e, 1) / (scale * scale));
            csv += ',';
            csv += format_g17(d.evaluate_unchecked(e, 2) / (scale * scale * scale));
            csv += '\n';
        }
        emit(out, csv);
        if (!out.empty()) {
            write_text(out + ".smoothness.json", smoothness_json(d).dump(2) + "\n");
        }
        if (!json_out.empty()) {
            write_text(json_out, dos_to_json(d).dump(2) + "\n");
        }
        return 0;
    }
};

struct ThermoCmd {
    SourceOpts src;
    int grid = 2000;
    bool force_rational = false, force_float = false;
    bool negative_branch = false;
    double scale = 1.0;
    std::string out, report_path, fit_windows;

    int run() {
        Spectrum s = resolve_spectrum(src);
        DensityOfStates d =
            density_of_states(s, resolve_backing(s, force_rational, force_float));
        ThermoCurve curve = thermo_curve(d, grid, negative_branch);
        AccessibleRange ar = accessible_range(d);
        auto cps = critical_points(d);

        json report;
        report["schema_version"] = kSchemaVersion;
        report["accessible_range"] = {{"e_min", ar.e_min * scale},
                                      {"e_star", ar.e_star * scale},
                                      {"empty_interior", ar.empty_interior}};
        json arr = json::array();
        for (const auto& cp : cps) {
            arr.push_back({{"E_c", cp.e_c * scale},
                           {"T_c", cp.t_c * scale},
                           {"C_minus", cp.c_minus},
                           {"C_plus", cp.c_plus},
                           {"discontinuity_order", cp.discontinuity_order}});
        }
        report["critical_points"] = arr;

        if (!fit_windows.empty()) {
            if (cps.empty()) {
                throw std::domain_error("--fit-exponents needs a critical point");
            }
            const double t_c = cps.front().t_c;
            json fits = json::array();
            std::stringstream ss(fit_windows);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                auto colon = tok.find(':');
                if (colon == std::string::npos) {
                    throw std::invalid_argument("--fit-exponents expects Tlo:Thi[,Tlo:Thi]");
                }
                double lo = std::stod(tok.substr(0, colon));
                double hi = std::stod(tok.substr(colon + 1));
                // least-squares slope of ln C against ln|T - T_c|
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                int npts = 0;
                for (const auto& row : curve.rows) {
                    if (row.temperature < lo || row.temperature > hi) continue;
                    double x = std::log(std::abs(row.temperature - t_c));
                    double y = std::log(row.specific_heat);
                    if (!std::isfinite(x) || !std::isfinite(y)) continue;
                    sx += x;
                    sy += y;
                    sxx += x * x;
                    sxy += x * y;
                    ++npts;
                }
                double slope = npts > 1 ? (npts * sxy - sx * sy) / (npts * sxx - sx * sx)
                                        : std::numeric_limits<double>::quiet_NaN();
                fits.push_back({{"t_lo", lo}, {"t_hi", hi}, {"slope", slope}, {"points", npts}});
            }
            report["fit_exponents"] = fits;
        }

        std::string csv = "E,S,T,C,dH\n";
        for (const auto& row : curve.rows) {
            csv += format_g17(row.energy * scale);
            csv += ',';
            csv += format_g17(row.entropy);
            csv += ',';
            csv += format_g17(row.temperature * scale);
            csv += ',';
            csv += format_g17(row.specific_heat);
            csv += ',';
            csv += format_g17(row.energy_uncertainty * scale);
            csv += '\n';
        }
        if (!out.empty()) {
            write_text(out, csv);
            std::string rp = report_path.empty() ? out + ".critical.json" : report_path;
            write_text(rp, report.dump(2) + "\n");
            std::cout << report.dump(2) << "\n";
        } else if (!report_path.empty()) {
            write_text(report_path, report.dump(2) + "\n");
        } else {
            std::cout << report.dump(2) << "\n";
        }
        return 0;
    }
};

struct CompareCmd {
    SourceOpts src;
    double samples = 1e6;
    std::uint64_t seed = 12345;
    int bins = 50;
    int workers = 1;
    double at_energy = std::numeric_limits<double>::quiet_NaN();
    double window = 0.0;
    double alpha = 0.001;
    std::string out, histogram_path;

    int run() {
        Spectrum s = resolve_spectrum(src);
        DensityOfStates d = density_of_states(s);
        const auto count = static_cast<std::size_t>(samples);
        const double span = d.e_max() - d.e_min();
        double e = std::isnan(at_energy) ? 0.5 * (d.e_min() + d.e_max()) : at_energy;
        double win = window > 0.0 ? window : span / 100.0;

        // Weight estimation first: with tiny sample budgets this is the part
        // that runs out of statistics, and that is the failure to surface.
        auto analytic = microcanonical_weights(d, e);
        MicrocanonicalEstimate est = empirical_microcanonical(s, e, win, count, seed, workers);
        double max_dev = 0.0;
        for (std::size_t k = 0; k < analytic.size(); ++k) {
            if (est.weight_se[k] > 0.0) {
                max_dev = std::max(max_dev,
                                   std::abs(est.weights[k] - analytic[k]) / est.weight_se[k]);
            }
        }
        bool weights_pass = max_dev <= 3.0;

        if (count < 10000) {
            throw insufficient_statistics_error(
                "compare: need at least 1e4 samples for the histogram stage", count);
        }
        DosHistogram hist = empirical_dos(s, count, bins, seed, workers);
        bool dos_pass = hist.p_value > alpha;

        double dh_analytic = energy_uncertainty(d, e);

        json report;
        report["schema_version"] = kSchemaVersion;
        json levels = json::array();
        for (const auto& lv : s.levels()) {
            levels.push_back({to_double(lv.energy), lv.multiplicity});
        }
        report["spectrum"] = levels;
        report["samples"] = count;
        report["seed"] = seed;
        report["generator"] = kGeneratorName;
        report["alpha"] = alpha;
        report["dos_chi2"] = {{"chi2", hist.chi2},
                              {"dof", hist.dof},
                              {"p_value", hist.p_value},
                              {"bins", bins},
                              {"pass", dos_pass}};
        report["weights"] = {{"at_energy", e},
                             {"window", win},
                             {"kept", est.kept},
                             {"analytic", analytic},
                             {"empirical", est.weights},
                             {"standard_error", est.weight_se},
                             {"max_standardized_deviation", max_dev},
                             {"pass", weights_pass}};
        report["dh"] = {{"analytic", dh_analytic},
                        {"empirical", est.dh},
                        {"standard_error", est.dh_se},
                        {"statistical_spread", est.statistical_spread}};
        report["pass"] = weights_pass && dos_pass;
        emit(out, report.dump(2) + "\n");

        if (!histogram_path.empty()) {
            std::string csv = "bin_left,bin_right,observed,expected\n";
            for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b) {
                csv += format_g17(hist.edges[b]);
                csv += ',';
                csv += format_g17(hist.edges[b + 1]);
                csv += ',';
                csv += std::to_string(hist.observed[b]);
                csv += ',';
                csv += format_g17(hist.expected[b]);
                csv += '\n';
            }
            write_text(histogram_path, csv);
        }
        if (!(weights_pass && dos_pass)) {
            std::cerr << "compare: oracle disagreement (see report)\n";
            return 3;
        }
        return 0;
    }
};

struct EquilibrateCmd {
    SourceOpts src_a, src_b;
    double e1 = 0.0, e2 = 0.0;
    std::string out;

    int run() {
        Spectrum sa = resolve_spectrum(src_a);
        Spectrum sb = src_b.provided() == 0 ? sa : resolve_spectrum(src_b);
        DensityOfStates d1 = density_of_states(sa);
        DensityOfStates d2 = density_of_states(sb);
        EquilibrateResult r = equilibrate(d1, e1, d2, e2);
        json report;
        report["schema_version"] = kSchemaVersion;
        report["epsilon_star"] = r.epsilon_star;
        report["boundary"] = r.boundary;
        if (r.boundary) {
            report["t_common"] = nullptr;
        } else {
            report["t_common"] = r.t_common;
        }
        report["t1"] = temperature(d1, e1 + r.epsilon_star);
        report["t2"] = temperature(d2, e2 - r.epsilon_star);
        emit(out, report.dump(2) + "\n");
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"Microcanonical density of states and thermodynamics of finite quantum spectra"};
    app.require_subcommand(1);

    DosCmd dos_cmd;
    auto* dos_app = app.add_subcommand("dos", "Density-of-states curve and smoothness report");
    add_source_options(dos_app, dos_cmd.src);
    dos_app->add_option("--load", dos_cmd.load_path, "Reload a serialized density of states");
    dos_app->add_option("--grid", dos_cmd.grid, "Number of sample points")->check(CLI::Range(2, 10000000));
    dos_app->add_flag("--rational", dos_cmd.force_rational, "Force the exact backing");
    dos_app->add_flag("--float", dos_cmd.force_float, "Force the floating backing");
    dos_app->add_option("--scale", dos_cmd.scale, "Display energy unit");
    dos_app->add_option("--out", dos_cmd.out, "CSV output path (stdout if omitted)");
    dos_app->add_option("--json", dos_cmd.json_out, "Serialize the density of states");

    ThermoCmd thermo_cmd;
    auto* thermo_app = app.add_subcommand("thermo", "Thermodynamic curve and critical points");
    add_source_options(thermo_app, thermo_cmd.src);
    thermo_app->add_option("--grid", thermo_cmd.grid, "Number of sample points")->check(CLI::Range(2, 10000000));
    thermo_app->add_flag("--rational", thermo_cmd.force_rational, "Force the exact backing");
    thermo_app->add_flag("--float", thermo_cmd.force_float, "Force the floating backing");
    thermo_app->add_flag("--negative-branch", thermo_cmd.negative_branch,
                         "Include the negative-temperature branch");
    thermo_app->add_option("--scale", thermo_cmd.scale, "Display energy unit");
    thermo_app->add_option("--out", thermo_cmd.out, "Curve CSV output path");
    thermo_app->add_option("--report", thermo_cmd.report_path, "Critical-point report path");
    thermo_app->add_option("--fit-exponents", thermo_cmd.fit_windows,
                           "Log-log slope fits over T windows, e.g. 0.6:0.9,1.1:2");

    CompareCmd compare_cmd;
    auto* compare_app = app.add_subcommand("compare", "Monte Carlo oracle agreement report");
    add_source_options(compare_app, compare_cmd.src);
    compare_app->add_option("--samples", compare_cmd.samples, "Sample count (default 1e6)");
    compare_app->add_option("--seed", compare_cmd.seed, "RNG seed");
    compare_app->add_option("--bins", compare_cmd.bins, "Histogram bins")->check(CLI::Range(10, 100000));
    compare_app->add_option("--workers", compare_cmd.workers, "Sampling workers");
    compare_app->add_option("--at", compare_cmd.at_energy, "Weight-check energy (default mid-support)");
    compare_app->add_option("--window", compare_cmd.window, "Conditioning window (default span/100)");
    compare_app->add_option("--alpha", compare_cmd.alpha, "Chi-square significance level");
    compare_app->add_option("--out", compare_cmd.out, "Report path (stdout if omitted)");
    compare_app->add_option("--histogram", compare_cmd.histogram_path, "Histogram CSV path");

    EquilibrateCmd eq_cmd;
    auto* eq_app = app.add_subcommand("equilibrate", "Energy exchange between two systems");
    add_source_options(eq_app, eq_cmd.src_a);
    add_source_options(eq_app, eq_cmd.src_b, "-b");
    eq_app->add_option("--e1", eq_cmd.e1, "Initial energy of system A")->required();
    eq_app->add_option("--e2", eq_cmd.e2, "Initial energy of system B")->required();
    eq_app->add_option("--out", eq_cmd.out, "Report path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*dos_app) return dos_cmd.run();
        if (*thermo_app) return thermo_cmd.run();
        if (*compare_app) return compare_cmd.run();
        if (*eq_app) return eq_cmd.run();
    } catch (const insufficient_statistics_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const consistency_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const degenerate_spectrum_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
