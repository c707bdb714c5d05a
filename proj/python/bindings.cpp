#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "qmicro/dos.hpp"
#include "qmicro/errors.hpp"
#include "qmicro/io.hpp"
#include "qmicro/mc_oracle.hpp"
#include "qmicro/spectrum.hpp"
#include "qmicro/stats.hpp"
#include "qmicro/thermo.hpp"

namespace py = pybind11;
using namespace qmicro;

namespace {

Side parse_side(const std::string& side) {
    if (side == "left") return Side::left;
    if (side == "right") return Side::right;
    throw std::invalid_argument("side must be 'left' or 'right'");
}

Backing parse_backing(const std::string& backing, const Spectrum& s) {
    if (backing == "rational") return Backing::rational;
    if (backing == "float") return Backing::floating;
    if (backing == "auto") {
        return s.prefer_rational() ? Backing::rational : Backing::floating;
    }
    throw std::invalid_argument("backing must be 'auto', 'rational' or 'float'");
}

}  // namespace

PYBIND11_MODULE(_qmicro, m) {
    m.doc() = "Microcanonical density of states and thermodynamics of finite quantum spectra";

    py::class_<Spectrum>(m, "Spectrum")
        .def_property_readonly("dimension", &Spectrum::dimension)
        .def_property_readonly("n", &Spectrum::n)
        .def_property_readonly("e_min", &Spectrum::e_min)
        .def_property_readonly("e_max", &Spectrum::e_max)
        .def("levels",
             [](const Spectrum& s) {
                 std::vector<std::pair<double, int>> out;
                 for (const auto& lv : s.levels()) {
                     out.emplace_back(to_double(lv.energy), lv.multiplicity);
                 }
                 return out;
             })
        .def("expanded", [](const Spectrum& s) { return s.expanded(); })
        .def("mean_energy", [](const Spectrum& s) { return mean_energy(s); })
        .def("__repr__", [](const Spectrum& s) {
            std::ostringstream os;
            os << "Spectrum([";
            for (int j = 0; j < s.distinct_count(); ++j) {
                if (j) os << ", ";
                os << "(" << s.energy(j) << ", " << s.multiplicity(j) << ")";
            }
            os << "])";
            return os.str();
        });

    m.def("build_uniform_ladder", &build_uniform_ladder, py::arg("n"),
          py::arg("epsilon") = 1.0);
    m.def("build_ising_chain", &build_ising_chain, py::arg("coupling_j"), py::arg("field_b"));
    m.def("from_eigenvalues", &from_eigenvalues, py::arg("values"),
          py::arg("multiplicity_tolerance") = -1.0);
    m.def(
        "eigenvalues_of_hermitian",
        [](const std::vector<std::vector<std::complex<double>>>& rows, double tol, int cap) {
            const int d = static_cast<int>(rows.size());
            std::vector<std::complex<double>> flat;
            flat.reserve(static_cast<std::size_t>(d) * d);
            for (const auto& row : rows) {
                if (static_cast<int>(row.size()) != d) {
                    throw std::invalid_argument("matrix must be square");
                }
                flat.insert(flat.end(), row.begin(), row.end());
            }
            return eigenvalues_of_hermitian(HermitianMatrix(d, std::move(flat)), tol, cap);
        },
        py::arg("matrix"), py::arg("multiplicity_tolerance") = -1.0,
        py::arg("dimension_cap") = 64);
    m.def("mean_energy", &mean_energy);

    py::class_<DensityOfStates>(m, "DensityOfStates")
        .def_property_readonly("e_min", &DensityOfStates::e_min)
        .def_property_readonly("e_max", &DensityOfStates::e_max)
        .def_property_readonly("pi_power", &DensityOfStates::pi_power)
        .def_property_readonly("phase_space_volume", &DensityOfStates::phase_space_volume)
        .def_property_readonly("backing",
                               [](const DensityOfStates& d) {
                                   return d.backing() == Backing::rational
                                              ? std::string("rational")
                                              : std::string("float");
                               })
        .def_property_readonly("spectrum", &DensityOfStates::spectrum)
        .def("evaluate", &DensityOfStates::evaluate, py::arg("energy"), py::arg("order") = 0)
        .def("evaluate_left", &DensityOfStates::evaluate_left, py::arg("energy"),
             py::arg("order") = 0)
        .def("evaluate_right", &DensityOfStates::evaluate_right, py::arg("energy"),
             py::arg("order") = 0)
        .def("integrate_moment", &DensityOfStates::integrate_moment, py::arg("a"),
             py::arg("b"), py::arg("power") = 0)
        .def("smoothness_report",
             [](const DensityOfStates& d) {
                 py::list out;
                 for (const auto& k : d.smoothness_report()) {
                     py::dict entry;
                     entry["knot"] = k.knot;
                     entry["multiplicity"] = k.multiplicity;
                     entry["continuity_order"] = k.continuity_order;
                     entry["jump_next_derivative"] = k.jump_next_derivative;
                     out.append(entry);
                 }
                 return out;
             })
        .def("to_json", [](const DensityOfStates& d) { return dos_to_json(d).dump(); })
        .def_static("from_json", [](const std::string& text) {
            return dos_from_json(nlohmann::json::parse(text));
        });

    m.def(
        "density_of_states",
        [](const Spectrum& s, const std::string& backing) {
            return density_of_states(s, parse_backing(backing, s));
        },
        py::arg("spectrum"), py::arg("backing") = "auto");

    py::class_<AccessibleRange>(m, "AccessibleRange")
        .def_readonly("e_min", &AccessibleRange::e_min)
        .def_readonly("e_star", &AccessibleRange::e_star)
        .def_readonly("empty_interior", &AccessibleRange::empty_interior);

    py::class_<CriticalPoint>(m, "CriticalPoint")
        .def_readonly("e_c", &CriticalPoint::e_c)
        .def_readonly("t_c", &CriticalPoint::t_c)
        .def_readonly("c_minus", &CriticalPoint::c_minus)
        .def_readonly("c_plus", &CriticalPoint::c_plus)
        .def_readonly("discontinuity_order", &CriticalPoint::discontinuity_order)
        .def("__repr__", [](const CriticalPoint& cp) {
            std::ostringstream os;
            os << "CriticalPoint(e_c=" << cp.e_c << ", t_c=" << cp.t_c
               << ", c_minus=" << cp.c_minus << ", c_plus=" << cp.c_plus
               << ", order=" << cp.discontinuity_order << ")";
            return os.str();
        });

    py::class_<ThermoRow>(m, "ThermoRow")
        .def_readonly("energy", &ThermoRow::energy)
        .def_readonly("entropy", &ThermoRow::entropy)
        .def_readonly("temperature", &ThermoRow::temperature)
        .def_readonly("specific_heat", &ThermoRow::specific_heat)
        .def_readonly("energy_uncertainty", &ThermoRow::energy_uncertainty);

    py::class_<ThermoCurve>(m, "ThermoCurve")
        .def_readonly("rows", &ThermoCurve::rows)
        .def_readonly("negative_branch", &ThermoCurve::negative_branch)
        .def("as_array", [](const ThermoCurve& c) {
            py::array_t<double> out({c.rows.size(), std::size_t(5)});
            auto view = out.mutable_unchecked<2>();
            for (std::size_t i = 0; i < c.rows.size(); ++i) {
                view(i, 0) = c.rows[i].energy;
                view(i, 1) = c.rows[i].entropy;
                view(i, 2) = c.rows[i].temperature;
                view(i, 3) = c.rows[i].specific_heat;
                view(i, 4) = c.rows[i].energy_uncertainty;
            }
            return out;
        });

    py::class_<EquilibrateResult>(m, "EquilibrateResult")
        .def_readonly("epsilon_star", &EquilibrateResult::epsilon_star)
        .def_readonly("t_common", &EquilibrateResult::t_common)
        .def_readonly("boundary", &EquilibrateResult::boundary);

    m.def("entropy", &entropy, py::arg("dos"), py::arg("energy"));
    m.def(
        "temperature",
        [](const DensityOfStates& d, double e, const std::string& side, bool negative) {
            return temperature(d, e, parse_side(side), negative);
        },
        py::arg("dos"), py::arg("energy"), py::arg("side") = "left",
        py::arg("negative_branch") = false);
    m.def(
        "specific_heat",
        [](const DensityOfStates& d, double e, const std::string& side, bool negative) {
            return specific_heat(d, e, parse_side(side), negative);
        },
        py::arg("dos"), py::arg("energy"), py::arg("side") = "left",
        py::arg("negative_branch") = false);
    m.def("accessible_range", &accessible_range, py::arg("dos"));
    m.def("energy_uncertainty", &energy_uncertainty, py::arg("dos"), py::arg("energy"));
    m.def("microcanonical_weights", &microcanonical_weights, py::arg("dos"),
          py::arg("energy"));
    m.def("critical_points", &critical_points, py::arg("dos"));
    m.def("thermo_curve", &thermo_curve, py::arg("dos"), py::arg("count"),
          py::arg("negative_branch") = false);
    m.def("equilibrate", &equilibrate, py::arg("dos1"), py::arg("e1"), py::arg("dos2"),
          py::arg("e2"));
    m.def("chebyshev_bound", &chebyshev_bound, py::arg("n_constituents"), py::arg("x"),
          py::arg("mean"), py::arg("variance"));

    m.def(
        "sample_pure_states",
        [](int n_plus_1, std::size_t count, std::uint64_t seed, int workers) {
            SampleBatch batch = sample_pure_states(n_plus_1, count, seed, workers);
            py::array_t<double> out({count, static_cast<std::size_t>(n_plus_1)});
            std::copy(batch.simplex.begin(), batch.simplex.end(), out.mutable_data());
            return out;
        },
        py::arg("n_plus_1"), py::arg("count"), py::arg("seed"), py::arg("workers") = 1);

    py::class_<DosHistogram>(m, "DosHistogram")
        .def_readonly("edges", &DosHistogram::edges)
        .def_readonly("observed", &DosHistogram::observed)
        .def_readonly("expected", &DosHistogram::expected)
        .def_readonly("chi2", &DosHistogram::chi2)
        .def_readonly("dof", &DosHistogram::dof)
        .def_readonly("p_value", &DosHistogram::p_value)
        .def_readonly("count", &DosHistogram::count)
        .def_readonly("seed", &DosHistogram::seed)
        .def_readonly("generator", &DosHistogram::generator);

    m.def("empirical_dos", &empirical_dos, py::arg("spectrum"), py::arg("count"),
          py::arg("bins"), py::arg("seed"), py::arg("workers") = 1);

    py::class_<MicrocanonicalEstimate>(m, "MicrocanonicalEstimate")
        .def_readonly("weights", &MicrocanonicalEstimate::weights)
        .def_readonly("weight_se", &MicrocanonicalEstimate::weight_se)
        .def_readonly("dh", &MicrocanonicalEstimate::dh)
        .def_readonly("dh_se", &MicrocanonicalEstimate::dh_se)
        .def_readonly("statistical_spread", &MicrocanonicalEstimate::statistical_spread)
        .def_readonly("kept", &MicrocanonicalEstimate::kept);

    m.def("empirical_microcanonical", &empirical_microcanonical, py::arg("spectrum"),
          py::arg("energy"), py::arg("window"), py::arg("count"), py::arg("seed"),
          py::arg("workers") = 1);

    m.def("chi2_pvalue", &chi2_pvalue, py::arg("stat"), py::arg("dof"));

    py::register_exception<insufficient_statistics_error>(m, "InsufficientStatisticsError",
                                                          PyExc_RuntimeError);

    m.attr("__version__") = "0.1.0";
}
