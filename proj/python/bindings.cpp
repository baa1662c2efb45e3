#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "chemodem/circuit.hpp"
#include "chemodem/config.hpp"
#include "chemodem/dcs2.hpp"
#include "chemodem/demod.hpp"
#include "chemodem/errors.hpp"
#include "chemodem/experiment.hpp"
#include "chemodem/hill.hpp"
#include "chemodem/rdme.hpp"
#include "chemodem/rng.hpp"
#include "chemodem/signal.hpp"

namespace py = pybind11;
using namespace chemodem;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Chemical-reaction demodulation toolkit: receptor-channel simulation, "
              "log-posteriori filters, molecular-circuit demodulation, BER experiments, "
              "and the DCS2 promoter model.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    py::class_<Rng>(m, "Rng", "Seeded random stream; (master_seed, stream) pins every draw.")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("master_seed"), py::arg("stream"))
        .def("uniform", &Rng::uniform)
        .def("exponential", &Rng::exponential, py::arg("rate"));

    // --- signals -------------------------------------------------------------
    py::class_<StepSignal>(m, "StepSignal",
                           "Piecewise-constant right-continuous signal over [times[0], inf).")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("times"),
             py::arg("values"))
        .def_static("constant", &StepSignal::constant, py::arg("value"))
        .def("value_at", &StepSignal::value_at, py::arg("t"))
        .def("integral", &StepSignal::integral, py::arg("t0"), py::arg("t1"))
        .def_property_readonly("times", [](const StepSignal& s) { return s.times(); })
        .def_property_readonly("values", [](const StepSignal& s) { return s.values(); })
        .def("__len__", &StepSignal::size);

    py::class_<SampledSeries>(m, "SampledSeries",
                              "Linearly interpolated samples with constant extrapolation.")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("times"),
             py::arg("values"))
        .def_static("uniform", &SampledSeries::uniform, py::arg("t0"), py::arg("dt"),
                    py::arg("values"))
        .def("value_at", &SampledSeries::value_at, py::arg("t"))
        .def("integral", &SampledSeries::integral, py::arg("t0"), py::arg("t1"))
        .def_property_readonly("times", [](const SampledSeries& s) { return s.times(); })
        .def_property_readonly("values", [](const SampledSeries& s) { return s.values(); })
        .def("__len__", &SampledSeries::size);

    // --- receptors and symbols -----------------------------------------------
    py::class_<ReceptorParams>(m, "ReceptorParams")
        .def(py::init([](double binding, double unbinding, int count) {
                 return ReceptorParams{binding, unbinding, count};
             }),
             py::arg("binding_rate"), py::arg("unbinding_rate"), py::arg("count"))
        .def_readwrite("binding_rate", &ReceptorParams::binding_rate)
        .def_readwrite("unbinding_rate", &ReceptorParams::unbinding_rate)
        .def_readwrite("count", &ReceptorParams::count);

    py::class_<CMSymbolSet>(m, "CMSymbolSet",
                            "Concentration-modulated alphabet: rectangles of equal duration.")
        .def(py::init<>())
        .def_readwrite("amplitudes", &CMSymbolSet::amplitudes)
        .def_readwrite("off_level", &CMSymbolSet::off_level)
        .def_readwrite("duration", &CMSymbolSet::duration)
        .def_readwrite("priors", &CMSymbolSet::priors)
        .def("count", &CMSymbolSet::count)
        .def("validate", &CMSymbolSet::validate)
        .def("warnings", &CMSymbolSet::warnings)
        .def("prior", &CMSymbolSet::prior, py::arg("k"))
        .def("log_prior", &CMSymbolSet::log_prior, py::arg("k"))
        .def("lambda_", &CMSymbolSet::lambda, py::arg("k"));

    py::class_<RenewalStats>(m, "RenewalStats")
        .def_readonly("mean_interval", &RenewalStats::mean_interval)
        .def_readonly("interval_variance", &RenewalStats::interval_variance)
        .def_readonly("x_star", &RenewalStats::x_star);
    m.def("renewal_stats", &renewal_stats, py::arg("binding_rate"), py::arg("unbinding_rate"),
          py::arg("amplitude"), py::arg("receptor_count"));
    m.def("phi", &phi, py::arg("input_amplitude"), py::arg("reference_amplitude"),
          "phi_a(z) = log z - z / a; maximal at z = a.");
    m.def(
        "activation_count",
        [](const StepSignal& xstar, double t_end) { return activation_count(xstar, t_end); },
        py::arg("xstar"), py::arg("t_end"), "Upward jumps of x_* in [0, t_end].");

    // --- diffusion channel ------------------------------------------------------
    py::class_<VoxelGrid>(m, "VoxelGrid")
        .def(py::init<>())
        .def_readwrite("nx", &VoxelGrid::nx)
        .def_readwrite("ny", &VoxelGrid::ny)
        .def_readwrite("nz", &VoxelGrid::nz)
        .def_readwrite("voxel_width", &VoxelGrid::voxel_width)
        .def_readwrite("diffusion", &VoxelGrid::diffusion)
        .def_readwrite("tx", &VoxelGrid::tx)
        .def_readwrite("rx", &VoxelGrid::rx)
        .def_readwrite("escape_divisor", &VoxelGrid::escape_divisor)
        .def("voxel_count", &VoxelGrid::voxel_count);

    py::class_<EmissionSchedule>(m, "EmissionSchedule")
        .def(py::init([](double on_rate, double on_duration, double basal_rate) {
                 return EmissionSchedule{on_rate, on_duration, basal_rate};
             }),
             py::arg("on_rate"), py::arg("on_duration"), py::arg("basal_rate") = 0.0)
        .def_readwrite("on_rate", &EmissionSchedule::on_rate)
        .def_readwrite("on_duration", &EmissionSchedule::on_duration)
        .def_readwrite("basal_rate", &EmissionSchedule::basal_rate);

    py::class_<SteadyState>(m, "SteadyState")
        .def_readonly("per_voxel", &SteadyState::per_voxel)
        .def_readonly("receiver", &SteadyState::receiver);
    m.def("steady_state_mean", &steady_state_mean, py::arg("grid"), py::arg("emission_rate"),
          "Mean-field steady-state signal counts under constant emission.");
    m.def("mean_trajectory", &mean_trajectory, py::arg("grid"), py::arg("emission"),
          py::arg("horizon"), py::arg("sample_dt"),
          "Expected receiver-voxel count over time (mean-field ODE).");

    // --- demodulation filters --------------------------------------------------
    py::class_<FilterPath>(m, "FilterPath",
                           "Log-posteriori path; values carry an arbitrary additive offset.")
        .def_readonly("sample_dt", &FilterPath::sample_dt)
        .def_readonly("log_prior", &FilterPath::log_prior)
        .def_readonly("times", &FilterPath::times)
        .def_readonly("values", &FilterPath::values)
        .def_readonly("jump_times", &FilterPath::jump_times)
        .def_readonly("jump_sizes", &FilterPath::jump_sizes)
        .def("at_time", &FilterPath::at_time, py::arg("t"));

    py::class_<Reference>(m, "Reference",
                          "Reference signal feeding the exact filter: exact rectangle or "
                          "mean-field sample series.")
        .def_static("step", &Reference::step, py::arg("signal"))
        .def_static("sampled", &Reference::sampled, py::arg("series"))
        .def("value_at", &Reference::value_at, py::arg("t"))
        .def("integral", &Reference::integral, py::arg("t0"), py::arg("t1"));

    m.def(
        "exact_filter",
        [](const StepSignal& xstar, const Reference& reference, const ReceptorParams& receptors,
           double log_prior, double horizon, double sample_dt) {
            return exact_filter(xstar, reference, receptors, log_prior, horizon, sample_dt);
        },
        py::arg("xstar"), py::arg("reference"), py::arg("receptors"), py::arg("log_prior"),
        py::arg("horizon"), py::arg("sample_dt") = 0.1);
    m.def("intermediate_filter", &intermediate_filter, py::arg("xstar"), py::arg("input"),
          py::arg("lambda_k"), py::arg("unbinding_rate"), py::arg("horizon"),
          py::arg("log_prior") = 0.0, py::arg("sample_dt") = 0.1);
    m.def("positive_filter", &positive_filter, py::arg("xstar"), py::arg("input"),
          py::arg("amplitude"), py::arg("unbinding_rate"), py::arg("horizon"),
          py::arg("sample_dt") = 0.1);

    // --- Hill fits ---------------------------------------------------------------
    py::class_<HillParams>(m, "HillParams")
        .def(py::init<>())
        .def_readwrite("h", &HillParams::h)
        .def_readwrite("H", &HillParams::H)
        .def_readwrite("n", &HillParams::n)
        .def_readwrite("amplitude", &HillParams::amplitude)
        .def_readonly("residual", &HillParams::residual)
        .def_readonly("q_min", &HillParams::q_min)
        .def_readonly("q_max", &HillParams::q_max)
        .def_readonly("degraded", &HillParams::degraded)
        .def("__repr__", [](const HillParams& p) {
            std::ostringstream ss;
            ss << "HillParams(h=" << p.h << ", H=" << p.H << ", n=" << p.n
               << ", amplitude=" << p.amplitude << ")";
            return ss.str();
        });

    py::class_<HillFitConfig>(m, "HillFitConfig")
        .def(py::init<>())
        .def_readwrite("q_max_factor", &HillFitConfig::q_max_factor)
        .def_readwrite("grid_points", &HillFitConfig::grid_points)
        .def_readwrite("max_sweeps", &HillFitConfig::max_sweeps);

    m.def("fit_hill", &fit_hill, py::arg("amplitude"), py::arg("config") = HillFitConfig{},
          "Least-squares Hill fit to the clamped log target [log a - a/q]_+.");
    m.def("fit_hill_seeded", &fit_hill_seeded, py::arg("amplitude"),
          py::arg("config") = HillFitConfig{});
    m.def("hill_eval", &hill_eval, py::arg("params"), py::arg("q"));
    m.def("hill_target", &hill_target, py::arg("amplitude"), py::arg("q"));

    // --- molecular circuit --------------------------------------------------------
    py::class_<CountingPath>(m, "CountingPath")
        .def(py::init<>())
        .def_readwrite("jump_times", &CountingPath::jump_times)
        .def("count_at", &CountingPath::count_at, py::arg("t"));

    py::class_<CountSeries>(m, "CountSeries")
        .def_readonly("species", &CountSeries::species)
        .def_readonly("times", &CountSeries::times)
        .def("at", &CountSeries::at, py::arg("t"))
        .def("rows", &CountSeries::rows);

    py::class_<Impulse>(m, "Impulse")
        .def(py::init([](double time, int species, long long amount) {
                 return Impulse{time, species, amount};
             }),
             py::arg("time"), py::arg("species"), py::arg("amount"))
        .def_readwrite("time", &Impulse::time)
        .def_readwrite("species", &Impulse::species)
        .def_readwrite("amount", &Impulse::amount);

    py::class_<DeterministicResult>(m, "DeterministicResult")
        .def_readonly("final_counts", &DeterministicResult::final_counts)
        .def_readonly("order_ambiguous", &DeterministicResult::order_ambiguous);

    py::class_<AppendixCScenario>(m, "AppendixCScenario")
        .def_readonly("name", &AppendixCScenario::name)
        .def_readonly("impulses", &AppendixCScenario::impulses)
        .def_readonly("expected", &AppendixCScenario::expected);

    m.def("simulate_y", &simulate_y, py::arg("xstar"), py::arg("input"), py::arg("hill"),
          py::arg("unbinding_rate"), py::arg("horizon"), py::arg("rng"),
          "NHPP thinning of g_- * x_*(t) * Hill(u(t)).");
    m.def("annihilate", &annihilate, py::arg("productions"), py::arg("k_a"), py::arg("horizon"),
          py::arg("rng"), "Exact SSA of pairwise annihilation over given production times.");
    m.def("deterministic_annihilation", &deterministic_annihilation, py::arg("impulses"),
          py::arg("species_count"));
    m.def("decide", &decide, py::arg("counts"), "argmax; ties break toward the lowest index.");
    m.def("impulse_productions", &impulse_productions, py::arg("impulses"),
          py::arg("species_count"), py::arg("stagger") = 1e-9);
    m.def("appendix_c_scenarios", &appendix_c_scenarios);

    // --- DCS2 promoter model --------------------------------------------------------
    py::class_<Dcs2Params>(m, "Dcs2Params")
        .def(py::init<>())
        .def_readwrite("g_plus", &Dcs2Params::g_plus)
        .def_readwrite("g_minus", &Dcs2Params::g_minus)
        .def_readwrite("a", &Dcs2Params::a)
        .def_readwrite("d2", &Dcs2Params::d2)
        .def_readwrite("k3", &Dcs2Params::k3)
        .def_readwrite("d3", &Dcs2Params::d3)
        .def_readwrite("k4", &Dcs2Params::k4)
        .def_readwrite("d4", &Dcs2Params::d4)
        .def_readwrite("k5", &Dcs2Params::k5)
        .def_readonly("hill", &Dcs2Params::hill)
        .def("refresh_hill", &Dcs2Params::refresh_hill)
        .def("validate", &Dcs2Params::validate);

    py::class_<Dcs2Trajectory>(m, "Dcs2Trajectory")
        .def_readonly("times", &Dcs2Trajectory::times)
        .def_readonly("p_active", &Dcs2Trajectory::p_active)
        .def_readonly("c_init", &Dcs2Trajectory::c_init)
        .def_readonly("mrna", &Dcs2Trajectory::mrna)
        .def_readonly("yfp", &Dcs2Trajectory::yfp)
        .def_readonly("myfp", &Dcs2Trajectory::myfp)
        .def("max_myfp", &Dcs2Trajectory::max_myfp)
        .def("myfp_at", &Dcs2Trajectory::myfp_at, py::arg("t"));

    py::class_<Dcs2Dataset>(m, "Dcs2Dataset")
        .def(py::init<>())
        .def_readwrite("label", &Dcs2Dataset::label)
        .def_readwrite("msn2", &Dcs2Dataset::msn2)
        .def_readwrite("myfp", &Dcs2Dataset::myfp);

    py::class_<Dcs2FitConfig>(m, "Dcs2FitConfig")
        .def(py::init<>())
        .def_readwrite("dt", &Dcs2FitConfig::dt)
        .def_readwrite("max_iterations", &Dcs2FitConfig::max_iterations)
        .def_readwrite("tolerance", &Dcs2FitConfig::tolerance);

    py::class_<Dcs2FitResult>(m, "Dcs2FitResult")
        .def_readonly("params", &Dcs2FitResult::params)
        .def_readonly("error", &Dcs2FitResult::error)
        .def_readonly("per_dataset_error", &Dcs2FitResult::per_dataset_error)
        .def_readonly("degraded", &Dcs2FitResult::degraded)
        .def_readonly("unidentifiable", &Dcs2FitResult::unidentifiable);

    py::class_<ProportionalityResult>(m, "ProportionalityResult")
        .def_readonly("durations", &ProportionalityResult::durations)
        .def_readonly("max_myfp", &ProportionalityResult::max_myfp)
        .def_readonly("slope", &ProportionalityResult::slope)
        .def_readonly("relative_residual", &ProportionalityResult::relative_residual);

    m.def("simulate_dcs2", &simulate_dcs2, py::arg("params"), py::arg("msn2"), py::arg("horizon"),
          py::arg("dt") = 0.05, "RK4 integration of the five-state promoter model.");
    m.def("dcs2_objective", &dcs2_objective, py::arg("params"), py::arg("datasets"),
          py::arg("dt") = 0.05);
    m.def("fit_dcs2", &fit_dcs2, py::arg("datasets"), py::arg("initial"),
          py::arg("config") = Dcs2FitConfig{},
          "Multi-start Nelder-Mead over the five free parameters.");
    m.def("max_myfp_proportionality", &max_myfp_proportionality, py::arg("params"),
          py::arg("inputs"), py::arg("horizon"), py::arg("dt") = 0.05);
    m.def("pulse_train", &pulse_train, py::arg("amplitude"), py::arg("pulses"),
          py::arg("on_minutes"), py::arg("gap_minutes"), py::arg("start") = 0.0);
    m.def("msn2_amplitude", [](const std::string& label) { return msn2_amplitude(label); },
          py::arg("label"), "Msn2 amplitude for an inhibitor-level label, e.g. '690nM'.");

    // --- experiments -------------------------------------------------------------
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_property(
            "scenario",
            [](const ExperimentConfig& c) { return to_string(c.scenario); },
            [](ExperimentConfig& c, const std::string& s) { c.scenario = scenario_from_string(s); })
        .def_readwrite("runs", &ExperimentConfig::runs)
        .def_readwrite("horizon", &ExperimentConfig::horizon)
        .def_readwrite("master_seed", &ExperimentConfig::master_seed)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_readwrite("receptors", &ExperimentConfig::receptors)
        .def_readwrite("priors", &ExperimentConfig::priors)
        .def_readwrite("symbols", &ExperimentConfig::symbols)
        .def_readwrite("grid", &ExperimentConfig::grid)
        .def_readwrite("emission_rates", &ExperimentConfig::emission_rates)
        .def_readwrite("emission_duration", &ExperimentConfig::emission_duration)
        .def_readwrite("emission_basal", &ExperimentConfig::emission_basal)
        .def_readwrite("decision_times", &ExperimentConfig::decision_times)
        .def_readwrite("sample_dt", &ExperimentConfig::sample_dt)
        .def_readwrite("k_a", &ExperimentConfig::k_a)
        .def_property(
            "circuit_input",
            [](const ExperimentConfig& c) {
                return c.circuit_input == CircuitInput::observed ? "observed" : "rectangular";
            },
            [](ExperimentConfig& c, const std::string& s) {
                if (s == "observed")
                    c.circuit_input = CircuitInput::observed;
                else if (s == "rectangular")
                    c.circuit_input = CircuitInput::rectangular;
                else
                    throw ConfigError("circuit_input must be 'observed' or 'rectangular'");
            })
        .def_readwrite("rectangular_reference", &ExperimentConfig::rectangular_reference)
        .def_readwrite("export_runs", &ExperimentConfig::export_runs)
        .def("symbol_count", &ExperimentConfig::symbol_count)
        .def("log_prior", &ExperimentConfig::log_prior, py::arg("k"))
        .def("validate", &ExperimentConfig::validate);

    m.def("colocated_defaults", &colocated_defaults);
    m.def("diffusion_defaults", &diffusion_defaults);
    m.def(
        "experiment_from_text",
        [](const std::string& text) {
            Config cfg = Config::parse_string(text);
            return experiment_from_config(cfg);
        },
        py::arg("text"), "Parse a config file body into an ExperimentConfig.");
    m.def(
        "experiment_from_file",
        [](const std::string& path) {
            Config cfg = Config::parse_file(path);
            return experiment_from_config(cfg);
        },
        py::arg("path"));

    py::class_<HypothesisBank>(m, "HypothesisBank")
        .def_readonly("amplitudes", &HypothesisBank::amplitudes)
        .def_readonly("references", &HypothesisBank::references)
        .def_readonly("rectangles", &HypothesisBank::rectangles)
        .def_readonly("hills", &HypothesisBank::hills);
    m.def("build_hypothesis_bank", &build_hypothesis_bank, py::arg("config"));

    py::class_<ChannelRun>(m, "ChannelRun")
        .def_readonly("xstar", &ChannelRun::xstar)
        .def_readonly("input", &ChannelRun::input);
    m.def("simulate_channel", &simulate_channel, py::arg("config"), py::arg("symbol"),
          py::arg("run"), "One seeded channel realization (stream fixed by symbol and run).");

    py::class_<BERPoint>(m, "BERPoint")
        .def_readonly("time", &BERPoint::time)
        .def_readonly("errors", &BERPoint::errors)
        .def_readonly("runs_per_symbol", &BERPoint::runs_per_symbol)
        .def_readonly("ber", &BERPoint::ber)
        .def_readonly("threshold", &BERPoint::threshold);

    py::class_<BERSeries>(m, "BERSeries")
        .def_readonly("method", &BERSeries::method)
        .def_readonly("points", &BERSeries::points);

    py::class_<BERResultSet>(m, "BERResultSet")
        .def_readonly("methods", &BERResultSet::methods)
        .def_readonly("warnings", &BERResultSet::warnings);

    m.attr("ALL_BER_METHODS") = kAllBerMethods;
    m.def("run_ber_experiment", &run_ber_experiment, py::arg("config"),
          py::arg("methods") = kAllBerMethods);

    py::class_<OneSampleResult>(m, "OneSampleResult")
        .def_readonly("threshold", &OneSampleResult::threshold)
        .def_readonly("errors0", &OneSampleResult::errors0)
        .def_readonly("errors1", &OneSampleResult::errors1)
        .def_readonly("ber", &OneSampleResult::ber);
    m.def(
        "one_sample_baseline",
        [](const std::vector<long long>& s0, const std::vector<long long>& s1, int count) {
            return one_sample_baseline(s0, s1, count);
        },
        py::arg("symbol0"), py::arg("symbol1"), py::arg("receptor_count"),
        "Exhaustive threshold search for 'decide 1 iff x_*(t) >= theta'.");

    py::class_<RmsSeries>(m, "RmsSeries")
        .def_readonly("times", &RmsSeries::times)
        .def_readonly("rms", &RmsSeries::rms)
        .def_readonly("warnings", &RmsSeries::warnings);
    m.def("rms_compare", &rms_compare, py::arg("a"), py::arg("b"), py::arg("sample_dt"));
}
