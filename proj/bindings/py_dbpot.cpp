#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dbpot/diffusion.hpp"
#include "dbpot/localtime.hpp"
#include "dbpot/potential.hpp"
#include "dbpot/processes.hpp"
#include "dbpot/spectral.hpp"
#include "dbpot/tails.hpp"

namespace py = pybind11;
using namespace dbpot;

PYBIND11_MODULE(_dbpot, m) {
  m.doc() = "diffusion in a drifted Brownian potential: sampling, hitting times, "
            "local times, spectral bounds, and tail estimators";

  // ------------------------------------------------------------ potential
  py::class_<PotentialPath>(m, "PotentialPath")
      .def_readonly("kappa", &PotentialPath::kappa)
      .def_readonly("x_min", &PotentialPath::x_min)
      .def_readonly("x_max", &PotentialPath::x_max)
      .def_readonly("dx", &PotentialPath::dx)
      .def_readonly("seed", &PotentialPath::seed)
      .def_readonly("values", &PotentialPath::values)
      .def("value_at", &PotentialPath::value_at)
      .def("__len__", [](const PotentialPath& p) { return p.values.size(); });

  m.def("sample_potential", &sample_potential, py::arg("kappa"), py::arg("x_min"),
        py::arg("x_max"), py::arg("dx"), py::arg("seed"), py::arg("replicate") = 0);
  m.def("pure_drift_potential", &pure_drift_potential);

  py::class_<ScaleTable>(m, "ScaleTable")
      .def("at", &ScaleTable::at)
      .def("inverse", &ScaleTable::inverse)
      .def_property_readonly("a_min", &ScaleTable::a_min)
      .def_property_readonly("a_max", &ScaleTable::a_max);
  m.def("scale_table", &scale_table, py::keep_alive<0, 1>());

  py::class_<ValleyDecomposition>(m, "ValleyDecomposition")
      .def_readonly("t", &ValleyDecomposition::t)
      .def_readonly("v", &ValleyDecomposition::v)
      .def_readonly("k", &ValleyDecomposition::k)
      .def_readonly("depth", &ValleyDecomposition::depth)
      .def_readonly("i0", &ValleyDecomposition::i0)
      .def_readonly("i1", &ValleyDecomposition::i1)
      .def_readonly("certified", &ValleyDecomposition::certified);
  m.def("decompose_valleys", &decompose_valleys, py::arg("path"), py::arg("t"), py::arg("v"),
        py::arg("right_window") = -1.0);

  py::class_<IntervalDepths>(m, "IntervalDepths")
      .def_readonly("d_plus", &IntervalDepths::d_plus)
      .def_readonly("d_minus", &IntervalDepths::d_minus)
      .def_readonly("d", &IntervalDepths::d)
      .def_readonly("m", &IntervalDepths::m);
  m.def("interval_depths", &interval_depths);

  py::class_<EventReport>(m, "EventReport")
      .def_readonly("a", &EventReport::a)
      .def_readonly("g_t", &EventReport::g_t)
      .def_readonly("g_v", &EventReport::g_v)
      .def_readonly("b", &EventReport::b)
      .def_readonly("k", &EventReport::k)
      .def_readonly("l", &EventReport::l)
      .def("omega", &EventReport::omega);
  m.def("check_events", &check_events);

  py::class_<Excursion>(m, "Excursion")
      .def_readonly("length", &Excursion::length)
      .def_readonly("max", &Excursion::max);
  m.def("excursion_statistics", &excursion_statistics);
  m.def("excursion_max_tail", &excursion_max_tail);
  m.def("reflected_from_min", &reflected_from_min);

  // ------------------------------------------------------------ processes
  py::class_<SdeConfig>(m, "SdeConfig")
      .def(py::init<>())
      .def_readwrite("dt", &SdeConfig::dt)
      .def_readwrite("seed", &SdeConfig::seed)
      .def_readwrite("replicate", &SdeConfig::replicate)
      .def_readwrite("max_steps", &SdeConfig::max_steps);

  py::class_<ProcessPath>(m, "ProcessPath")
      .def_readonly("dt", &ProcessPath::dt)
      .def_readonly("values", &ProcessPath::values)
      .def_readonly("scheme", &ProcessPath::scheme)
      .def("back", &ProcessPath::back);

  m.def("integrate_xi", &integrate_xi);
  py::class_<ThetaPair>(m, "ThetaPair")
      .def_readonly("theta1", &ThetaPair::theta1)
      .def_readonly("theta2", &ThetaPair::theta2)
      .def_readonly("dimension_nonpositive", &ThetaPair::dimension_nonpositive);
  m.def("theta_from_xi", &theta_from_xi);
  m.def("simulate_besq", &simulate_besq, py::arg("delta"), py::arg("x0"), py::arg("T"),
        py::arg("cfg"), py::arg("bridge_to_zero_at") = std::nullopt);
  m.def("bessel_first_passage", &bessel_first_passage);
  m.def("sample_upsilon_exact", &sample_upsilon_exact, py::arg("kappa"), py::arg("seed"),
        py::arg("replicate") = 0);
  py::class_<StableSample>(m, "StableSample")
      .def_readonly("value", &StableSample::value)
      .def_readonly("complete", &StableSample::complete);
  m.def("stable_functional", &stable_functional, py::arg("kappa"), py::arg("s"), py::arg("cfg"),
        py::arg("bin") = 0.02);
  m.def("stable_c_kappa", &stable_c_kappa);
  m.def("kotani_u", &kotani_u, py::arg("lambda_"), py::arg("kappa"), py::arg("env"),
        py::arg("T"), py::arg("burn_in") = -1.0);
  m.def("kotani_fixed_point", &kotani_fixed_point);
  m.def("kotani_scale_g", &kotani_scale_g);
  py::class_<LemmaEquEstimate>(m, "LemmaEquEstimate")
      .def_readonly("value", &LemmaEquEstimate::value)
      .def_readonly("complete", &LemmaEquEstimate::complete);
  m.def("lemma_equ_integral", &lemma_equ_integral);
  m.def("trapezoid", &trapezoid);

  // ------------------------------------------------------------ diffusion
  py::enum_<SimStatus>(m, "SimStatus")
      .value("Ok", SimStatus::Ok)
      .value("WindowExceeded", SimStatus::WindowExceeded)
      .value("Capped", SimStatus::Capped)
      .value("Budget", SimStatus::Budget);

  py::class_<DiffusionConfig>(m, "DiffusionConfig")
      .def(py::init<>())
      .def_readwrite("ds", &DiffusionConfig::ds)
      .def_readwrite("seed", &DiffusionConfig::seed)
      .def_readwrite("replicate", &DiffusionConfig::replicate)
      .def_readwrite("h_cap", &DiffusionConfig::h_cap)
      .def_readwrite("max_steps", &DiffusionConfig::max_steps)
      .def_readwrite("out_dt", &DiffusionConfig::out_dt)
      .def_readwrite("tube", &DiffusionConfig::tube)
      .def_readwrite("adaptive", &DiffusionConfig::adaptive);

  py::class_<DiffusionPath>(m, "DiffusionPath")
      .def_readonly("dt", &DiffusionPath::dt)
      .def_readonly("x", &DiffusionPath::x)
      .def_readonly("status", &DiffusionPath::status);
  m.def("simulate_path", &simulate_path, py::arg("env"), py::arg("table"), py::arg("T"),
        py::arg("cfg"), py::arg("x0") = 0.0);

  py::class_<HitResult>(m, "HitResult")
      .def_readonly("h", &HitResult::h)
      .def_readonly("theta1", &HitResult::theta1)
      .def_readonly("theta2", &HitResult::theta2)
      .def_readonly("status", &HitResult::status);
  m.def("first_hitting", &first_hitting, py::arg("env"), py::arg("table"), py::arg("v"),
        py::arg("cfg"), py::arg("x0") = 0.0);

  py::class_<PositionResult>(m, "PositionResult")
      .def_readonly("x", &PositionResult::x)
      .def_readonly("sup", &PositionResult::sup)
      .def_readonly("status", &PositionResult::status);
  m.def("simulate_position", &simulate_position, py::arg("env"), py::arg("table"), py::arg("T"),
        py::arg("cfg"), py::arg("x0") = 0.0);

  py::class_<ExitResult>(m, "ExitResult")
      .def_readonly("time", &ExitResult::time)
      .def_readonly("exited_right", &ExitResult::exited_right)
      .def_readonly("status", &ExitResult::status);
  m.def("first_exit", &first_exit);

  py::class_<HittingBreakdown>(m, "HittingBreakdown")
      .def_readonly("h_total", &HittingBreakdown::h_total)
      .def_readonly("h_init", &HittingBreakdown::h_init)
      .def_readonly("h_dir", &HittingBreakdown::h_dir)
      .def_readonly("h_back", &HittingBreakdown::h_back)
      .def_readonly("h_left", &HittingBreakdown::h_left)
      .def_readonly("h_right", &HittingBreakdown::h_right)
      .def_readonly("xi", &HittingBreakdown::xi)
      .def_readonly("b_total", &HittingBreakdown::b_total)
      .def_readonly("status", &HittingBreakdown::status);
  m.def("decompose_hitting", &decompose_hitting);

  py::class_<OccupationSplit>(m, "OccupationSplit")
      .def_readonly("theta1", &OccupationSplit::theta1)
      .def_readonly("theta2", &OccupationSplit::theta2)
      .def_readonly("reached", &OccupationSplit::reached);
  m.def("occupation_split", &occupation_split);

  // ------------------------------------------------------------ local time
  py::class_<WienerPath>(m, "WienerPath")
      .def_readonly("t", &WienerPath::t)
      .def_readonly("x", &WienerPath::x)
      .def_readonly("complete", &WienerPath::complete);

  py::class_<StopRule>(m, "StopRule")
      .def_static("fixed_time", &StopRule::fixed_time)
      .def_static("passage", &StopRule::passage)
      .def_static("inv_local_time", &StopRule::inv_local_time);

  m.def("sample_bm", &sample_bm);
  m.def("sample_bm_until", &sample_bm_until, py::arg("stop"), py::arg("cfg"),
        py::arg("bin") = 0.02);

  py::class_<LocalTimeField>(m, "LocalTimeField")
      .def_readonly("bin", &LocalTimeField::bin)
      .def_readonly("stop_time", &LocalTimeField::stop_time)
      .def_readonly("levels", &LocalTimeField::levels)
      .def_readonly("l", &LocalTimeField::l)
      .def("at_level", &LocalTimeField::at_level)
      .def("integral", &LocalTimeField::integral);
  m.def("local_time_field", &local_time_field, py::arg("path"), py::arg("stop"),
        py::arg("bin") = 0.02);
  m.def("inverse_local_time", &inverse_local_time, py::arg("path"), py::arg("r"),
        py::arg("bin") = 0.02);
  m.def("rayknight_field_first", &rayknight_field_first, py::arg("a"), py::arg("span"),
        py::arg("cfg"), py::arg("bin") = 0.02);
  m.def("rayknight_field_second", &rayknight_field_second, py::arg("u"), py::arg("span"),
        py::arg("cfg"), py::arg("bin") = 0.02);
  m.def("pitman_yor_laplace", &pitman_yor_laplace);
  m.def("besq_deviation_bound", &besq_deviation_bound);
  m.def("weighted_tail_integral", &weighted_tail_integral);

  // ------------------------------------------------------------ spectral
  py::class_<PotentialWeight>(m, "PotentialWeight")
      .def(py::init<>())
      .def_readwrite("length", &PotentialWeight::length)
      .def_readwrite("v", &PotentialWeight::v)
      .def("at", &PotentialWeight::at)
      .def("vbar", &PotentialWeight::vbar);
  m.def("principal_lambda", &principal_lambda, py::arg("weight"), py::arg("rel_tol") = 1e-9);

  py::class_<BobkovBracket>(m, "BobkovBracket")
      .def_readonly("s", &BobkovBracket::s)
      .def_readonly("lambda_", &BobkovBracket::lambda)
      .def_readonly("lower_ok", &BobkovBracket::lower_ok)
      .def_readonly("upper_ok", &BobkovBracket::upper_ok);
  m.def("bobkov_bracket", &bobkov_bracket);

  py::class_<ExitBound>(m, "ExitBound")
      .def_readonly("a", &ExitBound::a)
      .def_readonly("c", &ExitBound::c)
      .def_readonly("d_plus", &ExitBound::d_plus)
      .def_readonly("m", &ExitBound::m)
      .def_readonly("lambda_star", &ExitBound::lambda_star)
      .def_readonly("bound", &ExitBound::bound)
      .def_readonly("lambda_shooting", &ExitBound::lambda_shooting);
  m.def("exit_laplace_bound", &exit_laplace_bound);

  // ------------------------------------------------------------ tails
  py::enum_<TailEvent>(m, "TailEvent")
      .value("SpeedupX", TailEvent::SpeedupX)
      .value("SlowdownX", TailEvent::SlowdownX)
      .value("SpeedupH", TailEvent::SpeedupH)
      .value("SlowdownH", TailEvent::SlowdownH);

  py::class_<TailSimConfig>(m, "TailSimConfig")
      .def(py::init<>())
      .def_readwrite("dx", &TailSimConfig::dx)
      .def_readwrite("ds", &TailSimConfig::ds)
      .def_readwrite("v", &TailSimConfig::v)
      .def_readwrite("nu", &TailSimConfig::nu)
      .def_readwrite("x_left", &TailSimConfig::x_left)
      .def_readwrite("x_right", &TailSimConfig::x_right)
      .def_readwrite("workers", &TailSimConfig::workers)
      .def_readwrite("pure_drift_env", &TailSimConfig::pure_drift_env);

  py::class_<TailEstimate>(m, "TailEstimate")
      .def_readonly("event", &TailEstimate::event)
      .def_readonly("kappa", &TailEstimate::kappa)
      .def_readonly("t", &TailEstimate::t)
      .def_readonly("u", &TailEstimate::u)
      .def_readonly("n", &TailEstimate::n)
      .def_readonly("p_hat", &TailEstimate::p_hat)
      .def_readonly("se", &TailEstimate::se)
      .def_readonly("upper95", &TailEstimate::upper95)
      .def_readonly("regime_warning", &TailEstimate::regime_warning)
      .def_readonly("n_incomplete", &TailEstimate::n_incomplete);

  m.def("estimate_tail_annealed", &estimate_tail_annealed, py::arg("kappa"), py::arg("t"),
        py::arg("u"), py::arg("event"), py::arg("n"), py::arg("seed"),
        py::arg("sim") = TailSimConfig{});
  m.def("estimate_tail_quenched", &estimate_tail_quenched, py::arg("env_seed"),
        py::arg("kappa"), py::arg("t"), py::arg("u_or_nu"), py::arg("event"), py::arg("n"),
        py::arg("seed"), py::arg("sim") = TailSimConfig{});

  py::enum_<FitMode>(m, "FitMode")
      .value("LogLogVsLogU", FitMode::LogLogVsLogU)
      .value("LogLogVsLogT", FitMode::LogLogVsLogT)
      .value("LogPVsLogU", FitMode::LogPVsLogU);

  py::class_<ExponentFit>(m, "ExponentFit")
      .def_readonly("slope", &ExponentFit::slope)
      .def_readonly("intercept", &ExponentFit::intercept)
      .def_readonly("r2", &ExponentFit::r2)
      .def_readonly("n_used", &ExponentFit::n_used)
      .def_readonly("n_rejected", &ExponentFit::n_rejected);
  m.def("fit_exponent", &fit_exponent);

  py::class_<PredictedExponents>(m, "PredictedExponents")
      .def_readonly("speedup", &PredictedExponents::speedup)
      .def_readonly("annealed_slowdown_power", &PredictedExponents::annealed_slowdown_power)
      .def_readonly("quenched_slowdown_doublelog",
                    &PredictedExponents::quenched_slowdown_doublelog);
  m.def("predicted_exponents", &predicted_exponents);

  py::class_<ConstantsRecord>(m, "ConstantsRecord")
      .def_readonly("kappa", &ConstantsRecord::kappa)
      .def_readonly("c_kappa", &ConstantsRecord::c_kappa)
      .def_readonly("c_h_halfline", &ConstantsRecord::c_h_halfline)
      .def_readonly("c_h_fullline", &ConstantsRecord::c_h_fullline)
      .def_readonly("c_h_halfline_quadrature", &ConstantsRecord::c_h_halfline_quadrature)
      .def_readonly("c_h_fullline_quadrature", &ConstantsRecord::c_h_fullline_quadrature);
  m.def("constants", &constants);
}
