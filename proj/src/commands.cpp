#include "directwf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <ostream>

#include "directwf/analysis.hpp"
#include "directwf/discrete_protocol.hpp"
#include "directwf/error.hpp"
#include "directwf/oracle.hpp"
#include "directwf/scenario.hpp"
#include "directwf/state_io.hpp"

namespace directwf {
namespace {

using json = nlohmann::ordered_json;

constexpr double kOracleTolerance = 1e-10;
constexpr double kDiscreteTolerance = 1e-10;

Metadata config_metadata(const RunConfig& config) {
  Metadata md;
  for (const auto& [k, v] : resolved_entries(config)) md.emplace_back(k, v);
  return md;
}

json config_json(const RunConfig& config) {
  json j = json::object();
  for (const auto& [k, v] : resolved_entries(config)) j[k] = v;
  return j;
}

json number_or_null(std::optional<double> v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void write_profile_csv(const std::filesystem::path& path, const WeakValueProfile& profile,
                       const Metadata& md) {
  auto out = open_output(path);
  write_metadata(out, md);
  out << "x_mm,re_wv,im_wv,pass_prob,flag\n";
  for (std::size_t j = 0; j < profile.size(); ++j) {
    out << format_double(profile.x[j]) << ',' << format_double(profile.values[j].real()) << ','
        << format_double(profile.values[j].imag()) << ','
        << format_double(profile.pass_probability[j]) << ',' << (profile.flagged[j] ? 1 : 0)
        << '\n';
  }
}

// Plot-ready view of a reconstructed state; x is the slab centre.
void write_plot_csv(const std::filesystem::path& path, const std::vector<double>& x,
                    const GridState& state, const std::vector<bool>& flagged, const Metadata& md) {
  auto out = open_output(path);
  write_metadata(out, md);
  out << "x_mm,re,im,abs2,phase,flag\n";
  for (std::size_t j = 0; j < state.size(); ++j) {
    const Complex a = state[j];
    out << format_double(x[j]) << ',' << format_double(a.real()) << ',' << format_double(a.imag())
        << ',' << format_double(std::norm(a)) << ',' << format_double(std::arg(a)) << ','
        << (flagged[j] ? 1 : 0) << '\n';
  }
}

void write_counts_csv(const std::filesystem::path& path, const std::vector<CountRecord>& records,
                      const Metadata& md) {
  auto out = open_output(path);
  write_metadata(out, md);
  out << "bin,x_mm,setting,n_incident,n1,n2,seed\n";
  for (const auto& r : records) {
    out << r.bin << ',' << format_double(r.x_mm) << ',' << to_string(r.setting) << ','
        << r.n_incident << ',' << r.n1 << ',' << r.n2 << ',' << r.seed << '\n';
  }
}

void write_estimate_csv(const std::filesystem::path& path, const EstimatedProfile& est,
                        const Metadata& md) {
  auto out = open_output(path);
  write_metadata(out, md);
  out << "x_mm,re_wv,im_wv,se_re,se_im\n";
  for (std::size_t j = 0; j < est.size(); ++j) {
    out << format_double(est.x[j]) << ',' << format_double(est.re[j]) << ','
        << format_double(est.im[j]) << ',' << format_double(est.se_re[j]) << ','
        << format_double(est.se_im[j]) << '\n';
  }
}

std::optional<PhaseFitSummary> phase_analysis(const RunConfig& config,
                                              const WeakValueProfile& profile) {
  if (profile.settings.postselection.kind == PostSelectionKind::None) return std::nullopt;
  const auto& o = config.scenario.optics;
  switch (config.scenario.kind) {
    case ScenarioKind::PhaseGradient: {
      const auto fit = fit_linear_phase(extract_phase(profile));
      return PhaseFitSummary{"m", fit.coefficient,
                             slit_offset_to_k(o.slit_offset_um, o.f2_mm, o.wavelength_nm),
                             fit.coefficient_se};
    }
    case ScenarioKind::PhaseCurvature: {
      const auto fit = fit_quadratic_phase(extract_phase(profile));
      return PhaseFitSummary{"r", fit.coefficient,
                             lens_shift_to_curvature(o.lens_shift_um, o.f1_mm, o.wavelength_nm),
                             fit.coefficient_se};
    }
    case ScenarioKind::GlassStep: {
      const auto base = prepare(base_scenario(config.scenario), config.grid.spec());
      const auto base_profile = scan_weak_values(base, profile.settings);
      const auto diff = phase_difference(extract_phase(profile), extract_phase(base_profile));
      return PhaseFitSummary{"step", phase_step(diff), config.scenario.step_phase_rad, 0.0};
    }
    default: return std::nullopt;
  }
}

}  // namespace

int exit_code_for(const Error& error) {
  switch (error.kind()) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::GridTooCoarse:
    case ErrorKind::GridTooLarge:
    case ErrorKind::UnknownParameter:
    case ErrorKind::SpecMismatch:
    case ErrorKind::BinOutOfRange: return kExitValidation;
    case ErrorKind::NullPostSelection:
    case ErrorKind::DegenerateProfile:
    case ErrorKind::EmptyBin:
    case ErrorKind::ZeroNorm: return kExitDegenerate;
    default: return kExitFailure;
  }
}

RunResult run_pipeline(const RunConfig& config) {
  validate(config);
  const GridState state = initial_state(config);
  const ScanSettings settings = config.scan_settings();
  WeakValueProfile profile = scan_weak_values(state, settings);
  const std::size_t span = settings.span;
  GridState truth = span == 1 ? state : normalize(coarse_grain(state, span));

  const bool amplitude = settings.postselection.kind != PostSelectionKind::None;
  GridState reconstruction = [&] {
    if (profile.flagged_count() == profile.size()) {
      throw Error(ErrorKind::DegenerateProfile, "post-selection is null for every bin");
    }
    return reconstruct(profile);
  }();

  RunResult r(truth, profile, reconstruction);
  if (amplitude) r.fidelity = fidelity(reconstruction, truth);
  r.completeness = profile.completeness_sum();
  r.pass_min = std::numeric_limits<double>::infinity();
  r.pass_max = 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    r.pass_min = std::min(r.pass_min, profile.pass_probability[j]);
    r.pass_max = std::max(r.pass_max, profile.pass_probability[j]);
    sum += profile.pass_probability[j];
  }
  r.pass_mean = sum / static_cast<double>(profile.size());
  r.flagged_fraction =
      static_cast<double>(profile.flagged_count()) / static_cast<double>(profile.size());
  r.probability_l1 = compare_probability(profile, probability_scan(state)).l1;
  r.phase_fit = phase_analysis(config, profile);

  if (config.counting.enabled) {
    auto records = simulate_counts(profile, ReadoutSetting::Hwp, config.counting.n_incident,
                                   config.counting.seed);
    const auto qwp = simulate_counts(profile, ReadoutSetting::Qwp, config.counting.n_incident,
                                     config.counting.seed);
    records.insert(records.end(), qwp.begin(), qwp.end());
    r.estimate = estimate_profile(records, settings.phi, settings.visibility, profile.bin_width);
    r.estimate_reconstruction = reconstruct(*r.estimate, profile.reconstruction_grid());
    if (amplitude) r.estimate_fidelity = fidelity(*r.estimate_reconstruction, truth);
  }
  return r;
}

int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log) {
  const RunResult r = run_pipeline(config);
  std::filesystem::create_directories(out_dir);
  const Metadata md = config_metadata(config);

  write_profile_csv(out_dir / "profile.csv", r.profile, md);
  const auto& final_rec = r.estimate_reconstruction ? *r.estimate_reconstruction : r.reconstruction;
  write_plot_csv(out_dir / "reconstruction.csv", r.profile.x, final_rec, r.profile.flagged, md);
  if (r.estimate) {
    write_counts_csv(out_dir / "counts.csv", r.estimate->counts, md);
    write_estimate_csv(out_dir / "estimate.csv", *r.estimate, md);
  }

  json report;
  report["config"] = config_json(config);
  report["seed"] = config.counting.seed;
  report["bins"] = r.profile.size();
  report["flagged_bins"] = r.profile.flagged_count();
  report["flagged_fraction"] = r.flagged_fraction;
  report["fidelity"] = number_or_null(r.fidelity);
  report["weak_value_sum"] = {{"re", r.completeness.real()}, {"im", r.completeness.imag()}};
  report["pass_probability"] = {{"min", r.pass_min}, {"max", r.pass_max}, {"mean", r.pass_mean}};
  report["probability_l1"] = r.probability_l1;
  if (r.phase_fit) {
    report["phase_fit"] = {{"quantity", r.phase_fit->quantity},
                           {"fitted", r.phase_fit->fitted},
                           {"expected", r.phase_fit->expected},
                           {"standard_error", r.phase_fit->standard_error}};
  }
  if (r.estimate) {
    report["counting"] = {{"n_incident", config.counting.n_incident},
                          {"fidelity", number_or_null(r.estimate_fidelity)},
                          {"mean_standard_error", r.estimate->mean_standard_error()}};
  }
  write_json(out_dir / "report.json", report);

  if (r.fidelity) log << "fidelity " << format_double(*r.fidelity) << '\n';
  if (r.estimate_fidelity) log << "counting fidelity " << format_double(*r.estimate_fidelity) << '\n';
  log << "weak-value sum " << format_double(r.completeness.real()) << " + "
      << format_double(r.completeness.imag()) << "i\n";

  if (r.flagged_fraction > config.measurement.max_flagged_fraction) {
    log << r.profile.flagged_count() << " bins had a null post-selection (limit "
        << format_double(config.measurement.max_flagged_fraction) << ")\n";
    return kExitDegenerate;
  }
  return kExitSuccess;
}

int cmd_sweep(const RunConfig& config, const std::string& parameter,
              const std::vector<double>& values, const std::filesystem::path& out_dir,
              std::ostream& log) {
  const std::string path = canonical_parameter(parameter);
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one value");

  std::vector<RunConfig> configs;
  for (const double v : values) {
    RunConfig c = config;
    if (path == "counting.n_incident") c.counting.enabled = true;
    set_parameter(c, path, v);
    configs.push_back(std::move(c));
  }

  struct Row {
    double value;
    RunResult result;
  };
  std::vector<std::future<Row>> jobs;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&configs, &values, i] {
      return Row{values[i], run_pipeline(configs[i])};
    }));
  }
  std::vector<Row> rows;
  for (auto& job : jobs) rows.push_back(job.get());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.value < b.value; });

  std::filesystem::create_directories(out_dir);
  auto out = open_output(out_dir / "sweep.csv");
  Metadata md = config_metadata(config);
  md.emplace_back("sweep.parameter", path);
  write_metadata(out, md);
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  out << "value,fidelity,weak_value_sum_re,weak_value_sum_im,probability_l1,fit_quantity,"
         "fitted,expected,counting_fidelity,mean_standard_error\n";
  for (const auto& row : rows) {
    const auto& r = row.result;
    out << format_double(row.value) << ',' << format_double(r.fidelity.value_or(nan)) << ','
        << format_double(r.completeness.real()) << ',' << format_double(r.completeness.imag())
        << ',' << format_double(r.probability_l1) << ','
        << (r.phase_fit ? r.phase_fit->quantity : "") << ','
        << format_double(r.phase_fit ? r.phase_fit->fitted : nan) << ','
        << format_double(r.phase_fit ? r.phase_fit->expected : nan) << ','
        << format_double(r.estimate_fidelity.value_or(nan)) << ','
        << format_double(r.estimate ? r.estimate->mean_standard_error() : nan) << '\n';
  }
  log << "swept " << path << " over " << rows.size() << " values\n";
  return kExitSuccess;
}

int cmd_discrete(std::size_t dim, const std::filesystem::path& state_file,
                 std::optional<std::size_t> b0, const std::filesystem::path& out_dir,
                 std::ostream& log) {
  if (dim < 2 || dim > 64) throw Error(ErrorKind::InvalidArgument, "dim: must lie in [2, 64]");
  const DiscreteState psi = load_discrete_state(state_file);
  if (psi.dim() != dim) {
    throw Error(ErrorKind::InvalidArgument, "state: file holds " + std::to_string(psi.dim()) +
                                                " amplitudes, expected " + std::to_string(dim));
  }
  if (std::abs(psi.norm_squared() - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidArgument, "state: input must be normalized");
  }
  if (b0 && *b0 >= dim) throw Error(ErrorKind::InvalidArgument, "b0: out of range");

  const BasisPair pair = fourier_mub(dim);
  std::vector<std::size_t> choices;
  if (b0) {
    choices.push_back(*b0);
  } else {
    for (std::size_t b = 0; b < dim; ++b) choices.push_back(b);
  }

  std::filesystem::create_directories(out_dir);
  auto csv = open_output(out_dir / "discrete_weak_values.csv");
  write_metadata(csv, {{"dim", std::to_string(dim)}, {"state_file", state_file.string()}});
  csv << "b0,a,re_wv,im_wv\n";
  json report;
  report["dim"] = dim;
  report["state_file"] = state_file.string();
  json runs = json::array();
  bool ok = true;
  for (const std::size_t b : choices) {
    const Eigen::VectorXcd wv = discrete_weak_profile(psi, pair, b);
    const DiscreteState rec = reconstruct_discrete(wv, pair, b);
    const double f = fidelity(rec, psi);
    ok = ok && std::abs(1.0 - f) <= kDiscreteTolerance;
    json values = json::array();
    json amps = json::array();
    for (Eigen::Index a = 0; a < wv.size(); ++a) {
      csv << b << ',' << a << ',' << format_double(wv(a).real()) << ','
          << format_double(wv(a).imag()) << '\n';
      values.push_back({wv(a).real(), wv(a).imag()});
      amps.push_back({rec.amplitudes()(a).real(), rec.amplitudes()(a).imag()});
    }
    const Complex total = wv.sum();
    runs.push_back({{"b0", b},
                    {"weak_values", values},
                    {"weak_value_sum", {total.real(), total.imag()}},
                    {"reconstruction", amps},
                    {"fidelity", f}});
    log << "b0=" << b << " fidelity " << format_double(f) << '\n';
  }
  report["runs"] = runs;
  report["passed"] = ok;
  write_json(out_dir / "discrete_report.json", report);
  return ok ? kExitSuccess : kExitFailure;
}

int cmd_oracle(const RunConfig& config, const std::filesystem::path& out_dir, bool inject_fault,
               std::ostream& log) {
  validate(config);
  const GridSpec spec = config.grid.spec();
  if (spec.size() > kOracleMaxPoints) {
    throw Error(ErrorKind::GridTooLarge, "grid.n_points: oracle supports at most " +
                                             std::to_string(kOracleMaxPoints) + " points");
  }
  const GridState state = initial_state(config);
  const ScanSettings settings = config.scan_settings();
  const WeakValueProfile profile = scan_weak_values(state, settings);
  OracleOptions options;
  options.flip_sigma_y = inject_fault;

  std::filesystem::create_directories(out_dir);
  auto csv = open_output(out_dir / "oracle_diff.csv");
  write_metadata(csv, config_metadata(config));
  csv << "bin,x_mm,engine_re,engine_im,oracle_re,oracle_im,abs_diff\n";
  double max_diff = 0.0;
  std::size_t flag_mismatches = 0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const CouplingConfig cfg{settings.phi, profile.first_bin[j], settings.visibility, settings.span};
    const OracleResult o = oracle_full_simulation(state, cfg, settings.postselection, options);
    const bool oracle_flagged = !o.weak_value.has_value();
    double diff = 0.0;
    if (oracle_flagged != profile.flagged[j]) {
      ++flag_mismatches;
      diff = std::numeric_limits<double>::infinity();
    } else if (!oracle_flagged) {
      diff = std::abs(*o.weak_value - profile.values[j]);
    }
    max_diff = std::max(max_diff, diff);
    const Complex ov = o.weak_value.value_or(Complex{0.0, 0.0});
    csv << j << ',' << format_double(profile.x[j]) << ','
        << format_double(profile.values[j].real()) << ',' << format_double(profile.values[j].imag())
        << ',' << format_double(ov.real()) << ',' << format_double(ov.imag()) << ','
        << format_double(diff) << '\n';
  }
  const bool ok = max_diff <= kOracleTolerance;
  json report;
  report["config"] = config_json(config);
  report["fault_injected"] = inject_fault;
  report["max_abs_diff"] = std::isfinite(max_diff) ? json(max_diff) : json(nullptr);
  report["flag_mismatches"] = flag_mismatches;
  report["tolerance"] = kOracleTolerance;
  report["passed"] = ok;
  write_json(out_dir / "oracle_report.json", report);
  log << "engine vs oracle max |diff| " << format_double(max_diff) << (ok ? " (ok)" : " (MISMATCH)")
      << '\n';
  return ok ? kExitSuccess : kExitOracleMismatch;
}

}  // namespace directwf
