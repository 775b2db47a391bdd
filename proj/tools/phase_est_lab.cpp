// Command-line front end: QFI reports, POVM construction, Fisher information
// of a measurement, Monte Carlo simulation sweeps, and the entangled-input
// information bound. Emits JSON (default) or versioned CSV.

#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "phaseest/estimation.hpp"
#include "phaseest/fisher.hpp"
#include "phaseest/measurement.hpp"
#include "phaseest/qfi.hpp"
#include "phaseest/serialize.hpp"

namespace {

using namespace phaseest;

struct SharedFlags {
  int d = 2;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output;
  std::string format = "json";
};

void write_text(const SharedFlags& shared, const std::string& text) {
  if (shared.output.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(shared.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + shared.output);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

void write_json(const SharedFlags& shared, const Json& j) { write_text(shared, j.dump(2)); }

std::string csv_escape(const std::string& s) { return s; }  // labels carry no commas

// Generic key/value rows -> CSV with the version comment line.
std::string csv_document(const std::vector<std::string>& columns,
                         const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  os << kCsvVersionLine << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) {
    os << (c ? "," : "") << columns[c];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_escape(row[c]);
    os << '\n';
  }
  return os.str();
}

void require_csv_seed(const SharedFlags& shared) {
  if (shared.format == "csv" && !shared.seed_given) {
    throw std::invalid_argument("--format csv requires an explicit --seed (reproducibility)");
  }
}

RealVec to_realvec(const std::vector<double>& v) {
  RealVec out(Eigen::Index(v.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = v[std::size_t(i)];
  return out;
}

std::vector<std::string> matrix_cells(const RealMat& m) {
  std::vector<std::string> cells;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) cells.push_back(format_double(m(i, j)));
  }
  return cells;
}

// --------------------------------------------------------------------------
// state resolution shared by `qfi` and `fi`

struct StateArgs {
  std::string spec = "optimal";
  std::string file;
};

ModelPoint resolve_model(const SharedFlags& shared, const std::string& model_name,
                         const StateArgs& state, const std::vector<double>& theta_raw) {
  const ModelKind kind = model_kind_from_name(model_name);
  if (kind == ModelKind::kFull) {
    throw std::invalid_argument("model must be mpeu or mpee here");
  }
  const int d = shared.d;
  RealVec theta = theta_raw.empty() ? RealVec::Zero(d - 1) : to_realvec(theta_raw);
  Rng rng(shared.seed);

  if (kind == ModelKind::kMpeu) {
    PureState input = phase_state(d, RealVec::Zero(d));
    if (state.spec == "random") {
      input = random_pure(d, rng);
    } else if (state.spec == "maxent") {
      input = mpeu_equivalent(maximally_entangled(d));
    } else if (state.spec == "file") {
      if (state.file.empty()) throw std::invalid_argument("--state file needs --state-file PATH");
      input = pure_state_from_json(load_json_file(state.file));
      if (input.dim() != d) throw std::invalid_argument("state file dimension does not match --d");
    } else if (state.spec != "optimal") {
      throw std::invalid_argument("--state must be optimal, maxent, random, or file");
    }
    return mpeu_model(std::move(input), std::move(theta));
  }

  BipartiteState input = maximally_entangled(d);
  if (state.spec == "random") {
    input = random_bipartite(d, rng);
  } else if (state.spec == "file") {
    if (state.file.empty()) throw std::invalid_argument("--state file needs --state-file PATH");
    input = bipartite_state_from_json(load_json_file(state.file));
    if (input.d != d) throw std::invalid_argument("state file dimension does not match --d");
  } else if (state.spec != "optimal" && state.spec != "maxent") {
    throw std::invalid_argument("--state must be optimal, maxent, random, or file");
  }
  return mpee_model(std::move(input), std::move(theta));
}

// --------------------------------------------------------------------------
// subcommands

int cmd_qfi(const SharedFlags& shared, const std::string& model_name, const StateArgs& state,
            const std::vector<double>& theta_raw) {
  require_csv_seed(shared);
  const ModelPoint m = resolve_model(shared, model_name, state, theta_raw);
  const QfiMatrix h = qfi(m);
  const double trace = h.trace();
  const double max_trace = 4.0 * double(shared.d - 1) / shared.d;
  const double witness = quasiclassicality_witness(m);

  if (shared.format == "csv") {
    const int p = int(h.rows());
    std::vector<std::string> cols{"d", "model", "state", "trace", "max_trace", "witness"};
    for (int i = 1; i <= p; ++i) {
      for (int j = 1; j <= p; ++j) cols.push_back("H_" + std::to_string(i) + std::to_string(j));
    }
    std::vector<std::string> row{std::to_string(shared.d), model_name,
                                 state.spec,              format_double(trace),
                                 format_double(max_trace), format_double(witness)};
    for (const std::string& cell : matrix_cells(h)) row.push_back(cell);
    write_text(shared, csv_document(cols, {row}));
  } else {
    Json j{{"d", shared.d},
           {"model", model_name},
           {"state", state.spec},
           {"qfi", info_matrix_to_json(h)},
           {"trace", trace},
           {"max_trace", max_trace},
           {"quasiclassicality_witness", witness}};
    write_json(shared, j);
  }
  return 0;
}

int cmd_povm(const SharedFlags& shared, const std::string& kind, double eta,
             const std::vector<double>& phases_raw, const std::vector<double>& shift_raw) {
  require_csv_seed(shared);
  const int d = shared.d;
  Povm povm;
  if (kind == "mpeu") {
    const RealVec phases = phases_raw.empty() ? RealVec::Zero(d) : to_realvec(phases_raw);
    povm = optimal_povm_mpeu(d, phases, eta);
  } else if (kind == "locc") {
    povm = locc_povm_mpee(d);
  } else {
    throw std::invalid_argument("--kind must be mpeu or locc");
  }
  if (!shift_raw.empty()) {
    povm = shift_povm(povm, commuting_generators(d), to_realvec(shift_raw), kind == "locc");
  }
  validate_povm(povm);

  if (shared.format == "csv") {
    std::vector<std::string> cols{"label"};
    for (int i = 0; i < povm.dim * povm.dim; ++i) {
      cols.push_back("re_" + std::to_string(i));
      cols.push_back("im_" + std::to_string(i));
    }
    std::vector<std::vector<std::string>> rows;
    for (int xi = 0; xi < povm.size(); ++xi) {
      std::vector<std::string> row{povm.labels[std::size_t(xi)]};
      for (int i = 0; i < povm.dim; ++i) {
        for (int j = 0; j < povm.dim; ++j) {
          row.push_back(format_double(povm.elements[std::size_t(xi)](i, j).real()));
          row.push_back(format_double(povm.elements[std::size_t(xi)](i, j).imag()));
        }
      }
      rows.push_back(std::move(row));
    }
    write_text(shared, csv_document(cols, rows));
  } else {
    write_json(shared, to_json(povm));
  }
  return 0;
}

int cmd_fi(const SharedFlags& shared, const std::string& model_name, const StateArgs& state,
           const std::string& povm_kind, const std::string& povm_file, double eta,
           const std::vector<double>& phases_raw, const std::vector<double>& theta_raw) {
  require_csv_seed(shared);
  const ModelPoint m = resolve_model(shared, model_name, state, theta_raw);
  const int d = shared.d;

  Povm povm;
  if (povm_kind == "mpeu") {
    const RealVec phases = phases_raw.empty() ? RealVec::Zero(d) : to_realvec(phases_raw);
    povm = optimal_povm_mpeu(d, phases, eta);
    if (m.kind == ModelKind::kMpee) {
      Povm lifted;
      lifted.dim = d * d;
      lifted.labels = povm.labels;
      for (const Mat& e : povm.elements) lifted.elements.push_back(tensor(e, Mat::Identity(d, d)));
      povm = std::move(lifted);
    }
  } else if (povm_kind == "locc") {
    if (m.kind != ModelKind::kMpee) {
      throw std::invalid_argument("--povm locc needs --model mpee");
    }
    povm = locc_povm_mpee(d);
  } else if (povm_kind == "file") {
    if (povm_file.empty()) throw std::invalid_argument("--povm file needs --povm-file PATH");
    povm = povm_from_json(load_json_file(povm_file));
  } else {
    throw std::invalid_argument("--povm must be mpeu, locc, or file");
  }

  const FiMatrix info = fi(m, povm);
  const QfiMatrix h = qfi(m);
  const QcrbGap gap = qcrb_gap(m, povm);

  if (shared.format == "csv") {
    const int p = int(info.entries.rows());
    std::vector<std::string> cols{"d", "model", "povm", "qcrb_gap", "singular"};
    for (int i = 1; i <= p; ++i) {
      for (int j = 1; j <= p; ++j) cols.push_back("I_" + std::to_string(i) + std::to_string(j));
    }
    std::vector<std::string> row{std::to_string(shared.d), model_name, povm_kind,
                                 format_double(gap.min_eigenvalue), gap.singular ? "1" : "0"};
    for (const std::string& cell : matrix_cells(info.entries)) row.push_back(cell);
    write_text(shared, csv_document(cols, {row}));
  } else {
    Json j{{"d", shared.d},
           {"model", model_name},
           {"povm", povm_kind},
           {"fi", info_matrix_to_json(info.entries)},
           {"qfi", info_matrix_to_json(h)},
           {"qcrb_gap", gap.min_eigenvalue},
           {"singular", gap.singular}};
    write_json(shared, j);
  }
  return 0;
}

int cmd_simulate(const SharedFlags& shared, const std::string& config_path) {
  const Json config_json = load_json_file(config_path);
  std::vector<ExperimentConfig> configs = configs_from_json(config_json);
  if (shared.seed_given) {
    for (ExperimentConfig& cfg : configs) cfg.seed = shared.seed;
  }
  if (shared.format == "csv" && !shared.seed_given && !config_json.contains("seed")) {
    throw std::invalid_argument("--format csv requires a seed (flag or config field)");
  }

  if (shared.format == "csv") {
    std::ostringstream os;
    os << kCsvVersionLine << '\n';
    const int p = configs.front().d - 1;
    os << result_csv_header(p) << '\n';
    for (const ExperimentConfig& cfg : configs) {
      const ExperimentResult r = run_experiment(cfg);
      os << result_csv_row(cfg, r) << '\n';
    }
    write_text(shared, os.str());
  } else {
    Json rows = Json::array();
    for (const ExperimentConfig& cfg : configs) {
      rows.push_back(result_to_json(cfg, run_experiment(cfg)));
    }
    write_json(shared, rows);
  }
  return 0;
}

int cmd_fidelity_scan(const SharedFlags& shared, const std::string& model_name,
                      const std::vector<long long>& n_grid, long long trials) {
  require_csv_seed(shared);
  const ModelKind kind = model_kind_from_name(model_name);
  if (kind == ModelKind::kFull) throw std::invalid_argument("model must be mpeu or mpee");
  const double target = double(shared.d - 1) / 4.0;

  std::vector<std::string> cols{"d",   "model",          "N",     "trials",
                                "seed", "NF_infidelity", "target", "failures"};
  std::vector<std::vector<std::string>> rows;
  Json jrows = Json::array();
  for (long long n : n_grid) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.d = shared.d;
    cfg.state_spec = kind == ModelKind::kMpeu ? "optimal" : "maxent";
    cfg.povm_spec = kind == ModelKind::kMpeu ? "optimal" : "locc";
    cfg.n_copies = n;
    cfg.trials = trials;
    cfg.seed = shared.seed;
    const ExperimentResult r = run_experiment(cfg);
    rows.push_back({std::to_string(shared.d), model_name, std::to_string(n),
                    std::to_string(trials), std::to_string(shared.seed),
                    format_double(r.scaled_infidelity), format_double(target),
                    std::to_string(r.failures)});
    jrows.push_back(Json{{"d", shared.d},
                         {"model", model_name},
                         {"N", n},
                         {"trials", trials},
                         {"seed", shared.seed},
                         {"NF_infidelity", r.scaled_infidelity},
                         {"target", target},
                         {"failures", r.failures}});
  }
  if (shared.format == "csv") {
    write_text(shared, csv_document(cols, rows));
  } else {
    write_json(shared, jrows);
  }
  return 0;
}

int cmd_trace_bound(const SharedFlags& shared, long long samples) {
  require_csv_seed(shared);
  const int d = shared.d;
  const GeneratorSet basis = su_basis(d);
  const int p = basis.count();
  const double bound = double(d * d - 1);
  Rng rng(shared.seed);

  std::vector<std::vector<std::string>> rows;
  Json jrows = Json::array();
  double max_ratio = 0.0;
  long long violations = 0;

  const double maxent_ratio =
      trace_bound_ratio(maximally_entangled(d), basis, RealVec::Zero(p));
  rows.push_back({"maxent", format_double(maxent_ratio)});
  jrows.push_back(Json{{"label", "maxent"}, {"ratio", maxent_ratio}});
  max_ratio = maxent_ratio;

  for (long long i = 0; i < samples; ++i) {
    const BipartiteState s = random_bipartite(d, rng);
    RealVec theta(p);
    for (int a = 0; a < p; ++a) theta[a] = (rng.uniform() - 0.5) * 2.0 * std::numbers::pi;
    const double ratio = trace_bound_ratio(s, basis, theta);
    max_ratio = std::max(max_ratio, ratio);
    if (ratio > bound + 1e-8) ++violations;
    const std::string label = "sample-" + std::to_string(i + 1);
    rows.push_back({label, format_double(ratio)});
    jrows.push_back(Json{{"label", label}, {"ratio", ratio}});
  }

  if (shared.format == "csv") {
    write_text(shared, csv_document({"label", "ratio"}, rows));
  } else {
    Json j{{"d", d},
           {"samples", samples},
           {"seed", shared.seed},
           {"bound", bound},
           {"maxent_ratio", maxent_ratio},
           {"max_ratio", max_ratio},
           {"violations", violations},
           {"rows", jrows}};
    write_json(shared, j);
  }
  return violations == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiphase estimation toolkit: QFI, optimal measurements, and Monte Carlo runs"};
  app.require_subcommand(1);
  app.fallthrough();

  SharedFlags shared;
  app.add_option("--d", shared.d, "Hilbert-space dimension")->check(CLI::Range(2, 64));
  auto* seed_opt = app.add_option("--seed", shared.seed, "RNG seed (all randomness flows from it)");
  app.add_option("--output", shared.output, "Write the report to this path instead of stdout");
  app.add_option("--format", shared.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));

  // qfi
  auto* qfi_cmd = app.add_subcommand("qfi", "QFI matrix, trace, and saturability witness");
  std::string qfi_model = "mpeu";
  StateArgs qfi_state;
  std::vector<double> qfi_theta;
  qfi_cmd->add_option("--model", qfi_model)->check(CLI::IsMember({"mpeu", "mpee"}));
  qfi_cmd->add_option("--state", qfi_state.spec)
      ->check(CLI::IsMember({"optimal", "maxent", "random", "file"}));
  qfi_cmd->add_option("--state-file", qfi_state.file);
  qfi_cmd->add_option("--theta", qfi_theta)->expected(-1);

  // povm
  auto* povm_cmd = app.add_subcommand("povm", "Construct a measurement and dump it");
  std::string povm_kind = "mpeu";
  double povm_eta = std::numbers::pi / 4;
  std::vector<double> povm_phases, povm_shift;
  povm_cmd->add_option("--kind", povm_kind)->check(CLI::IsMember({"mpeu", "locc"}));
  povm_cmd->add_option("--eta", povm_eta);
  povm_cmd->add_option("--phases", povm_phases)->expected(-1);
  povm_cmd->add_option("--shift-theta", povm_shift, "Conjugate by the model unitary at theta")
      ->expected(-1);

  // fi
  auto* fi_cmd = app.add_subcommand("fi", "Fisher information of a measurement on a model");
  std::string fi_model = "mpeu", fi_povm = "mpeu", fi_povm_file;
  StateArgs fi_state;
  double fi_eta = std::numbers::pi / 4;
  std::vector<double> fi_phases, fi_theta;
  fi_cmd->add_option("--model", fi_model)->check(CLI::IsMember({"mpeu", "mpee"}));
  fi_cmd->add_option("--state", fi_state.spec)
      ->check(CLI::IsMember({"optimal", "maxent", "random", "file"}));
  fi_cmd->add_option("--state-file", fi_state.file);
  fi_cmd->add_option("--povm", fi_povm)->check(CLI::IsMember({"mpeu", "locc", "file"}));
  fi_cmd->add_option("--povm-file", fi_povm_file);
  fi_cmd->add_option("--eta", fi_eta);
  fi_cmd->add_option("--phases", fi_phases)->expected(-1);
  fi_cmd->add_option("--theta", fi_theta)->expected(-1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run Monte Carlo experiments from a config file");
  std::string sim_config;
  sim_cmd->add_option("--config", sim_config)->required()->check(CLI::ExistingFile);

  // fidelity-scan
  auto* scan_cmd = app.add_subcommand("fidelity-scan",
                                      "Scaled infidelity N(1-F) over an N grid, with its limit");
  std::string scan_model = "mpeu";
  std::vector<long long> scan_grid{100, 1000, 10000};
  long long scan_trials = 500;
  scan_cmd->add_option("--model", scan_model)->check(CLI::IsMember({"mpeu", "mpee"}));
  scan_cmd->add_option("--n-grid", scan_grid)->expected(-1);
  scan_cmd->add_option("--trials", scan_trials)->check(CLI::PositiveNumber);

  // trace-bound
  auto* tb_cmd = app.add_subcommand("trace-bound",
                                    "Entangled-input information ratio over random states");
  long long tb_samples = 200;
  tb_cmd->add_option("--samples", tb_samples)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      std::cerr << Json{{"error", e.what()}}.dump() << '\n';
    }
    return app.exit(e);
  }

  shared.seed_given = seed_opt->count() > 0;

  try {
    if (qfi_cmd->parsed()) return cmd_qfi(shared, qfi_model, qfi_state, qfi_theta);
    if (povm_cmd->parsed()) return cmd_povm(shared, povm_kind, povm_eta, povm_phases, povm_shift);
    if (fi_cmd->parsed()) {
      return cmd_fi(shared, fi_model, fi_state, fi_povm, fi_povm_file, fi_eta, fi_phases, fi_theta);
    }
    if (sim_cmd->parsed()) return cmd_simulate(shared, sim_config);
    if (scan_cmd->parsed()) return cmd_fidelity_scan(shared, scan_model, scan_grid, scan_trials);
    if (tb_cmd->parsed()) return cmd_trace_bound(shared, tb_samples);
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
