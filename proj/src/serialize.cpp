#include "phaseest/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phaseest {

namespace {

Json complex_to_json_parts(const Vec& v) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    re.push_back(v[k].real());
    im.push_back(v[k].imag());
  }
  return Json{{"re", re}, {"im", im}};
}

Vec complex_from_json_parts(const Json& j, Eigen::Index expected, const char* what) {
  if (!j.contains("re") || !j.contains("im") || !j["re"].is_array() || !j["im"].is_array()) {
    throw std::invalid_argument(std::string(what) + ": need \"re\" and \"im\" arrays");
  }
  const auto& re = j["re"];
  const auto& im = j["im"];
  if (Eigen::Index(re.size()) != expected || Eigen::Index(im.size()) != expected) {
    throw std::invalid_argument(std::string(what) + ": re/im length must be " +
                                std::to_string(expected));
  }
  Vec v(expected);
  for (Eigen::Index k = 0; k < expected; ++k) {
    v[k] = Complex(re[k].get<double>(), im[k].get<double>());
  }
  return v;
}

int dim_from_json(const Json& j, const char* what) {
  if (!j.contains("d") || !j["d"].is_number_integer()) {
    throw std::invalid_argument(std::string(what) + ": need integer \"d\"");
  }
  const int d = j["d"].get<int>();
  if (d < 2) throw std::invalid_argument(std::string(what) + ": d must be >= 2");
  return d;
}

long long positive_integer(const Json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw std::invalid_argument("config." + field + ": must be a positive integer");
  }
  return j.get<long long>();
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kMpeu: return "mpeu";
    case ModelKind::kMpee: return "mpee";
    case ModelKind::kFull: return "full";
  }
  return "mpeu";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "mpeu") return ModelKind::kMpeu;
  if (name == "mpee") return ModelKind::kMpee;
  if (name == "full") return ModelKind::kFull;
  throw std::invalid_argument("unknown model kind: " + name);
}

Json to_json(const PureState& s) {
  Json j = complex_to_json_parts(s.amps);
  j["d"] = s.dim();
  return j;
}

Json to_json(const BipartiteState& s) {
  Json j = complex_to_json_parts(s.amps);
  j["d"] = s.d;
  return j;
}

PureState pure_state_from_json(const Json& j) {
  const int d = dim_from_json(j, "state");
  return make_pure(complex_from_json_parts(j, d, "state"));
}

BipartiteState bipartite_state_from_json(const Json& j) {
  const int d = dim_from_json(j, "state");
  return make_bipartite(d, complex_from_json_parts(j, Eigen::Index(d) * d, "state"));
}

std::variant<PureState, BipartiteState> state_from_json(const Json& j) {
  const int d = dim_from_json(j, "state");
  const Eigen::Index len = j.contains("re") && j["re"].is_array() ? Eigen::Index(j["re"].size()) : 0;
  if (len == d) return pure_state_from_json(j);
  if (len == Eigen::Index(d) * d) return bipartite_state_from_json(j);
  throw std::invalid_argument("state: amplitude count must be d or d*d");
}

Json info_matrix_to_json(const RealMat& h) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) entries.push_back(h(i, j));
  }
  return Json{{"p", h.rows()}, {"entries", entries}};
}

Json to_json(const Povm& p) {
  Json elements = Json::array();
  for (int xi = 0; xi < p.size(); ++xi) {
    Json re = Json::array();
    Json im = Json::array();
    for (int i = 0; i < p.dim; ++i) {
      for (int j = 0; j < p.dim; ++j) {
        re.push_back(p.elements[xi](i, j).real());
        im.push_back(p.elements[xi](i, j).imag());
      }
    }
    elements.push_back(Json{{"label", p.labels[xi]}, {"re", re}, {"im", im}});
  }
  return Json{{"dim", p.dim}, {"elements", elements}};
}

Povm povm_from_json(const Json& j) {
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    throw std::invalid_argument("povm: need integer \"dim\"");
  }
  const int dim = j["dim"].get<int>();
  if (dim < 1) throw std::invalid_argument("povm: dim must be >= 1");
  if (!j.contains("elements") || !j["elements"].is_array() || j["elements"].empty()) {
    throw std::invalid_argument("povm: need a nonempty \"elements\" array");
  }
  Povm p;
  p.dim = dim;
  for (const Json& ej : j["elements"]) {
    const Vec flat = complex_from_json_parts(ej, Eigen::Index(dim) * dim, "povm element");
    Mat e(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int k = 0; k < dim; ++k) e(i, k) = flat[i * dim + k];
    }
    p.elements.push_back(std::move(e));
    p.labels.push_back(ej.contains("label") ? ej["label"].get<std::string>()
                                            : std::to_string(p.labels.size() + 1));
  }
  validate_povm(p);
  return p;
}

std::vector<ExperimentConfig> configs_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  ExperimentConfig base;
  if (!j.contains("model")) throw std::invalid_argument("config.model: required");
  base.kind = model_kind_from_name(j["model"].get<std::string>());
  if (!j.contains("d")) throw std::invalid_argument("config.d: required");
  base.d = static_cast<int>(positive_integer(j["d"], "d"));
  if (base.d < 2) throw std::invalid_argument("config.d: must be >= 2");

  if (j.contains("state")) {
    const Json& sj = j["state"];
    if (sj.is_string()) {
      base.state_spec = sj.get<std::string>();
    } else if (sj.is_object()) {
      auto st = state_from_json(sj);
      if (std::holds_alternative<PureState>(st)) {
        base.explicit_pure = std::get<PureState>(st);
      } else {
        base.explicit_bipartite = std::get<BipartiteState>(st);
      }
    } else {
      throw std::invalid_argument("config.state: must be a string or a state object");
    }
  }
  if (j.contains("povm")) {
    const Json& pj = j["povm"];
    if (pj.is_string()) {
      base.povm_spec = pj.get<std::string>();
    } else if (pj.is_object()) {
      base.explicit_povm = povm_from_json(pj);
    } else {
      throw std::invalid_argument("config.povm: must be a string or a POVM object");
    }
  }
  if (j.contains("eta")) base.eta = j["eta"].get<double>();
  if (j.contains("theta")) {
    if (!j["theta"].is_array()) throw std::invalid_argument("config.theta: must be an array");
    base.theta.resize(Eigen::Index(j["theta"].size()));
    for (Eigen::Index i = 0; i < base.theta.size(); ++i) base.theta[i] = j["theta"][i].get<double>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) {
      throw std::invalid_argument("config.seed: must be a nonnegative integer");
    }
    base.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("trials")) base.trials = positive_integer(j["trials"], "trials");
  else throw std::invalid_argument("config.trials: required");
  if (j.contains("dump_estimates")) base.dump_estimates = j["dump_estimates"].get<bool>();

  if (!j.contains("N")) throw std::invalid_argument("config.N: required");
  std::vector<long long> grid;
  if (j["N"].is_array()) {
    if (j["N"].empty()) throw std::invalid_argument("config.N: grid must be nonempty");
    for (std::size_t i = 0; i < j["N"].size(); ++i) {
      grid.push_back(positive_integer(j["N"][i], "N[" + std::to_string(i) + "]"));
    }
  } else {
    grid.push_back(positive_integer(j["N"], "N"));
  }

  std::vector<ExperimentConfig> out;
  for (long long n : grid) {
    ExperimentConfig cfg = base;
    cfg.n_copies = n;
    validate_config(cfg);
    out.push_back(std::move(cfg));
  }
  return out;
}

Json result_to_json(const ExperimentConfig& cfg, const ExperimentResult& r) {
  auto matrix_rows = [](const RealMat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    return rows;
  };
  Json j{{"d", cfg.d},
         {"model", model_kind_name(cfg.kind)},
         {"N", r.n_copies},
         {"trials", r.trials},
         {"seed", cfg.seed},
         {"failures", r.failures},
         {"mse", matrix_rows(r.mse)},
         {"scaled_mse", matrix_rows(r.scaled_mse)},
         {"avg_fidelity", r.avg_fidelity},
         {"scaled_infidelity", r.scaled_infidelity}};
  Json mean = Json::array();
  for (Eigen::Index i = 0; i < r.mean_estimate.size(); ++i) mean.push_back(r.mean_estimate[i]);
  j["mean_estimate"] = mean;
  if (!r.estimates.empty()) {
    Json est = Json::array();
    for (const RealVec& e : r.estimates) {
      Json row = Json::array();
      for (Eigen::Index i = 0; i < e.size(); ++i) row.push_back(e[i]);
      est.push_back(row);
    }
    j["estimates"] = est;
  }
  return j;
}

std::string result_csv_header(int p) {
  std::ostringstream os;
  os << "d,model,N,trials,seed";
  for (int i = 1; i <= p; ++i) {
    for (int j = 1; j <= p; ++j) os << ",NV_" << i << j;
  }
  os << ",NF_infidelity,failures";
  return os.str();
}

std::string result_csv_row(const ExperimentConfig& cfg, const ExperimentResult& r) {
  std::ostringstream os;
  os << cfg.d << ',' << model_kind_name(cfg.kind) << ',' << r.n_copies << ',' << r.trials << ','
     << cfg.seed;
  for (Eigen::Index i = 0; i < r.scaled_mse.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.scaled_mse.cols(); ++j) {
      os << ',' << format_double(r.scaled_mse(i, j));
    }
  }
  os << ',' << format_double(r.scaled_infidelity) << ',' << r.failures;
  return os.str();
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min(e.byte, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::invalid_argument(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                ": " + e.what());
  }
}

}  // namespace phaseest
