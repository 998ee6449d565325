#include "allocbench/bench/trace_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace allocbench::bench {

using nlohmann::json;

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string variant_label(const TrialRow& r) {
  std::string v = to_string(r.cfg.variant.kind);
  if (r.diag.no_claim) v += "-noclaim";
  return v;
}

}  // namespace

std::string results_csv_string(const std::vector<TrialRow>& rows) {
  std::ostringstream os;
  os << "cell_id,algorithm,n,m,d,mode,variant,trial,seed,max_load,min_load,gap,"
        "mean_retries,sum_est_gap,est_avg_max_error,nonpositive_gap_fraction,messages,"
        "rounds\n";
  for (const TrialRow& r : rows) {
    os << r.cell_index << ',' << to_string(r.cfg.algorithm) << ',' << r.cfg.n << ','
       << r.cfg.m << ',' << r.cfg.d << ',' << to_string(r.cfg.mode) << ','
       << variant_label(r) << ',' << r.trial << ',' << r.seed << ','
       << format_double(r.report.max_load) << ',' << format_double(r.report.min_load) << ','
       << format_double(r.report.gap) << ',' << format_double(r.report.mean_retries) << ','
       << format_double(r.report.sum_est_gap) << ','
       << format_double(r.report.est_avg_max_error) << ','
       << format_double(r.report.nonpositive_gap_fraction) << ',' << r.report.messages << ',';
    if (r.cfg.variant.kind == VariantKind::Parallel) os << r.diag.rounds;
    os << '\n';
  }
  return os.str();
}

void write_results_csv(const std::string& path, const std::vector<TrialRow>& rows) {
  write_file(path, results_csv_string(rows));
}

namespace {

json row_to_json(const TrialRow& r) {
  json j;
  j["cell_id"] = r.cell_index;
  j["algorithm"] = to_string(r.cfg.algorithm);
  j["n"] = r.cfg.n;
  j["m"] = r.cfg.m;
  j["d"] = r.cfg.d;
  j["mode"] = to_string(r.cfg.mode);
  j["variant"] = variant_label(r);
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["max_load"] = r.report.max_load;
  j["min_load"] = r.report.min_load;
  j["gap"] = r.report.gap;
  j["mean_retries"] = r.report.mean_retries;
  j["sum_est_gap"] = r.report.sum_est_gap;
  j["est_avg_max_error"] = r.report.est_avg_max_error;
  j["nonpositive_gap_fraction"] = r.report.nonpositive_gap_fraction;
  j["messages"] = r.report.messages;
  if (r.cfg.variant.kind == VariantKind::Parallel) {
    j["rounds"] = r.diag.rounds;
    j["messages_by_kind"] = {{"query", r.diag.msg_query}, {"reply", r.diag.msg_reply},
                             {"c1", r.diag.msg_c1},       {"c2", r.diag.msg_c2},
                             {"inc", r.diag.msg_inc},     {"sampling", r.diag.msg_sampling}};
  }
  if (r.cfg.variant.kind == VariantKind::MultiDim) {
    j["md_gap"] = r.diag.md_gap;
    j["no_claim"] = r.diag.no_claim;
  }
  return j;
}

}  // namespace

void write_results_json(const std::string& path, const std::vector<TrialRow>& rows) {
  json arr = json::array();
  for (const TrialRow& r : rows) arr.push_back(row_to_json(r));
  write_file(path, arr.dump(2) + "\n");
}

std::string trace_jsonl_string(const RunResult& run) {
  std::ostringstream os;
  for (size_t i = 0; i < run.trace.size(); ++i) {
    const AllocationOutcome& o = run.trace[i];
    json j;
    j["ball"] = o.ball_index;
    j["retries"] = o.retries_used;
    j["candidates"] = o.candidates;
    j["dest"] = o.destination;
    j["found_nonpositive"] = o.found_nonpositive;
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0')
        << (i < run.trace_hashes.size() ? run.trace_hashes[i] : 0);
    j["state_hash"] = hex.str();
    os << j.dump() << '\n';
  }
  return os.str();
}

void write_trace_jsonl(const std::string& path, const RunResult& run) {
  write_file(path, trace_jsonl_string(run));
}

void write_checks_json(const std::string& path, const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const CheckResult& c : checks) {
    json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["observed"] = c.observed;
    j["band"] = c.band;
    j["claim"] = c.claim;
    j["detail"] = c.detail;
    arr.push_back(j);
  }
  write_file(path, arr.dump(2) + "\n");
}

WeightModel parse_weight_dist(const std::string& text) {
  WeightModel model;
  auto colon = text.find(':');
  std::string shape = colon == std::string::npos ? text : text.substr(0, colon);
  std::vector<double> vals;
  if (colon != std::string::npos) {
    std::istringstream rest(text.substr(colon + 1));
    std::string tok;
    while (std::getline(rest, tok, ',')) vals.push_back(std::stod(tok));
  }
  auto need = [&](size_t k) {
    if (vals.size() != k)
      throw ConfigError("weight-dist " + shape + ": expected " + std::to_string(k) +
                        " parameters");
  };
  if (shape == "uniform") {
    need(2);
    model.shape = WeightShape::Uniform;
    model.w_star = vals[0];
    model.k = vals[1];
  } else if (shape == "twopoint") {
    need(3);
    model.shape = WeightShape::TwoPoint;
    model.w_star = vals[0];
    model.k = vals[1];
    model.p = vals[2];
  } else if (shape == "tnormal") {
    need(3);
    model.shape = WeightShape::TruncatedNormal;
    model.w_star = vals[0];
    model.k = vals[1];
    model.sigma = vals[2];
  } else {
    throw ConfigError("unknown weight-dist shape: " + shape);
  }
  model.validate();
  return model;
}

MdDistribution md_dist_from_json_string(const std::string& text) {
  json j = json::parse(text);
  MdDistribution dist;
  dist.uniform = false;
  for (const auto& entry : j) {
    dist.subsets.push_back(entry.at("dims").get<std::vector<int>>());
    std::sort(dist.subsets.back().begin(), dist.subsets.back().end());
    dist.weights.push_back(entry.contains("w") ? entry.at("w").get<double>() : 1.0);
  }
  return dist;
}

MdDistribution parse_md_dist(const std::string& text) {
  if (text == "uniform") return MdDistribution{};
  if (text.rfind("custom:", 0) == 0) {
    std::string path = text.substr(7);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open md-dist file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return md_dist_from_json_string(buf.str());
  }
  throw ConfigError("md-dist must be 'uniform' or 'custom:<file>'");
}

namespace {

SimConfig config_from_json(const json& j) {
  SimConfig cfg;
  if (j.contains("n")) cfg.n = j.at("n").get<long>();
  if (j.contains("m")) cfg.m = j.at("m").get<long>();
  if (j.contains("d")) cfg.d = j.at("d").get<int>();
  if (j.contains("gamma_max")) cfg.gamma_max = j.at("gamma_max").get<int>();
  if (j.contains("mode")) cfg.mode = mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("algorithm"))
    cfg.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
  if (j.contains("retry_cap")) cfg.retry_cap = j.at("retry_cap").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
  if (j.contains("sample_size_large"))
    cfg.sample_size_large = j.at("sample_size_large").get<int>();
  if (j.contains("record_trace")) cfg.record_trace = j.at("record_trace").get<bool>();
  if (j.contains("variant")) {
    const json& v = j.at("variant");
    std::string kind = v.at("kind").get<std::string>();
    if (kind == "unweighted") {
      cfg.variant.kind = VariantKind::Unweighted;
    } else if (kind == "weighted") {
      cfg.variant.kind = VariantKind::Weighted;
      if (v.contains("weight_dist"))
        cfg.variant.weight = parse_weight_dist(v.at("weight_dist").get<std::string>());
    } else if (kind == "multidim") {
      cfg.variant.kind = VariantKind::MultiDim;
      cfg.variant.dims = v.at("dims").get<int>();
      cfg.variant.populated = v.at("populated").get<int>();
      if (v.contains("md_dist"))
        cfg.variant.md_dist = parse_md_dist(v.at("md_dist").get<std::string>());
    } else if (kind == "parallel") {
      cfg.variant.kind = VariantKind::Parallel;
      cfg.mode = Mode::Sampled;
    } else {
      throw ConfigError("unknown variant kind: " + kind);
    }
  }
  return cfg;
}

json config_to_json(const SimConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["d"] = cfg.d;
  j["gamma_max"] = cfg.gamma_max;
  j["mode"] = to_string(cfg.mode);
  j["algorithm"] = to_string(cfg.algorithm);
  j["beta"] = cfg.beta;
  j["retry_cap"] = cfg.retry_cap;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["epsilon"] = cfg.epsilon;
  j["sample_size_large"] = cfg.sample_size_large;
  j["record_trace"] = cfg.record_trace;
  json v;
  v["kind"] = to_string(cfg.variant.kind);
  if (cfg.variant.kind == VariantKind::Weighted) {
    std::ostringstream w;
    w << to_string(cfg.variant.weight.shape) << ':' << cfg.variant.weight.w_star << ','
      << cfg.variant.weight.k;
    if (cfg.variant.weight.shape == WeightShape::TwoPoint) w << ',' << cfg.variant.weight.p;
    if (cfg.variant.weight.shape == WeightShape::TruncatedNormal)
      w << ',' << cfg.variant.weight.sigma;
    v["weight_dist"] = w.str();
  }
  if (cfg.variant.kind == VariantKind::MultiDim) {
    v["dims"] = cfg.variant.dims;
    v["populated"] = cfg.variant.populated;
  }
  j["variant"] = v;
  return j;
}

}  // namespace

ExperimentSpec experiment_from_json_string(const std::string& text) {
  json j = json::parse(text);
  ExperimentSpec spec;
  if (j.contains("base")) spec.base = config_from_json(j.at("base"));
  if (j.contains("trials_per_cell")) spec.trials_per_cell = j.at("trials_per_cell").get<int>();
  if (j.contains("checks")) spec.checks = j.at("checks").get<std::vector<std::string>>();
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (s.contains("n")) spec.sweep.n = s.at("n").get<std::vector<long>>();
    if (s.contains("m_over_n"))
      spec.sweep.m_over_n = s.at("m_over_n").get<std::vector<long>>();
    if (s.contains("d")) spec.sweep.d = s.at("d").get<std::vector<int>>();
    if (s.contains("algorithms")) {
      for (const auto& a : s.at("algorithms"))
        spec.sweep.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
    }
  }
  return spec;
}

ExperimentSpec experiment_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return experiment_from_json_string(buf.str());
}

std::string experiment_to_json_string(const ExperimentSpec& spec) {
  json j;
  j["base"] = config_to_json(spec.base);
  j["trials_per_cell"] = spec.trials_per_cell;
  j["checks"] = spec.checks;
  json s;
  if (!spec.sweep.n.empty()) s["n"] = spec.sweep.n;
  if (!spec.sweep.m_over_n.empty()) s["m_over_n"] = spec.sweep.m_over_n;
  if (!spec.sweep.d.empty()) s["d"] = spec.sweep.d;
  if (!spec.sweep.algorithms.empty()) {
    json arr = json::array();
    for (Algorithm a : spec.sweep.algorithms) arr.push_back(to_string(a));
    s["algorithms"] = arr;
  }
  if (!s.empty()) j["sweep"] = s;
  return j.dump(2) + "\n";
}

}  // namespace allocbench::bench
