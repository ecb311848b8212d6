#include "trigroup/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

namespace trigroup {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::uniform: return "uniform";
    case Model::binomial: return "binomial";
    case Model::two_stage: return "two-stage";
  }
  return "?";
}

Model parse_model(std::string_view s) {
  if (s == "uniform") return Model::uniform;
  if (s == "binomial") return Model::binomial;
  if (s == "two-stage") return Model::two_stage;
  throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

double model_parameter(Model model, std::uint32_t n, double c) {
  const double scale = std::pow(double(n), 1.5);
  if (model == Model::uniform) {
    return std::min(std::round(c * scale), double(count_triangular(n)));
  }
  return std::min(c / scale, 1.0);
}

bool TrialRecord::same_outcome(const TrialRecord& o) const {
  auto same_fraction = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return model == o.model && n == o.n && c == o.c && t_or_p == o.t_or_p && trial == o.trial &&
         seed == o.seed && relations == o.relations && verdict == o.verdict && capped == o.capped &&
         witness_success == o.witness_success && witness_failure == o.witness_failure &&
         same_fraction(largest_fraction, o.largest_fraction);
}

TrialRecord run_trial(const TrialConfig& config, std::uint64_t seed, std::uint64_t trial) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.model = config.model;
  rec.n = config.n;
  rec.c = config.c;
  rec.trial = trial;
  rec.seed = seed;
  rec.t_or_p = model_parameter(config.model, config.n, config.c);

  Rng rng(seed);
  SplitSample split;
  if (config.model == Model::two_stage) {
    split = sample_two_stage(config.n, rec.t_or_p, rng);
  } else {
    const Presentation pres = config.model == Model::uniform
                                  ? sample_uniform(config.n, static_cast<std::uint64_t>(rec.t_or_p), rng)
                                  : sample_binomial(config.n, rec.t_or_p, rng);
    split = split_by_stage(pres);
  }
  const Presentation pres = split.presentation();
  rec.relations = pres.size();

  const Verdict v = verdict(pres, {config.max_steps, false});
  rec.verdict = v.kind;
  rec.capped = v.capped;

  if (config.n >= 2) {
    const DerivedGraph derived = derive_rig(split);
    const ComponentSummary comps = components(derived.graph);
    rec.largest_fraction = double(comps.largest_size()) / derived.graph.vertex_count;
  } else {
    rec.largest_fraction = std::numeric_limits<double>::quiet_NaN();
  }
  if (config.model == Model::two_stage && config.n >= 4) {
    const WitnessResult w = witness_pipeline(split);
    rec.witness_success = w.success;
    rec.witness_failure = w.failure;
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint32_t n, double c, std::uint64_t index) {
  return mix_seed(master, n, c, index);
}

namespace {

template <class Task>
void parallel_for(std::size_t count, unsigned jobs, Task task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) task(i);
  };
  std::vector<std::jthread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
}

}  // namespace

SweepResult sweep(const SweepGrid& grid) {
  auto ns = grid.n_values;
  auto cs = grid.c_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());

  const std::size_t cells = ns.size() * cs.size();
  SweepResult out;
  out.records.resize(cells * grid.trials);
  parallel_for(out.records.size(), grid.jobs, [&](std::size_t i) {
    const std::size_t cell = i / grid.trials;
    const std::uint64_t index = i % grid.trials;
    const std::uint32_t n = ns[cell / cs.size()];
    const double c = cs[cell % cs.size()];
    TrialConfig config{grid.model, n, c, grid.max_steps};
    out.records[i] = run_trial(config, trial_seed(grid.master_seed, n, c, index), index);
  });

  for (std::size_t cell = 0; cell < cells; ++cell) {
    SweepRow row;
    row.model = grid.model;
    row.n = ns[cell / cs.size()];
    row.c = cs[cell % cs.size()];
    row.t_or_p = model_parameter(grid.model, row.n, row.c);
    row.master_seed = grid.master_seed;
    double fraction_sum = 0.0;
    for (std::uint64_t k = 0; k < grid.trials; ++k) {
      const TrialRecord& r = out.records[cell * grid.trials + k];
      ++row.trials;
      row.trivial_detected += r.verdict == VerdictKind::trivial;
      row.nontrivial_detected += r.verdict == VerdictKind::nontrivial_abelianization;
      row.unknown += r.verdict == VerdictKind::unknown;
      row.witness_success += r.witness_success;
      row.capped += r.capped;
      fraction_sum += r.largest_fraction;
    }
    row.mean_largest_fraction = row.trials ? fraction_sum / double(row.trials) : 0.0;
    out.rows.push_back(row);
  }
  return out;
}

double GiantTable::mean_fraction() const {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.fraction;
  return sum / double(rows.size());
}

GiantTable giant_experiment(std::uint32_t n, double alpha, double beta, std::uint64_t trials,
                            std::uint64_t master_seed, unsigned jobs) {
  if (!(alpha > 1.0)) throw std::invalid_argument("giant_experiment needs alpha > 1");
  if (!(beta > 0.0)) throw std::invalid_argument("giant_experiment needs beta > 0");
  if (n == 0) throw std::invalid_argument("giant_experiment needs n >= 1");
  GiantTable table;
  table.n = n;
  table.alpha = alpha;
  table.beta = beta;
  table.m = static_cast<std::uint64_t>(std::ceil(std::pow(double(n), alpha) - 1e-9));
  table.rho = std::sqrt(beta / (double(n) * double(table.m)));
  table.predicted = giant_fraction(beta);
  table.rows.resize(trials);
  parallel_for(trials, jobs, [&](std::size_t k) {
    const std::uint64_t seed = trial_seed(master_seed, n, beta, k);
    Rng rng(seed);
    const IntersectionGraph g = sample_rig(n, table.m, table.rho, rng);
    const auto largest = components(g).largest_size();
    table.rows[k] = {k, seed, largest, double(largest) / n};
  });
  return table;
}

// ---------------------------------------------------------------------------
// Output

Format format_for(const std::filesystem::path& path) {
  return path.extension() == ".json" ? Format::json : Format::csv;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

using nlohmann::json;

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepColumns) + "\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.model)) + ',' + std::to_string(r.n) + ',' + num(r.c) + ',' +
           num(r.t_or_p) + ',' + std::to_string(r.trials) + ',' + std::to_string(r.trivial_detected) +
           ',' + std::to_string(r.nontrivial_detected) + ',' + std::to_string(r.unknown) + ',' +
           std::to_string(r.witness_success) + ',' + num(r.mean_largest_fraction) + ',' +
           std::to_string(r.master_seed) + '\n';
  }
  return out;
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "model,n,C,t_or_p,trial,seed,relations,verdict,capped,witness_success,witness_failure,"
      "largest_fraction,wall_seconds\n";
  for (const auto& r : records) {
    out += std::string(to_string(r.model)) + ',' + std::to_string(r.n) + ',' + num(r.c) + ',' +
           num(r.t_or_p) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.relations) + ',' + std::string(to_string(r.verdict)) + ',' +
           (r.capped ? "1" : "0") + ',' + (r.witness_success ? "1" : "0") + ',' +
           std::string(to_string(r.witness_failure)) + ',' + num(r.largest_fraction) + ',' +
           num(r.wall_seconds) + '\n';
  }
  return out;
}

std::string to_csv(const GiantTable& t) {
  std::string out = "trial,seed,n,alpha,beta,m,rho,largest,fraction,predicted\n";
  for (const auto& r : t.rows) {
    out += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + std::to_string(t.n) + ',' +
           num(t.alpha) + ',' + num(t.beta) + ',' + std::to_string(t.m) + ',' + num(t.rho) + ',' +
           std::to_string(r.largest) + ',' + num(r.fraction) + ',' + num(t.predicted) + '\n';
  }
  return out;
}

std::string to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"model", to_string(r.model)},
                   {"n", r.n},
                   {"C", r.c},
                   {"t_or_p", r.t_or_p},
                   {"trials", r.trials},
                   {"trivial_detected", r.trivial_detected},
                   {"nontrivial_detected", r.nontrivial_detected},
                   {"unknown", r.unknown},
                   {"witness_success", r.witness_success},
                   {"mean_largest_fraction", number_or_null(r.mean_largest_fraction)},
                   {"master_seed", r.master_seed},
                   {"capped", r.capped}});
  }
  return arr.dump(2) + "\n";
}

std::string to_json(const std::vector<TrialRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"model", to_string(r.model)},
                   {"n", r.n},
                   {"C", r.c},
                   {"t_or_p", r.t_or_p},
                   {"trial", r.trial},
                   {"seed", r.seed},
                   {"relations", r.relations},
                   {"verdict", to_string(r.verdict)},
                   {"capped", r.capped},
                   {"witness_success", r.witness_success},
                   {"witness_failure", to_string(r.witness_failure)},
                   {"largest_fraction", number_or_null(r.largest_fraction)},
                   {"wall_seconds", r.wall_seconds}});
  }
  return arr.dump(2) + "\n";
}

std::string to_json(const GiantTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"trial", r.trial}, {"seed", r.seed}, {"largest", r.largest}, {"fraction", r.fraction}});
  }
  json doc = {{"n", t.n},           {"alpha", t.alpha},         {"beta", t.beta},
              {"m", t.m},           {"rho", t.rho},             {"predicted", t.predicted},
              {"mean_fraction", t.mean_fraction()}, {"trials", rows}};
  return doc.dump(2) + "\n";
}

std::vector<SweepRow> sweep_rows_from_json(const std::string& text) {
  std::vector<SweepRow> rows;
  const json doc = json::parse(text);
  for (const auto& j : doc) {
    SweepRow r;
    r.model = parse_model(j.at("model").get<std::string>());
    r.n = j.at("n").get<std::uint32_t>();
    r.c = j.at("C").get<double>();
    r.t_or_p = j.at("t_or_p").get<double>();
    r.trials = j.at("trials").get<std::uint64_t>();
    r.trivial_detected = j.at("trivial_detected").get<std::uint64_t>();
    r.nontrivial_detected = j.at("nontrivial_detected").get<std::uint64_t>();
    r.unknown = j.at("unknown").get<std::uint64_t>();
    r.witness_success = j.at("witness_success").get<std::uint64_t>();
    const auto& f = j.at("mean_largest_fraction");
    r.mean_largest_fraction = f.is_null() ? std::numeric_limits<double>::quiet_NaN() : f.get<double>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.capped = j.value("capped", std::uint64_t{0});
    rows.push_back(r);
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace trigroup
