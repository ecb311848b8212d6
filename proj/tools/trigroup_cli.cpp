// Command-line front end: sampling, verdicts, the collapse witness, the
// giant-component law, and Monte Carlo sweeps.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "trigroup/experiments.hpp"

namespace {

using namespace trigroup;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kIo = 2;
constexpr int kCapped = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
std::vector<T> parse_list(const std::string& csv) {
  std::vector<T> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::istringstream cell(item);
    T v{};
    if (!(cell >> v) || !cell.eof()) throw UsageError("bad list element '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list '" + csv + "'");
  return out;
}

void write_certificate_file(const std::string& path, const Certificate& cert) {
  std::ostringstream text;
  write_certificate(text, cert);
  write_text(path, text.str());
}

int cmd_sample(std::uint32_t n, std::optional<std::uint64_t> t, std::optional<double> p,
               std::uint64_t seed, const std::string& out) {
  if (t.has_value() == p.has_value()) throw UsageError("give exactly one of --t and --p");
  Rng rng(seed);
  const Presentation pres = t ? sample_uniform(n, *t, rng) : sample_binomial(n, *p, rng);
  std::ostringstream text;
  write_presentation(text, pres);
  write_text(out, text.str());
  std::cout << "wrote " << pres.size() << " relations over " << n << " generators to " << out << '\n';
  return kOk;
}

int cmd_verdict(const std::string& in_path, std::uint64_t max_steps, const std::string& cert_path) {
  std::ifstream in(in_path);
  if (!in) throw IoError("cannot open '" + in_path + "'");
  const Presentation pres = read_presentation(in);
  const Verdict v = verdict(pres, {max_steps, true});
  std::cout << "n=" << pres.generators() << " t=" << pres.size()
            << " euler_characteristic=" << euler_characteristic(pres.generators(), pres.size()) << '\n';
  std::cout << "verdict " << to_string(v.kind) << '\n';
  if (v.kind == VerdictKind::trivial) {
    std::cout << "certificate_steps " << v.certificate.steps.size() << '\n';
    if (!cert_path.empty()) write_certificate_file(cert_path, v.certificate);
  } else if (v.kind == VerdictKind::nontrivial_abelianization) {
    std::cout << "free_rank " << v.abelian.free_rank << "\ntorsion";
    for (auto d : v.abelian.torsion) std::cout << ' ' << d;
    std::cout << '\n';
  }
  if (v.capped) {
    std::cout << "step cap reached\n";
    return kCapped;
  }
  return kOk;
}

int cmd_witness(std::uint32_t n, double c1, std::uint64_t seed, const std::string& cert_path) {
  const double p = c1 * std::pow(double(n), -1.5);
  Rng rng(seed);
  const SplitSample split = sample_two_stage(n, p, rng);
  const DerivedGraph derived = derive_rig(split);
  const WitnessResult w = witness_pipeline(split);
  std::cout << std::setprecision(6) << "n=" << n << " p=" << p << " |R1|=" << split.r1.size()
            << " |R2|=" << split.r2.size() << '\n'
            << "rho=" << derived.rho << " beta=" << derived.beta << " beta_lower=" << derived.beta_lower
            << '\n'
            << "largest_component=" << w.component.size() << " threshold=" << w.threshold << '\n'
            << "success=" << (w.success ? "true" : "false") << " failure=" << to_string(w.failure) << '\n';
  if (!w.uncovered.empty()) std::cout << "uncovered_generators=" << w.uncovered.size() << '\n';
  if (w.success) {
    const ReplayReport r = replay(w.certificate, split.presentation());
    std::cout << "certificate_steps=" << w.certificate.steps.size()
              << " replay=" << (r.ok() && r.all_generators_trivial ? "ok" : "FAILED") << '\n';
    if (!cert_path.empty()) write_certificate_file(cert_path, w.certificate);
  }
  const FailureBound b = pipeline_failure_bound(n, p);
  std::cout << "expected_uncovered_in_L=" << b.expected_uncovered << " stated_bound=" << b.stated_bound << '\n';
  return kOk;
}

int cmd_gamma(double beta) {
  const double g = gamma_solve(beta);
  std::cout << std::setprecision(12) << "beta=" << beta << " gamma=" << g << " giant_fraction=" << 1.0 - g
            << " residual=" << std::abs(g - std::exp(beta * (g - 1.0))) << '\n';
  return kOk;
}

int cmd_rig(std::uint32_t n, double alpha, double beta, std::uint64_t trials, std::uint64_t seed,
            unsigned jobs, const std::string& out) {
  const GiantTable table = giant_experiment(n, alpha, beta, trials, seed, jobs);
  emit(table, format_for(out), out);
  std::cout << std::setprecision(6) << "m=" << table.m << " rho=" << table.rho
            << " predicted=" << table.predicted << " mean=" << table.mean_fraction() << '\n';
  return kOk;
}

int cmd_sweep(const std::string& n_list, const std::string& c_list, std::uint64_t trials,
              const std::string& model, std::uint64_t seed, unsigned jobs, std::uint64_t max_steps,
              const std::string& out, const std::string& trials_out) {
  SweepGrid grid;
  grid.n_values = parse_list<std::uint32_t>(n_list);
  grid.c_values = parse_list<double>(c_list);
  grid.trials = trials;
  grid.model = parse_model(model);
  grid.master_seed = seed;
  grid.jobs = jobs;
  grid.max_steps = max_steps;
  const SweepResult result = sweep(grid);
  emit(result.rows, format_for(out), out);
  if (!trials_out.empty()) emit(result.records, format_for(trials_out), trials_out);
  std::uint64_t capped = 0;
  for (const auto& row : result.rows) {
    capped += row.capped;
    std::cout << "n=" << row.n << " C=" << row.c << " trivial=" << row.trivial_detected << '/'
              << row.trials << " nontrivial=" << row.nontrivial_detected << '/' << row.trials << '\n';
  }
  return capped ? kCapped : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random triangular group presentations: sampling, collapse certificates, sweeps"};
  app.require_subcommand(1);

  std::uint32_t n = 0;
  std::uint64_t seed = 0, trials = 1, max_steps = 100'000'000;
  std::optional<std::uint64_t> t;
  std::optional<double> p;
  double c1 = 1.2, beta = 0.0, alpha = 1.5;
  unsigned jobs = 1;
  std::string in, out, cert, n_list, c_list, model = "uniform", trials_out;

  auto* sample = app.add_subcommand("sample", "Sample a presentation from either model");
  sample->add_option("--n", n, "Number of generators")->required();
  sample->add_option("--t", t, "Number of relations (uniform model)");
  sample->add_option("--p", p, "Inclusion probability (binomial model)");
  sample->add_option("--seed", seed)->required();
  sample->add_option("--out", out)->required();

  auto* verdict_cmd = app.add_subcommand("verdict", "Certify triviality or non-triviality");
  verdict_cmd->add_option("--in", in)->required();
  verdict_cmd->add_option("--max-steps", max_steps);
  verdict_cmd->add_option("--cert", cert, "Write the triviality certificate here");

  auto* witness = app.add_subcommand("witness", "Run the explicit collapse argument on a two-stage sample");
  witness->add_option("--n", n)->required();
  witness->add_option("--c1", c1, "p = c1 * n^{-3/2}")->capture_default_str();
  witness->add_option("--seed", seed)->required();
  witness->add_option("--cert", cert);

  auto* gamma = app.add_subcommand("gamma", "Solve gamma = exp(beta (gamma - 1))");
  gamma->add_option("--beta", beta)->required();

  auto* rig = app.add_subcommand("rig", "Largest component of random intersection graphs");
  rig->add_option("--n", n)->required();
  rig->add_option("--alpha", alpha)->required();
  rig->add_option("--beta", beta)->required();
  rig->add_option("--trials", trials)->required();
  rig->add_option("--seed", seed)->required();
  rig->add_option("--jobs", jobs);
  rig->add_option("--out", out)->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo detection rates over an (n, C) grid");
  sweep_cmd->add_option("--n-list", n_list)->required();
  sweep_cmd->add_option("--c-list", c_list)->required();
  sweep_cmd->add_option("--trials", trials)->required();
  sweep_cmd->add_option("--model", model)->check(CLI::IsMember({"uniform", "binomial", "two-stage"}));
  sweep_cmd->add_option("--seed", seed)->required();
  sweep_cmd->add_option("--jobs", jobs);
  sweep_cmd->add_option("--max-steps", max_steps);
  sweep_cmd->add_option("--out", out)->required();
  sweep_cmd->add_option("--trials-out", trials_out, "Also write one row per trial");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sample) return cmd_sample(n, t, p, seed, out);
    if (*verdict_cmd) return cmd_verdict(in, max_steps, cert);
    if (*witness) return cmd_witness(n, c1, seed, cert);
    if (*gamma) return cmd_gamma(beta);
    if (*rig) return cmd_rig(n, alpha, beta, trials, seed, jobs, out);
    if (*sweep_cmd) return cmd_sweep(n_list, c_list, trials, model, seed, jobs, max_steps, out, trials_out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << in << ": " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
