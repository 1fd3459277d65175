#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <string>
#include <vector>

#include "mixppl/infer.hpp"
#include "mixppl/parser.hpp"
#include "mixppl/resolve.hpp"
#include "mixppl/verify.hpp"

using json = nlohmann::ordered_json;
using namespace mixppl;

namespace {

constexpr int kExitLoadError = 2;
constexpr int kExitInferError = 3;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MIXPPL_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

std::string read_file_or_fail(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path);
  out << content;
}

std::string num(double v) { return Value(v).str(); }

// trace rows: engine, seed, sample_or_step_index, query, estimate
std::string trace_csv(const std::string& engine, std::uint64_t seed,
                      const PosteriorEstimate& est) {
  std::string out;
  for (const TraceRow& row : est.trace)
    out += engine + "," + std::to_string(seed) + "," +
           std::to_string(row.index) + "," + est.queries[row.query].query +
           "," + num(row.estimate) + "\n";
  return out;
}

std::string trace_csv_steps(const std::string& engine, std::uint64_t seed,
                            const std::vector<PosteriorEstimate>& steps) {
  std::string out;
  for (const PosteriorEstimate& step : steps)
    for (const QueryEstimate& q : step.queries)
      out += engine + "," + std::to_string(seed) + "," +
             std::to_string(step.t) + "," + q.query + "," + num(q.estimate) +
             "\n";
  return out;
}

const char* kTraceHeader = "engine,seed,index,query,estimate\n";

struct RunFlags {
  std::string model_path;
  std::string algo = "llw";
  std::int64_t samples = 10000;
  std::int64_t particles = 1000;
  bool samples_given = false;
  std::uint64_t seed = default_seed();
  int irlw_n = 20;
  double atom_tol = 0.0;
  std::string output = "json";
  std::string trace_path;
  long long object_cap = 10000;
  int threads = 1;
  std::string resample = "multinomial";
  std::string dump_world_path;
};

json estimate_json(const PosteriorEstimate& est, bool with_d_star) {
  json j = json::object();
  if (est.t >= 0) j["t"] = est.t;
  if (with_d_star) j["d_star"] = est.d_star;
  j["surviving"] = est.surviving;
  j["ess"] = est.ess;
  for (const QueryEstimate& q : est.queries) j[q.query] = q.estimate;
  return j;
}

std::string estimates_csv(const std::vector<PosteriorEstimate>& steps,
                          bool stepwise) {
  std::string out = stepwise
                        ? "t,query,estimate,std_error,d_star,surviving,ess\n"
                        : "query,estimate,std_error,d_star,surviving,ess\n";
  for (const PosteriorEstimate& est : steps)
    for (const QueryEstimate& q : est.queries) {
      if (stepwise) out += std::to_string(est.t) + ",";
      out += q.query + "," + num(q.estimate) + "," + num(q.std_error) + "," +
             std::to_string(est.d_star) + "," +
             std::to_string(est.surviving) + "," + num(est.ess) + "\n";
    }
  return out;
}

int cmd_run(const RunFlags& flags) {
  ResolveOptions opts;
  opts.run.object_cap = flags.object_cap;
  opts.run.atom_tol = flags.atom_tol;
  Model model = load_model_text(read_file_or_fail(flags.model_path), opts);

  InferOptions infer;
  infer.seed = flags.seed;
  infer.threads = flags.threads;
  infer.resample = flags.resample == "systematic" ? ResampleKind::systematic
                                                  : ResampleKind::multinomial;
  if (!flags.trace_path.empty())
    infer.trace_points = std::min<std::int64_t>(200, flags.samples);

  if (!flags.dump_world_path.empty()) {
    Rng rng = substream(flags.seed, 0);
    SamplingDriver driver(rng);
    World world;
    WorldContext ctx(model, world, driver);
    for (const EvidenceDecl& e : model.evidence) {
      BasicRV rv;
      if (ctx.resolve_application(e, rv)) ctx.demand(rv);
    }
    for (const QueryDecl& q : model.queries) {
      if (q.has_binder) continue;
      Env env;
      ctx.eval(q.expr, env);
    }
    write_file(flags.dump_world_path, world.dump(model));
  }

  json j;
  j["schema"] = 1;
  j["model"] = flags.model_path;
  j["algo"] = flags.algo;
  j["seed"] = flags.seed;

  std::string trace_out = kTraceHeader;
  std::string csv_out;

  if (flags.algo == "lpf" || flags.algo == "pf") {
    j["particles"] = flags.particles;
    auto steps = flags.algo == "lpf"
                     ? lpf_run(model, flags.particles, infer)
                     : naive_pf_run(model, flags.particles, infer);
    json arr = json::array();
    for (const PosteriorEstimate& est : steps)
      arr.push_back(estimate_json(est, flags.algo == "lpf"));
    j["steps"] = std::move(arr);
    trace_out += trace_csv_steps(flags.algo, flags.seed, steps);
    csv_out = estimates_csv(steps, true);
  } else {
    j["samples"] = flags.samples;
    PosteriorEstimate est;
    if (flags.algo == "llw") {
      est = llw_run(model, flags.samples, infer);
    } else if (flags.algo == "lw") {
      est = naive_lw_run(model, flags.samples, infer);
    } else if (flags.algo == "irlw") {
      j["irlw_n"] = flags.irlw_n;
      est = irlw_run(model, flags.samples, flags.irlw_n, infer);
    } else {
      fail(ErrorCode::precondition, "unknown algorithm: " + flags.algo);
    }
    if (flags.algo == "llw") j["d_star"] = est.d_star;
    j["surviving"] = est.surviving;
    j["ess"] = est.ess;
    for (const QueryEstimate& q : est.queries) j[q.query] = q.estimate;
    trace_out += trace_csv(flags.algo, flags.seed, est);
    std::vector<PosteriorEstimate> one{est};
    csv_out = estimates_csv(one, false);
  }

  if (!flags.trace_path.empty()) write_file(flags.trace_path, trace_out);
  if (flags.output == "csv")
    std::cout << csv_out;
  else
    std::cout << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// experiments

struct ExperimentFlags {
  std::string name;
  std::string models_dir;
  std::string outdir = "results";
  std::int64_t samples = 100000;
  std::vector<std::int64_t> particles = {100, 1000, 10000};
  std::vector<double> sigmas = {1.0, 2.0, 4.0};
  std::vector<double> radius, radar_x, radar_y;  // aircraft table overrides
  int seeds = 0;  // 0: per-experiment default
  std::uint64_t dataset_seed = 8;
  int threads = 1;
};

// replace every value of a fixed table with literals; one value broadcasts
void override_table(ModelAST& ast, const std::string& name,
                    const std::vector<double>& values) {
  if (values.empty()) return;
  for (auto& f : ast.fixed_fns) {
    if (f.name != name || !f.is_table) continue;
    if (values.size() != 1 && values.size() != f.table.size())
      fail(ErrorCode::precondition,
           "--" + name + " needs 1 or " + std::to_string(f.table.size()) +
               " values");
    for (std::size_t i = 0; i < f.table.size(); ++i) {
      Expr lit;
      lit.kind = ExprKind::lit;
      lit.lit = Value(values.size() == 1 ? values[0] : values[i]);
      f.table[i].second = std::move(lit);
    }
    return;
  }
  fail(ErrorCode::precondition, "model has no fixed table '" + name + "'");
}

std::string models_dir_default() {
  if (const char* env = std::getenv("MIXPPL_MODELS")) return env;
  return "models";
}

int cmd_experiment_gpa(const ExperimentFlags& flags) {
  std::string text =
      read_file_or_fail(flags.models_dir + "/gpa_two_country.blog");
  Model model = load_model_text(text);
  int seeds = flags.seeds > 0 ? flags.seeds : 10;

  std::string summary = "engine,seed,samples,query,estimate,d_star,surviving\n";
  std::string trace = kTraceHeader;
  double llw_mean = 0, lw_mean = 0;
  for (int s = 0; s < seeds; ++s) {
    InferOptions opts;
    opts.seed = s;
    opts.threads = flags.threads;
    opts.trace_points = 200;
    PosteriorEstimate lex = llw_run(model, flags.samples, opts);
    PosteriorEstimate naive = naive_lw_run(model, flags.samples, opts);
    llw_mean += lex.queries[0].estimate / seeds;
    lw_mean += naive.queries[0].estimate / seeds;
    summary += "llw," + std::to_string(s) + "," +
               std::to_string(flags.samples) + "," + lex.queries[0].query +
               "," + num(lex.queries[0].estimate) + "," +
               std::to_string(lex.d_star) + "," +
               std::to_string(lex.surviving) + "\n";
    summary += "lw," + std::to_string(s) + "," + std::to_string(flags.samples) +
               "," + naive.queries[0].query + "," +
               num(naive.queries[0].estimate) + ",," +
               std::to_string(naive.surviving) + "\n";
    trace += trace_csv("llw", s, lex);
    trace += trace_csv("lw", s, naive);
  }
  write_file(flags.outdir + "/gpa_summary.csv", summary);
  write_file(flags.outdir + "/gpa_trace.csv", trace);

  std::cout << "gpa: P(Nationality == USA | GPA = 4)\n";
  std::cout << "  llw mean over " << seeds << " seeds: " << num(llw_mean)
            << "\n";
  std::cout << "  lw  mean over " << seeds << " seeds: " << num(lw_mean)
            << "\n";
  std::cout << "  mass/density weight ratio 0.01/(0.01+0.099) = "
            << num(0.01 / 0.109) << "\n";
  return 0;
}

int cmd_experiment_scale(const ExperimentFlags& flags) {
  std::string text = read_file_or_fail(flags.models_dir + "/scale.blog");
  ModelAST base = parse_model_text(text);
  int seeds = flags.seeds > 0 ? flags.seeds : 5;

  std::string summary = "engine,sigma,seed,samples,estimate\n";
  std::cout << "scale: P(hasFakeCoin | obsDiff = 0)\n";
  for (double sigma : flags.sigmas) {
    ModelAST ast = base;
    bool replaced = false;
    for (auto& f : ast.fixed_fns)
      if (f.name == "sigma") {
        f.body = Expr{};
        f.body.kind = ExprKind::lit;
        f.body.lit = Value(sigma);
        replaced = true;
      }
    if (!replaced)
      fail(ErrorCode::precondition, "scale model has no fixed sigma");
    Model model = resolve(ast);

    double llw_mean = 0, lw_mean = 0;
    for (int s = 0; s < seeds; ++s) {
      InferOptions opts;
      opts.seed = s;
      opts.threads = flags.threads;
      PosteriorEstimate lex = llw_run(model, flags.samples, opts);
      PosteriorEstimate naive = naive_lw_run(model, flags.samples, opts);
      llw_mean += lex.queries[0].estimate / seeds;
      lw_mean += naive.queries[0].estimate / seeds;
      summary += "llw," + num(sigma) + "," + std::to_string(s) + "," +
                 std::to_string(flags.samples) + "," +
                 num(lex.queries[0].estimate) + "\n";
      summary += "lw," + num(sigma) + "," + std::to_string(s) + "," +
                 std::to_string(flags.samples) + "," +
                 num(naive.queries[0].estimate) + "\n";
    }
    std::cout << "  sigma = " << num(sigma) << ": llw " << num(llw_mean)
              << ", lw " << num(lw_mean) << "\n";
  }
  write_file(flags.outdir + "/scale_summary.csv", summary);
  return 0;
}

int cmd_experiment_aircraft(const ExperimentFlags& flags) {
  const int T = 8;
  std::string base = read_file_or_fail(flags.models_dir + "/aircraft.blog");
  if (!flags.radius.empty() || !flags.radar_x.empty() ||
      !flags.radar_y.empty()) {
    ModelAST ast = parse_model_text(base);
    override_table(ast, "radius", flags.radius);
    override_table(ast, "loc_x", flags.radar_x);
    override_table(ast, "loc_y", flags.radar_y);
    base = print_model(ast);
  }
  Model generator = load_model_text(base);
  auto dataset = verify::generate_ssm_dataset(generator, T, flags.dataset_seed);
  write_file(flags.outdir + "/aircraft_dataset.blog",
             base + "\n" + dataset.obs_text);
  write_file(flags.outdir + "/aircraft_truth.csv", dataset.truth_csv());

  Model model = load_model_text(base + "\n" + dataset.obs_text);
  int seeds = flags.seeds > 0 ? flags.seeds : 20;

  auto mse_of = [&](const std::vector<PosteriorEstimate>& steps) {
    double total = 0.0;
    for (const PosteriorEstimate& step : steps) {
      double dx =
          step.queries[0].estimate - dataset.truth_rows[step.t][1];
      double dy =
          step.queries[1].estimate - dataset.truth_rows[step.t][2];
      total += dx * dx + dy * dy;
    }
    return total / static_cast<double>(steps.size());
  };

  std::string rows = "engine,particles,seed,mse\n";
  std::string summary = "engine,particles,mean_mse\n";
  std::cout << "aircraft: mean squared error to ground truth, " << seeds
            << " seeds\n";
  for (std::int64_t k : flags.particles) {
    double lpf_mean = 0, pf_mean = 0;
    for (int s = 0; s < seeds; ++s) {
      InferOptions opts;
      opts.seed = s;
      opts.threads = flags.threads;
      double lpf_mse = mse_of(lpf_run(model, k, opts));
      double pf_mse = mse_of(naive_pf_run(model, k, opts));
      lpf_mean += lpf_mse / seeds;
      pf_mean += pf_mse / seeds;
      rows += "lpf," + std::to_string(k) + "," + std::to_string(s) + "," +
              num(lpf_mse) + "\n";
      rows += "pf," + std::to_string(k) + "," + std::to_string(s) + "," +
              num(pf_mse) + "\n";
    }
    summary += "lpf," + std::to_string(k) + "," + num(lpf_mean) + "\n";
    summary += "pf," + std::to_string(k) + "," + num(pf_mean) + "\n";
    std::cout << "  K = " << k << ": lpf " << num(lpf_mean) << ", pf "
              << num(pf_mean) << "\n";
  }
  write_file(flags.outdir + "/aircraft_mse.csv", rows);
  write_file(flags.outdir + "/aircraft_summary.csv", summary);
  return 0;
}

int cmd_experiment(const ExperimentFlags& flags) {
  std::filesystem::create_directories(flags.outdir);
  if (flags.name == "gpa") return cmd_experiment_gpa(flags);
  if (flags.name == "scale") return cmd_experiment_scale(flags);
  if (flags.name == "aircraft") return cmd_experiment_aircraft(flags);
  fail(ErrorCode::precondition, "unknown experiment: " + flags.name);
}

int error_exit(const Error& e) {
  json j;
  j["schema"] = 1;
  j["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
  std::cerr << j.dump(2) << "\n";
  return is_load_error(e.code()) ? kExitLoadError : kExitInferError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inference for models mixing probability masses and densities"};
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run one inference engine on a model file");
  run_cmd->add_option("--model", run.model_path, "model file (.blog)")
      ->required();
  run_cmd->add_option("--algo", run.algo, "llw | lw | lpf | pf | irlw")
      ->check(CLI::IsMember({"llw", "lw", "lpf", "pf", "irlw"}));
  run_cmd->add_option("--samples", run.samples, "sample count for lw engines");
  run_cmd->add_option("--particles", run.particles,
                      "particle count for pf engines");
  run_cmd->add_option("--seed", run.seed, "RNG seed (env MIXPPL_SEED)");
  run_cmd->add_option("--irlw-n", run.irlw_n, "IRLW refinement level");
  run_cmd->add_option("--atom-tol", run.atom_tol,
                      "absolute tolerance for atom matching");
  run_cmd->add_option("--output", run.output, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("--trace", run.trace_path, "write a convergence CSV");
  run_cmd->add_option("--object-cap", run.object_cap,
                      "max objects per number variable");
  run_cmd->add_option("--threads", run.threads, "worker threads");
  run_cmd->add_option("--resample", run.resample,
                      "multinomial | systematic")
      ->check(CLI::IsMember({"multinomial", "systematic"}));
  run_cmd->add_option("--dump-world", run.dump_world_path,
                      "write one prior world, one `BasicRV = Value` per line");

  ExperimentFlags exp;
  exp.models_dir = models_dir_default();
  CLI::App* exp_cmd =
      app.add_subcommand("experiment", "rerun a bundled comparison study");
  exp_cmd->add_option("name", exp.name, "gpa | scale | aircraft")->required();
  exp_cmd->add_option("--samples", exp.samples, "samples per engine run");
  exp_cmd->add_option("--particles", exp.particles,
                      "particle counts for aircraft");
  exp_cmd->add_option("--sigma", exp.sigmas, "sigma sweep for scale")
      ->delimiter(',');
  exp_cmd->add_option("--radius", exp.radius,
                      "aircraft radar radii (1 value or one per radar)")
      ->delimiter(',');
  exp_cmd->add_option("--radar-x", exp.radar_x, "aircraft radar x positions")
      ->delimiter(',');
  exp_cmd->add_option("--radar-y", exp.radar_y, "aircraft radar y positions")
      ->delimiter(',');
  exp_cmd->add_option("--seeds", exp.seeds, "seed sweep size");
  exp_cmd->add_option("--dataset-seed", exp.dataset_seed,
                      "seed for the synthetic aircraft dataset");
  exp_cmd->add_option("--outdir", exp.outdir, "report directory");
  exp_cmd->add_option("--models-dir", exp.models_dir,
                      "bundled model directory (env MIXPPL_MODELS)");
  exp_cmd->add_option("--threads", exp.threads, "worker threads");
  exp_cmd->get_option("--particles")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitLoadError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run);
    return cmd_experiment(exp);
  } catch (const Error& e) {
    return error_exit(e);
  } catch (const std::exception& e) {
    json j;
    j["schema"] = 1;
    j["error"] = {{"code", "internal"}, {"message", e.what()}};
    std::cerr << j.dump(2) << "\n";
    return kExitInferError;
  }
}
