// Command-line front end.
//
//   symfid solve   --channel <name|file.json> [--param p] --M 2 --level n ...
//   symfid export  --channel ... --level n --format sdpa --out file.dat-s
//   symfid verify  --suite {combinatorics,pairing,oracle,monotonic,...,all}
//
// Exit codes: 0 success, 1 verification failure, 2 invalid input or schema,
// 3 channel fails the CPTP check, 4 solver stopped without convergence
// (partial result still printed), 5 file-system problems.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "symfid/verify.hpp"

namespace {

using nlohmann::json;
using namespace symfid;

constexpr int kExitInvalid = 2;
constexpr int kExitCptp = 3;
constexpr int kExitSolver = 4;
constexpr int kExitIo = 5;

struct CliError {
  int code;
  std::string message;
};

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f.good()) throw CliError{kExitIo, "cannot open '" + path + "'"};
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw CliError{kExitInvalid, "invalid JSON in '" + path + "': " + e.what()};
  }
}

// Options every subcommand shares.  Values already set on the command line
// win over the config file, which wins over the defaults.
struct CommonArgs {
  std::string channel;
  double param = 0.0;
  int M = 2;
  int level = 1;
  std::string solver = "auto";
  double tol = -1.0;  // negative means "solver default"
  int max_iter = -1;
  std::string out;
  std::string config;
  int threads = 1;
  std::string format = "sdpa";
  std::string suite;

  CLI::Option* channel_opt = nullptr;
  CLI::Option* param_opt = nullptr;
  CLI::Option* M_opt = nullptr;
  CLI::Option* level_opt = nullptr;
  CLI::Option* solver_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* max_iter_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* format_opt = nullptr;
  CLI::Option* suite_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CommonArgs& a, bool with_solver, bool with_format,
                        bool with_suite) {
  a.channel_opt = cmd->add_option("--channel", a.channel,
                                  "builtin channel name or path to a channel JSON file");
  a.param_opt = cmd->add_option("--param", a.param, "parameter for builtin channel families");
  a.M_opt = cmd->add_option("--M", a.M, "reference dimension M (default 2)");
  a.level_opt = cmd->add_option("--level", a.level, "hierarchy level n >= 1");
  if (with_solver) {
    a.solver_opt = cmd->add_option("--solver", a.solver, "auto | ipm | admm")
                       ->check(CLI::IsMember({"auto", "ipm", "admm"}));
    a.tol_opt = cmd->add_option("--tol", a.tol, "solver tolerance");
    a.max_iter_opt = cmd->add_option("--max-iter", a.max_iter, "iteration cap");
  }
  a.out_opt = cmd->add_option("--out", a.out, "output file (default: stdout only)");
  if (with_format) a.format_opt = cmd->add_option("--format", a.format, "export format (sdpa)");
  if (with_suite) a.suite_opt = cmd->add_option("--suite", a.suite, "verification suite to run");
  cmd->add_option("--config", a.config, "JSON file with defaults for the flags above");
  a.threads_opt = cmd->add_option("--threads", a.threads, "worker threads for dense algebra");
}

// Fill in values from --config for every flag the user did not set.
void apply_config(CommonArgs& a) {
  if (a.config.empty()) return;
  json cfg = load_json_file(a.config);
  if (!cfg.is_object()) throw CliError{kExitInvalid, "config must be a JSON object"};

  auto unset = [](CLI::Option* opt) { return opt != nullptr && opt->count() == 0; };
  for (const auto& [key, value] : cfg.items()) {
    try {
      if (key == "channel") {
        if (unset(a.channel_opt)) a.channel = value.get<std::string>();
      } else if (key == "param") {
        if (unset(a.param_opt)) a.param = value.get<double>();
      } else if (key == "M") {
        if (unset(a.M_opt)) a.M = value.get<int>();
      } else if (key == "level") {
        if (unset(a.level_opt)) a.level = value.get<int>();
      } else if (key == "solver") {
        if (unset(a.solver_opt)) a.solver = value.get<std::string>();
      } else if (key == "tol") {
        if (unset(a.tol_opt)) a.tol = value.get<double>();
      } else if (key == "max_iter") {
        if (unset(a.max_iter_opt)) a.max_iter = value.get<int>();
      } else if (key == "out") {
        if (unset(a.out_opt)) a.out = value.get<std::string>();
      } else if (key == "threads") {
        if (unset(a.threads_opt)) a.threads = value.get<int>();
      } else if (key == "format") {
        if (unset(a.format_opt)) a.format = value.get<std::string>();
      } else if (key == "suite") {
        if (unset(a.suite_opt)) a.suite = value.get<std::string>();
      } else {
        throw CliError{kExitInvalid, "config: unknown key '" + key + "'"};
      }
    } catch (const json::exception& e) {
      throw CliError{kExitInvalid, "config: bad value for '" + key + "': " + e.what()};
    }
  }
}

struct ResolvedChannel {
  ChannelSpec spec;
  ChoiMatrix choi;
  CptpReport cptp;
  bool builtin = false;
};

ResolvedChannel resolve_channel(const std::string& arg, double param) {
  if (arg.empty()) throw CliError{kExitInvalid, "a channel is required (--channel)"};
  ResolvedChannel rc;
  auto names = builtin_channel_names();
  if (std::find(names.begin(), names.end(), arg) != names.end()) {
    rc.builtin = true;
    try {
      rc.spec = builtin_channel(arg, param);
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitInvalid, e.what()};
    }
  } else {
    json j = load_json_file(arg);
    try {
      rc.spec = channel_from_json(j);
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitInvalid, e.what()};
    }
  }
  try {
    rc.choi = channel_to_choi(rc.spec);
  } catch (const std::invalid_argument& e) {
    throw CliError{kExitInvalid, e.what()};
  }
  rc.cptp = validate_cptp(rc.choi);
  if (!rc.cptp.pass) {
    std::cerr << "channel '" << arg << "' is not CPTP: tp deviation " << rc.cptp.tp_deviation
              << ", cp deviation " << rc.cptp.cp_deviation << ", hermiticity deviation "
              << rc.cptp.herm_deviation << "\n";
    throw CliError{kExitCptp, "channel failed the CPTP check"};
  }
  return rc;
}

void validate_common(const CommonArgs& a) {
  if (a.level < 1) throw CliError{kExitInvalid, "level must be >= 1"};
  if (a.M < 1) throw CliError{kExitInvalid, "M must be >= 1"};
  if (a.threads < 1) throw CliError{kExitInvalid, "threads must be >= 1"};
  Eigen::setNbThreads(a.threads);
}

json channel_json_summary(const ResolvedChannel& rc, double param) {
  json j;
  j["name"] = rc.spec.name;
  j["d_in"] = rc.spec.d_in;
  j["d_out"] = rc.spec.d_out;
  if (rc.builtin) j["param"] = param;
  return j;
}

int run_solve(CommonArgs& a) {
  apply_config(a);
  validate_common(a);
  auto rc = resolve_channel(a.channel, a.param);

  detail::Stopwatch total;
  detail::Stopwatch assemble_watch;
  ReducedSDP reduced = assemble(rc.choi, a.M, a.level);
  double assemble_ms = assemble_watch.ms();

  std::string solver = a.solver;
  if (solver == "auto") solver = a.level <= 2 ? "ipm" : "admm";

  detail::Stopwatch solve_watch;
  SolveResult res;
  if (solver == "ipm") {
    IpmOptions opts;
    if (a.tol > 0) opts.gap_tol = a.tol;
    if (a.max_iter > 0) opts.max_newton = a.max_iter;
    res = solve_ipm(reduced.sdp, reduced.start, opts);
  } else {
    AdmmOptions opts;
    if (a.tol > 0) opts.tol = a.tol;
    if (a.max_iter > 0) opts.max_iter = a.max_iter;
    opts.warm_start = &reduced.start;
    res = solve_admm(reduced.sdp, opts);
  }
  double solve_ms = solve_watch.ms();

  json out;
  out["value"] = res.value;
  out["level"] = a.level;
  out["M"] = a.M;
  out["status"] = to_string(res.status);
  out["gap"] = res.duality_gap;
  json blocks = json::array();
  for (const auto& b : reduced.sdp.blocks) blocks.push_back(b.side);
  out["blocks"] = blocks;
  out["timings_ms"] = {{"assemble", assemble_ms}, {"solve", solve_ms}, {"total", total.ms()}};
  out["channel"] = channel_json_summary(rc, a.param);
  out["solver"] = solver;
  out["eq_residual"] = res.eq_residual;
  out["min_block_eig"] = res.min_block_eig;
  out["num_params"] = reduced.num_params;
  out["iterations"] = res.iterations;
  out["constraint_rank"] = res.constraint_rank;
  out["threads"] = a.threads;

  std::string text = out.dump(2);
  std::cout << text << "\n";
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    f << text << "\n";
    if (!f.good()) throw CliError{kExitIo, "cannot write '" + a.out + "'"};
  }

  std::cerr << rc.spec.name << (rc.builtin ? detail::fmt("(%g)", a.param) : "") << "  M=" << a.M
            << "  level=" << a.level << "\n"
            << "solver " << solver << "  status " << to_string(res.status) << "  "
            << detail::fmt("%.1f s", (assemble_ms + solve_ms) / 1000.0) << "\n"
            << detail::fmt("value %.8f  gap %.1e", res.value, res.duality_gap) << "\n";
  return res.status == SolveStatus::optimal ? 0 : kExitSolver;
}

int run_export(CommonArgs& a) {
  apply_config(a);
  validate_common(a);
  if (a.format != "sdpa") throw CliError{kExitInvalid, "unsupported format '" + a.format + "'"};
  if (a.out.empty()) throw CliError{kExitInvalid, "--out is required for export"};
  auto rc = resolve_channel(a.channel, a.param);

  ReducedSDP reduced = assemble(rc.choi, a.M, a.level);
  {
    std::ofstream f(a.out, std::ios::binary);
    if (!f.good()) throw CliError{kExitIo, "cannot write '" + a.out + "'"};
    export_sdpa(reduced.sdp, f);
    if (!f.good()) throw CliError{kExitIo, "failed while writing '" + a.out + "'"};
  }

  json manifest;
  manifest["format"] = "sdpa-sparse";
  manifest["channel"] = channel_json_summary(rc, a.param);
  manifest["M"] = a.M;
  manifest["level"] = a.level;
  manifest["num_params"] = reduced.num_params;
  manifest["equality_rows"] = reduced.sdp.equalities.size();
  json sides = json::array();
  for (const auto& b : reduced.sdp.blocks) sides.push_back(b.side);
  manifest["block_sides"] = sides;
  manifest["real_mode"] = reduced.real_mode;
  manifest["program"] = reduced_manifest(reduced, false);
  manifest["notes"] = {
      "objective negated (SDPA minimizes)",
      "free variables split into nonnegative pairs",
      "equalities emitted as paired one-dimensional inequalities in the final diagonal block"};
  std::string manifest_path = a.out + ".manifest.json";
  std::ofstream mf(manifest_path);
  mf << manifest.dump(2) << "\n";
  if (!mf.good()) throw CliError{kExitIo, "cannot write '" + manifest_path + "'"};

  std::cerr << "wrote " << a.out << " and " << manifest_path << "\n";
  return 0;
}

int run_verify(CommonArgs& a) {
  apply_config(a);
  if (a.threads < 1) throw CliError{kExitInvalid, "threads must be >= 1"};
  Eigen::setNbThreads(a.threads);
  if (a.suite.empty()) throw CliError{kExitInvalid, "a suite is required (--suite)"};

  const std::vector<std::string> known = {"combinatorics", "pairing", "oracle",  "monotonic",
                                          "sandwich",      "blockdiag", "ptrace", "scale",
                                          "all"};
  if (std::find(known.begin(), known.end(), a.suite) == known.end())
    throw CliError{kExitInvalid, "unknown suite '" + a.suite + "'"};

  std::vector<SuiteResult> results;
  bool want_all = a.suite == "all";
  if (want_all || a.suite == "combinatorics") results.push_back(run_combinatorics_suite());
  if (want_all || a.suite == "pairing") results.push_back(run_pairing_suite());
  if (want_all || a.suite == "oracle") results.push_back(run_oracle_suite());
  if (want_all || a.suite == "monotonic" || a.suite == "sandwich") {
    auto rep = run_hierarchy_suites();
    if (want_all || a.suite == "monotonic") results.push_back(rep.monotonic);
    if (want_all || a.suite == "sandwich") results.push_back(rep.sandwich);
  }
  if (want_all || a.suite == "blockdiag") results.push_back(run_blockdiag_suite());
  if (want_all || a.suite == "ptrace") results.push_back(run_ptrace_suite());
  if (a.suite == "scale") results.push_back(run_scale_suite());  // long; never part of "all"

  bool passed = true;
  json suites = json::array();
  for (const auto& r : results) {
    passed = passed && r.passed;
    json js;
    js["name"] = r.name;
    js["passed"] = r.passed;
    js["ms"] = r.ms;
    js["details"] = r.details;
    suites.push_back(js);
    std::cerr << (r.passed ? "[PASS] " : "[FAIL] ") << r.name
              << detail::fmt(" (%.1f s)", r.ms / 1000.0) << "\n";
  }
  json report;
  report["suites"] = suites;
  report["passed"] = passed;
  std::string text = report.dump(2);
  std::cout << text << "\n";
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    f << text << "\n";
    if (!f.good()) throw CliError{kExitIo, "cannot write '" + a.out + "'"};
  }
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Upper bounds on channel fidelity from a symmetry-reduced SDP hierarchy"};
  app.require_subcommand(1);

  CommonArgs solve_args, export_args, verify_args;
  auto* solve_cmd = app.add_subcommand("solve", "assemble and solve one hierarchy level");
  add_common_options(solve_cmd, solve_args, true, false, false);
  auto* export_cmd = app.add_subcommand("export", "write the reduced SDP in SDPA sparse format");
  add_common_options(export_cmd, export_args, false, true, false);
  auto* verify_cmd = app.add_subcommand("verify", "run self-check suites");
  add_common_options(verify_cmd, verify_args, false, false, true);

  try {
    app.parse(argc, argv);
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (export_cmd->parsed()) return run_export(export_args);
    if (verify_cmd->parsed()) return run_verify(verify_args);
    return kExitInvalid;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
