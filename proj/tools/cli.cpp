#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "rapidtail/copulatail.hpp"
#include "rapidtail/errors.hpp"
#include "rapidtail/report.hpp"
#include "rapidtail/skewell.hpp"
#include "rapidtail/spec_io.hpp"
#include "rapidtail/verify.hpp"

namespace rapidtail::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;
constexpr const char* kVersion = "0.1.0";

struct Flags {
  std::string config;
  std::optional<double> rho;
  std::vector<double> delta;
  std::vector<double> t_grid;
  std::vector<double> u_grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> threshold;

  std::vector<std::string> at;
  std::vector<double> w;
  std::vector<double> w_ref;
  std::vector<double> x;
  double s = 2.0;
  std::size_t n = 1000;
};

std::shared_ptr<spdlog::logger> logger() {
  auto log = spdlog::get("rapidtail");
  if (!log) {
    log = spdlog::stderr_logger_st("rapidtail");
    log->set_pattern("[%l] %v");
  }
  const char* env = std::getenv("RAPIDTAIL_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") log->set_level(spdlog::level::err);
  else if (level == "info") log->set_level(spdlog::level::info);
  else if (level == "debug") log->set_level(spdlog::level::debug);
  else log->set_level(spdlog::level::warn);
  return log;
}

// Everything a command needs after flags and config file are merged.
struct RunConfig {
  std::string command;
  SkewEllipticalSpec spec;
  RunSettings run;  // effective values
};

SkewEllipticalSpec with_overrides(const SkewEllipticalSpec& base, const Flags& f) {
  Eigen::MatrixXd sigma = base.sigma();
  Eigen::VectorXd delta = base.delta();
  if (f.rho) {
    for (Eigen::Index i = 0; i < sigma.rows(); ++i)
      for (Eigen::Index j = 0; j < sigma.cols(); ++j)
        if (i != j) sigma(i, j) = *f.rho * std::sqrt(sigma(i, i) * sigma(j, j));
  }
  if (!f.delta.empty()) {
    if (static_cast<Eigen::Index>(f.delta.size()) != delta.size())
      throw ShapeError(fmt::format("--delta has {} entries, the spec has dimension {}",
                                   f.delta.size(), delta.size()));
    delta = Eigen::Map<const Eigen::VectorXd>(f.delta.data(), delta.size());
  }
  return build_spec(base.mu(), sigma, delta, base.generator());
}

RunConfig resolve(const std::string& command, const Flags& f) {
  RunSettings run;
  std::optional<SkewEllipticalSpec> spec;
  if (!f.config.empty()) {
    auto doc = load_config(f.config);
    run = std::move(doc.run);
    spec = with_overrides(doc.spec, f);
  } else {
    Eigen::Vector2d delta = Eigen::Vector2d::Zero();
    if (!f.delta.empty()) {
      if (f.delta.size() != 2) throw ShapeError("--delta needs two entries without a config file");
      delta = Eigen::Vector2d(f.delta[0], f.delta[1]);
    }
    spec = make_bivariate_skew_normal(f.rho.value_or(0.0), delta[0], delta[1]);
  }
  if (!f.t_grid.empty()) run.t_grid = f.t_grid;
  if (!f.u_grid.empty()) run.u_grid = f.u_grid;
  if (!f.w.empty()) run.w = f.w;
  if (!f.x.empty()) run.x = f.x;
  if (f.seed) run.seed = f.seed;
  if (f.threshold) run.threshold = f.threshold;
  if (f.out) run.out = f.out;
  if (!run.seed) run.seed = kDefaultSeed;

  const double ts = spec->theta_sum();
  if (std::abs(ts) > kZeroTolerance && std::abs(ts) < 1e-6) {
    logger()->warn("1 theta^T = {:.3g} is close to zero; the tail constant switches between its "
                   "two branches here, so finite-t results may be unstable", ts);
  }
  return {command, std::move(*spec), std::move(run)};
}

Eigen::VectorXd vector_or(const std::optional<std::vector<double>>& v, int d, double fill,
                          const char* name) {
  if (!v) return Eigen::VectorXd::Constant(d, fill);
  if (static_cast<int>(v->size()) != d)
    throw ShapeError(fmt::format("--{} has {} entries, the spec has dimension {}", name, v->size(), d));
  return Eigen::Map<const Eigen::VectorXd>(v->data(), d);
}

std::string list(const std::vector<double>& v) { return fmt::format("{}", fmt::join(v, ";")); }

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n') c = ' ';
  return s;
}

Metadata base_metadata(const RunConfig& rc) {
  Metadata m;
  m.emplace_back("tool", fmt::format("rapidtail {}", kVersion));
  m.emplace_back("command", rc.command);
  m.emplace_back("spec_hash", spec_hash(rc.spec));
  m.emplace_back("spec", one_line(serialize_spec(rc.spec)));
  m.emplace_back("seed", std::to_string(*rc.run.seed));
  if (rc.run.t_grid) m.emplace_back("t_grid", list(*rc.run.t_grid));
  if (rc.run.u_grid) m.emplace_back("u_grid", list(*rc.run.u_grid));
  m.emplace_back("generated",
                 fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                             fmt::gmtime(std::chrono::system_clock::to_time_t(
                                 std::chrono::system_clock::now()))));
  return m;
}

void emit(const std::optional<std::string>& path, const std::string& content) {
  if (!path) {
    std::cout << content;
    return;
  }
  std::ofstream os(*path, std::ios::binary);
  if (!os) throw InvalidSpec(fmt::format("cannot write '{}'", *path));
  os << content;
  if (!os) throw InvalidSpec(fmt::format("write to '{}' failed", *path));
  logger()->info("wrote {}", *path);
}

std::string metadata_block(const Metadata& m) {
  std::string s;
  for (const auto& [k, v] : m) s += fmt::format("# {}={}\n", k, v);
  return s;
}

int report_exit(const ConvergenceReport& r, const RunConfig& rc) {
  std::ostringstream os;
  write_report_csv(os, r, base_metadata(rc));
  emit(rc.run.out, os.str());
  logger()->info("{}: extrapolated {:.10g}, verdict {}", r.name, r.extrapolated, to_string(r.verdict));
  return r.verdict == Verdict::pass ? kPass : kFail;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_density(const RunConfig& rc, const Flags& f) {
  const int d = rc.spec.dim();
  if (f.at.empty()) throw DomainError("density needs at least one --at point");
  std::string body;
  for (int i = 0; i < d; ++i) body += fmt::format("y{},", i);
  body += "log_density\n";
  for (const auto& text : f.at) {
    std::vector<double> p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        p.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw DomainError(fmt::format("--at '{}' is not a list of numbers", text));
      }
    }
    if (static_cast<int>(p.size()) != d)
      throw ShapeError(fmt::format("--at '{}' needs {} coordinates", text, d));
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(p.data(), d);
    for (double v : p) body += fmt::format("{:.17g},", v);
    body += fmt::format("{:.17g}\n", log_density(rc.spec, y));
  }
  emit(rc.run.out, metadata_block(base_metadata(rc)) + body);
  return kPass;
}

int cmd_sample(const RunConfig& rc, const Flags& f) {
  const auto s = sample(rc.spec, f.n, *rc.run.seed);
  Metadata m = base_metadata(rc);
  m.emplace_back("draws", std::to_string(s.draws.rows()));
  m.emplace_back("proposals", std::to_string(s.proposals));
  m.emplace_back("acceptance_rate", fmt::format("{:.17g}", s.acceptance_rate()));
  std::string body;
  for (int i = 0; i < rc.spec.dim(); ++i) body += fmt::format("{}y{}", i ? "," : "", i);
  body += '\n';
  for (Eigen::Index r = 0; r < s.draws.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.draws.cols(); ++c)
      body += fmt::format("{}{:.17g}", c ? "," : "", s.draws(r, c));
    body += '\n';
  }
  emit(rc.run.out, metadata_block(m) + body);
  return kPass;
}

int cmd_tail_density(RunConfig rc) {
  if (!rc.run.t_grid) rc.run.t_grid = std::vector<double>{3, 4, 5, 6, 8};
  const Eigen::VectorXd w = vector_or(rc.run.w, rc.spec.dim(), 0.0, "w");
  const auto r = verify_tail_density(rc.spec, w, *rc.run.t_grid,
                                     {rc.run.threshold.value_or(5e-3), Extrapolator::aitken});
  return report_exit(r, rc);
}

int cmd_verify(RunConfig rc) {
  if (!rc.run.t_grid) rc.run.t_grid = std::vector<double>{3, 4, 5, 6};
  const Eigen::VectorXd x = vector_or(rc.run.x, rc.spec.dim(), 0.0, "x");
  const auto r = verify_rapid_variation(rc.spec, x, *rc.run.t_grid,
                                        {rc.run.threshold.value_or(5e-3), Extrapolator::richardson});
  return report_exit(r, rc);
}

int cmd_copula(RunConfig rc, const Flags& f) {
  const int d = rc.spec.dim();
  if (!rc.run.u_grid) rc.run.u_grid = std::vector<double>{1e-4, 1e-5, 1e-6, 1e-7};
  const Eigen::VectorXd w = vector_or(rc.run.w, d, 2.0, "w");
  const Eigen::VectorXd w_ref =
      vector_or(f.w_ref.empty() ? std::nullopt : std::optional(f.w_ref), d, 1.0, "w-ref");
  const double threshold = rc.run.threshold.value_or(0.03);

  const auto form = lambda_u_closed_form(rc.spec);
  const double lambda_target = std::exp(form.log_lambda_u(w) - form.log_lambda_u(w_ref));
  const double b_target = std::exp(form.log_b_u(w) - form.log_b_u(w_ref));

  std::string body = "u,lambda_u_ratio,lambda_u_target,scaling_defect,b_u_ratio,b_u_target\n";
  double lam_err = 0.0, defect = 0.0, b_err = 0.0;
  for (double u : *rc.run.u_grid) {
    const double lam = numeric_lambda_u_ratio(rc.spec, w, w_ref, u);
    defect = scaling_defect_lambda_u(rc.spec, w_ref, f.s, u);
    const double b = numeric_b_u_ratio(rc.spec, w, w_ref, u);
    lam_err = std::abs(lam / lambda_target - 1.0);
    b_err = std::abs(b / b_target - 1.0);
    body += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", u, lam, lambda_target,
                        defect, b, b_target);
  }
  const bool pass = lam_err < threshold && defect < threshold && b_err < threshold;
  Metadata m = base_metadata(rc);
  m.emplace_back("scale", fmt::format("{:.17g}", f.s));
  m.emplace_back("threshold", fmt::format("{:.17g}", threshold));
  m.emplace_back("verdict", pass ? "pass" : "fail");
  emit(rc.run.out, metadata_block(m) + body);
  return pass ? kPass : kFail;
}

std::string sibling_path(const std::string& out, const std::string& name) {
  const std::filesystem::path p(out);
  auto file = p.stem().string() + "." + name + (p.has_extension() ? p.extension().string() : ".csv");
  return (p.parent_path() / file).string();
}

int cmd_example31(RunConfig rc, const Flags& f) {
  if (rc.spec.dim() != 2) throw ShapeError("example31 needs a bivariate spec");
  const double rho = rc.spec.sigma()(0, 1);
  Example31Options opts;
  if (rc.run.t_grid) opts.tail_grid = opts.survival_grid = *rc.run.t_grid;
  if (rc.run.threshold) opts.threshold = *rc.run.threshold;
  if (rc.run.w) opts.w = vector_or(rc.run.w, 2, 1.0, "w");
  if (rc.run.x) opts.x = vector_or(rc.run.x, 2, 1.0, "x");
  (void)f;
  if ((rc.spec.sigma().diagonal().array() != 1.0).any() || (rc.spec.mu().array() != 0.0).any())
    throw InvalidSpec("example31 needs zero location and unit variances");
  const auto bundle = verify_example31(rho, rc.spec.delta(), opts);

  const Metadata meta = base_metadata(rc);
  std::string summary = metadata_block(meta);
  summary += "report,verdict,extrapolated,target,rel_err,threshold\n";
  for (const auto* r : bundle.reports()) {
    summary += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r->name, to_string(r->verdict),
                           r->extrapolated, r->target.value_or(NAN), r->final_rel_error(),
                           r->threshold);
    if (rc.run.out) {
      std::ostringstream os;
      write_report_csv(os, *r, meta);
      emit(sibling_path(*rc.run.out, r->name), os.str());
    }
  }
  emit(rc.run.out, summary);
  return bundle.all_pass() ? kPass : kFail;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Tail asymptotics of skew-elliptical distributions and their copulas", "rapidtail"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "TOML spec/run configuration")->check(CLI::ExistingFile);
  app.add_option("--rho", f.rho, "correlation (overrides the config)");
  app.add_option("--delta", f.delta, "skewness vector, comma separated")->delimiter(',');
  app.add_option("--t-grid", f.t_grid, "probe grid in t")->delimiter(',');
  app.add_option("--u-grid", f.u_grid, "probe grid in u")->delimiter(',');
  app.add_option("--seed", f.seed, "RNG seed");
  app.add_option("--out", f.out, "output path (stdout when omitted)");
  app.add_option("--threshold", f.threshold, "relative pass threshold");

  auto* density = app.add_subcommand("density", "evaluate log f_Y at points");
  density->add_option("--at", f.at, "point y1,y2,... (repeatable)")->required();
  auto* samp = app.add_subcommand("sample", "draw from the distribution (CSV)");
  samp->add_option("--n", f.n, "number of draws")->check(CLI::PositiveNumber);
  auto* tail = app.add_subcommand("tail-density", "tail density convergence report");
  tail->add_option("--w", f.w, "evaluation point")->delimiter(',');
  auto* ver = app.add_subcommand("verify", "rapid-variation convergence report");
  ver->add_option("--x", f.x, "shift point")->delimiter(',');
  auto* cop = app.add_subcommand("copula", "copula tail ratio estimators");
  cop->add_option("--w", f.w, "numerator point")->delimiter(',');
  cop->add_option("--w-ref", f.w_ref, "reference point")->delimiter(',');
  cop->add_option("--s", f.s, "scale for the homogeneity defect")->check(CLI::PositiveNumber);
  auto* ex = app.add_subcommand("example31", "bivariate skew-normal end-to-end check");
  ex->add_option("--w", f.w, "tail density point")->delimiter(',');
  ex->add_option("--x", f.x, "rapid-variation shift")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  auto log = logger();
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    RunConfig rc = resolve(name, f);
    if (name == "density") return cmd_density(rc, f);
    if (name == "sample") return cmd_sample(rc, f);
    if (name == "tail-density") return cmd_tail_density(std::move(rc));
    if (name == "verify") return cmd_verify(std::move(rc));
    if (name == "copula") return cmd_copula(std::move(rc), f);
    return cmd_example31(std::move(rc), f);
  } catch (const NumericFailure& e) {
    log->error("numeric failure: {}", e.what());
    return kNumeric;
  } catch (const InconclusiveEstimate& e) {
    log->error("inconclusive: {}", e.what());
    return kNumeric;
  } catch (const RangeError& e) {
    log->error("out of range: {}", e.what());
    return kNumeric;
  } catch (const Error& e) {
    log->error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    log->error("unexpected failure: {}", e.what());
    return kNumeric;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rapidtail::cli
