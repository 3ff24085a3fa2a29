// Configuration-driven experiment runner.
//
//   nhtrap_cli <verify-symbols|verify-operators|verify-bsymbols|norms|scaling|report|all>
//              [--config PATH] [--out DIR] [--h-list a,b,...] [--seed N] [--threads N] [--strict]

#include "nhtrap/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace nhtrap;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string h_list;
  std::optional<long> seed;
  int threads = 1;
  bool strict = false;
};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << content;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

std::optional<json> read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  return json::parse(is);
}

class Runner {
 public:
  Runner(ExperimentConfig cfg, const Options& opts)
      : cfg_(std::move(cfg)), opts_(opts), out_(cfg_.out_dir), hash_(config_hash(cfg_)) {}

  /// Runs one suite, writes <name>.json plus extra files; returns success.
  bool suite(const std::string& name) {
    json artifact = {{"suite", name}, {"config_hash", hash_}};
    bool ok = false;
    try {
      const SuiteResult r = dispatch(name);
      ok = r.passed(opts_.strict);
      artifact["data"] = r.data;
      artifact["checks"] = json::array();
      for (const auto& c : r.checks) {
        artifact["checks"].push_back(to_json(c));
        if (!c.passed) {
          const bool fatal = !c.warning_only || opts_.strict;
          std::cerr << (fatal ? "FAILED " : "WARNING ") << name << "/" << c.name << ": " << c.detail
                    << '\n';
        }
      }
      for (const auto& [file, content] : r.files) write_file(out_ / file, content);
    } catch (const std::exception& e) {
      artifact["error"] = e.what();
      std::cerr << "FAILED " << name << ": " << e.what() << '\n';
    }
    artifact["status"] = ok ? "passed" : "failed";
    write_file(out_ / (name + ".json"), artifact.dump(2) + "\n");
    return ok;
  }

  bool report() {
    std::map<std::string, json> artifacts;
    for (const auto& name : suite_names())
      if (auto j = read_json(out_ / (name + ".json"))) artifacts[name] = *j;
    const Report rep = build_report(hash_, artifacts);
    for (const auto& w : rep.warnings) std::cerr << "WARNING " << w << '\n';
    write_file(out_ / "report.json", rep.document.dump(2) + "\n");
    for (const auto& [file, content] : rep.plots) write_file(out_ / "plots" / file, content);
    return !opts_.strict || rep.warnings.empty();
  }

 private:
  SuiteResult dispatch(const std::string& name) {
    if (name == "symbols") return run_verify_symbols(cfg_);
    if (name == "operators") return run_verify_operators(cfg_);
    if (name == "bsymbols") return run_verify_bsymbols(cfg_);
    if (name == "norms") return run_norms(cfg_, opts_.threads);
    if (name == "scaling") return run_scaling(cfg_, opts_.threads);
    throw std::logic_error("unknown suite " + name);
  }

  ExperimentConfig cfg_;
  Options opts_;
  fs::path out_;
  std::string hash_;
};

ExperimentConfig resolve_config(const Options& opts) {
  ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{} : load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (!opts.h_list.empty()) set_config_value(cfg, "sweep.h_list", opts.h_list, "--h-list");
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normally hyperbolic trapping: commutant and resolvent experiments"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options opts;
  app.add_option("--config", opts.config_path, "Experiment config (section.key = value lines)");
  app.add_option("--out", opts.out_dir, "Output directory (overrides output.dir)");
  app.add_option("--h-list", opts.h_list, "Comma-separated h values for the scaling sweep");
  app.add_option("--seed", opts.seed, "Seed for random probes");
  app.add_option("--threads", opts.threads, "Worker threads for independent h values")
      ->check(CLI::PositiveNumber);
  app.add_flag("--strict", opts.strict, "Treat warnings as failures");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"verify-symbols", "Symbol-level commutant decomposition and cutoff identities"},
      {"verify-operators", "Quantization invariants and the operator commutator remainder"},
      {"verify-bsymbols", "b-calculus symbol decompositions and the parabolic threshold"},
      {"norms", "Norm equivalence of the normally isotropic spaces"},
      {"scaling", "Resolvent norm sweep with scaling fits"},
      {"report", "Merge artifacts into report.json and draw plots"},
      {"all", "Run every suite, then report"}};
  for (const auto& [cmd, help] : commands) app.add_subcommand(cmd, help);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    cfg = resolve_config(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  Runner runner(cfg, opts);
  bool ok = true;
  if (command == "verify-symbols") ok = runner.suite("symbols");
  else if (command == "verify-operators") ok = runner.suite("operators");
  else if (command == "verify-bsymbols") ok = runner.suite("bsymbols");
  else if (command == "norms") ok = runner.suite("norms");
  else if (command == "scaling") ok = runner.suite("scaling");
  else if (command == "report") ok = runner.report();
  else {
    for (const auto& name : suite_names()) ok = runner.suite(name) && ok;
    ok = runner.report() && ok;
  }
  return ok ? 0 : 1;
}
