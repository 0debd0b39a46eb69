// bellctl: run, enumerate, analyze and size CHSH game experiments.
//
// Exit codes:
//   0  success
//   1  file could not be read or written
//   2  bad usage, config, log file or argument domain
//   3  structural violation (signaling strategy with enforcement on)
//   4  unexpected internal error

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bell/errors.hpp"
#include "bell/io.hpp"
#include "bell/report.hpp"
#include "bell/stats.hpp"
#include "bell/text.hpp"

namespace {

enum Exit : int { kOk = 0, kIoError = 1, kInputError = 2, kStructural = 3, kInternal = 4 };

constexpr const char* kCapEnv = "BELLCTL_EXACT_SEARCH_CAP";

struct Options {
  std::string format = "text";
  std::string config_path;
  std::string out_path;
  std::string report_path;
  std::string log_path;
  std::vector<double> alphas;
  double rate = 0.0;
  double alpha = 0.05;
  std::uint64_t cap = 0;
};

bool json_output(const Options& o) { return o.format == "json"; }

std::vector<double> alphas_or_default(const Options& o) {
  return o.alphas.empty() ? std::vector<double>{0.05} : o.alphas;
}

int cmd_run(const Options& o) {
  const auto config = bell::io::load_config(o.config_path);
  bell::ExperimentLog log;
  try {
    log = bell::run_experiment(config);
  } catch (const bell::ExperimentAborted& e) {
    std::cerr << "bellctl: " << e.what() << "\n";
    try {
      std::rethrow_exception(e.cause());
    } catch (const bell::StructuralViolation&) {
      return kStructural;
    } catch (...) {
      return kInternal;
    }
  }
  bell::io::write_log(log, o.out_path);

  const auto alphas = alphas_or_default(o);
  const auto test = bell::stats::analyze_log(log, alphas);
  const std::string rendered = json_output(o) ? bell::report::to_json(test).dump(2) + "\n"
                                              : bell::report::to_text(test);
  std::cout << rendered;
  if (!o.report_path.empty()) {
    std::ofstream out(o.report_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + o.report_path + " for writing");
    out << rendered;
  }
  return kOk;
}

int cmd_enumerate(const Options& o) {
  std::cout << (json_output(o) ? bell::report::enumeration_json().dump(2) + "\n"
                               : bell::report::enumeration_text());
  return kOk;
}

int cmd_analyze(const Options& o) {
  const auto log = bell::io::read_log(o.log_path);
  const auto alphas = alphas_or_default(o);
  const auto test = bell::stats::analyze_log(log, alphas);
  const auto signaling = bell::stats::no_signaling_check(log);
  const auto audit = bell::report::try_audit(log);

  if (json_output(o)) {
    nlohmann::json j = {{"test", bell::report::to_json(test)},
                        {"no_signaling", bell::report::to_json(signaling)}};
    if (const auto* r = std::get_if<bell::AuditReport>(&audit)) {
      j["audit"] = bell::report::to_json(*r);
    } else {
      j["audit"] = {{"verdict", "inapplicable"}, {"reason", std::get<std::string>(audit)}};
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << bell::report::to_text(test) << bell::report::to_text(signaling);
    if (const auto* r = std::get_if<bell::AuditReport>(&audit)) {
      std::cout << bell::report::to_text(*r);
    } else {
      std::cout << "spacetime audit\n  verdict          inapplicable ("
                << std::get<std::string>(audit) << ")\n";
    }
  }
  return kOk;
}

std::uint64_t search_cap(const Options& o) {
  if (o.cap) return o.cap;
  if (const char* env = std::getenv(kCapEnv)) {
    auto v = bell::text::parse_uint(env);
    if (!v || *v == 0) throw std::invalid_argument(std::string(kCapEnv) + " must be a positive integer");
    return *v;
  }
  return bell::stats::kDefaultExactSearchCap;
}

int cmd_power(const Options& o) {
  const auto r = bell::stats::required_rounds(o.rate, o.alpha, bell::stats::kClassicalBound,
                                              search_cap(o));
  std::cout << (json_output(o) ? bell::report::to_json(r).dump(2) + "\n" : bell::report::to_text(r));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHSH game laboratory: play strategies, analyze logs, size experiments"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", o.config_path, "Config file")->required();
  run->add_option("-o,--out", o.out_path, "Log file to write")->required();
  run->add_option("--report", o.report_path, "Also write the test report here");
  run->add_option("--alpha", o.alphas, "Significance levels (default 0.05)");

  auto* enumerate = app.add_subcommand("enumerate", "List the 16 deterministic strategies");

  auto* analyze = app.add_subcommand("analyze", "Analyze a log file");
  analyze->add_option("log", o.log_path, "Log file")->required();
  analyze->add_option("--alpha", o.alphas, "Significance levels (default 0.05)");

  auto* power = app.add_subcommand("power", "Rounds needed to beat 3/4 at a given rate");
  power->add_option("--rate", o.rate, "Assumed win rate")->required();
  power->add_option("--alpha", o.alpha, "Significance level")->capture_default_str();
  power->add_option("--cap", o.cap,
                    std::string("Exact search cap (default 1000000, or $") + kCapEnv + ")");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*run) return cmd_run(o);
    if (*enumerate) return cmd_enumerate(o);
    if (*analyze) return cmd_analyze(o);
    if (*power) return cmd_power(o);
  } catch (const bell::StructuralViolation& e) {
    std::cerr << "bellctl: structural violation: " << e.what() << "\n";
    return kStructural;
  } catch (const bell::ParseError& e) {
    std::cerr << "bellctl: " << e.what() << "\n";
    return kInputError;
  } catch (const bell::ConfigError& e) {
    std::cerr << "bellctl: config error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bellctl: " << e.what() << "\n";
    return kInputError;
  } catch (const std::runtime_error& e) {
    std::cerr << "bellctl: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "bellctl: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
