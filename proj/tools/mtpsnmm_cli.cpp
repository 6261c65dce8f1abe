// Command-line front end. Talks to the core exclusively through the C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtpsnmm.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int fail(int code, const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return code;
}

int from_status(int status) {
  switch (status) {
    case MTPSNMM_OK: return 0;
    case MTPSNMM_ERR_DATA: return kExitData;
    case MTPSNMM_ERR_NUMERIC: return kExitNumeric;
    default: return kExitUsage;
  }
}

std::optional<nlohmann::json> load_config_file(const std::string& path, std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot open config '" + path + "'";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) {
    error = "config '" + path + "' is not valid JSON";
    return std::nullopt;
  }
  return j;
}

bool write_file(const std::string& path, const std::string& content, std::string& error) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    error = "cannot write '" + path + "'";
    return false;
  }
  out << content;
  return true;
}

struct ManagedString {
  char* ptr = nullptr;
  ~ManagedString() { mtpsnmm_string_free(ptr); }
};

struct SharedFlags {
  std::string data, config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  std::optional<int> boot;
};

// CLI flags override config fields (flag > config file > default).
nlohmann::json merge_config(const SharedFlags& flags, const nlohmann::json& base) {
  nlohmann::json j = base;
  if (!flags.data.empty()) j["data"] = flags.data;
  if (flags.seed) j["seed"] = *flags.seed;
  if (flags.folds) j["folds"] = *flags.folds;
  if (flags.boot) j["bootstrap"] = *flags.boot;
  return j;
}

int run_fit_or_validate(const SharedFlags& flags, bool fit) {
  std::string error;
  nlohmann::json base;
  if (!flags.config.empty()) {
    auto loaded = load_config_file(flags.config, error);
    if (!loaded) return fail(kExitUsage, error);
    base = *loaded;
  }
  const nlohmann::json config = merge_config(flags, base);
  const std::string data_path = config.value("data", std::string());
  if (data_path.empty()) return fail(kExitUsage, "no data file given (--data or config \"data\")");

  mtpsnmm_panel* panel = nullptr;
  int status = mtpsnmm_panel_read_csv(data_path.c_str(), config.dump().c_str(), &panel);
  if (status != MTPSNMM_OK) return fail(from_status(status), mtpsnmm_last_error());

  if (!fit) {
    status = mtpsnmm_validate(panel, config.dump().c_str());
    mtpsnmm_panel_free(panel);
    if (status != MTPSNMM_OK) return fail(from_status(status), mtpsnmm_last_error());
    std::cout << "ok: " << data_path << " validates against the configuration\n";
    return 0;
  }

  mtpsnmm_report* report = nullptr;
  status = mtpsnmm_fit(panel, config.dump().c_str(), &report);
  mtpsnmm_panel_free(panel);
  if (status != MTPSNMM_OK) return fail(from_status(status), mtpsnmm_last_error());

  ManagedString text, json;
  mtpsnmm_report_text(report, &text.ptr);
  status = mtpsnmm_report_json(report, &json.ptr);
  mtpsnmm_report_free(report);
  if (status != MTPSNMM_OK) return fail(from_status(status), mtpsnmm_last_error());

  std::cout << text.ptr;
  if (!flags.out.empty()) {
    if (!write_file(flags.out, json.ptr, error)) return fail(kExitData, error);
    std::cout << "report written to " << flags.out << "\n";
  } else {
    std::cout << json.ptr << "\n";
  }
  return 0;
}

int run_simulate(const SharedFlags& flags, const std::string& design, int n, int reps, double confounding) {
  nlohmann::json config;
  if (!flags.config.empty()) {
    std::string error;
    auto loaded = load_config_file(flags.config, error);
    if (!loaded) return fail(kExitUsage, error);
    config = *loaded;
  }
  config["design"] = design;
  config["n"] = n;
  config["reps"] = reps;
  if (flags.seed) config["seed"] = *flags.seed;
  if (flags.folds) config["folds"] = *flags.folds;
  if (flags.boot) config["boot"] = *flags.boot;
  config["confounding"] = confounding;

  ManagedString summary, table, csv;
  const int status = mtpsnmm_simulate(config.dump().c_str(), &summary.ptr, &table.ptr, &csv.ptr);
  if (status != MTPSNMM_OK) return fail(from_status(status), mtpsnmm_last_error());

  std::cout << table.ptr;
  if (!flags.out.empty()) {
    std::string error;
    if (!write_file(flags.out + ".summary.json", summary.ptr, error)) return fail(kExitData, error);
    if (!write_file(flags.out + ".summary.txt", table.ptr, error)) return fail(kExitData, error);
    if (!write_file(flags.out + ".replicates.csv", csv.ptr, error)) return fail(kExitData, error);
    std::cout << "wrote " << flags.out << ".summary.{json,txt} and " << flags.out << ".replicates.csv\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("mtpsnmm ") + mtpsnmm_version() +
               " — SNMM estimation of modified treatment policy effects"};
  app.require_subcommand(1);

  SharedFlags flags;
  std::uint64_t seed_value = 0;
  int folds_value = 0, boot_value = 0;

  auto add_shared = [&](CLI::App* cmd, bool with_data) {
    if (with_data) cmd->add_option("--data", flags.data, "CSV panel path");
    cmd->add_option("--config", flags.config, "JSON configuration path");
    cmd->add_option("--out", flags.out, "output path (fit: report JSON; simulate: file prefix)");
    cmd->add_option("--seed", seed_value, "seed override")->each([&](const std::string&) { flags.seed = seed_value; });
    cmd->add_option("--folds", folds_value, "cross-fitting folds override")
        ->each([&](const std::string&) { flags.folds = folds_value; });
    cmd->add_option("--boot", boot_value, "bootstrap replicates override")
        ->each([&](const std::string&) { flags.boot = boot_value; });
  };

  CLI::App* fit = app.add_subcommand("fit", "estimate blip parameters from a CSV panel");
  add_shared(fit, true);

  CLI::App* validate = app.add_subcommand("validate", "check data and configuration without fitting");
  add_shared(validate, true);

  CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo design and write summary tables");
  std::string design = "point";
  int n = 1000, reps = 200;
  double confounding = 1.0;
  add_shared(simulate, false);
  simulate->add_option("--design", design, "point | longitudinal | pt-point | pt-two-period | point-or");
  simulate->add_option("--n", n, "sample size per replicate");
  simulate->add_option("--reps", reps, "number of replicates");
  simulate->add_option("--confounding", confounding, "pt designs: confounder loading on treatment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help
    app.exit(e);
    return kExitUsage;
  }

  if (fit->parsed()) return run_fit_or_validate(flags, true);
  if (validate->parsed()) return run_fit_or_validate(flags, false);
  return run_simulate(flags, design, n, reps, confounding);
}
