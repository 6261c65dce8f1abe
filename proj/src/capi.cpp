#include "mtpsnmm.h"

#include <cstring>
#include <string>

#include "mtp/analysis.hpp"
#include "mtp/errors.hpp"
#include "mtp/montecarlo.hpp"
#include "mtp/version.hpp"

struct mtpsnmm_panel {
  mtp::Panel panel;
};

struct mtpsnmm_report {
  mtp::ReportDocument doc;
};

namespace {

thread_local std::string g_last_error;

int set_error(const mtp::Error& e) {
  g_last_error = e.what();
  return static_cast<int>(e.code());
}

int set_error(const std::exception& e) {
  g_last_error = e.what();
  return MTPSNMM_ERR_CONFIG;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return MTPSNMM_OK;
  } catch (const mtp::Error& e) {
    return set_error(e);
  } catch (const std::exception& e) {
    return set_error(e);
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int copy_vector(const Eigen::VectorXd& v, double* out, int capacity) {
  if (!out) {
    g_last_error = "null output buffer";
    return MTPSNMM_ERR_CONFIG;
  }
  if (capacity < v.size()) {
    g_last_error = "output buffer too small";
    return MTPSNMM_ERR_CONFIG;
  }
  for (int i = 0; i < v.size(); ++i) out[i] = v[i];
  return MTPSNMM_OK;
}

mtp::AnalysisConfig parse_config(const char* config_json) {
  if (!config_json) throw mtp::ConfigError("config JSON is null");
  nlohmann::json j = nlohmann::json::parse(config_json, nullptr, false);
  if (j.is_discarded()) throw mtp::ConfigError("config is not valid JSON");
  return mtp::AnalysisConfig::from_json(j);
}

// Layout/columns-only parse for panel loading (policy may be absent).
std::pair<mtp::Layout, mtp::ColumnMapping> parse_data_config(const char* config_json) {
  if (!config_json) throw mtp::ConfigError("config JSON is null");
  nlohmann::json j = nlohmann::json::parse(config_json, nullptr, false);
  if (j.is_discarded()) throw mtp::ConfigError("config is not valid JSON");
  if (!j.contains("policy")) j["policy"] = {{"kind", "shift"}, {"delta", 1.0}};
  const mtp::AnalysisConfig cfg = mtp::AnalysisConfig::from_json(j);
  return {cfg.layout, cfg.columns};
}

} // namespace

extern "C" {

const char* mtpsnmm_version(void) { return mtp::kVersion; }

const char* mtpsnmm_last_error(void) { return g_last_error.c_str(); }

int mtpsnmm_panel_read_csv(const char* path, const char* config_json, mtpsnmm_panel** out) {
  return guarded([&] {
    if (!path || !out) throw mtp::ConfigError("null argument");
    auto [layout, columns] = parse_data_config(config_json);
    auto* handle = new mtpsnmm_panel{mtp::ingest_csv(path, columns, layout)};
    *out = handle;
  });
}

int mtpsnmm_panel_parse_csv(const char* text, const char* config_json, mtpsnmm_panel** out) {
  return guarded([&] {
    if (!text || !out) throw mtp::ConfigError("null argument");
    auto [layout, columns] = parse_data_config(config_json);
    auto* handle = new mtpsnmm_panel{mtp::ingest_csv_text(text, "<memory>", columns, layout)};
    *out = handle;
  });
}

int mtpsnmm_panel_n_units(const mtpsnmm_panel* panel) { return panel ? panel->panel.n_units() : 0; }

int mtpsnmm_panel_horizon(const mtpsnmm_panel* panel) { return panel ? panel->panel.horizon() : 0; }

void mtpsnmm_panel_free(mtpsnmm_panel* panel) { delete panel; }

int mtpsnmm_validate(const mtpsnmm_panel* panel, const char* config_json) {
  return guarded([&] {
    if (!panel) throw mtp::ConfigError("null panel");
    mtp::validate_analysis(parse_config(config_json), panel->panel);
  });
}

int mtpsnmm_fit(const mtpsnmm_panel* panel, const char* config_json, mtpsnmm_report** out) {
  return guarded([&] {
    if (!panel || !out) throw mtp::ConfigError("null argument");
    auto* report = new mtpsnmm_report{mtp::run_analysis(parse_config(config_json), panel->panel)};
    *out = report;
  });
}

int mtpsnmm_report_dim(const mtpsnmm_report* report) {
  return report ? static_cast<int>(report->doc.psi.size()) : 0;
}

int mtpsnmm_report_psi(const mtpsnmm_report* report, double* out, int capacity) {
  if (!report) {
    g_last_error = "null report";
    return MTPSNMM_ERR_CONFIG;
  }
  return copy_vector(report->doc.psi, out, capacity);
}

int mtpsnmm_report_se(const mtpsnmm_report* report, double* out, int capacity) {
  if (!report) {
    g_last_error = "null report";
    return MTPSNMM_ERR_CONFIG;
  }
  return copy_vector(report->doc.se, out, capacity);
}

int mtpsnmm_report_vcov(const mtpsnmm_report* report, double* out, int capacity) {
  if (!report) {
    g_last_error = "null report";
    return MTPSNMM_ERR_CONFIG;
  }
  const Eigen::MatrixXd& v = report->doc.vcov;
  const int need = static_cast<int>(v.rows() * v.cols());
  if (!out || capacity < need) {
    g_last_error = "output buffer too small";
    return MTPSNMM_ERR_CONFIG;
  }
  for (int i = 0; i < v.rows(); ++i)
    for (int j = 0; j < v.cols(); ++j) out[i * v.cols() + j] = v(i, j);
  return MTPSNMM_OK;
}

int mtpsnmm_report_json(const mtpsnmm_report* report, char** out) {
  return guarded([&] {
    if (!report || !out) throw mtp::ConfigError("null argument");
    *out = dup_string(report->doc.to_json().dump(2));
  });
}

int mtpsnmm_report_text(const mtpsnmm_report* report, char** out) {
  return guarded([&] {
    if (!report || !out) throw mtp::ConfigError("null argument");
    *out = dup_string(report->doc.text_summary());
  });
}

void mtpsnmm_report_free(mtpsnmm_report* report) { delete report; }

int mtpsnmm_simulate(const char* config_json, char** summary_json, char** table_text, char** replicates_csv) {
  return guarded([&] {
    if (!config_json) throw mtp::ConfigError("config JSON is null");
    nlohmann::json j = nlohmann::json::parse(config_json, nullptr, false);
    if (j.is_discarded()) throw mtp::ConfigError("config is not valid JSON");

    mtp::McConfig cfg;
    cfg.design = mtp::mc_design_from_name(j.value("design", std::string("point")));
    cfg.n = j.value("n", 1000);
    cfg.replicates = j.value("reps", 200);
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
    cfg.folds = j.value("folds", 5);
    cfg.bootstrap = j.value("boot", 0);
    cfg.pt_confounding = j.value("confounding", 1.0);

    const mtp::MonteCarloSummary summary = mtp::run_monte_carlo(cfg);
    if (summary_json) *summary_json = dup_string(summary.to_json().dump(2));
    if (table_text) *table_text = dup_string(summary.table_text());
    if (replicates_csv) *replicates_csv = dup_string(summary.replicates_csv());
  });
}

void mtpsnmm_string_free(char* s) { std::free(s); }

} // extern "C"
