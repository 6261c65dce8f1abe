#pragma once

#include <string>
#include <vector>

#include "mtp/panel.hpp"

namespace mtp {

// Column mapping for CSV panels.
//  point / pt-point (wide, one row per unit): id, covariates..., treatment,
//    outcome [, baseline_outcome for pt-point].
//  longitudinal / pt-longitudinal (long, one row per unit-time): id, time,
//    covariates..., treatment, outcome. The outcome on row t is the one
//    measured at the end of period t (Y_{t+1}); exchangeability layouts use
//    the last row's value as the terminal outcome, pt layouts use all of
//    them plus baseline_outcome (constant within unit) for Y_0.
struct ColumnMapping {
  std::string id = "id";
  std::string time = "t";
  std::string treatment = "A";
  std::string outcome = "Y";
  std::string baseline_outcome; // pt layouts only
  std::vector<std::string> covariates;
};

Panel ingest_csv(const std::string& path, const ColumnMapping& mapping, Layout layout);

// Parses a full CSV text instead of a file (used by the C API and tests).
Panel ingest_csv_text(const std::string& text, const std::string& origin, const ColumnMapping& mapping, Layout layout);

} // namespace mtp
