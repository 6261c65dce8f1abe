#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <json.hpp>

namespace mtp {

// One term of a linear-in-parameters design over a scalar treatment a and a
// flat history vector h. Histories never carry automatic features; every
// nonlinearity must be declared here.
struct BasisTerm {
  enum class Kind { intercept, h, hh, a, ah, aa };
  Kind kind = Kind::intercept;
  int j = -1;
  int k = -1;

  static BasisTerm intercept() { return {Kind::intercept, -1, -1}; }
  static BasisTerm hist(int j) { return {Kind::h, j, -1}; }
  static BasisTerm hist2(int j, int k) { return {Kind::hh, j, k}; }
  static BasisTerm treat() { return {Kind::a, -1, -1}; }
  static BasisTerm treat_hist(int j) { return {Kind::ah, j, -1}; }
  static BasisTerm treat2() { return {Kind::aa, -1, -1}; }
};

class LinearBasis {
public:
  LinearBasis() = default;
  explicit LinearBasis(std::vector<BasisTerm> terms) : terms_(std::move(terms)) {}

  int dim() const { return static_cast<int>(terms_.size()); }
  bool empty() const { return terms_.empty(); }
  const std::vector<BasisTerm>& terms() const { return terms_; }

  bool uses_treatment() const;
  int max_history_index() const;

  void eval(double a, std::span<const double> h, double* out) const;
  Eigen::VectorXd eval(double a, std::span<const double> h) const;

  nlohmann::json to_json() const;
  static LinearBasis from_json(const nlohmann::json& spec);

  // (1, h_j1, h_j2, ...) — the usual blip basis over selected history entries.
  static LinearBasis intercept_and(const std::vector<int>& history_indices);

  bool operator==(const LinearBasis& other) const;

private:
  std::vector<BasisTerm> terms_;
};

} // namespace mtp
