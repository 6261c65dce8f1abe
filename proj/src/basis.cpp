#include "mtp/basis.hpp"

#include "mtp/errors.hpp"

namespace mtp {

namespace {

const char* kind_name(BasisTerm::Kind k) {
  switch (k) {
    case BasisTerm::Kind::intercept: return "intercept";
    case BasisTerm::Kind::h: return "h";
    case BasisTerm::Kind::hh: return "hh";
    case BasisTerm::Kind::a: return "a";
    case BasisTerm::Kind::ah: return "ah";
    case BasisTerm::Kind::aa: return "aa";
  }
  return "?";
}

BasisTerm::Kind kind_from_name(const std::string& s) {
  if (s == "intercept" || s == "1") return BasisTerm::Kind::intercept;
  if (s == "h") return BasisTerm::Kind::h;
  if (s == "hh") return BasisTerm::Kind::hh;
  if (s == "a") return BasisTerm::Kind::a;
  if (s == "ah") return BasisTerm::Kind::ah;
  if (s == "aa") return BasisTerm::Kind::aa;
  throw ConfigError("unknown basis term kind '" + s + "'");
}

} // namespace

bool LinearBasis::uses_treatment() const {
  for (const auto& t : terms_) {
    if (t.kind == BasisTerm::Kind::a || t.kind == BasisTerm::Kind::ah || t.kind == BasisTerm::Kind::aa) return true;
  }
  return false;
}

int LinearBasis::max_history_index() const {
  int m = -1;
  for (const auto& t : terms_) {
    if (t.kind == BasisTerm::Kind::h || t.kind == BasisTerm::Kind::ah) m = std::max(m, t.j);
    if (t.kind == BasisTerm::Kind::hh) m = std::max(m, std::max(t.j, t.k));
  }
  return m;
}

void LinearBasis::eval(double a, std::span<const double> h, double* out) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const BasisTerm& t = terms_[i];
    switch (t.kind) {
      case BasisTerm::Kind::intercept: out[i] = 1.0; break;
      case BasisTerm::Kind::h: out[i] = h[t.j]; break;
      case BasisTerm::Kind::hh: out[i] = h[t.j] * h[t.k]; break;
      case BasisTerm::Kind::a: out[i] = a; break;
      case BasisTerm::Kind::ah: out[i] = a * h[t.j]; break;
      case BasisTerm::Kind::aa: out[i] = a * a; break;
    }
  }
}

Eigen::VectorXd LinearBasis::eval(double a, std::span<const double> h) const {
  Eigen::VectorXd v(dim());
  eval(a, h, v.data());
  return v;
}

nlohmann::json LinearBasis::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : terms_) {
    nlohmann::json e;
    e["kind"] = kind_name(t.kind);
    if (t.j >= 0) e["j"] = t.j;
    if (t.k >= 0) e["k"] = t.k;
    arr.push_back(e);
  }
  return arr;
}

LinearBasis LinearBasis::from_json(const nlohmann::json& spec) {
  if (!spec.is_array()) throw ConfigError("basis spec must be an array of terms");
  std::vector<BasisTerm> terms;
  for (const auto& e : spec) {
    BasisTerm t;
    t.kind = kind_from_name(e.at("kind").get<std::string>());
    t.j = e.value("j", -1);
    t.k = e.value("k", -1);
    const bool needs_j = t.kind == BasisTerm::Kind::h || t.kind == BasisTerm::Kind::hh || t.kind == BasisTerm::Kind::ah;
    if (needs_j && t.j < 0) throw ConfigError("basis term missing history index j");
    if (t.kind == BasisTerm::Kind::hh && t.k < 0) throw ConfigError("basis term 'hh' missing index k");
    terms.push_back(t);
  }
  if (terms.empty()) throw ConfigError("basis spec must contain at least one term");
  return LinearBasis(std::move(terms));
}

LinearBasis LinearBasis::intercept_and(const std::vector<int>& history_indices) {
  std::vector<BasisTerm> terms;
  terms.push_back(BasisTerm::intercept());
  for (int j : history_indices) terms.push_back(BasisTerm::hist(j));
  return LinearBasis(std::move(terms));
}

bool LinearBasis::operator==(const LinearBasis& other) const {
  if (terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].kind != other.terms_[i].kind || terms_[i].j != other.terms_[i].j || terms_[i].k != other.terms_[i].k)
      return false;
  }
  return true;
}

} // namespace mtp
