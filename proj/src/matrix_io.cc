#include "polystab/matrix_io.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "polystab/errors.h"

namespace polystab {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("matrix must be an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const auto cols = j.front().size();
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw FormatError("ragged matrix row " + std::to_string(i));
    }
    for (size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json to_json(const Polynomial<double>& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    terms.push_back({{"exp", m.exponents()}, {"coef", c}});
  }
  return {{"nvars", p.nvars()}, {"terms", terms}};
}

Polynomial<double> polynomial_from_json(const json& j) {
  try {
    const int nvars = j.at("nvars").get<int>();
    Polynomial<double> p(nvars);
    for (const auto& t : j.at("terms")) {
      auto exps = t.at("exp").get<std::vector<int>>();
      if (static_cast<int>(exps.size()) != nvars) {
        throw FormatError("term exponent length differs from nvars");
      }
      p.add_term(Monomial(std::move(exps)), t.at("coef").get<double>());
    }
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad polynomial JSON: ") + e.what());
  }
}

json to_json(const MatrixPolynomial<double>& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"nvars", m.nvars()},
          {"entries", rows}};
}

MatrixPolynomial<double> matrix_polynomial_from_json(const json& j) {
  try {
    MatrixPolynomial<double> m(j.at("rows").get<int>(), j.at("cols").get<int>(),
                               j.at("nvars").get<int>());
    const auto& entries = j.at("entries");
    if (static_cast<int>(entries.size()) != m.rows()) {
      throw FormatError("matrix polynomial row count mismatch");
    }
    for (int i = 0; i < m.rows(); ++i) {
      if (static_cast<int>(entries[i].size()) != m.cols()) {
        throw FormatError("matrix polynomial column count mismatch");
      }
      for (int k = 0; k < m.cols(); ++k) {
        m(i, k) = polynomial_from_json(entries[i][k]);
        m(i, k).check_nvars(Polynomial<double>(m.nvars()));
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad matrix polynomial JSON: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

}  // namespace polystab
