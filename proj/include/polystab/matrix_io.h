#pragma once

#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "polystab/polynomial.h"

namespace polystab {

nlohmann::json to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

/// {"nvars": n, "terms": [{"exp": [e₁..e_n], "coef": c}, ...]}
nlohmann::json to_json(const Polynomial<double>& p);
Polynomial<double> polynomial_from_json(const nlohmann::json& j);

/// {"rows": r, "cols": c, "nvars": n, "entries": [[poly, ...], ...]}
nlohmann::json to_json(const MatrixPolynomial<double>& m);
MatrixPolynomial<double> matrix_polynomial_from_json(const nlohmann::json& j);

/// Shortest text that parses back to the identical double.
std::string format_double(double v);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace polystab
