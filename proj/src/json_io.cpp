#include "bihamkit/json_io.hpp"

#include "bihamkit/errors.hpp"

#include <fstream>
#include <iostream>

namespace bihamkit {

namespace {

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("JSON: missing key \"") + key + "\"");
  return j.at(key);
}

Eigen::MatrixXd real_matrix(const Json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) throw DomainError(std::string("JSON: ") + what + " must be a non-empty array of rows");
  const std::size_t m = rows.size();
  const std::size_t n = rows.at(0).is_array() ? rows.at(0).size() : 0;
  if (n == 0) throw DomainError(std::string("JSON: ") + what + " rows must be non-empty arrays");
  Eigen::MatrixXd out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const Json& row = rows.at(i);
    if (!row.is_array() || row.size() != n) throw DomainError(std::string("JSON: ragged rows in ") + what);
    for (std::size_t k = 0; k < n; ++k) {
      if (!row.at(k).is_number()) throw DomainError(std::string("JSON: non-numeric entry in ") + what);
      out(i, k) = row.at(k).get<double>();
    }
  }
  return out;
}

}  // namespace

Json to_json(const CMatrix& X) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Json r = Json::array(), c = Json::array();
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
      r.push_back(X(i, k).real());
      c.push_back(X(i, k).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

Json to_json(const RVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const PhasePoint& x) { return {{"g", to_json(x.g)}, {"J", to_json(x.J)}}; }
Json to_json(const ReducedPoint& y) { return {{"q", to_json(y.q)}, {"J", to_json(y.J)}}; }
Json to_json(const SpinCoordinates& s) {
  return {{"q", to_json(s.q)}, {"p", to_json(s.p)}, {"xi_l", to_json(s.xi_l)}, {"xi_r", to_json(s.xi_r)}};
}
Json to_json(const DoublePoint& x) { return {{"g1", to_json(x.g1)}, {"g2", to_json(x.g2)}}; }

CMatrix matrix_from_json(const Json& j) {
  const Eigen::MatrixXd re = real_matrix(member(j, "re"), "\"re\"");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
  if (j.contains("im")) im = real_matrix(j.at("im"), "\"im\"");
  if (im.rows() != re.rows() || im.cols() != re.cols()) throw DomainError("JSON: \"re\" and \"im\" shapes differ");
  CMatrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

RVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("JSON: expected a non-empty array of numbers");
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) throw DomainError("JSON: non-numeric vector entry");
    v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  }
  return v;
}

PhasePoint phase_point_from_json(const Json& j) {
  PhasePoint x{matrix_from_json(member(j, "g")), matrix_from_json(member(j, "J"))};
  x.validate();
  return x;
}

ReducedPoint reduced_point_from_json(const Json& j) {
  ReducedPoint y{vector_from_json(member(j, "q")), matrix_from_json(member(j, "J"))};
  y.validate();
  return y;
}

SpinCoordinates spin_from_json(const Json& j) {
  SpinCoordinates s{vector_from_json(member(j, "q")), vector_from_json(member(j, "p")),
                    matrix_from_json(member(j, "xi_l")), matrix_from_json(member(j, "xi_r"))};
  s.validate();
  return s;
}

DoublePoint double_point_from_json(const Json& j) {
  DoublePoint x{matrix_from_json(member(j, "g1")), matrix_from_json(member(j, "g2"))};
  x.validate();
  return x;
}

Json read_json(const std::string& path) {
  try {
    if (path == "-") return Json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace bihamkit
