#include "lcs/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lcs {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path, const char* who) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string(who) + ": cannot open " + path);
  return out;
}

}  // namespace

void save_matrix(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out = open_out(path, "save_matrix");
  out << m.rows() << ' ' << m.cols() << " real\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << fmt17(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_matrix: write failed for " + path);
}

void save_matrix(const Eigen::MatrixXcd& m, const std::string& path) {
  std::ofstream out = open_out(path, "save_matrix");
  out << m.rows() << ' ' << m.cols() << " complex\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << fmt17(m(i, j).real()) << ',' << fmt17(m(i, j).imag());
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_matrix: write failed for " + path);
}

LoadedMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path);

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("load_matrix: missing header");
  std::istringstream hs(header);
  long long rows = 0, cols = 0;
  std::string kind = "real";
  if (!(hs >> rows >> cols)) throw std::runtime_error("load_matrix: malformed header");
  hs >> kind;  // optional, defaults to real
  if (rows < 1 || cols < 1) throw std::runtime_error("load_matrix: non-positive shape");
  if (kind != "real" && kind != "complex")
    throw std::runtime_error("load_matrix: unknown kind '" + kind + "'");

  LoadedMatrix out;
  out.is_complex = (kind == "complex");
  const long long total = rows * cols;
  if (out.is_complex) {
    out.cplx.resize(rows, cols);
    std::string tok;
    for (long long idx = 0; idx < total; ++idx) {
      if (!(in >> tok)) throw std::runtime_error("load_matrix: expected more values");
      const auto comma = tok.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error("load_matrix: complex entry missing comma: " + tok);
      double re = 0, im = 0;
      try {
        re = std::stod(tok.substr(0, comma));
        im = std::stod(tok.substr(comma + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("load_matrix: bad complex value: " + tok);
      }
      out.cplx(idx / cols, idx % cols) = {re, im};
    }
  } else {
    out.real.resize(rows, cols);
    double v = 0;
    for (long long idx = 0; idx < total; ++idx) {
      if (!(in >> v)) throw std::runtime_error("load_matrix: expected more values");
      out.real(idx / cols, idx % cols) = v;
    }
  }
  double extra;
  if (in >> extra) throw std::runtime_error("load_matrix: trailing values beyond rows*cols");
  return out;
}

void save_sign_bitmap(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out = open_out(path, "save_sign_bitmap");
  out << "P1\n" << m.cols() << ' ' << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    int line = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (m(i, j) < 0.0 ? '1' : '0');
      // Plain-format lines must stay under 70 characters.
      if (++line == 64) {
        out << '\n';
        line = 0;
      } else {
        out << ' ';
      }
    }
    if (line) out << '\n';
  }
  if (!out) throw std::runtime_error("save_sign_bitmap: write failed for " + path);
}

}  // namespace lcs
