#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "packsell/errors.hpp"
#include "packsell/matrix.hpp"

namespace packsell {
namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::uint64_t parse_count(const std::string& tok, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
  }
  return v;
}

double parse_real(const std::string& tok, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) throw ParseError("expected a number, got '" + tok + "'", line);
  return v;
}

}  // namespace

CooMatrix load_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty input", 0);
  ++lineno;
  const auto banner = split(lowercase(line));
  if (banner.size() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix") {
    throw ParseError("missing '%%MatrixMarket matrix' banner", lineno);
  }
  if (banner[2] != "coordinate") throw ParseError("only coordinate format is supported", lineno);
  const std::string& field = banner[3];
  if (field != "real" && field != "integer" && field != "double") {
    throw ParseError("unsupported field '" + field + "' (real or integer required)", lineno);
  }
  const std::string& symmetry = banner[4];
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError("unsupported symmetry '" + symmetry + "'", lineno);
  }
  const bool symmetric = symmetry == "symmetric";

  std::vector<std::string> size_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    size_line = split(line);
    break;
  }
  if (size_line.size() != 3) throw ParseError("expected 'rows cols entries' size line", lineno);

  CooMatrix coo;
  coo.n_rows = parse_count(size_line[0], lineno);
  coo.n_cols = parse_count(size_line[1], lineno);
  const std::uint64_t declared = parse_count(size_line[2], lineno);
  if (coo.n_rows >= (std::uint64_t{1} << 31) || coo.n_cols >= (std::uint64_t{1} << 31)) {
    throw ParseError("matrix dimensions must be below 2^31", lineno);
  }
  if (symmetric && coo.n_rows != coo.n_cols) throw ParseError("symmetric matrix must be square", lineno);
  coo.entries.reserve(symmetric ? 2 * declared : declared);

  std::uint64_t seen = 0;
  while (seen < declared && std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    const auto tok = split(line);
    if (tok.size() != 3) throw ParseError("expected 'row col value'", lineno);
    const std::uint64_t i = parse_count(tok[0], lineno);
    const std::uint64_t j = parse_count(tok[1], lineno);
    if (i < 1 || i > coo.n_rows || j < 1 || j > coo.n_cols) {
      throw ParseError("index out of declared bounds", lineno);
    }
    const double v = parse_real(tok[2], lineno);
    coo.entries.push_back({static_cast<index_t>(i - 1), static_cast<index_t>(j - 1), v});
    if (symmetric && i != j) {
      coo.entries.push_back({static_cast<index_t>(j - 1), static_cast<index_t>(i - 1), v});
    }
    ++seen;
  }
  if (seen != declared) {
    throw ParseError("expected " + std::to_string(declared) + " entries, found " + std::to_string(seen),
                     lineno);
  }
  coo.canonicalize();
  return coo;
}

CooMatrix load_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << i + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
    }
  }
}

void write_matrix_market_file(const std::string& path, const CsrMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_matrix_market(out, a);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace packsell
