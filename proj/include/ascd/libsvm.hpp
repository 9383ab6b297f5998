#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ascd/dataset.hpp"
#include "ascd/error.hpp"

namespace ascd {

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  if (s.size() > 1 && s[0] == '+' && s[1] != '-') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

/// Reads `<label> <idx>:<val> ...` lines with 1-based increasing indices.
/// Blank lines are skipped. d is the largest index unless `d_override` is set.
inline Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> d_override = std::nullopt) {
  std::vector<std::vector<Entry>> cols;
  std::vector<double> y;
  std::size_t d = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    double label;
    if (!detail::parse_double(tok, label)) throw ParseError(lineno, "malformed label '" + tok + "'");
    std::vector<Entry> col;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError(lineno, "malformed token '" + tok + "'");
      std::size_t idx;
      double val;
      if (!detail::parse_index(std::string_view(tok).substr(0, colon), idx) || idx == 0 ||
          !detail::parse_double(std::string_view(tok).substr(colon + 1), val))
        throw ParseError(lineno, "malformed token '" + tok + "'");
      if (!col.empty() && idx - 1 <= col.back().index)
        throw ParseError(lineno, "feature indices must be strictly increasing");
      col.push_back({idx - 1, val});
      if (idx > d) d = idx;
    }
    std::erase_if(col, [](const Entry& e) { return e.value == 0.0; });
    cols.push_back(std::move(col));
    y.push_back(label);
  }
  if (cols.empty()) throw InvalidArgument("empty LIBSVM input");
  if (d_override) {
    if (*d_override < d) throw InvalidArgument("feature count override smaller than largest index");
    d = *d_override;
  }
  return Dataset{SparseMatrix::from_columns(d, cols), std::move(y)};
}

inline Dataset read_libsvm_file(const std::string& path, std::optional<std::size_t> d_override = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_libsvm(in, d_override);
}

inline void write_libsvm(std::ostream& out, const Dataset& ds) {
  out << std::setprecision(17);
  for (std::size_t j = 0; j < ds.n(); ++j) {
    out << ds.y[j];
    for (const auto& e : ds.X.col(j)) out << ' ' << (e.index + 1) << ':' << e.value;
    out << '\n';
  }
}

}  // namespace ascd
