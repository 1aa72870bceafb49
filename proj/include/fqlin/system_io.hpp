#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "fqlin/ensemble.hpp"
#include "fqlin/errors.hpp"

namespace fqlin {

// Text format:
//   fqlin q=<q> n=<n> k=<k> m=<m>
//   y=<code> <pos>:<code> ... <pos>:<code>     (positions 1-based, ascending)
//   pin <pos>                                   (pinning row x_pos = 0)
// m counts every row line, pinning rows included.

inline void write_system(std::ostream& out, const SparseLinearSystem& sys) {
  out << "fqlin q=" << sys.q() << " n=" << sys.n << " k=" << sys.k << " m=" << sys.m() << '\n';
  for (const auto& row : sys.rows) {
    if (row.pinned) {
      out << "pin " << row.positions[0] + 1 << '\n';
      continue;
    }
    out << "y=" << unsigned{row.rhs.code};
    for (std::size_t h = 0; h < row.positions.size(); ++h)
      out << ' ' << row.positions[h] + 1 << ':' << unsigned{row.coeffs[h].code};
    out << '\n';
  }
}

inline void write_system(const std::filesystem::path& path, const SparseLinearSystem& sys) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_system(out, sys);
}

namespace detail {

inline unsigned long parse_number(const std::string& token, std::size_t line, const char* what) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(line, std::string("expected unsigned integer for ") + what + ", got '" + token + "'");
  try {
    return std::stoul(token);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("number out of range for ") + what);
  }
}

inline unsigned long parse_keyed(const std::string& token, const std::string& key, std::size_t line) {
  if (token.rfind(key + "=", 0) != 0) throw ParseError(line, "expected " + key + "=<value>, got '" + token + "'");
  return parse_number(token.substr(key.size() + 1), line, key.c_str());
}

}  // namespace detail

/// Parses a system; if expected_q is given, a different header q is a FieldMismatch.
inline SparseLinearSystem read_system(std::istream& in, std::optional<unsigned> expected_q = std::nullopt) {
  std::string text;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, text)) {
      ++line_no;
      if (!text.empty() && text.back() == '\r') text.pop_back();
      if (!text.empty()) return true;
    }
    return false;
  };

  if (!next_line()) throw ParseError(1, "missing header");
  std::istringstream header(text);
  std::string magic, tq, tn, tk, tm, extra;
  header >> magic >> tq >> tn >> tk >> tm;
  if (magic != "fqlin" || tm.empty() || (header >> extra)) throw ParseError(line_no, "malformed header");
  const auto q = detail::parse_keyed(tq, "q", line_no);
  const auto n = detail::parse_keyed(tn, "n", line_no);
  const auto k = detail::parse_keyed(tk, "k", line_no);
  const auto m = detail::parse_keyed(tm, "m", line_no);
  if (expected_q && *expected_q != q)
    throw FieldMismatch("file has q=" + std::to_string(q) + ", expected q=" + std::to_string(*expected_q));

  SparseLinearSystem sys;
  try {
    sys.field = make_field(static_cast<unsigned>(q));
  } catch (const NotAPrimePower&) {
    throw ParseError(line_no, "q=" + std::to_string(q) + " is not a prime power in [2, 256]");
  }
  sys.n = n;
  sys.k = static_cast<unsigned>(k);
  sys.rows.reserve(m);

  auto parse_code = [&](const std::string& token, bool nonzero) {
    const auto c = detail::parse_number(token, line_no, "field code");
    if (c >= q) throw FieldMismatch("line " + std::to_string(line_no) + ": code " + token + " not in F_" + std::to_string(q));
    if (nonzero && c == 0) throw ParseError(line_no, "coefficient code 0");
    return Element{static_cast<std::uint8_t>(c)};
  };
  auto parse_pos = [&](const std::string& token) {
    const auto p = detail::parse_number(token, line_no, "position");
    if (p < 1 || p > n) throw ParseError(line_no, "position " + token + " outside 1.." + std::to_string(n));
    return static_cast<std::uint32_t>(p - 1);
  };

  for (std::size_t i = 0; i < m; ++i) {
    if (!next_line()) throw ParseError(line_no + 1, "expected " + std::to_string(m) + " rows, found " + std::to_string(i));
    std::istringstream ls(text);
    std::string first;
    ls >> first;
    SparseRow row;
    if (first == "pin") {
      std::string tp;
      if (!(ls >> tp) || (ls >> extra)) throw ParseError(line_no, "malformed pin row");
      row.positions = {parse_pos(tp)};
      row.coeffs = {FiniteField::one()};
      row.rhs = FiniteField::zero();
      row.pinned = true;
    } else {
      if (first.rfind("y=", 0) != 0) throw ParseError(line_no, "row must start with y=<code> or pin");
      row.rhs = parse_code(first.substr(2), false);
      std::string entry;
      while (ls >> entry) {
        const auto colon = entry.find(':');
        if (colon == std::string::npos) throw ParseError(line_no, "expected <pos>:<code>, got '" + entry + "'");
        const auto pos = parse_pos(entry.substr(0, colon));
        if (!row.positions.empty() && pos <= row.positions.back())
          throw ParseError(line_no, "positions must be strictly increasing");
        row.positions.push_back(pos);
        row.coeffs.push_back(parse_code(entry.substr(colon + 1), true));
      }
      if (row.positions.size() != k)
        throw ParseError(line_no, "row has " + std::to_string(row.positions.size()) + " entries, expected k=" + std::to_string(k));
    }
    sys.rows.push_back(std::move(row));
  }
  if (next_line()) throw ParseError(line_no, "trailing content after " + std::to_string(m) + " rows");
  return sys;
}

inline SparseLinearSystem read_system(const std::filesystem::path& path, std::optional<unsigned> expected_q = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_system(in, expected_q);
}

}  // namespace fqlin
