#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "confsel/data.hpp"
#include "confsel/error.hpp"

namespace confsel {

namespace csv {

using Row = std::vector<std::string>;

// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends,
// embedded newlines inside quotes.
inline std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
    i = 3;  // UTF-8 BOM
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else if (c == '\n') {
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) fail(ErrorKind::data, "unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline bool is_missing(const std::string& cell) {
  const std::string t = trim(cell);
  return t.empty() || t == "NA";
}

// Strict numeric parse; nullopt for anything that is not a finite number.
inline std::optional<double> to_double(const std::string& cell) {
  const std::string t = trim(cell);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Shortest text that round-trips; at most 17 significant digits.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace csv

struct LoadOptions {
  // Maps two arbitrary treatment labels to (0, 1); default accepts 0/1 only.
  std::optional<std::pair<std::string, std::string>> treatment_labels;
};

inline Dataset load_csv_text(const std::string& text, const std::string& outcome_col,
                             const std::string& treatment_col, const LoadOptions& opt = {}) {
  const auto rows = csv::parse(text);
  if (rows.empty()) fail(ErrorKind::schema, "CSV has no header row");
  const auto& header = rows[0];
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string h = csv::trim(header[j]);
    if (!pos.emplace(h, j).second) fail(ErrorKind::schema, "duplicate column '" + h + "'");
  }
  auto find = [&](const std::string& name) {
    const auto it = pos.find(name);
    if (it == pos.end()) fail(ErrorKind::schema, "missing column '" + name + "'");
    return it->second;
  };
  const std::size_t iy = find(outcome_col);
  const std::size_t id = find(treatment_col);
  if (iy == id) fail(ErrorKind::schema, "outcome and treatment name the same column");
  std::vector<std::size_t> cov_cols;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != iy && j != id) {
      cov_cols.push_back(j);
      names.push_back(csv::trim(header[j]));
    }
  if (cov_cols.empty()) fail(ErrorKind::schema, "no covariate columns");

  std::vector<double> ys, ds, xs;
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    if (row.size() != header.size())
      fail(ErrorKind::schema, where + " has " + std::to_string(row.size()) + " fields, header has " +
                                  std::to_string(header.size()));
    if (std::any_of(row.begin(), row.end(), csv::is_missing)) {
      ++dropped;
      continue;
    }
    auto num = [&](std::size_t j) {
      const auto v = csv::to_double(row[j]);
      if (!v) fail(ErrorKind::data, where + ", column '" + csv::trim(header[j]) +
                                        "': not a finite number ('" + row[j] + "')");
      return *v;
    };
    ys.push_back(num(iy));
    const std::string dl = csv::trim(row[id]);
    double dv = 0.0;
    if (opt.treatment_labels) {
      if (dl == opt.treatment_labels->first) dv = 0.0;
      else if (dl == opt.treatment_labels->second) dv = 1.0;
      else fail(ErrorKind::validation, where + ": treatment label '" + dl + "' is not one of the declared labels");
    } else {
      const auto v = csv::to_double(dl);
      if (!v || (*v != 0.0 && *v != 1.0))
        fail(ErrorKind::validation, where + ": treatment value '" + dl + "' is not 0/1");
      dv = *v;
    }
    ds.push_back(dv);
    for (std::size_t j : cov_cols) xs.push_back(num(j));
  }
  const auto n = static_cast<Eigen::Index>(ys.size());
  const auto p = static_cast<Eigen::Index>(cov_cols.size());
  if (n == 0) fail(ErrorKind::validation, "no complete rows");
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = xs[static_cast<std::size_t>(i * p + j)];
  Dataset out(Eigen::Map<Vector>(ys.data(), n), Eigen::Map<Vector>(ds.data(), n), std::move(x),
              std::move(names), outcome_col, treatment_col);
  out.with_rows_dropped(dropped);
  return out;
}

inline Dataset load_csv(const std::string& path, const std::string& outcome_col,
                        const std::string& treatment_col, const LoadOptions& opt = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::schema, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_csv_text(ss.str(), outcome_col, treatment_col, opt);
}

// Header "y,d,<names>"; values at round-trip precision.
inline std::string to_csv_text(const Dataset& ds) {
  std::string out;
  out += csv::quote(ds.outcome_name()) + "," + csv::quote(ds.treatment_name());
  for (const auto& nm : ds.names()) out += "," + csv::quote(nm);
  out += "\n";
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out += csv::format_double(ds.y()(ii));
    out += ds.d()(ii) != 0.0 ? ",1" : ",0";
    for (Eigen::Index j = 0; j < ds.x().cols(); ++j) {
      out += ",";
      out += csv::format_double(ds.x()(ii, j));
    }
    out += "\n";
  }
  return out;
}

inline void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::schema, "cannot write '" + path + "'");
  out << to_csv_text(ds);
}

}  // namespace confsel
