#include "report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "owbf/errors.hpp"

namespace owbf::cli {

namespace {

// JSON has no infinity; spell non-finite numbers out.
Record json_safe(const Record& v) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    return v;
  }
  if (v.is_structured()) {
    Record out = v;
    for (auto it = out.begin(); it != out.end(); ++it) *it = json_safe(*it);
    return out;
  }
  return v;
}

void flatten(const Record& v, const std::string& prefix, std::vector<std::pair<std::string, Record>>& cells) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), cells);
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + std::to_string(i + 1), cells);
  } else {
    cells.emplace_back(prefix, v);
  }
}

std::string cell_text(const Record& v, bool human) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    if (std::isnan(d)) return "nan";
    return human ? fmt::format("{:.6g}", d) : fmt::format("{}", d);
  }
  return v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "text") return Format::text;
  if (name == "csv") return Format::csv;
  if (name == "jsonl" || name == "json-lines") return Format::jsonl;
  throw ParameterError("unknown report format '" + std::string(name) + "' (text, csv, jsonl)");
}

Report::~Report() {
  try {
    flush();
  } catch (...) {
  }
}

void Report::add(const Record& record) {
  if (format_ == Format::jsonl) {
    out_ << json_safe(record).dump() << '\n';
    return;
  }
  pending_.push_back(record);
}

void Report::flush() {
  if (pending_.empty()) {
    out_.flush();
    return;
  }
  std::vector<std::vector<std::pair<std::string, Record>>> rows;
  std::vector<std::string> columns;
  for (const Record& r : pending_) {
    rows.emplace_back();
    flatten(r, "", rows.back());
    for (const auto& [key, value] : rows.back()) {
      if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
    }
  }
  pending_.clear();
  auto lookup = [](const std::vector<std::pair<std::string, Record>>& row, const std::string& key) {
    for (const auto& [k, v] : row) {
      if (k == key) return v;
    }
    return Record();
  };

  if (format_ == Format::csv) {
    for (std::size_t c = 0; c < columns.size(); ++c) out_ << (c ? "," : "") << csv_escape(columns[c]);
    out_ << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        out_ << (c ? "," : "") << csv_escape(cell_text(lookup(row, columns[c]), false));
      }
      out_ << '\n';
    }
  } else if (rows.size() == 1) {
    std::size_t width = 0;
    for (const auto& [k, v] : rows[0]) width = std::max(width, k.size());
    for (const auto& [k, v] : rows[0]) out_ << fmt::format("{:<{}}  {}\n", k, width, cell_text(v, true));
  } else {
    std::vector<std::vector<std::string>> table;
    std::vector<std::size_t> widths;
    for (const auto& c : columns) widths.push_back(c.size());
    for (const auto& row : rows) {
      table.emplace_back();
      for (std::size_t c = 0; c < columns.size(); ++c) {
        table.back().push_back(cell_text(lookup(row, columns[c]), true));
        widths[c] = std::max(widths[c], table.back().back().size());
      }
    }
    auto emit = [&](const std::vector<std::string>& cells) {
      std::string line;
      for (std::size_t c = 0; c < cells.size(); ++c) line += fmt::format("{:<{}}  ", cells[c], widths[c]);
      line.erase(line.find_last_not_of(' ') + 1);
      out_ << line << '\n';
    };
    emit(columns);
    for (const auto& line : table) emit(line);
  }
  out_.flush();
}

}  // namespace owbf::cli
