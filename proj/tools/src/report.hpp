#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string_view>
#include <vector>

namespace owbf::cli {

enum class Format { text, csv, jsonl };

Format parse_format(std::string_view name);

using Record = nlohmann::ordered_json;

/// Collects flat-ish records and prints them in one of three layouts.
/// JSON lines go out as they arrive; CSV and text need every record first
/// because columns are the union of keys in first-seen order. Nested objects
/// and arrays become dotted / numbered columns in CSV and text.
class Report {
 public:
  Report(Format format, std::ostream& out) : format_(format), out_(out) {}
  ~Report();

  void add(const Record& record);
  void flush();

 private:
  Format format_;
  std::ostream& out_;
  std::vector<Record> pending_;
};

}  // namespace owbf::cli
