#pragma once

// Line-delimited JSON: one object per line, UTF-8, blank lines ignored.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "raggs/core/error.hpp"

namespace raggs::io {

using json = nlohmann::json;

struct JsonLine {
  std::size_t line = 0;
  json value;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << data;
  if (!out) throw InvalidInput("write failed for '" + path.string() + "'");
}

inline std::vector<JsonLine> parse_jsonl(const std::string& text, const std::string& source) {
  std::vector<JsonLine> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json v;
    try {
      v = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, n, std::string("invalid JSON: ") + e.what());
    }
    if (!v.is_object()) throw ParseError(source, n, "expected a JSON object");
    out.push_back({n, std::move(v)});
  }
  return out;
}

inline std::vector<JsonLine> read_jsonl(const std::filesystem::path& path) {
  return parse_jsonl(read_file(path), path.string());
}

inline std::string dump_jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump(-1, ' ', false, json::error_handler_t::strict) + "\n";
  return out;
}

/// Parses every line with `R::from_json`, attaching the line number to failures.
template <typename R>
std::vector<R> parse_records(const std::vector<JsonLine>& lines, const std::string& source) {
  std::vector<R> out;
  out.reserve(lines.size());
  for (const auto& l : lines) {
    try {
      out.push_back(R::from_json(l.value));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source, l.line, e.what());
    }
  }
  return out;
}

template <typename R>
std::vector<R> load_records(const std::filesystem::path& path) {
  return parse_records<R>(read_jsonl(path), path.string());
}

template <typename R>
std::string dump_records(const std::vector<R>& records) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(r.to_json());
  return dump_jsonl(rows);
}

template <typename R>
void save_records(const std::filesystem::path& path, const std::vector<R>& records) {
  write_file(path, dump_records(records));
}

}  // namespace raggs::io
