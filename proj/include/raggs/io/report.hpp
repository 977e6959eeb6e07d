#pragma once

// Renders a run manifest's stage outputs as aligned text, CSV or JSON.
// Sections whose stage did not complete are omitted with a notice.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "raggs/core/error.hpp"
#include "raggs/io/jsonl.hpp"
#include "raggs/io/manifest.hpp"

namespace raggs::io {

enum class ReportFormat { Table, Csv, Json };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "table") return ReportFormat::Table;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw InvalidInput("unknown report format '" + s + "' (table, csv, json)");
}

struct ReportTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<json>> rows;
};

struct Report {
  std::string run_id;
  std::string status;
  std::vector<ReportTable> tables;
  std::vector<std::string> notices;
};

namespace detail {

inline std::vector<json> read_rows(const std::filesystem::path& ws, const StageEntry& s, const std::string& file) {
  for (const auto& o : s.outputs)
    if (o.path.size() >= file.size() && o.path.compare(o.path.size() - file.size(), file.size(), file) == 0) {
      std::vector<json> out;
      for (auto& l : read_jsonl(ws / o.path)) out.push_back(std::move(l.value));
      return out;
    }
  throw IntegrityError("stage '" + s.name + "' has no output '" + file + "'");
}

inline std::string cell_text(const json& v) {
  if (v.is_null()) return "NA";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v.get<double>());
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return csv_escape(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

inline const StageEntry* completed_stage(const Manifest& m, const std::string& name, Report& r) {
  const auto* s = m.stage(name);
  if (!s) {
    r.notices.push_back("section '" + name + "' omitted: stage not run");
    return nullptr;
  }
  if (!s->completed()) {
    r.notices.push_back("section '" + name + "' omitted: stage failed (" + s->error + ")");
    return nullptr;
  }
  return s;
}

}  // namespace detail

/// Collects the report tables from a manifest's stage outputs.
inline Report build_report(const Manifest& m, const std::filesystem::path& ws) {
  Report r{m.run_id, m.status, {}, {}};
  std::vector<std::size_t> ks;
  if (m.config.contains("ks")) ks = m.config["ks"].get<std::vector<std::size_t>>();

  if (const auto* s = detail::completed_stage(m, "score", r)) {
    // One row per system; N-Recall4+ / N-Recall5 / RA-nWG at each K.
    std::map<std::string, std::map<std::string, json>> by_system;
    std::map<std::string, std::size_t> valid;
    for (const auto& row : detail::read_rows(ws, *s, "score/summary.jsonl")) {
      const std::string sys = row["system"];
      by_system[sys][row["metric"].get<std::string>() + "@" + std::to_string(row["k"].get<std::size_t>())] = row["mean"];
      if (row["metric"] == "RA-nWG") valid[sys] = std::max(valid[sys], row["valid_count"].get<std::size_t>());
    }
    ReportTable t{"metrics", {"system"}, {}};
    for (auto k : ks)
      for (const char* name : {"N-Recall4+", "N-Recall5", "RA-nWG"}) t.header.push_back(name + std::string("@") + std::to_string(k));
    t.header.push_back("valid_queries");
    for (const auto& [sys, vals] : by_system) {
      std::vector<json> row{sys};
      for (std::size_t i = 1; i + 1 < t.header.size(); ++i) {
        auto it = vals.find(t.header[i]);
        row.push_back(it == vals.end() ? json(nullptr) : it->second);
      }
      row.push_back(valid[sys]);
      t.rows.push_back(std::move(row));
    }
    if (t.rows.empty()) r.notices.push_back("metrics: no scored queries");
    r.tables.push_back(std::move(t));
  }

  if (const auto* s = detail::completed_stage(m, "proc", r)) {
    ReportTable t{"proc", {"system", "metric", "k", "actual", "proc", "percent_proc", "headroom", "valid_queries"}, {}};
    for (const auto& row : detail::read_rows(ws, *s, "proc/summary.jsonl"))
      t.rows.push_back({row["system"], row["metric"], row["k"], row["actual"], row["ceiling"], row["percent_proc"],
                        row["headroom"], row["valid_count"]});
    r.tables.push_back(std::move(t));
  }

  if (const auto* s = detail::completed_stage(m, "clq", r)) {
    if (s->outputs.empty()) {
      r.notices.push_back("section 'clq' omitted: " + s->summary.value("skipped", std::string("no outputs")));
    } else {
      ReportTable t{"clq", {"config_id", "k", "cost", "latency_p50", "RA-nWG@10", "RA-nWG@30", "efficiency",
                            "on_frontier", "slo_rank"}, {}};
      for (const auto& row : detail::read_rows(ws, *s, "clq/points.jsonl")) {
        const auto& q = row["quality"];
        t.rows.push_back({row["config_id"], row["k"], row["cost"], row["latency_p50"],
                          q.contains("RA-nWG@10") ? q["RA-nWG@10"] : json(nullptr),
                          q.contains("RA-nWG@30") ? q["RA-nWG@30"] : json(nullptr), row["efficiency"],
                          row["on_frontier"], row.contains("slo_rank") ? row["slo_rank"] : json(nullptr)});
      }
      r.tables.push_back(std::move(t));
    }
  }

  if (m.stage("diagnose")) {
    if (const auto* s = detail::completed_stage(m, "diagnose", r)) {
      ReportTable t{"diagnose", {"ablation", "language", "provider", "delta_delta_percent", "mean_abs_delta",
                                 "included", "below_floor"}, {}};
      for (const auto& row : detail::read_rows(ws, *s, "diagnose/delta.jsonl"))
        t.rows.push_back({row["ablation"], row["language"], row["provider"], row["mean_percent"],
                          row["mean_abs_delta"], row["included"], row["below_floor"]});
      r.tables.push_back(std::move(t));
    }
  }
  if (r.tables.empty()) r.notices.push_back("empty report: no completed sections");
  return r;
}

inline std::string render_report(const Report& r, ReportFormat f) {
  std::ostringstream out;
  switch (f) {
    case ReportFormat::Json: {
      json tables = json::object();
      for (const auto& t : r.tables) {
        json rows = json::array();
        for (const auto& row : t.rows) {
          json o = json::object();
          for (std::size_t i = 0; i < t.header.size(); ++i) o[t.header[i]] = row[i];
          rows.push_back(std::move(o));
        }
        tables[t.name] = std::move(rows);
      }
      out << json{{"run_id", r.run_id}, {"status", r.status}, {"sections", tables}, {"notices", r.notices}}.dump(2)
          << "\n";
      break;
    }
    case ReportFormat::Csv:
      for (const auto& t : r.tables) {
        out << "# " << t.name << "\n";
        for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << detail::csv_escape(t.header[i]);
        out << "\n";
        for (const auto& row : t.rows) {
          for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_cell(row[i]);
          out << "\n";
        }
      }
      for (const auto& n : r.notices) out << "# notice: " << n << "\n";
      break;
    case ReportFormat::Table:
      if (!r.run_id.empty()) out << "run " << r.run_id << " (" << r.status << ")\n";
      for (const auto& t : r.tables) {
        std::vector<std::size_t> width(t.header.size());
        std::vector<std::vector<std::string>> cells;
        for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
        for (const auto& row : t.rows) {
          cells.emplace_back();
          for (std::size_t i = 0; i < row.size(); ++i) {
            cells.back().push_back(detail::cell_text(row[i]));
            width[i] = std::max(width[i], cells.back().back().size());
          }
        }
        auto line = [&](const std::vector<std::string>& cs) {
          for (std::size_t i = 0; i < cs.size(); ++i) {
            out << (i ? "  " : "") << cs[i];
            if (i + 1 < cs.size()) out << std::string(width[i] - cs[i].size(), ' ');
          }
          out << "\n";
        };
        if (&t != &r.tables.front() || !r.run_id.empty()) out << "\n";
        out << "[" << t.name << "]\n";
        line(t.header);
        for (const auto& cs : cells) line(cs);
      }
      for (const auto& n : r.notices) out << "\nnotice: " << n << "\n";
      break;
  }
  return out.str();
}

/// Reads back the CSV rendering: table name -> header + rows of raw strings.
inline std::map<std::string, std::vector<std::vector<std::string>>> parse_csv_report(const std::string& text) {
  std::map<std::string, std::vector<std::vector<std::string>>> out;
  std::istringstream in(text);
  std::string line, current;
  while (std::getline(in, line)) {
    if (line.rfind("# notice:", 0) == 0) continue;
    if (line.rfind("# ", 0) == 0) {
      current = line.substr(2);
      out[current];
      continue;
    }
    if (current.empty()) throw InvalidInput("CSV report row before any section header");
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cell += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(std::move(cell));
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(std::move(cell));
    out[current].push_back(std::move(cells));
  }
  return out;
}

}  // namespace raggs::io
