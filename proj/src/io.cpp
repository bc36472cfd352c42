#include "slepvolt/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slepvolt {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void CsvTable::add_row(std::initializer_list<double> values) {
  rows.emplace_back(values);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  if (table.schema.empty()) throw std::invalid_argument("write_csv: schema name required");
  if (table.columns.empty()) throw std::invalid_argument("write_csv: no columns");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "# schema " << table.schema << " v1\n";
  for (const auto& [k, v] : table.metadata) out << "# " << k << "=" << v << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ",";
    out << table.columns[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::runtime_error("write_csv: row width mismatch in " + path);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ",";
      out << format_g17(row[c]);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  CsvTable table;
  std::string line;
  bool have_header = false;
  bool have_schema = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      if (!have_schema) {
        if (body.rfind("schema ", 0) != 0)
          throw std::runtime_error("read_csv: first comment must be the schema line: " + path);
        std::istringstream ss(body);
        std::string word;
        ss >> word >> table.schema >> word;  // "schema" <name> "v1"
        have_schema = true;
        continue;
      }
      const auto eq = body.find('=');
      if (eq != std::string::npos)
        table.metadata[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      continue;
    }
    if (!have_schema)
      throw std::runtime_error("read_csv: missing schema header line: " + path);
    if (!have_header) {
      for (auto& name : split(line, ',')) table.columns.push_back(trim(name));
      have_header = true;
      continue;
    }
    const auto parts = split(line, ',');
    if (parts.size() != table.columns.size())
      throw std::runtime_error("read_csv: row width mismatch in " + path);
    std::vector<double> row;
    row.reserve(parts.size());
    for (const auto& p : parts) {
      std::size_t used = 0;
      const double v = std::stod(p, &used);
      if (used == 0) throw std::runtime_error("read_csv: non-numeric cell in " + path);
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_schema || !have_header)
    throw std::runtime_error("read_csv: incomplete file " + path);
  return table;
}

double metadata_number(const CsvTable& table, const std::string& key) {
  return std::stod(metadata_string(table, key));
}

std::string metadata_string(const CsvTable& table, const std::string& key) {
  const auto it = table.metadata.find(key);
  if (it == table.metadata.end())
    throw std::runtime_error("csv metadata: missing key " + key);
  return it->second;
}

std::vector<double> column(const CsvTable& table, const std::string& name) {
  std::size_t idx = table.columns.size();
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    if (table.columns[c] == name) idx = c;
  if (idx == table.columns.size())
    throw std::runtime_error("csv: no column named " + name);
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) out.push_back(row[idx]);
  return out;
}

FlatConfig parse_flat_config_text(const std::string& text) {
  FlatConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    cfg[key] = value;
  }
  return cfg;
}

FlatConfig parse_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_flat_config_text(buf.str());
}

double config_number(const FlatConfig& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  return std::stod(it->second);
}

long long config_integer(const FlatConfig& cfg, const std::string& key, long long fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  return std::stoll(it->second);
}

std::string config_string(const FlatConfig& cfg, const std::string& key,
                          const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

bool config_flag(const FlatConfig& cfg, const std::string& key, bool fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: non-boolean value for " + key + ": " + v);
}

std::vector<double> config_number_list(const FlatConfig& cfg, const std::string& key,
                                       const std::vector<double>& fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::vector<double> out;
  std::string token;
  std::istringstream ss(it->second);
  while (std::getline(ss, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(std::stod(token));
  }
  if (out.empty()) throw std::runtime_error("config: empty list for " + key);
  return out;
}

}  // namespace slepvolt
