#include "render.hpp"

#include <algorithm>
#include <sstream>
#include <utility>
#include <vector>

namespace khash::cli {

namespace {

using report::Json;

std::string scalar(const Json& v) {
  if (v.is_null()) return "n/a";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return report::format_number(v.get<double>());
  if (v.is_array()) {
    const bool words = std::any_of(v.begin(), v.end(), [](const Json& e) { return e.is_string(); });
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : (words ? " | " : " ")) + scalar(e);
    return s.empty() ? "-" : s;
  }
  return v.dump();
}

bool is_table(const Json& v) {
  return v.is_array() && !v.empty() &&
         std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_object(); });
}

void flatten(const Json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows,
             std::vector<std::pair<std::string, const Json*>>& tables) {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, name, rows, tables);
    } else if (is_table(value)) {
      tables.emplace_back(name, &value);
    } else {
      rows.emplace_back(name, scalar(value));
    }
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::vector<std::string> columns(const Json& table) {
  std::vector<std::string> cols;
  for (const auto& row : table) {
    for (const auto& [key, value] : row.items()) {
      if (std::find(cols.begin(), cols.end(), key) == cols.end()) cols.push_back(key);
    }
  }
  return cols;
}

std::string cell(const Json& row, const std::string& col) {
  return row.contains(col) ? scalar(row[col]) : "";
}

}  // namespace

std::string render_text(const Json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::vector<std::pair<std::string, const Json*>> tables;
  flatten(j, "", rows, tables);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream out;
  for (const auto& [key, value] : rows) {
    out << key << std::string(width - key.size() + 2, ' ') << value << '\n';
  }
  for (const auto& [name, table] : tables) {
    const auto cols = columns(*table);
    std::vector<std::size_t> w(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      w[c] = cols[c].size();
      for (const auto& row : *table) w[c] = std::max(w[c], cell(row, cols[c]).size());
    }
    out << '\n' << name << ":\n";
    auto line = [&](auto get) {
      std::string s;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const std::string v = get(c);
        s += v + (c + 1 < cols.size() ? std::string(w[c] - v.size() + 2, ' ') : "");
      }
      out << "  " << s << '\n';
    };
    line([&](std::size_t c) { return cols[c]; });
    for (const auto& row : *table) line([&](std::size_t c) { return cell(row, cols[c]); });
  }
  return out.str();
}

std::string render_csv(const Json& j, const std::string& table) {
  std::ostringstream out;
  if (!table.empty() && j.contains(table) && is_table(j[table])) {
    const auto cols = columns(j[table]);
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << csv_field(cols[c]);
    out << '\n';
    for (const auto& row : j[table]) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << csv_field(cell(row, cols[c]));
      }
      out << '\n';
    }
    return out.str();
  }
  std::vector<std::pair<std::string, std::string>> rows;
  std::vector<std::pair<std::string, const Json*>> tables;
  flatten(j, "", rows, tables);
  out << "key,value\n";
  for (const auto& [key, value] : rows) out << csv_field(key) << ',' << csv_field(value) << '\n';
  for (const auto& [name, t] : tables) {
    std::size_t i = 0;
    for (const auto& row : *t) {
      for (const auto& [key, value] : row.items()) {
        out << csv_field(name + "[" + std::to_string(i) + "]." + key) << ','
            << csv_field(scalar(value)) << '\n';
      }
      ++i;
    }
  }
  return out.str();
}

std::string render(const Json& j, Format format, const std::string& table) {
  switch (format) {
    case Format::kJson:
      return report::dump(j);
    case Format::kCsv:
      return render_csv(j, table);
    case Format::kText:
      break;
  }
  return render_text(j);
}

}  // namespace khash::cli
