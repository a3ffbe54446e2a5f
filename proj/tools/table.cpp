#include "table.hpp"

#include <cmath>
#include <ostream>

#include "covert/format.hpp"

namespace covert::cli {

namespace {

std::string csv_text(const Cell& cell) {
  return std::visit(
      [](const auto& value) -> std::string {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(value);
        } else if constexpr (std::is_same_v<T, bool>) {
          return value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return value;
        } else {
          return std::to_string(value);
        }
      },
      cell);
}

}  // namespace

nlohmann::ordered_json to_json(const Cell& cell) {
  return std::visit(
      [](const auto& value) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(value)) return nullptr;
        }
        return value;
      },
      cell);
}

void write_table(std::ostream& out, const Table& table, OutputFormat format) {
  if (format == OutputFormat::json) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json object;
      for (std::size_t i = 0; i < table.columns.size(); ++i) object[table.columns[i]] = to_json(row[i]);
      rows.push_back(object);
    }
    out << rows.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_text(row[i]);
    out << '\n';
  }
}

}  // namespace covert::cli
