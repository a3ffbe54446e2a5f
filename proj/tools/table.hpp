#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "covert/cli.hpp"

namespace covert::cli {

using Cell = std::variant<std::int64_t, double, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

nlohmann::ordered_json to_json(const Cell& cell);

/// CSV: header plus one line per row, doubles at 10 significant digits.
/// JSON: array of objects keyed by column name, NaN as null.
void write_table(std::ostream& out, const Table& table, OutputFormat format);

}  // namespace covert::cli
