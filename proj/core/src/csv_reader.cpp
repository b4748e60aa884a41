#include <charconv>
#include <cmath>
#include <string>

#include "geomed/cli_io.hpp"
#include "geomed/errors.hpp"

namespace geomed {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

bool parse_csv_row(std::string_view line, std::vector<double>& out, std::string& error) {
  out.clear();
  std::size_t column = 0;
  for (;;) {
    ++column;
    const auto comma = line.find(',');
    std::string_view field = trim(line.substr(0, comma));
    double value = 0.0;
    const char* end = field.data() + field.size();
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
      error = "column " + std::to_string(column) + ": cannot parse '" + std::string(field) + "' as a number";
      return false;
    }
    if (!std::isfinite(value)) {
      error = "column " + std::to_string(column) + ": non-finite value";
      return false;
    }
    out.push_back(value);
    if (comma == std::string_view::npos) return true;
    line.remove_prefix(comma + 1);
  }
}

CsvReader::CsvReader(const std::filesystem::path& path, std::optional<int> dim)
    : path_(path), in_(path), dim_(dim) {
  if (!in_) throw IoError("cannot open '" + path.string() + "' for reading");
  if (dim_ && *dim_ < 1) throw ConfigError("csv: dimension must be >= 1");
}

std::optional<Vector> CsvReader::next() {
  while (std::getline(in_, buffer_)) {
    ++line_;
    const auto line = trim(buffer_);
    if (line.empty()) continue;
    std::string error;
    if (!parse_csv_row(line, fields_, error)) {
      throw DataError(path_.string() + ":" + std::to_string(line_) + ": " + error);
    }
    const auto arity = static_cast<int>(fields_.size());
    if (!dim_) dim_ = arity;
    if (arity != *dim_) {
      throw DataError(path_.string() + ":" + std::to_string(line_) + ": expected " +
                      std::to_string(*dim_) + " values, found " + std::to_string(arity));
    }
    ++rows_;
    return make_vector(std::span<const double>(fields_));
  }
  if (in_.bad()) throw IoError("read error on '" + path_.string() + "'");
  return std::nullopt;
}

std::vector<Vector> ingest_csv(const std::filesystem::path& path, std::optional<int> dim) {
  CsvReader reader(path, dim);
  std::vector<Vector> rows;
  while (auto v = reader.next()) rows.push_back(std::move(*v));
  if (rows.empty()) throw DataError(path.string() + ": no observations");
  return rows;
}

}  // namespace geomed
