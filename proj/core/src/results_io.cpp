#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gpcp/errors.hpp"
#include "gpcp/harness.hpp"

namespace gpcp {

namespace {

constexpr std::string_view kCsvHeader = "function,method,p,repetition,seed,coverage,mean_width,iae,rmse,wall_time_s";

std::string number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_number(double v) { return std::isfinite(v) ? number(v) : "null"; }

std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

double parse_double(const std::string& field) {
  if (field == "nan" || field.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (field == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (field == "-inf") {
    return -std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  const double v = std::stod(field, &used);
  if (used != field.size()) {
    throw DomainError("malformed number '" + field + "'");
  }
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

std::vector<RunRecord> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw DomainError("missing or unexpected CSV header");
  }
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto f = split_line(line);
    if (f.size() != 10) {
      throw DomainError("CSV row has " + std::to_string(f.size()) + " fields, expected 10");
    }
    RunRecord r;
    r.function = f[0];
    r.method = f[1];
    r.p = std::stoi(f[2]);
    r.repetition = std::stoi(f[3]);
    r.seed = std::stoull(f[4]);
    r.coverage = parse_double(f[5]);
    r.mean_width = parse_double(f[6]);
    r.iae = parse_double(f[7]);
    r.rmse = parse_double(f[8]);
    r.wall_time_s = parse_double(f[9]);
    records.push_back(std::move(r));
  }
  return records;
}

double json_double(const nlohmann::json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

std::vector<RunRecord> parse_json(std::string_view text) {
  std::vector<RunRecord> records;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& e : doc) {
      RunRecord r;
      r.function = e.at("function").get<std::string>();
      r.method = e.at("method").get<std::string>();
      r.p = e.at("p").get<int>();
      r.repetition = e.at("repetition").get<int>();
      r.seed = e.at("seed").get<std::uint64_t>();
      r.coverage = json_double(e.at("coverage"));
      r.mean_width = json_double(e.at("mean_width"));
      r.iae = json_double(e.at("iae"));
      r.rmse = json_double(e.at("rmse"));
      r.wall_time_s = json_double(e.at("wall_time_s"));
      records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed results JSON: ") + e.what());
  }
  return records;
}

}  // namespace

OutputFormat parse_format(std::string_view tag) {
  if (tag == "csv") {
    return OutputFormat::csv;
  }
  if (tag == "json") {
    return OutputFormat::json;
  }
  throw DomainError("unknown output format '" + std::string(tag) + "'");
}

std::string format_results(const std::vector<RunRecord>& records, OutputFormat format) {
  std::string out;
  if (format == OutputFormat::csv) {
    out += kCsvHeader;
    out += '\n';
    for (const RunRecord& r : records) {
      out += r.function + ',' + r.method + ',' + std::to_string(r.p) + ',' + std::to_string(r.repetition) + ',' +
             std::to_string(r.seed) + ',' + number(r.coverage) + ',' + number(r.mean_width) + ',' + number(r.iae) +
             ',' + number(r.rmse) + ',' + number(r.wall_time_s) + '\n';
    }
    return out;
  }
  out += "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RunRecord& r = records[i];
    out += "  {\"function\": " + json_string(r.function) + ", \"method\": " + json_string(r.method) +
           ", \"p\": " + std::to_string(r.p) + ", \"repetition\": " + std::to_string(r.repetition) +
           ", \"seed\": " + std::to_string(r.seed) + ", \"coverage\": " + json_number(r.coverage) +
           ", \"mean_width\": " + json_number(r.mean_width) + ", \"iae\": " + json_number(r.iae) +
           ", \"rmse\": " + json_number(r.rmse) + ", \"wall_time_s\": " + json_number(r.wall_time_s) + "}";
    out += i + 1 < records.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::vector<RunRecord> parse_results(std::string_view text, OutputFormat format) {
  return format == OutputFormat::csv ? parse_csv(text) : parse_json(text);
}

void write_text_file(const std::filesystem::path& out, std::string_view text) {
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open '" + out.string() + "' for writing");
  }
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) {
    throw std::runtime_error("failed writing '" + out.string() + "'");
  }
}

void emit_results(const std::vector<RunRecord>& records, OutputFormat format, const std::filesystem::path& out) {
  write_text_file(out, format_results(records, format));
}

std::string format_pareto_csv(const ParetoResult& result) {
  std::string out = "kind,index,variance";
  const Index d = result.rows.empty() ? 0 : result.rows.front().lengthscales.size();
  for (Index j = 0; j < d; ++j) {
    out += ",rho_" + std::to_string(j + 1);
  }
  out += ",rmse_loo,iae_loo,rmse_test,iae_test\n";
  for (const ParetoRow& r : result.rows) {
    out += r.kind + ',' + std::to_string(r.index) + ',' + number(r.variance);
    for (Index j = 0; j < r.lengthscales.size(); ++j) {
      out += ',' + number(r.lengthscales(j));
    }
    out += ',' + number(r.rmse_loo) + ',' + number(r.iae_loo) + ',' + number(r.rmse_test) + ',' +
           number(r.iae_test) + '\n';
  }
  return out;
}

}  // namespace gpcp
