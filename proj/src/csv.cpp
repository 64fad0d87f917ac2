#include "medstream/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "medstream/errors.hpp"

namespace medstream {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_field(const std::string& raw, std::size_t line_no, const std::string& column) {
  const std::string field = trim(raw);
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": field '" << raw << "' in column " << column
        << " is not a number";
    throw InputError(msg.str());
  }
  return value;
}

std::vector<std::string> expected_header(const ModelDims& dims) {
  std::vector<std::string> names{"Y", "X"};
  for (int j = 1; j <= dims.n_mediators; ++j) names.push_back("M" + std::to_string(j));
  for (int j = 1; j <= dims.n_confounders; ++j) names.push_back("Z" + std::to_string(j));
  return names;
}

}  // namespace

RawBatch parse_batch_csv(std::istream& in, const ModelDims& dims, ModelKind model) {
  dims.validate();
  const std::vector<std::string> names = expected_header(dims);

  std::string line;
  if (!std::getline(in, line)) throw InputError("batch file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_fields(line);
  if (header.size() != names.size()) {
    std::ostringstream msg;
    msg << "header has " << header.size() << " columns, expected " << names.size()
        << " (Y,X,M1..M" << dims.n_mediators;
    if (dims.n_confounders > 0) msg << ",Z1..Z" << dims.n_confounders;
    msg << ")";
    throw InputError(msg.str());
  }
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (trim(header[c]) != names[c]) {
      std::ostringstream msg;
      msg << "header column " << c + 1 << " is '" << trim(header[c]) << "', expected '"
          << names[c] << "'";
      throw InputError(msg.str());
    }
  }

  std::vector<double> ys, xs;
  std::vector<std::vector<double>> ms(dims.n_mediators), zs(dims.n_confounders);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // allow a trailing blank line

    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != names.size()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": has " << fields.size() << " fields, expected "
          << names.size();
      throw InputError(msg.str());
    }
    std::size_t c = 0;
    const double y = parse_field(fields[c], line_no, names[c]);
    ++c;
    if (model == ModelKind::kLogistic && y != 0.0 && y != 1.0) {
      std::ostringstream msg;
      msg << "line " << line_no << ": logistic outcome must be 0 or 1, found " << trim(fields[0]);
      throw InputError(msg.str());
    }
    ys.push_back(y);
    xs.push_back(parse_field(fields[c], line_no, names[c]));
    ++c;
    for (int j = 0; j < dims.n_mediators; ++j, ++c) {
      ms[j].push_back(parse_field(fields[c], line_no, names[c]));
    }
    for (int j = 0; j < dims.n_confounders; ++j, ++c) {
      zs[j].push_back(parse_field(fields[c], line_no, names[c]));
    }
  }
  if (ys.empty()) throw InputError("batch file has a header but no data rows");

  const Eigen::Index n = static_cast<Eigen::Index>(ys.size());
  RawBatch raw;
  raw.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
  raw.x = Eigen::Map<Eigen::VectorXd>(xs.data(), n);
  raw.m.resize(n, dims.n_mediators);
  for (int j = 0; j < dims.n_mediators; ++j) {
    raw.m.col(j) = Eigen::Map<Eigen::VectorXd>(ms[j].data(), n);
  }
  raw.z.resize(n, dims.n_confounders);
  for (int j = 0; j < dims.n_confounders; ++j) {
    raw.z.col(j) = Eigen::Map<Eigen::VectorXd>(zs[j].data(), n);
  }
  return raw;
}

RawBatch parse_batch_csv_file(const std::string& path, const ModelDims& dims, ModelKind model) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open batch file: " + path);
  try {
    return parse_batch_csv(in, dims, model);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace medstream
