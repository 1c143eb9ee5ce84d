#include "trunctail/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace trunctail::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void bail(const std::string& name, std::size_t line,
                       const std::string& msg) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_positive(const std::string& token, const std::string& name,
                      std::size_t line, const char* column) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &pos);
  } catch (const std::exception&) {
    bail(name, line, std::string("column ") + column +
                         " is not a number: '" + token + "'");
  }
  if (pos != token.size()) {
    bail(name, line, std::string("column ") + column +
                         " has trailing junk: '" + token + "'");
  }
  return v;
}

}  // namespace

model::ObservedSample read_sample_csv(std::istream& in,
                                      const std::string& name) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) {
    throw std::invalid_argument(name + ": file is empty");
  }
  ++line_no;
  if (trim(line) != "x,y") {
    bail(name, line_no, "header must be exactly 'x,y'");
  }

  std::vector<model::ObservedPair> pairs;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
      bail(name, line_no, "expected exactly two comma-separated columns");
    }
    const std::string xs = trim(t.substr(0, comma));
    const std::string ys = trim(t.substr(comma + 1));
    if (xs.empty() || ys.empty()) {
      bail(name, line_no, "empty column value");
    }

    model::ObservedPair pair;
    pair.x = parse_positive(xs, name, line_no, "x");
    if (lower(ys) == "inf") {
      pair.y.reset();
    } else {
      pair.y = parse_positive(ys, name, line_no, "y");
    }
    pairs.push_back(pair);
  }

  if (pairs.empty()) {
    throw std::invalid_argument(name + ": no data rows");
  }
  try {
    return model::ObservedSample(std::move(pairs));
  } catch (const std::invalid_argument& e) {
    // Re-tag sample-validation failures with the file name so CLI users see
    // where the bad row came from.
    throw std::invalid_argument(name + ": " + e.what());
  }
}

model::ObservedSample read_sample_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open input file '" + path + "'");
  }
  return read_sample_csv(in, path);
}

void write_sample_csv(std::ostream& out,
                      const model::ObservedSample& sample) {
  out << "x,y\n";
  out.precision(17);
  for (const model::ObservedPair& p : sample.pairs()) {
    out << p.x << ",";
    if (p.y.has_value()) {
      out << *p.y;
    } else {
      out << "inf";
    }
    out << "\n";
  }
}

void write_dn_csv(std::ostream& out, const std::vector<double>& xs,
                  const std::vector<double>& dn) {
  if (xs.size() != dn.size()) {
    throw std::invalid_argument("write_dn_csv: size mismatch");
  }
  out << "x,dn\n";
  out.precision(17);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << xs[i] << "," << dn[i] << "\n";
  }
}

}  // namespace trunctail::io
