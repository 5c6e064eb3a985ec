#include "bpdl/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "bpdl/errors.hpp"

namespace bpdl::cli {

namespace {

void dump(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(k).dump() + (indent > 0 ? ": " : ":");
        dump(v, indent, depth + 1, out);
      }
      out += nl + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += nl + pad;
        first = false;
        dump(v, indent, depth + 1, out);
      }
      if (!flat) out += nl + close;
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "\"NA\"";
      return;
    }
    default: out += j.dump();
  }
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  out += "\n";
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw BadConfig("cannot create output directory " + root_.string());
  }
}

void OutputDir::write_text(const std::string& name, const std::string& content) {
  std::ofstream out(root_ / name, std::ios::binary);
  if (!out) throw BadConfig("cannot write " + (root_ / name).string());
  out << content;
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void OutputDir::write_json(const std::string& name, const Json& j) {
  write_text(name, dump_json(j));
}

void OutputDir::write_table(const std::string& name, const std::vector<Column>& columns) {
  std::ostringstream os;
  os << "#";
  for (const auto& c : columns) os << ' ' << c.name;
  os << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns[0].values.size();
  for (const auto& c : columns) {
    if (c.values.size() != rows) throw Error("table columns differ in length in " + name);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) os << ' ';
      os << format_number(columns[c].values[r]);
    }
    os << '\n';
  }
  write_text(name, os.str());
}

std::string gnuplot_script(const std::string& output_png, const std::vector<PlotSpec>& plots) {
  std::ostringstream os;
  os << "# run from this directory: gnuplot plot.gp\n";
  os << "set terminal pngcairo size 900," << 320 * std::max<std::size_t>(1, plots.size()) << "\n";
  os << "set output '" << output_png << "'\n";
  os << "set multiplot layout " << plots.size() << ",1\n";
  for (const auto& p : plots) {
    os << "set title '" << p.title << "'\n";
    os << "set xlabel '" << p.xlabel << "'\n";
    os << "set ylabel '" << p.ylabel << "'\n";
    os << "plot ";
    for (std::size_t k = 0; k < p.series.size(); ++k) {
      if (k) os << ", ";
      os << "'" << p.file << "' using " << p.series[k].first;
      if (k == 0 && p.error_bars) {
        os << " with yerrorbars";
      } else {
        os << " with lines";
      }
      os << " title '" << p.series[k].second << "'";
    }
    if (p.reference) os << ", " << format_number(*p.reference) << " with lines dt 2 title 'reference'";
    os << "\n";
  }
  os << "unset multiplot\n";
  return os.str();
}

}  // namespace bpdl::cli
