#include "phm/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace phm {
namespace {

bool parse_double(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

ComplexTable read_complex_table(std::istream& in) {
  ComplexTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r') c = ' ';

    std::istringstream fields(line);
    std::string token;
    double cols[3] = {0.0, 0.0, 0.0};
    int count = 0;
    while (fields >> token) {
      if (count == 3) throw std::runtime_error("table line " + std::to_string(line_no) + ": more than 3 columns");
      if (!parse_double(token, cols[count])) {
        throw std::runtime_error("table line " + std::to_string(line_no) + ": cannot parse '" + token + "'");
      }
      ++count;
    }
    if (count == 0) continue;
    if (count == 1) throw std::runtime_error("table line " + std::to_string(line_no) + ": expected 2 or 3 columns");
    table.x.push_back(cols[0]);
    table.y.emplace_back(cols[1], cols[2]);
  }
  return table;
}

ComplexTable read_complex_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table file '" + path.string() + "'");
  try {
    return read_complex_table(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_complex_table(std::ostream& out, const ComplexTable& table, const char* header) {
  out << "# " << header << '\n';
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    out << shortest(table.x[i]) << ' ' << shortest(table.y[i].real()) << ' ' << shortest(table.y[i].imag()) << '\n';
  }
}

}  // namespace phm
