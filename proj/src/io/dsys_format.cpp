#include "stablekit/io/dsys_format.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace stablekit::io {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t pos = 0;
    while (pos < raw.size()) {
      while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
      std::size_t end = pos;
      while (end < raw.size() && !std::isspace(static_cast<unsigned char>(raw[end]))) ++end;
      if (end > pos) line.tokens.push_back(raw.substr(pos, end - pos));
      pos = end;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

double to_double(std::string_view tok, std::size_t line) {
  double v = 0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "not a number: '" + std::string(tok) + "'");
  }
  return v;
}

Eigen::Index to_count(std::string_view tok, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
    throw ParseError(line, "expected a nonnegative integer, got '" + std::string(tok) + "'");
  }
  return static_cast<Eigen::Index>(v);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

System parse_dsys(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, "empty input");
  const Line& head = lines.front();
  if (head.tokens.size() != 4 || head.tokens[0] != "DSYS") {
    throw ParseError(head.number, "expected header 'DSYS n m p'");
  }
  const Eigen::Index n = to_count(head.tokens[1], head.number);
  const Eigen::Index m = to_count(head.tokens[2], head.number);
  const Eigen::Index p = to_count(head.tokens[3], head.number);

  const std::array<const char*, 5> labels{"E", "A", "B", "C", "D"};
  const std::array<std::pair<Eigen::Index, Eigen::Index>, 5> shapes{
      {{n, n}, {n, n}, {n, m}, {p, n}, {p, m}}};
  std::array<Matrix<double>, 5> blocks;

  std::size_t at = 1;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const std::size_t where = at < lines.size() ? lines[at].number : lines.back().number + 1;
    if (at >= lines.size() || lines[at].tokens.size() != 1 || lines[at].tokens[0] != labels[k]) {
      throw ParseError(where, std::string("expected block label '") + labels[k] + "'");
    }
    ++at;
    const auto [rows, cols] = shapes[k];
    Matrix<double>& mat = blocks[k];
    mat.resize(rows, cols);
    if (cols == 0) continue;
    for (Eigen::Index i = 0; i < rows; ++i, ++at) {
      if (at >= lines.size()) {
        throw ParseError(lines.back().number + 1, std::string("block ") + labels[k] + " needs " +
                                                      std::to_string(rows) + " rows");
      }
      const Line& row = lines[at];
      if (row.tokens.size() != std::size_t(cols)) {
        throw ParseError(row.number, std::string("block ") + labels[k] + " row " + std::to_string(i + 1) +
                                         " has " + std::to_string(row.tokens.size()) + " entries, expected " +
                                         std::to_string(cols));
      }
      for (Eigen::Index j = 0; j < cols; ++j) mat(i, j) = to_double(row.tokens[j], row.number);
    }
  }
  if (at < lines.size()) throw ParseError(lines[at].number, "unexpected content after block D");
  return System(blocks[0], blocks[1], blocks[2], blocks[3], blocks[4]);
}

std::string write_dsys(const System& s) {
  std::ostringstream os;
  os << "DSYS " << s.states() << ' ' << s.inputs() << ' ' << s.outputs() << '\n';
  const std::array<std::pair<const char*, const Matrix<double>*>, 5> blocks{
      {{"E", &s.e()}, {"A", &s.a()}, {"B", &s.b()}, {"C", &s.c()}, {"D", &s.d()}}};
  for (const auto& [label, mat] : blocks) {
    os << label << '\n';
    if (mat->cols() == 0) continue;
    for (Eigen::Index i = 0; i < mat->rows(); ++i) {
      for (Eigen::Index j = 0; j < mat->cols(); ++j) os << (j ? " " : "") << format_double((*mat)(i, j));
      os << '\n';
    }
  }
  return os.str();
}

System read_dsys_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::PreconditionViolated, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dsys(buf.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::PreconditionViolated, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::PreconditionViolated, "write to '" + path + "' failed");
}

}  // namespace stablekit::io
