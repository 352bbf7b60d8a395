#include "rgds/word_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rgds/errors.hpp"

namespace rgds {

namespace {

void check_size(std::size_t n) {
  if (n > Arrangement::kMaxWords)
    throw Error(ErrorKind::OracleTooLarge, "arrangement exceeds " +
                                               std::to_string(Arrangement::kMaxWords) + " words");
}

constexpr std::string_view kPlus = "⊕";
constexpr std::string_view kDot = "·";
constexpr std::string_view kEmpty = "∅";
constexpr std::string_view kUnit = "ε0";

std::vector<std::string_view> split(std::string_view text, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = text.find(sep, pos);
    out.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + sep.size();
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

Arrangement::Arrangement(std::vector<Word> words) : words_(std::move(words)) { check_size(words_.size()); }

std::vector<Word> Arrangement::sorted_words() const {
  auto w = words_;
  std::sort(w.begin(), w.end());
  return w;
}

bool Arrangement::distinct_words() const {
  const auto w = sorted_words();
  return std::adjacent_find(w.begin(), w.end()) == w.end();
}

bool operator==(const Arrangement& a, const Arrangement& b) {
  return a.size() == b.size() && a.sorted_words() == b.sorted_words();
}

Arrangement arr_add(const Arrangement& a, const Arrangement& b) {
  check_size(a.size() + b.size());
  std::vector<Word> w;
  w.reserve(a.size() + b.size());
  w.insert(w.end(), a.words().begin(), a.words().end());
  w.insert(w.end(), b.words().begin(), b.words().end());
  return Arrangement(std::move(w));
}

Arrangement arr_mul(const Arrangement& a, const Arrangement& b) {
  check_size(a.size() * b.size());
  std::vector<Word> w;
  w.reserve(a.size() * b.size());
  for (const Word& x : a.words()) {
    for (const Word& y : b.words()) {
      Word z = x;
      z.insert(z.end(), y.begin(), y.end());
      w.push_back(std::move(z));
    }
  }
  return Arrangement(std::move(w));
}

double moran_eval(const Arrangement& a, double s, std::span<const double> ratios) {
  double total = 0.0;
  for (const Word& w : a.words()) {
    double c = 1.0;
    for (EdgeId e : w) {
      if (e >= ratios.size()) throw Error(ErrorKind::UnknownEdge, "edge " + std::to_string(e));
      c *= ratios[e];
    }
    total += std::pow(c, s);
  }
  return total;
}

std::string to_text(const Arrangement& a) {
  if (a.is_empty_set()) return std::string(kEmpty);
  std::ostringstream os;
  bool first_word = true;
  for (const Word& w : a.sorted_words()) {
    if (!first_word) os << kPlus;
    first_word = false;
    if (w.empty()) {
      os << kUnit;
      continue;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) os << kDot;
      os << w[i];
    }
  }
  return os.str();
}

Arrangement parse_arrangement(std::string_view text) {
  text = trim(text);
  if (text == kEmpty) return {};
  std::vector<Word> words;
  for (auto part : split(text, kPlus)) {
    part = trim(part);
    if (part == kUnit) {
      words.emplace_back();
      continue;
    }
    Word w;
    for (auto tok : split(part, kDot)) {
      tok = trim(tok);
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string_view::npos)
        throw Error(ErrorKind::MalformedSpec, "bad arrangement token '" + std::string(tok) + "'");
      w.push_back(static_cast<EdgeId>(std::stoul(std::string(tok))));
    }
    words.push_back(std::move(w));
  }
  return Arrangement(std::move(words));
}

ArrMatrix::ArrMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols) {}

ArrMatrix ArrMatrix::identity(std::size_t n) {
  ArrMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Arrangement::unit();
  return m;
}

ArrMatrix arr_mat_mul(const ArrMatrix& m, const ArrMatrix& n) {
  if (m.cols() != n.rows()) throw Error(ErrorKind::ShapeMismatch, "arrangement matrix product");
  ArrMatrix out(m.rows(), n.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < n.cols(); ++j)
      for (std::size_t k = 0; k < m.cols(); ++k)
        if (!m(i, k).is_empty_set() && !n(k, j).is_empty_set())
          out(i, j) = arr_add(out(i, j), arr_mul(m(i, k), n(k, j)));
  return out;
}

ArrMatrix arr_mat_add(const ArrMatrix& m, const ArrMatrix& n) {
  if (m.rows() != n.rows() || m.cols() != n.cols())
    throw Error(ErrorKind::ShapeMismatch, "arrangement matrix sum");
  ArrMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = arr_add(m(i, j), n(i, j));
  return out;
}

Matrix moran_eval(const ArrMatrix& m, double s, std::span<const double> ratios) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = moran_eval(m(i, j), s, ratios);
  return out;
}

}  // namespace rgds
