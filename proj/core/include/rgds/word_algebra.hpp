#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgds/matrix.hpp"
#include "rgds/system_model.hpp"

namespace rgds {

using Word = std::vector<EdgeId>;

/// Finite multiset of edge words. Duplicates are kept; comparison ignores
/// order. Used as an exact oracle, so sizes are capped at `kMaxWords`.
class Arrangement {
 public:
  static constexpr std::size_t kMaxWords = 1'000'000;

  Arrangement() = default;
  explicit Arrangement(std::vector<Word> words);

  static Arrangement empty_set() { return {}; }
  static Arrangement unit() { return Arrangement({Word{}}); }
  static Arrangement letter(EdgeId e) { return Arrangement({Word{e}}); }

  const std::vector<Word>& words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool is_empty_set() const noexcept { return words_.empty(); }

  bool distinct_words() const;
  std::vector<Word> sorted_words() const;

  friend bool operator==(const Arrangement& a, const Arrangement& b);

 private:
  std::vector<Word> words_;
};

Arrangement arr_add(const Arrangement& a, const Arrangement& b);
Arrangement arr_mul(const Arrangement& a, const Arrangement& b);

/// Sum over words of the product of c_e^s; throws UnknownEdge when an id has
/// no ratio.
double moran_eval(const Arrangement& a, double s, std::span<const double> ratios);

/// "⊕"-joined words, "·"-joined edge ids, "∅" and "ε0" literals; words in
/// lexicographic order so equal multisets print identically.
std::string to_text(const Arrangement& a);
Arrangement parse_arrangement(std::string_view text);

class ArrMatrix {
 public:
  ArrMatrix(std::size_t rows, std::size_t cols);

  static ArrMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ArrMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Arrangement& operator()(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
  const Arrangement& operator()(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }

  friend bool operator==(const ArrMatrix&, const ArrMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Arrangement> cells_;
};

ArrMatrix arr_mat_mul(const ArrMatrix& m, const ArrMatrix& n);
ArrMatrix arr_mat_add(const ArrMatrix& m, const ArrMatrix& n);

/// Entrywise moran_eval.
Matrix moran_eval(const ArrMatrix& m, double s, std::span<const double> ratios);

}  // namespace rgds
