#pragma once

// Token-level attention scores over a single attention head.
//
// For a row-stochastic matrix A (row j = query, column i = key):
//   g_i  = sum_j A[j][i]                 attention received (first token zeroed)
//   B    = A * diag(g)
//   B'   = B with every column scaled to sum 1 (all-zero columns stay zero)
//   p_i  = sum_j B'[i][j]                row sums of B'
//   s    = g + p,  s_norm = min-max(s)   (all zeros when s is constant)

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cotbench {

class NonSquareMatrix : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NegativeEntry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndexOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class AttentionFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), values_(n * n, fill) {}

  /// Throws NonSquareMatrix unless every row has rows.size() entries.
  static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t row, std::size_t col) { return values_[row * n_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * n_ + col]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct TokenScores {
  std::vector<double> g;
  std::vector<double> p;
  std::vector<double> s;
  std::vector<double> s_norm;
};

/// Throws NegativeEntry on negative or non-finite entries.
TokenScores token_scores(const SquareMatrix& attention, bool zero_first = true);
TokenScores token_scores(const std::vector<std::vector<double>>& attention, bool zero_first = true);

/// Tokens plus attention[layer][head] matrices, as read from the interchange file.
class AttentionRecord {
 public:
  AttentionRecord(std::string model_id, std::string prompt, std::vector<std::string> tokens,
                  std::size_t layers, std::size_t heads, std::vector<SquareMatrix> matrices);

  const std::string& model_id() const { return model_id_; }
  const std::string& prompt() const { return prompt_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t layers() const { return layers_; }
  std::size_t heads() const { return heads_; }
  std::size_t n() const { return tokens_.size(); }

  /// Negative layer indices count from the end (-1 is the last layer).
  const SquareMatrix& matrix(long layer, long head) const;

 private:
  std::string model_id_;
  std::string prompt_;
  std::vector<std::string> tokens_;
  std::size_t layers_;
  std::size_t heads_;
  std::vector<SquareMatrix> matrices_;  // layer-major
};

inline constexpr double kRowSumTolerance = 1e-3;
inline constexpr double kCausalTolerance = 1e-6;

/// Validates structure and the attention invariants (shape, non-negative,
/// rows summing to 1 within 1e-3, zero above the diagonal within 1e-6).
AttentionRecord attention_from_json(const nlohmann::json& doc);
AttentionRecord load_attention(const std::filesystem::path& path);
nlohmann::ordered_json attention_to_json(const AttentionRecord& record);

TokenScores score_prompt(const AttentionRecord& record, long layer, long head, bool zero_first = true);

/// Standalone HTML page: one span per token with background opacity equal to
/// its score, plus a color-bar legend.
std::string render_token_html(const std::vector<std::string>& tokens, const std::vector<double>& s_norm,
                              std::string_view title = "Token-level attention scores");

/// Per query row, the key with the largest attention excluding the first key
/// (ties go to the earlier key). Empty when n < 2.
std::vector<std::size_t> argmax_keys_excluding_first(const SquareMatrix& attention);

struct HeadTable {
  std::vector<std::string> tokens;
  SquareMatrix matrix;
  std::vector<std::size_t> argmax_key;  // per row; see argmax_keys_excluding_first
};

HeadTable export_head_matrix(const AttentionRecord& record, long layer, long head);

/// CSV with a header row "query,<tokens...>,argmax_key_excl_first".
std::string head_table_csv(const HeadTable& table);

}  // namespace cotbench
