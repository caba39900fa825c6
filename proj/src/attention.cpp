#include "cotbench/attention.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace cotbench {

SquareMatrix SquareMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  SquareMatrix m(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) {
      throw NonSquareMatrix("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                            " entries, expected " + std::to_string(rows.size()));
    }
    for (std::size_t c = 0; c < rows.size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

TokenScores token_scores(const SquareMatrix& a, bool zero_first) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(a(j, i)) || a(j, i) < 0.0) {
        throw NegativeEntry("attention entry (" + std::to_string(j) + ", " + std::to_string(i) +
                            ") is negative or not finite");
      }
    }
  }

  TokenScores out;
  out.g.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) out.g[i] += a(j, i);
  }
  if (zero_first && n > 0) out.g[0] = 0.0;

  // Column-normalized B = A diag(g); columns with zero mass stay zero.
  SquareMatrix b(n);
  for (std::size_t i = 0; i < n; ++i) {
    double column = 0.0;
    for (std::size_t j = 0; j < n; ++j) column += a(j, i) * out.g[i];
    if (column == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) b(j, i) = a(j, i) * out.g[i] / column;
  }

  out.p.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.p[i] += b(i, j);
  }

  out.s.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.s[i] = out.g[i] + out.p[i];

  out.s_norm.assign(n, 0.0);
  if (n > 0) {
    const auto [lo, hi] = std::minmax_element(out.s.begin(), out.s.end());
    const double range = *hi - *lo;
    if (range > 0.0) {
      for (std::size_t i = 0; i < n; ++i) out.s_norm[i] = (out.s[i] - *lo) / range;
    }
  }
  return out;
}

TokenScores token_scores(const std::vector<std::vector<double>>& attention, bool zero_first) {
  return token_scores(SquareMatrix::from_rows(attention), zero_first);
}

AttentionRecord::AttentionRecord(std::string model_id, std::string prompt,
                                 std::vector<std::string> tokens, std::size_t layers,
                                 std::size_t heads, std::vector<SquareMatrix> matrices)
    : model_id_(std::move(model_id)),
      prompt_(std::move(prompt)),
      tokens_(std::move(tokens)),
      layers_(layers),
      heads_(heads),
      matrices_(std::move(matrices)) {
  if (matrices_.size() != layers_ * heads_) {
    throw AttentionFormatError("expected " + std::to_string(layers_ * heads_) + " matrices, got " +
                               std::to_string(matrices_.size()));
  }
  for (const auto& m : matrices_) {
    if (m.size() != tokens_.size()) {
      throw AttentionFormatError("matrix dimension " + std::to_string(m.size()) +
                                 " does not match token count " + std::to_string(tokens_.size()));
    }
  }
}

const SquareMatrix& AttentionRecord::matrix(long layer, long head) const {
  const long l = layer < 0 ? static_cast<long>(layers_) + layer : layer;
  if (l < 0 || l >= static_cast<long>(layers_)) {
    throw IndexOutOfRange("layer " + std::to_string(layer) + " out of range for " +
                          std::to_string(layers_) + " layers");
  }
  if (head < 0 || head >= static_cast<long>(heads_)) {
    throw IndexOutOfRange("head " + std::to_string(head) + " out of range for " +
                          std::to_string(heads_) + " heads");
  }
  return matrices_[static_cast<std::size_t>(l) * heads_ + static_cast<std::size_t>(head)];
}

AttentionRecord attention_from_json(const nlohmann::json& doc) {
  auto fail = [](const std::string& why) -> AttentionFormatError {
    return AttentionFormatError("attention file: " + why);
  };
  if (!doc.is_object()) throw fail("top level must be an object");
  for (const char* key : {"model_id", "prompt", "tokens", "shape", "attention"}) {
    if (!doc.contains(key)) throw fail(std::string("missing field '") + key + "'");
  }
  if (!doc["model_id"].is_string()) throw fail("model_id must be a string");
  if (!doc["prompt"].is_string()) throw fail("prompt must be a string");
  if (!doc["tokens"].is_array()) throw fail("tokens must be an array");
  std::vector<std::string> tokens;
  for (const auto& t : doc["tokens"]) {
    if (!t.is_string()) throw fail("tokens must be strings");
    tokens.push_back(t.get<std::string>());
  }
  const auto& shape = doc["shape"];
  for (const char* key : {"layers", "heads", "n"}) {
    if (!shape.is_object() || !shape.contains(key) || !shape[key].is_number_unsigned()) {
      throw fail(std::string("shape.") + key + " must be a non-negative integer");
    }
  }
  const auto layers = shape["layers"].get<std::size_t>();
  const auto heads = shape["heads"].get<std::size_t>();
  const auto n = shape["n"].get<std::size_t>();
  if (layers == 0 || heads == 0) throw fail("shape.layers and shape.heads must be positive");
  if (n != tokens.size()) {
    throw fail("shape.n = " + std::to_string(n) + " but there are " + std::to_string(tokens.size()) +
               " tokens");
  }

  const auto& att = doc["attention"];
  if (!att.is_array() || att.size() != layers) throw fail("attention must have shape.layers entries");
  std::vector<SquareMatrix> matrices;
  matrices.reserve(layers * heads);
  for (std::size_t l = 0; l < layers; ++l) {
    if (!att[l].is_array() || att[l].size() != heads) {
      throw fail("attention[" + std::to_string(l) + "] must have shape.heads entries");
    }
    for (std::size_t h = 0; h < heads; ++h) {
      const auto& rows = att[l][h];
      const std::string where = "attention[" + std::to_string(l) + "][" + std::to_string(h) + "]";
      if (!rows.is_array() || rows.size() != n) throw fail(where + " must have n rows");
      SquareMatrix m(n);
      for (std::size_t j = 0; j < n; ++j) {
        if (!rows[j].is_array() || rows[j].size() != n) {
          throw fail(where + " row " + std::to_string(j) + " must have n entries");
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const auto& v = rows[j][i];
          if (!v.is_number()) throw fail(where + " entries must be numbers");
          const double x = v.get<double>();
          if (!std::isfinite(x) || x < 0.0) throw fail(where + " has a negative or non-finite entry");
          if (i > j && x > kCausalTolerance) {
            throw fail(where + " is not causal at (" + std::to_string(j) + ", " + std::to_string(i) + ")");
          }
          m(j, i) = x;
          sum += x;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
          throw fail(where + " row " + std::to_string(j) + " sums to " + std::to_string(sum));
        }
      }
      matrices.push_back(std::move(m));
    }
  }
  return AttentionRecord(doc["model_id"].get<std::string>(), doc["prompt"].get<std::string>(),
                         std::move(tokens), layers, heads, std::move(matrices));
}

AttentionRecord load_attention(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AttentionFormatError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw AttentionFormatError(path.string() + ": " + e.what());
  }
  return attention_from_json(doc);
}

nlohmann::ordered_json attention_to_json(const AttentionRecord& record) {
  nlohmann::ordered_json j;
  j["model_id"] = record.model_id();
  j["prompt"] = record.prompt();
  j["tokens"] = record.tokens();
  j["shape"] = {{"layers", record.layers()}, {"heads", record.heads()}, {"n", record.n()}};
  j["attention"] = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < record.layers(); ++l) {
    nlohmann::ordered_json layer = nlohmann::ordered_json::array();
    for (std::size_t h = 0; h < record.heads(); ++h) {
      const auto& m = record.matrix(static_cast<long>(l), static_cast<long>(h));
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (std::size_t r = 0; r < m.size(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < m.size(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
      }
      layer.push_back(std::move(rows));
    }
    j["attention"].push_back(std::move(layer));
  }
  return j;
}

TokenScores score_prompt(const AttentionRecord& record, long layer, long head, bool zero_first) {
  return token_scores(record.matrix(layer, head), zero_first);
}

namespace {

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Whitespace-only tokens get visible glyphs; others keep their spacing.
std::string visible_token(std::string_view token) {
  const bool blank = std::all_of(token.begin(), token.end(),
                                 [](unsigned char c) { return std::isspace(c) != 0; });
  if (!blank) return html_escape(token);
  std::string out;
  for (char c : token) {
    if (c == '\n') {
      out += "↵";
    } else if (c == '\t') {
      out += "⇥";
    } else {
      out += "␣";
    }
  }
  return out;
}

std::string fixed3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

std::string render_token_html(const std::vector<std::string>& tokens, const std::vector<double>& s_norm,
                              std::string_view title) {
  if (tokens.size() != s_norm.size()) {
    throw LengthMismatch(std::to_string(tokens.size()) + " tokens but " +
                         std::to_string(s_norm.size()) + " scores");
  }
  std::string out;
  out += "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>";
  out += html_escape(title);
  out += "</title>\n<style>\n"
         "body { font-family: monospace; }\n"
         ".tokens { white-space: pre-wrap; line-height: 1.8; }\n"
         ".tok { padding: 1px 0; }\n"
         ".legend { margin-top: 1em; display: flex; align-items: center; gap: 0.5em; }\n"
         ".bar { width: 240px; height: 14px; border: 1px solid #888; "
         "background: linear-gradient(to right, rgba(220, 38, 38, 0), rgba(220, 38, 38, 1)); }\n"
         "</style>\n</head>\n<body>\n<div class=\"tokens\">";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string score = fixed3(std::clamp(s_norm[i], 0.0, 1.0));
    out += "<span class=\"tok\" data-score=\"" + score +
           "\" style=\"background-color: rgba(220, 38, 38, " + score + ")\">";
    out += visible_token(tokens[i]);
    out += "</span>";
  }
  out += "</div>\n<div class=\"legend\"><span>0</span><div class=\"bar\"></div><span>1</span>"
         "</div>\n</body>\n</html>\n";
  return out;
}

std::vector<std::size_t> argmax_keys_excluding_first(const SquareMatrix& a) {
  std::vector<std::size_t> out;
  if (a.size() < 2) return out;
  for (std::size_t j = 0; j < a.size(); ++j) {
    std::size_t best = 1;
    for (std::size_t i = 2; i < a.size(); ++i) {
      if (a(j, i) > a(j, best)) best = i;
    }
    out.push_back(best);
  }
  return out;
}

HeadTable export_head_matrix(const AttentionRecord& record, long layer, long head) {
  const SquareMatrix& m = record.matrix(layer, head);
  return {record.tokens(), m, argmax_keys_excluding_first(m)};
}

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r ") == std::string_view::npos && !s.empty()) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string head_table_csv(const HeadTable& table) {
  std::string out = "query";
  for (const auto& t : table.tokens) out += "," + csv_field(t);
  out += ",argmax_key_excl_first\n";
  const std::size_t n = table.matrix.size();
  for (std::size_t j = 0; j < n; ++j) {
    out += csv_field(table.tokens[j]);
    for (std::size_t i = 0; i < n; ++i) {
      char buf[40];
      std::snprintf(buf, sizeof buf, ",%.17g", table.matrix(j, i));
      out += buf;
    }
    out += ",";
    if (j < table.argmax_key.size()) out += csv_field(table.tokens[table.argmax_key[j]]);
    out += "\n";
  }
  return out;
}

}  // namespace cotbench
