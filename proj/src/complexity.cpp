#include "shuffle_levels/complexity.hpp"

#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace shuffle_levels {

std::string AffineCount::to_string() const {
  if (coeff == 0) return std::to_string(constant);
  std::string out = coeff == 1 ? "n" : std::to_string(coeff) + "n";
  if (constant > 0) out += "+" + std::to_string(constant);
  if (constant < 0) out += "-" + std::to_string(-constant);
  return out;
}

namespace {

class CountExprParser {
 public:
  explicit CountExprParser(std::string_view text) : text_(text) {}

  AffineCount parse() {
    AffineCount acc = term();
    while (true) {
      skip_spaces();
      if (at_end()) break;
      const char op = text_[pos_];
      if (op != '+' && op != '-') fail("expected '+' or '-'");
      ++pos_;
      const AffineCount t = term();
      const int sign = op == '+' ? 1 : -1;
      acc.coeff = checked_add(acc.coeff, sign * t.coeff);
      acc.constant = checked_add(acc.constant, sign * t.constant);
    }
    if (acc.coeff < 0) fail("negative coefficient of n");
    return acc;
  }

 private:
  // term := int | [int] "n"
  AffineCount term() {
    skip_spaces();
    std::int64_t value = 1;
    bool has_int = false;
    if (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = integer();
      has_int = true;
    }
    if (!at_end() && text_[pos_] == 'n') {
      ++pos_;
      if (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '^' || text_[pos_] == '*' || text_[pos_] == '(')) {
        fail("only affine expressions in n are supported");
      }
      return {value, 0};
    }
    if (!has_int) fail("expected an integer or n");
    if (!at_end() && (text_[pos_] == '*' || text_[pos_] == '^' || text_[pos_] == '/')) {
      fail("only affine expressions in n are supported");
    }
    return {0, value};
  }

  std::int64_t integer() {
    std::int64_t v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (v > (std::numeric_limits<std::int64_t>::max() - 9) / 10) fail("integer too large");
      v = v * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) fail("integer overflow");
    return r;
  }

  void skip_spaces() {
    while (!at_end() && text_[pos_] == ' ') ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("bad count expression \"" + std::string(text_) + "\" at offset " +
                     std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

AffineCount parse_count_expr(std::string_view text) { return CountExprParser(text).parse(); }

std::string format_tuple(const ComplexityTuple& t) {
  std::string out = "(";
  for (int i = 0; i < kTupleSlots; ++i) {
    if (i) out += ',';
    out += t[i].to_string();
  }
  return out + ")";
}

std::string format_tuple(const EvaluatedTuple& t) {
  std::string out = "(";
  for (int i = 0; i < kTupleSlots; ++i) {
    if (i) out += ',';
    out += std::to_string(t[i]);
  }
  return out + ")";
}

EvaluatedTuple evaluate_tuple(const ComplexityTuple& t, std::int64_t n) {
  if (n < 1) throw std::domain_error("tuple parameter n must be at least 1");
  EvaluatedTuple out{};
  for (int i = 0; i < kTupleSlots; ++i) {
    out[i] = t[i].at(n);
    if (out[i] < 0) {
      throw std::domain_error("slot a" + std::to_string(i + 1) + " = " + t[i].to_string() +
                              " is negative at n = " + std::to_string(n));
    }
  }
  return out;
}

// ------------------------------------------------------------------ corpus

namespace {

class CorpusReader {
 public:
  explicit CorpusReader(std::string_view text) : text_(text) {}

  std::vector<ProtocolRecord> read() {
    std::size_t start = 0;
    while (start <= text_.size()) {
      const auto nl = text_.find('\n', start);
      std::string_view line =
          text_.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      ++line_no_;
      handle(strip(line));
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
    finish_block();
    return std::move(records_);
  }

 private:
  struct Pending {
    std::optional<std::string> name, reference;
    std::optional<std::vector<std::string>> tuple;
    int line = 0;
  };

  void handle(std::string_view line) {
    if (line.empty()) return;
    if (line == "[protocol]") {
      finish_block();
      block_ = Pending{};
      block_->line = line_no_;
      return;
    }
    if (line.front() == '[') fail("unknown section " + std::string(line));
    if (!block_) fail("key outside a [protocol] block");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const auto key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key == "name") {
      set_once(block_->name, read_string(value, true), key);
    } else if (key == "reference") {
      set_once(block_->reference, read_string(value, true), key);
    } else if (key == "tuple") {
      set_once(block_->tuple, read_array(value), key);
    } else {
      fail("unknown key " + std::string(key));
    }
  }

  template <typename T>
  void set_once(std::optional<T>& slot, T value, std::string_view key) {
    if (slot) fail("duplicate key " + std::string(key));
    slot = std::move(value);
  }

  void finish_block() {
    if (!block_) return;
    Pending b = std::move(*block_);
    block_.reset();
    const int here = line_no_;
    line_no_ = b.line;
    if (!b.name) fail("block is missing name");
    if (!b.reference) fail("block is missing reference");
    if (!b.tuple) fail("block is missing tuple");
    if (b.tuple->size() != kTupleSlots) fail("tuple must have five components");
    if (!names_.insert(*b.name).second) fail("duplicate protocol name \"" + *b.name + "\"");
    ProtocolRecord rec{*b.name, *b.reference, {}, false};
    for (int i = 0; i < kTupleSlots; ++i) {
      try {
        rec.tuple[i] = parse_count_expr((*b.tuple)[i]);
      } catch (const ParseError& e) {
        fail(e.what());
      }
      if (rec.tuple[i].at(1) < 0) fail("tuple component negative at n = 1");
      rec.parameterized = rec.parameterized || rec.tuple[i].parameterized();
    }
    records_.push_back(std::move(rec));
    line_no_ = here;
  }

  // Parses a double-quoted string starting at value[0]. When `whole`, nothing
  // may follow the closing quote.
  std::string read_string(std::string_view& value, bool whole) {
    if (value.empty() || value.front() != '"') fail("expected a quoted string");
    std::string out;
    std::size_t i = 1;
    for (; i < value.size() && value[i] != '"'; ++i) {
      if (value[i] == '\\') {
        if (++i == value.size()) break;
        if (value[i] != '"' && value[i] != '\\') fail("unsupported escape");
      }
      out += value[i];
    }
    if (i >= value.size()) fail("unterminated string");
    value.remove_prefix(i + 1);
    if (whole && !trim(value).empty()) fail("trailing text after string");
    return out;
  }

  std::vector<std::string> read_array(std::string_view value) {
    if (value.empty() || value.front() != '[') fail("expected [ ... ]");
    value.remove_prefix(1);
    std::vector<std::string> out;
    value = trim(value);
    if (!value.empty() && value.front() == ']') {
      value.remove_prefix(1);
    } else {
      while (true) {
        value = trim(value);
        out.push_back(read_string(value, false));
        value = trim(value);
        if (value.empty()) fail("unterminated array");
        if (value.front() == ']') {
          value.remove_prefix(1);
          break;
        }
        if (value.front() != ',') fail("expected ',' or ']'");
        value.remove_prefix(1);
      }
    }
    if (!trim(value).empty()) fail("trailing text after array");
    return out;
  }

  // Drops a trailing comment that is not inside quotes, then trims.
  static std::string_view strip(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '\\' && quoted) {
        ++i;
      } else if (line[i] == '"') {
        quoted = !quoted;
      } else if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    return trim(line);
  }

  static std::string_view trim(std::string_view v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = v.find_last_not_of(" \t\r");
    return v.substr(b, e - b + 1);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("corpus line " + std::to_string(line_no_) + ": " + what);
  }

  std::string_view text_;
  int line_no_ = 0;
  std::optional<Pending> block_;
  std::vector<ProtocolRecord> records_;
  std::unordered_set<std::string> names_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<ProtocolRecord> load_corpus(std::string_view text) {
  return CorpusReader(text).read();
}

std::vector<ProtocolRecord> load_corpus_file(const std::filesystem::path& path) {
  return load_corpus(read_file(path));
}

std::string serialize_corpus(const std::vector<ProtocolRecord>& records) {
  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i) out += '\n';
    out += "[protocol]\n";
    out += "name = " + quote(r.name) + "\n";
    out += "reference = " + quote(r.reference) + "\n";
    out += "tuple = [";
    for (int s = 0; s < kTupleSlots; ++s) {
      if (s) out += ',';
      out += quote(r.tuple[s].to_string());
    }
    out += "]\n";
  }
  return out;
}

std::vector<ProtocolRecord> bundled_corpus() { return load_corpus(bundled_corpus_text()); }

// ------------------------------------------------------------------ traces

ShuffleTrace parse_trace(std::string_view text) {
  ShuffleTrace trace;
  std::optional<DeckSize> n;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) continue;
    line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
    try {
      if (!n) {
        if (line.front() != 'n') throw ParseError("expected header line \"n = N\"");
        line.remove_prefix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '=')) line.remove_prefix(1);
        int value = 0;
        for (char c : line) {
          if (!std::isdigit(static_cast<unsigned char>(c)) || value > 100) {
            throw ParseError("bad deck size in header");
          }
          value = value * 10 + (c - '0');
        }
        if (line.empty()) throw ParseError("missing deck size in header");
        n = DeckSize(value);
        trace.n = value;
        continue;
      }
      trace.steps.push_back(parse_set(line, *n));
    } catch (const ParseError& e) {
      throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!n) throw ParseError("trace has no header line");
  return trace;
}

ComplexityTuple tuple_of_trace(const ShuffleTrace& trace, ClosureCache& cache) {
  EvaluatedTuple counts{};
  for (const auto& step : trace.steps) {
    if (step.empty()) throw std::invalid_argument("trace step is empty");
    int slot = -1;
    switch (classify_atomic(step)) {
      case ShuffleCategory::kDeterministic: break;
      case ShuffleCategory::kSS: slot = 0; break;
      case ShuffleCategory::kRC: slot = 1; break;
      case ShuffleCategory::kPssRpc: slot = 2; break;
      case ShuffleCategory::kUnequal: slot = 3; break;
      case ShuffleCategory::kOther: {
        const auto level = min_level(cache, DeckSize(trace.n), step);
        slot = level ? to_int(*level) - 1 : 4;
        break;
      }
    }
    if (slot >= 0) ++counts[static_cast<std::size_t>(slot)];
  }
  ComplexityTuple out;
  for (int i = 0; i < kTupleSlots; ++i) out[i] = {0, counts[i]};
  return out;
}

std::string_view dominance_name(Dominance d) {
  switch (d) {
    case Dominance::kDominates: return "dominates";
    case Dominance::kDominated: return "dominated";
    case Dominance::kEqual: return "equal";
    case Dominance::kIncomparable: return "incomparable";
  }
  return "?";
}

Dominance compare_tuples(const ComplexityTuple& lhs, const ComplexityTuple& rhs, std::int64_t n) {
  const auto a = evaluate_tuple(lhs, n);
  const auto b = evaluate_tuple(rhs, n);
  bool some_less = false;
  bool some_greater = false;
  for (int i = 0; i < kTupleSlots; ++i) {
    some_less = some_less || a[i] < b[i];
    some_greater = some_greater || a[i] > b[i];
  }
  if (some_less && some_greater) return Dominance::kIncomparable;
  if (some_less) return Dominance::kDominates;
  if (some_greater) return Dominance::kDominated;
  return Dominance::kEqual;
}

}  // namespace shuffle_levels
