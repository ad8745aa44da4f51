#include "tbe/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "tbe/errors.hpp"

namespace tbe {

namespace {

struct Token {
  std::string_view text;
  std::size_t line = 0;
};

// Splits text into whitespace-separated tokens grouped by line. Empty lines
// are dropped.
class Lexer {
 public:
  explicit Lexer(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
      ++line_no;
      std::vector<Token> toks;
      std::size_t i = pos;
      while (i < end) {
        while (i < end && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < end && !is_space(text[i])) ++i;
        if (i > start) toks.push_back({text.substr(start, i - start), line_no});
      }
      if (!toks.empty()) lines_.push_back(std::move(toks));
      last_line_ = line_no;
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
  }

  bool at_end() const { return line_ >= lines_.size(); }

  std::size_t line() const { return at_end() ? last_line_ : lines_[line_][0].line; }

  Token next(const char* what) {
    if (at_end()) throw ParseError(last_line_, std::string("unexpected end of input, expected ") + what);
    Token t = lines_[line_][col_++];
    if (col_ == lines_[line_].size()) {
      ++line_;
      col_ = 0;
    }
    return t;
  }

  std::optional<Token> peek() const {
    if (at_end()) return std::nullopt;
    return lines_[line_][col_];
  }

  // The remaining tokens must start at a line boundary; returns that whole line.
  const std::vector<Token>& next_line(const char* what) {
    if (col_ != 0) throw ParseError(lines_[line_][col_].line, std::string("unexpected tokens before ") + what);
    if (at_end()) throw ParseError(last_line_, std::string("unexpected end of input, expected ") + what);
    return lines_[line_++];
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

  std::vector<std::vector<Token>> lines_;
  std::size_t line_ = 0;
  std::size_t col_ = 0;
  std::size_t last_line_ = 0;
};

template <class T>
std::optional<T> to_number(std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

long long integer(const Token& t, const char* what) {
  auto v = to_number<long long>(t.text);
  if (!v) throw ParseError(t.line, std::string("expected integer ") + what + ", got '" + std::string(t.text) + "'");
  return *v;
}

std::size_t count(const Token& t, const char* what) {
  const long long v = integer(t, what);
  if (v < 0) throw ParseError(t.line, std::string("negative ") + what);
  return static_cast<std::size_t>(v);
}

double number(const Token& t, const char* what) {
  auto v = to_number<double>(t.text);
  if (!v || std::isnan(*v))
    throw ParseError(t.line, std::string("expected number ") + what + ", got '" + std::string(t.text) + "'");
  return *v;
}

std::string format_cost(Cost c) {
  char buf[64];
  if (std::nearbyint(c) == c && std::fabs(c) < 9007199254740992.0)
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(c));
  else
    std::snprintf(buf, sizeof buf, "%.17g", c);
  return buf;
}

}  // namespace

Problem parse_wcsp(std::string_view text) {
  Lexer lex(text);
  Problem p;
  const Token name = lex.next("problem name");
  p.name = std::string(name.text);
  const std::size_t n = count(lex.next("variable count"), "variable count");
  const Token maxdom_tok = lex.next("maximum domain size");
  const std::size_t max_domain = count(maxdom_tok, "maximum domain size");
  const std::size_t e = count(lex.next("function count"), "function count");
  const Token ub_tok = lex.next("upper bound");
  const Cost ub = number(ub_tok, "upper bound");
  if (ub <= 0) throw ParseError(ub_tok.line, "upper bound must be positive");
  p.upper_bound = ub;
  const auto cap = [&](Cost c) { return c >= ub ? MinSumOps::top() : c; };

  for (std::size_t i = 0; i < n; ++i) {
    const Token t = lex.next("domain size");
    const std::size_t d = count(t, "domain size");
    if (d == 0) throw ParseError(t.line, "empty domain");
    if (d > max_domain) throw ParseError(t.line, "domain size above the declared maximum");
    p.domains.push_back(d);
  }

  std::vector<std::size_t> shared;  // function indices of shareable tables
  std::vector<ValueIndex> tuple;
  for (std::size_t f = 0; f < e; ++f) {
    const Token arity_tok = lex.next("function arity");
    const long long signed_arity = integer(arity_tok, "arity");
    const bool shareable = signed_arity < 0;
    const std::size_t arity = static_cast<std::size_t>(shareable ? -signed_arity : signed_arity);
    CostFunction fn;
    std::vector<std::size_t> dims;
    for (std::size_t k = 0; k < arity; ++k) {
      const Token t = lex.next("scope variable");
      const std::size_t v = count(t, "variable id");
      if (v >= n) throw ParseError(t.line, "variable id " + std::to_string(v) + " out of range");
      for (VarId u : fn.scope)
        if (u == v) throw ParseError(t.line, "variable " + std::to_string(v) + " repeated in scope");
      fn.scope.push_back(static_cast<VarId>(v));
      dims.push_back(p.domains[v]);
    }
    const Token def_tok = lex.next("default cost");
    if (!to_number<double>(def_tok.text)) throw ParseError(def_tok.line, "global cost functions are not supported");
    const Cost def = number(def_tok, "default cost");
    if (def == -1) {
      const auto next = lex.peek();
      if (next && !to_number<long long>(next->text))
        throw ParseError(next->line, "global cost function '" + std::string(next->text) + "' is not supported");
    }
    const Token nt_tok = lex.next("tuple count");
    const long long ntuples = integer(nt_tok, "tuple count");

    if (ntuples < 0) {
      const std::size_t ref = static_cast<std::size_t>(-ntuples - 1);
      if (ref >= shared.size()) throw ParseError(nt_tok.line, "reference to unknown shared function");
      const CostFunction& src = p.functions[shared[ref]];
      for (std::size_t k = 0; k < arity; ++k)
        if (k >= src.scope.size() || p.domains[src.scope[k]] != dims[k])
          throw ParseError(nt_tok.line, "shared function has incompatible domains");
      if (src.scope.size() != arity) throw ParseError(nt_tok.line, "shared function has a different arity");
      fn.costs = src.costs;
    } else {
      const std::size_t rows = checked_product(dims);
      if (rows > (std::size_t{1} << 32)) throw ParseError(arity_tok.line, "cost table too large");
      fn.costs.assign(rows, cap(def));
      tuple.resize(arity);
      for (long long t = 0; t < ntuples; ++t) {
        const auto& line = lex.next_line("tuple");
        if (line.size() != arity + 1)
          throw ParseError(line[0].line, "tuple line has " + std::to_string(line.size()) + " entries, expected " +
                                             std::to_string(arity + 1));
        for (std::size_t k = 0; k < arity; ++k) {
          const std::size_t val = count(line[k], "value");
          if (val >= dims[k]) throw ParseError(line[k].line, "value " + std::to_string(val) + " outside domain");
          tuple[k] = static_cast<ValueIndex>(val);
        }
        fn.costs[lex_rank(tuple, dims)] = cap(number(line[arity], "cost"));
      }
    }
    if (shareable) shared.push_back(p.functions.size());
    p.functions.push_back(std::move(fn));
  }
  if (!lex.at_end()) throw ParseError(lex.line(), "unexpected content after the last function");
  return p;
}

Problem read_wcsp_file(const std::string& path) { return parse_wcsp(read_text_file(path)); }

std::string write_wcsp(const Problem& problem) {
  problem.validate();
  if (!problem.task.minimizes()) throw PreconditionError("only min-sum problems can be written as WCSP");
  Cost sum = 0.0;
  for (const auto& f : problem.functions) {
    Cost m = 0.0;
    for (Cost c : f.costs)
      if (std::isfinite(c)) m = std::max(m, c);
    sum += m;
  }
  Cost ub = std::floor(sum) + 1.0;
  if (problem.upper_bound && *problem.upper_bound > ub) ub = *problem.upper_bound;
  const auto out_cost = [&](Cost c) { return std::isfinite(c) ? format_cost(c) : format_cost(ub); };

  std::string name = problem.name.empty() ? "problem" : problem.name;
  for (char& c : name)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') c = '_';

  std::ostringstream os;
  os << name << ' ' << problem.num_variables() << ' ' << problem.max_domain() << ' ' << problem.functions.size()
     << ' ' << format_cost(ub) << '\n';
  for (std::size_t v = 0; v < problem.num_variables(); ++v) os << (v ? " " : "") << problem.domains[v];
  os << '\n';

  std::vector<ValueIndex> tuple;
  std::vector<std::size_t> dims;
  for (const auto& f : problem.functions) {
    std::map<Cost, std::size_t> freq;
    for (Cost c : f.costs) ++freq[c];
    Cost def = f.costs.empty() ? 0.0 : f.costs[0];
    std::size_t best = 0;
    for (const auto& [c, k] : freq)
      if (k > best) {
        best = k;
        def = c;
      }
    dims.clear();
    for (VarId v : f.scope) dims.push_back(problem.domains[v]);
    os << f.scope.size();
    for (VarId v : f.scope) os << ' ' << v;
    os << ' ' << out_cost(def) << ' ' << (f.costs.size() - best) << '\n';
    tuple.resize(f.scope.size());
    for (std::size_t r = 0; r < f.costs.size(); ++r) {
      if (f.costs[r] == def) continue;
      lex_unrank(r, dims, tuple);
      for (ValueIndex x : tuple) os << x << ' ';
      os << out_cost(f.costs[r]) << '\n';
    }
  }
  return os.str();
}

UaiModel parse_uai(std::string_view text, double tolerance) {
  Lexer lex(text);
  UaiModel model;
  BeliefNetwork& bn = model.network;
  const Token kind = lex.next("model type");
  if (kind.text == "MARKOV") throw ParseError(kind.line, "MARKOV models are not supported");
  if (kind.text != "BAYES") throw ParseError(kind.line, "expected BAYES, got '" + std::string(kind.text) + "'");
  const std::size_t n = count(lex.next("variable count"), "variable count");
  for (std::size_t i = 0; i < n; ++i) {
    const Token t = lex.next("domain size");
    const std::size_t d = count(t, "domain size");
    if (d == 0) throw ParseError(t.line, "empty domain");
    bn.domains.push_back(d);
  }
  const std::size_t m = count(lex.next("function count"), "function count");
  for (std::size_t f = 0; f < m; ++f) {
    const Token size_tok = lex.next("scope size");
    const std::size_t k = count(size_tok, "scope size");
    if (k == 0) throw ParseError(size_tok.line, "a CPT needs at least its child variable");
    CostFunction cpt;
    for (std::size_t j = 0; j < k; ++j) {
      const Token t = lex.next("scope variable");
      const std::size_t v = count(t, "variable id");
      if (v >= n) throw ParseError(t.line, "variable id " + std::to_string(v) + " out of range");
      for (VarId u : cpt.scope)
        if (u == v) throw ParseError(t.line, "variable " + std::to_string(v) + " repeated in scope");
      cpt.scope.push_back(static_cast<VarId>(v));
    }
    bn.child.push_back(cpt.scope.back());
    bn.cpts.push_back(std::move(cpt));
  }
  for (auto& cpt : bn.cpts) {
    const Token t = lex.next("table size");
    const std::size_t rows = count(t, "table size");
    if (rows != table_size(cpt.scope, bn.domains))
      throw ParseError(t.line, "table size " + std::to_string(rows) + " does not match the scope");
    cpt.costs.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const Token v = lex.next("probability");
      const double p = number(v, "probability");
      if (p < 0.0 || p > 1.0 + tolerance) throw ParseError(v.line, "probability outside [0, 1]");
      cpt.costs.push_back(p);
    }
  }
  if (!lex.at_end()) throw ParseError(lex.line(), "unexpected content after the last table");
  try {
    bn.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(0, e.what());
  }
  const double err = bn.max_normalization_error();
  if (err > tolerance)
    model.warnings.push_back("CPT normalization off by " + std::to_string(err) + " (tolerance " +
                             std::to_string(tolerance) + ")");
  return model;
}

UaiModel read_uai_file(const std::string& path) { return parse_uai(read_text_file(path)); }

Assignment parse_evidence(std::string_view text, std::span<const std::size_t> domains) {
  Lexer lex(text);
  std::vector<Token> toks;
  while (!lex.at_end()) toks.push_back(lex.next("evidence"));
  Assignment a(domains.size());
  if (toks.empty()) return a;
  std::size_t i = 0;
  std::size_t k = count(toks[0], "evidence count");
  // Multi-sample layout "1 count pairs..." with a single sample.
  if (toks.size() != 1 + 2 * k && k == 1 && toks.size() >= 2) {
    const std::size_t k2 = count(toks[1], "evidence count");
    if (toks.size() == 2 + 2 * k2) {
      k = k2;
      i = 1;
    }
  }
  if (toks.size() != i + 1 + 2 * k)
    throw ParseError(toks.back().line, "evidence lists " + std::to_string(k) + " pairs but has " +
                                           std::to_string(toks.size() - i - 1) + " values");
  for (std::size_t j = 0; j < k; ++j) {
    const Token& vt = toks[i + 1 + 2 * j];
    const Token& xt = toks[i + 2 + 2 * j];
    const std::size_t v = count(vt, "variable id");
    const std::size_t x = count(xt, "value");
    if (v >= domains.size()) throw ParseError(vt.line, "variable id " + std::to_string(v) + " out of range");
    if (x >= domains[v]) throw ParseError(xt.line, "value " + std::to_string(x) + " outside domain");
    if (a.has(static_cast<VarId>(v))) throw ParseError(vt.line, "variable " + std::to_string(v) + " observed twice");
    a.set(static_cast<VarId>(v), static_cast<ValueIndex>(x));
  }
  return a;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace tbe
