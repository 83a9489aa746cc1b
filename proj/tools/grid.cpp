#include "grid.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace wml::cli {

namespace {

class Parser {
public:
  Parser(const std::string& s, double K, double L) : s_(s), K_(K), L_(L) {}

  double parse() {
    double v = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + s_.substr(pos_) + "'");
    return v;
  }

private:
  const std::string& s_;
  double K_, L_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& what) const {
    throw std::invalid_argument("bad expression '" + s_ + "': " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }

  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  // right associative and tighter than unary minus: -2^2 = -4, 2^-1 = 0.5
  double power() {
    double base = primary();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip();
    if (eat('(')) {
      double v = expr();
      if (!eat(')')) error("missing ')'");
      return v;
    }
    if (pos_ >= s_.size()) error("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) error("bad number");
      pos_ += end - begin;
      return v;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    if (name == "K") return K_;
    if (name == "L") return L_;
    if (name == "log" || name == "sqrt" || name == "exp") {
      if (!eat('(')) error("expected '(' after " + name);
      double a = expr();
      if (!eat(')')) error("missing ')'");
      return name == "log" ? std::log(a) : name == "sqrt" ? std::sqrt(a) : std::exp(a);
    }
    error(name.empty() ? "unexpected '" + std::string(1, c) + "'" : "unknown name '" + name + "'");
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string::npos) return out;
    start = p + 1;
  }
}

}  // namespace

double eval_expr(const std::string& text, double K, double L) {
  double v = Parser(text, K, L).parse();
  if (!std::isfinite(v)) throw std::invalid_argument("expression '" + text + "' is not finite");
  return v;
}

std::vector<double> parse_grid(const std::string& spec, double K, double L) {
  std::vector<std::string> parts = split(spec, ':');
  if (parts.size() == 1) {
    std::vector<double> out;
    for (const std::string& e : split(spec, ',')) out.push_back(eval_expr(e, K, L));
    return out;
  }
  if (parts.size() != 4 || (parts[0] != "lin" && parts[0] != "log")) {
    throw std::invalid_argument("bad grid '" + spec + "': expected lin:a:b:n, log:a:b:n or a list");
  }
  double a = eval_expr(parts[1], K, L), b = eval_expr(parts[2], K, L);
  double nd = eval_expr(parts[3], K, L);
  if (nd < 1 || nd != std::floor(nd) || nd > 1e6) throw std::invalid_argument("bad grid '" + spec + "': n must be a positive integer");
  long n = static_cast<long>(nd);
  bool geometric = parts[0] == "log";
  if (geometric && (a <= 0 || b <= 0)) throw std::invalid_argument("bad grid '" + spec + "': log grid needs positive endpoints");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) {
    double f = n == 1 ? 0 : double(i) / double(n - 1);
    if (i == n - 1) out.push_back(b);
    else out.push_back(geometric ? a * std::pow(b / a, f) : a + (b - a) * f);
  }
  if (n == 1) out.back() = a;
  return out;
}

}  // namespace wml::cli
