#include "expr.hpp"

#include <cctype>
#include <cstdlib>

#include "ibplab/netmodel.hpp"

namespace ibplab::detail {
namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::map<std::string, double>& params)
      : text_(text), params_(params) {}

  double parse() {
    const double value = sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return value;
  }

 private:
  double sum() {
    double value = product();
    for (;;) {
      skip_space();
      if (accept('+')) {
        value += product();
      } else if (accept('-')) {
        value -= product();
      } else {
        return value;
      }
    }
  }

  double product() {
    double value = unary();
    for (;;) {
      skip_space();
      if (accept('*')) {
        value *= unary();
      } else if (accept('/')) {
        const double divisor = unary();
        if (divisor == 0.0) fail("division by zero");
        value /= divisor;
      } else {
        return value;
      }
    }
  }

  double unary() {
    skip_space();
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return atom();
  }

  double atom() {
    skip_space();
    if (accept('(')) {
      const double value = sum();
      skip_space();
      if (!accept(')')) fail("missing ')'");
      return value;
    }
    if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return value;
    }
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      const auto it = params_.find(name);
      if (it == params_.end()) fail("unknown parameter '" + name + "'");
      return it->second;
    }
    fail("expected a value");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("expression \"" + text_ + "\": " + what);
  }

  const std::string& text_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

}  // namespace

double evaluate_expression(const std::string& text, const std::map<std::string, double>& params) {
  return Parser(text, params).parse();
}

}  // namespace ibplab::detail
