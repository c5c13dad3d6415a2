// Copyright 2026 The tvobs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tvobs/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

#include "tvobs/errors.hpp"

namespace tvobs {

enum class Kind { kConst, kTime, kSin, kCos, kAdd, kSub, kMul, kNeg };

struct ExprNode {
  Kind kind;
  double value = 0.0;
  std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(Kind k, double v, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->value = v;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Expr::Expr() : node_(make_node(Kind::kConst, 0.0)) {}

Expr Expr::constant(double v) { return Expr(make_node(Kind::kConst, v)); }
Expr Expr::time() { return Expr(make_node(Kind::kTime, 0.0)); }
Expr Expr::sin(Expr a) {
  return Expr(make_node(Kind::kSin, 0.0, std::move(a.node_)));
}
Expr Expr::cos(Expr a) {
  return Expr(make_node(Kind::kCos, 0.0, std::move(a.node_)));
}
Expr Expr::add(Expr a, Expr b) {
  return Expr(make_node(Kind::kAdd, 0.0, std::move(a.node_), std::move(b.node_)));
}
Expr Expr::sub(Expr a, Expr b) {
  return Expr(make_node(Kind::kSub, 0.0, std::move(a.node_), std::move(b.node_)));
}
Expr Expr::mul(Expr a, Expr b) {
  return Expr(make_node(Kind::kMul, 0.0, std::move(a.node_), std::move(b.node_)));
}
Expr Expr::neg(Expr a) {
  // Negated constants fold so printing stays a plain literal.
  if (a.node_->kind == Kind::kConst) return constant(-a.node_->value);
  return Expr(make_node(Kind::kNeg, 0.0, std::move(a.node_)));
}

namespace {

double eval_node(const ExprNode& n, double t) {
  switch (n.kind) {
    case Kind::kConst: return n.value;
    case Kind::kTime: return t;
    case Kind::kSin: return std::sin(eval_node(*n.a, t));
    case Kind::kCos: return std::cos(eval_node(*n.a, t));
    case Kind::kAdd: return eval_node(*n.a, t) + eval_node(*n.b, t);
    case Kind::kSub: return eval_node(*n.a, t) - eval_node(*n.b, t);
    case Kind::kMul: return eval_node(*n.a, t) * eval_node(*n.b, t);
    case Kind::kNeg: return -eval_node(*n.a, t);
  }
  return 0.0;
}

bool node_has_time(const ExprNode& n) {
  if (n.kind == Kind::kTime) return true;
  if (n.a && node_has_time(*n.a)) return true;
  if (n.b && node_has_time(*n.b)) return true;
  return false;
}

// Precedence levels: additive 1, multiplicative 2, unary and atoms 3.
int precedence(Kind k) {
  switch (k) {
    case Kind::kAdd:
    case Kind::kSub:
      return 1;
    case Kind::kMul:
      return 2;
    default:
      return 3;
  }
}

void print_node(const ExprNode& n, int parent_prec, std::string& out) {
  const int prec = precedence(n.kind);
  const bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (n.kind) {
    case Kind::kConst:
      out += format_double(n.value);
      break;
    case Kind::kTime:
      out += 't';
      break;
    case Kind::kSin:
    case Kind::kCos:
      out += (n.kind == Kind::kSin) ? "sin(" : "cos(";
      print_node(*n.a, 0, out);
      out += ')';
      break;
    case Kind::kAdd:
      print_node(*n.a, 1, out);
      out += " + ";
      print_node(*n.b, 2, out);
      break;
    case Kind::kSub:
      print_node(*n.a, 1, out);
      out += " - ";
      print_node(*n.b, 2, out);
      break;
    case Kind::kMul:
      print_node(*n.a, 2, out);
      out += '*';
      print_node(*n.b, 3, out);
      break;
    case Kind::kNeg:
      out += '-';
      print_node(*n.a, 3, out);
      break;
  }
  if (parens) out += ')';
}

class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw EvalError("expression error at column " + std::to_string(pos_ + 1) +
                    ": " + msg + " in \"" + text_ + "\"");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr left = parse_product();
    for (;;) {
      if (consume('+')) {
        left = make_node(Kind::kAdd, 0.0, left, parse_product());
      } else if (consume('-')) {
        left = make_node(Kind::kSub, 0.0, left, parse_product());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr left = parse_unary();
    while (consume('*')) {
      left = make_node(Kind::kMul, 0.0, left, parse_unary());
    }
    return left;
  }

  NodePtr parse_unary() {
    if (consume('-')) {
      NodePtr inner = parse_unary();
      if (inner->kind == Kind::kConst) {
        return make_node(Kind::kConst, -inner->value);
      }
      return make_node(Kind::kNeg, 0.0, inner);
    }
    return parse_atom();
  }

  NodePtr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return parse_word();
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - start);
    return make_node(Kind::kConst, v);
  }

  NodePtr parse_word() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string word = text_.substr(begin, pos_ - begin);
    if (word == "t") return make_node(Kind::kTime, 0.0);
    if (word == "sin" || word == "cos") {
      if (!consume('(')) fail("expected '(' after " + word);
      NodePtr arg = parse_sum();
      if (!consume(')')) fail("expected ')'");
      return make_node(word == "sin" ? Kind::kSin : Kind::kCos, 0.0, arg);
    }
    pos_ = begin;
    fail("unknown symbol \"" + word + "\"");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text) {
  return Expr(ExprParser(text).run());
}

double Expr::eval(double t) const { return eval_node(*node_, t); }

bool Expr::depends_on_time() const { return node_has_time(*node_); }

std::string Expr::str() const {
  std::string out;
  print_node(*node_, 0, out);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

}  // namespace tvobs
