#include "carrot/minilang.hpp"

#include <cctype>
#include <map>

#include "text_format.hpp"

namespace carrot::mini {

LangError::LangError(std::string message, SrcPos pos)
    : std::runtime_error("line " + std::to_string(pos.line) + ":" +
                         std::to_string(pos.col) + ": " + message),
      message_(std::move(message)),
      pos_(pos) {}

std::optional<std::size_t> Program::find_function(std::string_view name) const {
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (functions[i].name == name) return i;
  return std::nullopt;
}

namespace {

enum class Tok : uint8_t {
  Ident, Int,
  KwFn, KwLet, KwIf, KwElse, KwReturn, KwHalt,
  LParen, RParen, LBrace, RBrace, Comma, Semi,
  Assign, EqEq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  int64_t value = 0;
  SrcPos pos;
};

Tok keyword_of(std::string_view word) {
  if (word == "fn") return Tok::KwFn;
  if (word == "let") return Tok::KwLet;
  if (word == "if") return Tok::KwIf;
  if (word == "else") return Tok::KwElse;
  if (word == "return") return Tok::KwReturn;
  if (word == "halt") return Tok::KwHalt;
  return Tok::Ident;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const SrcPos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_'))
        ++j;
      std::string_view word = src.substr(i, j - i);
      out.push_back({keyword_of(word), word, 0, pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::string_view digits = src.substr(i, j - i);
      int64_t value = 0;
      auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc() || ptr != digits.data() + digits.size())
        throw LangError("integer literal out of range (write 0 - n for negatives)",
                        pos);
      out.push_back({Tok::Int, digits, value, pos});
      advance(j - i);
      continue;
    }
    auto two = [&](char second) {
      return i + 1 < src.size() && src[i + 1] == second;
    };
    auto push = [&](Tok kind, std::size_t len) {
      out.push_back({kind, src.substr(i, len), 0, pos});
      advance(len);
    };
    switch (c) {
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '{': push(Tok::LBrace, 1); continue;
      case '}': push(Tok::RBrace, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ';': push(Tok::Semi, 1); continue;
      case '+': push(Tok::Plus, 1); continue;
      case '-': push(Tok::Minus, 1); continue;
      case '*': push(Tok::Star, 1); continue;
      case '=': two('=') ? push(Tok::EqEq, 2) : push(Tok::Assign, 1); continue;
      case '<': two('=') ? push(Tok::Le, 2) : push(Tok::Lt, 1); continue;
      case '>': two('=') ? push(Tok::Ge, 2) : push(Tok::Gt, 1); continue;
      case '!':
        if (two('=')) {
          push(Tok::Ne, 2);
          continue;
        }
        throw LangError("stray '!' (did you mean '!='?)", pos);
      default:
        throw LangError(std::string("unexpected character '") + c + "'", pos);
    }
  }
  out.push_back({Tok::End, {}, 0, {line, col}});
  return out;
}

std::string_view describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::KwFn: return "'fn'";
    case Tok::KwLet: return "'let'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwHalt: return "'halt'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Assign: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct PendingCall {
  Expr* node = nullptr;
  std::string name;
  SrcPos pos;
};

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program parse() {
    Program prog;
    if (peek().kind == Tok::End) throw LangError("no functions defined", peek().pos);
    while (peek().kind != Tok::End) prog.functions.push_back(function());
    resolve_calls(prog);
    for (const FunctionDef& fn : prog.functions) check_returns(fn);
    return prog;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }

  Token expect(Tok kind, std::string_view what) {
    if (peek().kind != kind)
      throw LangError("expected " + std::string(what) + ", found " +
                          std::string(describe(peek().kind)),
                      peek().pos);
    return next();
  }

  // --- scopes -------------------------------------------------------

  std::optional<std::size_t> lookup(std::string_view name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      for (const auto& [n, slot] : *it)
        if (n == name) return slot;
    return std::nullopt;
  }

  std::size_t declare(const Token& name_tok) {
    if (lookup(name_tok.text))
      throw LangError("duplicate variable '" + std::string(name_tok.text) + "'",
                      name_tok.pos);
    const std::size_t slot = n_slots_++;
    scopes_.back().emplace_back(std::string(name_tok.text), slot);
    return slot;
  }

  // --- grammar ------------------------------------------------------

  FunctionDef function() {
    const Token kw = expect(Tok::KwFn, "'fn'");
    FunctionDef fn;
    fn.pos = kw.pos;
    fn.name = std::string(expect(Tok::Ident, "function name").text);
    expect(Tok::LParen, "'('");
    scopes_.assign(1, {});
    n_slots_ = 0;
    if (peek().kind != Tok::RParen) {
      while (true) {
        const Token p = expect(Tok::Ident, "parameter name");
        declare(p);
        fn.params.emplace_back(p.text);
        if (peek().kind != Tok::Comma) break;
        next();
      }
    }
    expect(Tok::RParen, "')'");
    fn.body = block();
    fn.n_slots = n_slots_;
    return fn;
  }

  Block block() {
    expect(Tok::LBrace, "'{'");
    scopes_.emplace_back();
    Block b;
    while (peek().kind != Tok::RBrace) b.stmts.push_back(statement());
    next();  // consume '}'
    scopes_.pop_back();
    return b;
  }

  StmtPtr statement() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwLet: {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::Let;
        s->pos = next().pos;
        const Token name = expect(Tok::Ident, "variable name");
        expect(Tok::Assign, "'='");
        s->expr = expression();
        expect(Tok::Semi, "';'");
        // initializer is resolved first, so `let x = x;` is an error
        s->slot = declare(name);
        return s;
      }
      case Tok::Ident: {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::Assign;
        const Token name = next();
        s->pos = name.pos;
        auto slot = lookup(name.text);
        if (!slot)
          throw LangError("assignment to undefined variable '" +
                              std::string(name.text) + "'",
                          name.pos);
        s->slot = *slot;
        expect(Tok::Assign, "'='");
        s->expr = expression();
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::KwIf: {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::If;
        s->pos = next().pos;
        expect(Tok::LParen, "'('");
        s->expr = expression();
        expect(Tok::RParen, "')'");
        s->then_block = block();
        if (peek().kind == Tok::KwElse) {
          next();
          s->else_block = block();
        }
        return s;
      }
      case Tok::KwReturn: {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::Return;
        s->pos = next().pos;
        s->expr = expression();
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::KwHalt: {
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::Halt;
        s->pos = next().pos;
        expect(Tok::Semi, "';'");
        return s;
      }
      default:
        throw LangError("expected a statement, found " +
                            std::string(describe(t.kind)),
                        t.pos);
    }
  }

  ExprPtr expression() { return comparison(); }

  ExprPtr comparison() {
    ExprPtr lhs = additive();
    while (true) {
      BinOp op;
      switch (peek().kind) {
        case Tok::EqEq: op = BinOp::Eq; break;
        case Tok::Ne: op = BinOp::Ne; break;
        case Tok::Lt: op = BinOp::Lt; break;
        case Tok::Le: op = BinOp::Le; break;
        case Tok::Gt: op = BinOp::Gt; break;
        case Tok::Ge: op = BinOp::Ge; break;
        default: return lhs;
      }
      const SrcPos pos = next().pos;
      lhs = binary(op, std::move(lhs), additive(), pos);
    }
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token op = next();
      lhs = binary(op.kind == Tok::Plus ? BinOp::Add : BinOp::Sub, std::move(lhs),
                   multiplicative(), op.pos);
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = atom();
    while (peek().kind == Tok::Star) {
      const SrcPos pos = next().pos;
      lhs = binary(BinOp::Mul, std::move(lhs), atom(), pos);
    }
    return lhs;
  }

  ExprPtr atom() {
    const Token t = next();
    switch (t.kind) {
      case Tok::Int: {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Int;
        e->pos = t.pos;
        e->value = t.value;
        return e;
      }
      case Tok::LParen: {
        ExprPtr inner = expression();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        if (peek().kind == Tok::LParen) {
          next();
          auto e = std::make_unique<Expr>();
          e->kind = Expr::Kind::Call;
          e->pos = t.pos;
          e->name = std::string(t.text);
          if (peek().kind != Tok::RParen) {
            while (true) {
              e->args.push_back(expression());
              if (peek().kind != Tok::Comma) break;
              next();
            }
          }
          expect(Tok::RParen, "')'");
          calls_.push_back({e.get(), e->name, t.pos});
          return e;
        }
        auto slot = lookup(t.text);
        if (!slot)
          throw LangError("use of undefined variable '" + std::string(t.text) + "'",
                          t.pos);
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Var;
        e->pos = t.pos;
        e->name = std::string(t.text);
        e->slot = *slot;
        return e;
      }
      default:
        throw LangError("expected an expression, found " +
                            std::string(describe(t.kind)),
                        t.pos);
    }
  }

  static ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SrcPos pos) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Binary;
    e->pos = pos;
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  // --- static checks ------------------------------------------------

  void resolve_calls(Program& prog) {
    std::map<std::string_view, std::size_t> by_name;
    for (std::size_t i = 0; i < prog.functions.size(); ++i) {
      const FunctionDef& fn = prog.functions[i];
      if (!by_name.emplace(fn.name, i).second)
        throw LangError("duplicate function '" + fn.name + "'", fn.pos);
    }
    for (const PendingCall& call : calls_) {
      auto it = by_name.find(call.name);
      if (it == by_name.end())
        throw LangError("call to undefined function '" + call.name + "'", call.pos);
      const FunctionDef& callee = prog.functions[it->second];
      if (call.node->args.size() != callee.params.size())
        throw LangError("'" + call.name + "' takes " +
                            std::to_string(callee.params.size()) + " argument(s), " +
                            std::to_string(call.node->args.size()) + " given",
                        call.pos);
      call.node->callee = it->second;
    }
  }

  static bool returns(const Block& b) {
    for (const StmtPtr& s : b.stmts) {
      switch (s->kind) {
        case Stmt::Kind::Return:
        case Stmt::Kind::Halt:
          return true;
        case Stmt::Kind::If:
          if (!s->else_block.stmts.empty() && returns(s->then_block) &&
              returns(s->else_block))
            return true;
          break;
        default:
          break;
      }
    }
    return false;
  }

  static void check_returns(const FunctionDef& fn) {
    if (!returns(fn.body))
      throw LangError("function '" + fn.name + "': not all control paths return",
                      fn.pos);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::vector<std::pair<std::string, std::size_t>>> scopes_;
  std::size_t n_slots_ = 0;
  std::vector<PendingCall> calls_;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).parse(); }

std::vector<InputCase> parse_cases(std::string_view text, std::string_view entry) {
  using carrot::detail::Token;
  std::vector<InputCase> cases;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    std::vector<Token> toks = detail::split_tokens(line);
    if (toks.empty() || toks[0].text[0] == '#') return;
    InputCase c;
    c.entry = std::string(entry);
    c.line = line_no;
    std::size_t i = 0;
    for (; i < toks.size() && toks[i].text != "->"; ++i)
      c.args.push_back(detail::parse_i64(toks[i], line_no));
    if (i < toks.size()) {  // arrow clause
      if (i + 1 >= toks.size())
        throw ParseError("expected a value after '->'", line_no, toks[i].column);
      if (i + 2 < toks.size())
        throw ParseError("trailing tokens after expected value", line_no,
                         toks[i + 2].column);
      c.expected = detail::parse_i64(toks[i + 1], line_no);
    }
    cases.push_back(std::move(c));
  });
  return cases;
}

}  // namespace carrot::mini
