#include "mixppl/parser.hpp"

namespace mixppl {

namespace {

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

  ModelAST parse() {
    ModelAST ast;
    while (!at(Tok::end_of_input)) {
      switch (peek().kind) {
        case Tok::kw_type: parse_type_decl(ast); break;
        case Tok::kw_distinct: parse_distinct(ast); break;
        case Tok::hash: parse_number_stmt(ast); break;
        case Tok::kw_origin: parse_origin(ast); break;
        case Tok::kw_fixed: parse_fixed(ast); break;
        case Tok::kw_random: parse_random(ast); break;
        case Tok::kw_obs: parse_obs(ast); break;
        case Tok::kw_query: parse_query(ast); break;
        default:
          fail(ErrorCode::parse_error,
               std::string("expected a statement, found ") +
                   tok_name(peek().kind),
               peek().pos);
      }
    }
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& advance() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    advance();
    return true;
  }
  const Token& expect(Tok k) {
    if (!at(k))
      fail(ErrorCode::parse_error,
           std::string("expected ") + tok_name(k) + ", found " +
               tok_name(peek().kind),
           peek().pos);
    return advance();
  }
  std::string expect_ident() { return expect(Tok::ident).text; }

  void parse_type_decl(ModelAST& ast) {
    expect(Tok::kw_type);
    ast.type_decls.push_back(expect_ident());
    while (accept(Tok::comma)) ast.type_decls.push_back(expect_ident());
    expect(Tok::semicolon);
  }

  void parse_distinct(ModelAST& ast) {
    DistinctDeclAST d;
    d.pos = peek().pos;
    expect(Tok::kw_distinct);
    d.type_name = expect_ident();
    do {
      DistinctItemAST item;
      item.name = expect_ident();
      if (accept(Tok::lbracket)) {
        item.count = static_cast<int>(expect(Tok::int_lit).int_value);
        expect(Tok::rbracket);
      }
      d.items.push_back(std::move(item));
    } while (accept(Tok::comma));
    expect(Tok::semicolon);
    ast.distinct_decls.push_back(std::move(d));
  }

  void parse_number_stmt(ModelAST& ast) {
    NumberStmtAST n;
    n.pos = peek().pos;
    expect(Tok::hash);
    n.type_name = expect_ident();
    if (accept(Tok::lparen)) {
      do {
        std::string fn = expect_ident();
        expect(Tok::assign);
        std::string var = expect_ident();
        n.bindings.emplace_back(std::move(fn), std::move(var));
      } while (accept(Tok::comma));
      expect(Tok::rparen);
    }
    expect(Tok::tilde);
    n.body = parse_expr();
    expect(Tok::semicolon);
    ast.number_stmts.push_back(std::move(n));
  }

  void parse_origin(ModelAST& ast) {
    OriginDeclAST o;
    o.pos = peek().pos;
    expect(Tok::kw_origin);
    o.ret_type = expect_ident();
    o.name = expect_ident();
    expect(Tok::lparen);
    o.arg_type = expect_ident();
    expect(Tok::rparen);
    expect(Tok::semicolon);
    ast.origin_decls.push_back(std::move(o));
  }

  std::vector<ParamAST> parse_params() {
    std::vector<ParamAST> params;
    if (accept(Tok::lparen)) {
      do {
        ParamAST p;
        p.type_name = expect_ident();
        p.name = expect_ident();
        params.push_back(std::move(p));
      } while (accept(Tok::comma));
      expect(Tok::rparen);
    }
    return params;
  }

  void parse_fixed(ModelAST& ast) {
    FixedDeclAST f;
    f.pos = peek().pos;
    expect(Tok::kw_fixed);
    f.ret_type = expect_ident();
    f.name = expect_ident();
    f.params = parse_params();
    expect(Tok::assign);
    if (at(Tok::lbrace)) {
      f.is_table = true;
      expect(Tok::lbrace);
      do {
        Expr key = parse_expr();
        expect(Tok::arrow);
        Expr value = parse_expr();
        f.table.emplace_back(std::move(key), std::move(value));
      } while (accept(Tok::comma));
      expect(Tok::rbrace);
    } else {
      f.body = parse_expr();
    }
    expect(Tok::semicolon);
    ast.fixed_fns.push_back(std::move(f));
  }

  void parse_random(ModelAST& ast) {
    RandomDeclAST r;
    r.pos = peek().pos;
    expect(Tok::kw_random);
    r.ret_type = expect_ident();
    r.name = expect_ident();
    r.params = parse_params();
    expect(Tok::tilde);
    r.body = parse_expr();
    expect(Tok::semicolon);
    ast.random_fns.push_back(std::move(r));
  }

  void parse_obs(ModelAST& ast) {
    ObsAST o;
    o.pos = peek().pos;
    expect(Tok::kw_obs);
    o.lhs = parse_expr();
    expect(Tok::assign);
    o.value = parse_expr();
    expect(Tok::semicolon);
    ast.obs_stmts.push_back(std::move(o));
  }

  void parse_query(ModelAST& ast) {
    QueryAST q;
    q.pos = peek().pos;
    expect(Tok::kw_query);
    q.expr = parse_expr();
    if (at(Tok::assign)) {
      // `query f(x) = v;` reads as an equality query
      Expr eq;
      eq.kind = ExprKind::binop;
      eq.op = BinOp::eq;
      eq.pos = peek().pos;
      advance();
      eq.args.push_back(std::move(q.expr));
      eq.args.push_back(parse_expr());
      q.expr = std::move(eq);
    }
    if (accept(Tok::kw_for)) {
      q.has_binder = true;
      q.binder_type = expect_ident();
      q.binder_var = expect_ident();
    }
    expect(Tok::semicolon);
    ast.query_stmts.push_back(std::move(q));
  }

  // expression grammar, loosest to tightest:
  //   expr       := comparison
  //   comparison := additive [cmp-op additive]
  //   additive   := multiplicative {(+|-) multiplicative}
  //   multiplicative := unary {(*|/) unary}
  //   unary      := - unary | primary
  Expr parse_expr() {
    if (at(Tok::kw_if)) return parse_if();
    Expr lhs = parse_additive();
    switch (peek().kind) {
      case Tok::eq: return finish_binop(std::move(lhs), BinOp::eq);
      case Tok::neq: return finish_binop(std::move(lhs), BinOp::neq);
      case Tok::lt: return finish_binop(std::move(lhs), BinOp::lt);
      case Tok::le: return finish_binop(std::move(lhs), BinOp::le);
      case Tok::gt: return finish_binop(std::move(lhs), BinOp::gt);
      case Tok::ge: return finish_binop(std::move(lhs), BinOp::ge);
      default: return lhs;
    }
  }

  Expr finish_binop(Expr lhs, BinOp op) {
    Expr e;
    e.kind = ExprKind::binop;
    e.op = op;
    e.pos = peek().pos;
    advance();
    e.args.push_back(std::move(lhs));
    e.args.push_back(parse_additive());
    return e;
  }

  Expr parse_if() {
    Expr e;
    e.kind = ExprKind::if_else;
    e.pos = peek().pos;
    expect(Tok::kw_if);
    e.args.push_back(parse_expr());
    expect(Tok::kw_then);
    e.args.push_back(parse_expr());
    expect(Tok::kw_else);
    e.args.push_back(parse_expr());
    return e;
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    for (;;) {
      BinOp op;
      if (at(Tok::plus)) op = BinOp::add;
      else if (at(Tok::minus)) op = BinOp::sub;
      else return lhs;
      Expr e;
      e.kind = ExprKind::binop;
      e.op = op;
      e.pos = peek().pos;
      advance();
      e.args.push_back(std::move(lhs));
      e.args.push_back(parse_multiplicative());
      lhs = std::move(e);
    }
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_unary();
    for (;;) {
      BinOp op;
      if (at(Tok::star)) op = BinOp::mul;
      else if (at(Tok::slash)) op = BinOp::div;
      else return lhs;
      Expr e;
      e.kind = ExprKind::binop;
      e.op = op;
      e.pos = peek().pos;
      advance();
      e.args.push_back(std::move(lhs));
      e.args.push_back(parse_unary());
      lhs = std::move(e);
    }
  }

  Expr parse_unary() {
    if (at(Tok::minus)) {
      Expr e;
      e.kind = ExprKind::neg;
      e.pos = peek().pos;
      advance();
      e.args.push_back(parse_unary());
      return e;
    }
    return parse_primary();
  }

  Expr make_lit(Value v, SourcePos pos) {
    Expr e;
    e.kind = ExprKind::lit;
    e.lit = std::move(v);
    e.pos = pos;
    return e;
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::int_lit:
        advance();
        return make_lit(Value(t.int_value), t.pos);
      case Tok::real_lit:
        advance();
        return make_lit(Value(t.real_value), t.pos);
      case Tok::timestep_lit:
        advance();
        return make_lit(Value(Timestep{static_cast<int>(t.int_value)}), t.pos);
      case Tok::kw_true:
        advance();
        return make_lit(Value(true), t.pos);
      case Tok::kw_false:
        advance();
        return make_lit(Value(false), t.pos);
      case Tok::kw_null:
        advance();
        return make_lit(Value::null(), t.pos);
      case Tok::kw_if:
        return parse_if();
      case Tok::lparen: {
        advance();
        Expr e = parse_expr();
        expect(Tok::rparen);
        return e;
      }
      case Tok::lbrace:
        return parse_braced();
      case Tok::ident: {
        Expr e;
        e.pos = t.pos;
        e.name = advance().text;
        if (accept(Tok::lbracket)) {
          // indexed distinct constant, e.g. R[0]
          const Token& idx = expect(Tok::int_lit);
          expect(Tok::rbracket);
          e.kind = ExprKind::name;
          e.name += "[" + std::to_string(idx.int_value) + "]";
          return e;
        }
        if (accept(Tok::lparen)) {
          e.kind = ExprKind::call;
          if (!at(Tok::rparen)) {
            do {
              e.args.push_back(at(Tok::lbrace) ? parse_braced() : parse_expr());
            } while (accept(Tok::comma));
          }
          expect(Tok::rparen);
          return e;
        }
        e.kind = ExprKind::name;
        return e;
      }
      default:
        fail(ErrorCode::parse_error,
             std::string("expected an expression, found ") +
                 tok_name(t.kind),
             t.pos);
    }
  }

  // `{ ... }` is either a comprehension `{e for Type v}` or a map
  // `{k -> v, ...}`.
  Expr parse_braced() {
    Expr e;
    e.pos = peek().pos;
    expect(Tok::lbrace);
    Expr first = parse_expr();
    if (accept(Tok::kw_for)) {
      e.kind = ExprKind::compr;
      e.compr_type = expect_ident();
      e.compr_var = expect_ident();
      e.args.push_back(std::move(first));
      expect(Tok::rbrace);
      return e;
    }
    e.kind = ExprKind::map_lit;
    expect(Tok::arrow);
    e.args.push_back(std::move(first));
    e.args.push_back(parse_expr());
    while (accept(Tok::comma)) {
      e.args.push_back(parse_expr());
      expect(Tok::arrow);
      e.args.push_back(parse_expr());
    }
    expect(Tok::rbrace);
    return e;
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ModelAST parse_model(std::span<const Token> tokens) {
  return Parser(tokens).parse();
}

ModelAST parse_model_text(std::string_view text) {
  auto tokens = tokenize(text);
  return parse_model(tokens);
}

}  // namespace mixppl
