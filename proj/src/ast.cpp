#include "mixppl/ast.hpp"

namespace mixppl {

namespace {

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::eq: return "==";
    case BinOp::neq: return "!=";
    case BinOp::lt: return "<";
    case BinOp::le: return "<=";
    case BinOp::gt: return ">";
    case BinOp::ge: return ">=";
    case BinOp::add: return "+";
    case BinOp::sub: return "-";
    case BinOp::mul: return "*";
    case BinOp::div: return "/";
  }
  return "?";
}

int op_level(BinOp op) {
  switch (op) {
    case BinOp::eq:
    case BinOp::neq:
    case BinOp::lt:
    case BinOp::le:
    case BinOp::gt:
    case BinOp::ge:
      return 1;
    case BinOp::add:
    case BinOp::sub:
      return 2;
    case BinOp::mul:
    case BinOp::div:
      return 3;
  }
  return 0;
}

void print_rec(const Expr& e, int parent_level, std::string& out) {
  switch (e.kind) {
    case ExprKind::lit:
      out += e.lit.str();
      return;
    case ExprKind::name:
      out += e.name;
      return;
    case ExprKind::call: {
      out += e.name;
      out += "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_rec(e.args[i], 0, out);
      }
      out += ")";
      return;
    }
    case ExprKind::if_else: {
      bool paren = parent_level > 0;
      if (paren) out += "(";
      out += "if ";
      print_rec(e.args[0], 0, out);
      out += " then ";
      print_rec(e.args[1], 0, out);
      out += " else ";
      print_rec(e.args[2], 0, out);
      if (paren) out += ")";
      return;
    }
    case ExprKind::binop: {
      int level = op_level(e.op);
      bool paren = level < parent_level ||
                   (level == parent_level && level == 1);
      if (paren) out += "(";
      print_rec(e.args[0], level, out);
      out += " ";
      out += op_text(e.op);
      out += " ";
      print_rec(e.args[1], level + 1, out);
      if (paren) out += ")";
      return;
    }
    case ExprKind::neg:
      out += "-";
      print_rec(e.args[0], 4, out);
      return;
    case ExprKind::map_lit: {
      out += "{ ";
      for (std::size_t i = 0; i + 1 < e.args.size(); i += 2) {
        if (i) out += ", ";
        print_rec(e.args[i], 0, out);
        out += " -> ";
        print_rec(e.args[i + 1], 0, out);
      }
      out += " }";
      return;
    }
    case ExprKind::compr: {
      out += "{";
      print_rec(e.args[0], 0, out);
      out += " for ";
      out += e.compr_type;
      out += " ";
      out += e.compr_var;
      out += "}";
      return;
    }
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::string out;
  print_rec(e, 0, out);
  return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::lit:
      if (!(a.lit == b.lit)) return false;
      break;
    case ExprKind::name:
    case ExprKind::call:
      if (a.name != b.name) return false;
      break;
    case ExprKind::binop:
      if (a.op != b.op) return false;
      break;
    case ExprKind::compr:
      if (a.compr_type != b.compr_type || a.compr_var != b.compr_var)
        return false;
      break;
    default:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!expr_equal(a.args[i], b.args[i])) return false;
  return true;
}

namespace {

void print_params(const std::vector<ParamAST>& params, std::string& out) {
  if (params.empty()) return;
  out += "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].type_name;
    out += " ";
    out += params[i].name;
  }
  out += ")";
}

}  // namespace

std::string print_model(const ModelAST& ast) {
  std::string out;
  if (!ast.type_decls.empty()) {
    out += "type ";
    for (std::size_t i = 0; i < ast.type_decls.size(); ++i) {
      if (i) out += ", ";
      out += ast.type_decls[i];
    }
    out += ";\n";
  }
  for (const auto& d : ast.distinct_decls) {
    out += "distinct " + d.type_name + " ";
    for (std::size_t i = 0; i < d.items.size(); ++i) {
      if (i) out += ", ";
      out += d.items[i].name;
      if (d.items[i].count >= 0)
        out += "[" + std::to_string(d.items[i].count) + "]";
    }
    out += ";\n";
  }
  for (const auto& o : ast.origin_decls)
    out += "origin " + o.ret_type + " " + o.name + "(" + o.arg_type + ");\n";
  for (const auto& n : ast.number_stmts) {
    out += "#" + n.type_name;
    if (!n.bindings.empty()) {
      out += "(";
      for (std::size_t i = 0; i < n.bindings.size(); ++i) {
        if (i) out += ", ";
        out += n.bindings[i].first + " = " + n.bindings[i].second;
      }
      out += ")";
    }
    out += " ~ " + print_expr(n.body) + ";\n";
  }
  for (const auto& f : ast.fixed_fns) {
    out += "fixed " + f.ret_type + " " + f.name;
    print_params(f.params, out);
    out += " = ";
    if (f.is_table) {
      out += "{ ";
      for (std::size_t i = 0; i < f.table.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(f.table[i].first) + " -> " +
               print_expr(f.table[i].second);
      }
      out += " }";
    } else {
      out += print_expr(f.body);
    }
    out += ";\n";
  }
  for (const auto& r : ast.random_fns) {
    out += "random " + r.ret_type + " " + r.name;
    print_params(r.params, out);
    out += " ~ " + print_expr(r.body) + ";\n";
  }
  for (const auto& o : ast.obs_stmts)
    out += "obs " + print_expr(o.lhs) + " = " + print_expr(o.value) + ";\n";
  for (const auto& q : ast.query_stmts) {
    out += "query " + print_expr(q.expr);
    if (q.has_binder) out += " for " + q.binder_type + " " + q.binder_var;
    out += ";\n";
  }
  return out;
}

namespace {

template <typename T, typename Eq>
bool vec_equal(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!eq(a[i], b[i])) return false;
  return true;
}

bool params_equal(const std::vector<ParamAST>& a,
                  const std::vector<ParamAST>& b) {
  return vec_equal(a, b, [](const ParamAST& x, const ParamAST& y) {
    return x.type_name == y.type_name && x.name == y.name;
  });
}

}  // namespace

bool ast_equal(const ModelAST& a, const ModelAST& b) {
  if (a.type_decls != b.type_decls) return false;
  if (!vec_equal(a.distinct_decls, b.distinct_decls,
                 [](const DistinctDeclAST& x, const DistinctDeclAST& y) {
                   if (x.type_name != y.type_name) return false;
                   return vec_equal(
                       x.items, y.items,
                       [](const DistinctItemAST& p, const DistinctItemAST& q) {
                         return p.name == q.name && p.count == q.count;
                       });
                 }))
    return false;
  if (!vec_equal(a.number_stmts, b.number_stmts,
                 [](const NumberStmtAST& x, const NumberStmtAST& y) {
                   return x.type_name == y.type_name &&
                          x.bindings == y.bindings &&
                          expr_equal(x.body, y.body);
                 }))
    return false;
  if (!vec_equal(a.origin_decls, b.origin_decls,
                 [](const OriginDeclAST& x, const OriginDeclAST& y) {
                   return x.ret_type == y.ret_type && x.name == y.name &&
                          x.arg_type == y.arg_type;
                 }))
    return false;
  if (!vec_equal(a.fixed_fns, b.fixed_fns,
                 [](const FixedDeclAST& x, const FixedDeclAST& y) {
                   if (x.ret_type != y.ret_type || x.name != y.name ||
                       !params_equal(x.params, y.params) ||
                       x.is_table != y.is_table)
                     return false;
                   if (x.is_table) {
                     return vec_equal(x.table, y.table,
                                      [](const auto& p, const auto& q) {
                                        return expr_equal(p.first, q.first) &&
                                               expr_equal(p.second, q.second);
                                      });
                   }
                   return expr_equal(x.body, y.body);
                 }))
    return false;
  if (!vec_equal(a.random_fns, b.random_fns,
                 [](const RandomDeclAST& x, const RandomDeclAST& y) {
                   return x.ret_type == y.ret_type && x.name == y.name &&
                          params_equal(x.params, y.params) &&
                          expr_equal(x.body, y.body);
                 }))
    return false;
  if (!vec_equal(a.obs_stmts, b.obs_stmts,
                 [](const ObsAST& x, const ObsAST& y) {
                   return expr_equal(x.lhs, y.lhs) &&
                          expr_equal(x.value, y.value);
                 }))
    return false;
  if (!vec_equal(a.query_stmts, b.query_stmts,
                 [](const QueryAST& x, const QueryAST& y) {
                   return expr_equal(x.expr, y.expr) &&
                          x.has_binder == y.has_binder &&
                          x.binder_type == y.binder_type &&
                          x.binder_var == y.binder_var;
                 }))
    return false;
  return true;
}

}  // namespace mixppl
