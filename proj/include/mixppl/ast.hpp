#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mixppl/errors.hpp"
#include "mixppl/value.hpp"

namespace mixppl {

enum class ExprKind {
  lit,       // literal Value
  name,      // bare identifier
  call,      // name(arg, ...)
  if_else,   // if c then a else b
  binop,     // binary operator
  neg,       // unary minus
  map_lit,   // { k -> v, ... }   (argument of Mix/mixed/Categorical)
  compr,     // { elem for Type var }
};

enum class BinOp { eq, neq, lt, le, gt, ge, add, sub, mul, div };

// How a name/call resolved. Filled in by resolve(); parse leaves `unresolved`.
enum class RefKind {
  unresolved,
  bound_var,      // ref_id = environment slot
  distinct_const, // ref_id = constant id
  random_fn,      // ref_id = random function id
  origin_fn,      // ref_id = origin function id
  fixed_fn,       // ref_id = fixed function id
  builtin_dist,   // ref_id = DistId
  builtin_prev,   // prev(t)
  builtin_dist_to // dist(x, y, obj): Euclidean distance to an object's
                  // loc_x/loc_y table coordinates
};

struct Expr {
  ExprKind kind = ExprKind::lit;
  SourcePos pos;

  Value lit;          // kind == lit
  std::string name;   // name / call
  BinOp op = BinOp::eq;
  std::vector<Expr> args;  // call args; if_else c/a/b; binop lhs/rhs;
                           // neg operand; map_lit alternating k,v;
                           // compr element

  std::string compr_type;  // compr only
  std::string compr_var;

  // resolution results (not part of structural equality)
  RefKind ref = RefKind::unresolved;
  int ref_id = -1;
  int type = -1;  // static type id of the value this expression produces
  int aux = -1;   // compr: environment slot of the bound variable
};

bool expr_equal(const Expr& a, const Expr& b);
std::string print_expr(const Expr& e);

struct NumberStmtAST {
  std::string type_name;
  // (origin function name, bound variable name)
  std::vector<std::pair<std::string, std::string>> bindings;
  Expr body;
  SourcePos pos;
};

struct OriginDeclAST {
  std::string ret_type;
  std::string name;
  std::string arg_type;
  SourcePos pos;
};

struct ParamAST {
  std::string type_name;
  std::string name;
};

struct FixedDeclAST {
  std::string ret_type;
  std::string name;
  std::vector<ParamAST> params;
  bool is_table = false;
  Expr body;                               // !is_table
  std::vector<std::pair<Expr, Expr>> table;  // is_table: key -> value
  SourcePos pos;
};

struct RandomDeclAST {
  std::string ret_type;
  std::string name;
  std::vector<ParamAST> params;
  Expr body;
  SourcePos pos;
};

struct DistinctItemAST {
  std::string name;
  int count = -1;  // -1: plain constant; n >= 0: name[0] .. name[n-1]
};

struct DistinctDeclAST {
  std::string type_name;
  std::vector<DistinctItemAST> items;
  SourcePos pos;
};

struct ObsAST {
  Expr lhs;
  Expr value;
  SourcePos pos;
};

struct QueryAST {
  Expr expr;
  bool has_binder = false;
  std::string binder_type;
  std::string binder_var;
  SourcePos pos;
};

struct ModelAST {
  std::vector<std::string> type_decls;
  std::vector<DistinctDeclAST> distinct_decls;
  std::vector<NumberStmtAST> number_stmts;
  std::vector<OriginDeclAST> origin_decls;
  std::vector<FixedDeclAST> fixed_fns;
  std::vector<RandomDeclAST> random_fns;
  std::vector<ObsAST> obs_stmts;
  std::vector<QueryAST> query_stmts;
};

bool ast_equal(const ModelAST& a, const ModelAST& b);

// Canonical source form: parsing the output yields a structurally identical
// AST.
std::string print_model(const ModelAST& ast);

}  // namespace mixppl
