#include "mixppl/resolve.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mixppl/parser.hpp"

namespace mixppl {

namespace {

constexpr double kWeightSumTol = 1e-9;

struct BuiltinDist {
  DistId id;
  int arity;  // -1: special-cased
};

const std::unordered_map<std::string, BuiltinDist>& builtin_dists() {
  static const std::unordered_map<std::string, BuiltinDist> map = {
      {"Gaussian", {DistId::gaussian, 2}},
      {"TruncatedGauss", {DistId::trunc_gauss, 4}},
      {"TruncatedGaussian", {DistId::trunc_gauss, 4}},
      {"Poisson", {DistId::poisson, 1}},
      {"BooleanDistrib", {DistId::boolean, 1}},
      {"Unif", {DistId::unif, 2}},
      {"UniformChoice", {DistId::uniform_choice, -1}},
      {"Categorical", {DistId::categorical, -1}},
      {"Mix", {DistId::mix, -1}},
      {"mixed", {DistId::mix, -1}},
  };
  return map;
}

struct ScopeVar {
  std::string name;
  int slot;
  int type;
};

enum class SymKind { distinct_const, random_fn, origin_fn, fixed_fn };

struct Symbol {
  SymKind kind;
  int id;
};

class Resolver {
 public:
  Resolver(const ModelAST& ast, const ResolveOptions& options)
      : ast_(ast), options_(options) {}

  Model run() {
    model_.options = options_.run;
    declare_types();
    declare_constants();
    declare_origins();
    declare_fixed();
    declare_random();
    declare_numbers();
    resolve_bodies();
    resolve_evidence();
    resolve_queries();
    detect_timestep_indexing();
    collect_static_edges();
    if (options_.static_cycle_check) check_static_cycles();
    return std::move(model_);
  }

 private:
  [[noreturn]] void reject(const std::string& message, SourcePos pos) {
    fail(ErrorCode::resolve_error, message, pos);
  }

  int require_type(const std::string& name, SourcePos pos) {
    int id = model_.find_type(name);
    if (id < 0) reject("unknown type '" + name + "'", pos);
    return id;
  }

  void declare_name(const std::string& name, SymKind kind, int id,
                    SourcePos pos) {
    if (builtin_dists().count(name) || name == "prev" || name == "dist")
      reject("'" + name + "' is a reserved builtin name", pos);
    if (!symbols_.emplace(name, Symbol{kind, id}).second)
      reject("duplicate declaration of '" + name + "'", pos);
  }

  void declare_types() {
    model_.type_names = {"Bool", "Int", "Real", "Timestep"};
    for (const std::string& name : ast_.type_decls) {
      if (model_.find_type(name) >= 0)
        fail(ErrorCode::resolve_error, "duplicate type '" + name + "'");
      model_.type_names.push_back(name);
    }
    model_.constants_by_type.resize(model_.type_names.size());
    model_.numbers_by_type.resize(model_.type_names.size());
  }

  void declare_constants() {
    for (const auto& d : ast_.distinct_decls) {
      int type = require_type(d.type_name, d.pos);
      if (type < kFirstUserType)
        reject("distinct constants need a declared type", d.pos);
      for (const auto& item : d.items) {
        if (item.count < 0) {
          add_constant(item.name, type, d.pos);
        } else {
          for (int i = 0; i < item.count; ++i)
            add_constant(item.name + "[" + std::to_string(i) + "]", type,
                         d.pos);
        }
      }
    }
  }

  void add_constant(const std::string& name, int type, SourcePos pos) {
    int id = static_cast<int>(model_.constants.size());
    declare_name(name, SymKind::distinct_const, id, pos);
    auto cell = std::make_shared<ObjectCell>();
    cell->type = type;
    cell->number_stmt = -1;
    cell->index = static_cast<int>(model_.constants_by_type[type].size());
    cell->name = name;
    model_.constants.push_back({name, type, ObjectRef(std::move(cell))});
    model_.constants_by_type[type].push_back(id);
  }

  void declare_origins() {
    for (const auto& o : ast_.origin_decls) {
      int value_type = require_type(o.ret_type, o.pos);
      int object_type = require_type(o.arg_type, o.pos);
      if (object_type < kFirstUserType)
        reject("origin functions apply to declared types", o.pos);
      int id = static_cast<int>(model_.origin_fns.size());
      declare_name(o.name, SymKind::origin_fn, id, o.pos);
      model_.origin_fns.push_back({o.name, value_type, object_type});
    }
  }

  void declare_fixed() {
    for (const auto& f : ast_.fixed_fns) {
      FixedDecl decl;
      decl.name = f.name;
      decl.ret_type = require_type(f.ret_type, f.pos);
      for (const auto& p : f.params)
        decl.params.push_back({require_type(p.type_name, f.pos), p.name});
      int id = static_cast<int>(model_.fixed_fns.size());
      declare_name(f.name, SymKind::fixed_fn, id, f.pos);
      if (f.is_table) {
        if (decl.params.size() != 1 ||
            decl.params[0].type < kFirstUserType)
          reject("table-valued fixed functions take one object argument",
                 f.pos);
        decl.def = FixedDef::table;
      } else {
        if (!decl.params.empty())
          reject("fixed functions with parameters must be tables", f.pos);
        decl.def = FixedDef::scalar;
      }
      model_.fixed_fns.push_back(std::move(decl));
    }
  }

  void declare_random() {
    for (const auto& r : ast_.random_fns) {
      RandomDecl decl;
      decl.name = r.name;
      decl.ret_type = require_type(r.ret_type, r.pos);
      for (const auto& p : r.params) {
        int t = require_type(p.type_name, r.pos);
        decl.params.push_back({t, p.name});
        if (t == kTypeTimestep) decl.has_timestep_param = true;
      }
      int id = static_cast<int>(model_.random_fns.size());
      declare_name(r.name, SymKind::random_fn, id, r.pos);
      decl.body = r.body;
      model_.random_fns.push_back(std::move(decl));
    }
  }

  void declare_numbers() {
    for (const auto& n : ast_.number_stmts) {
      NumberDecl decl;
      decl.type = require_type(n.type_name, n.pos);
      if (decl.type < kFirstUserType)
        reject("number statements generate declared types", n.pos);
      decl.display = "#" + n.type_name;
      std::unordered_set<std::string> seen_fns, seen_vars;
      for (const auto& [fn_name, var] : n.bindings) {
        auto it = symbols_.find(fn_name);
        if (it == symbols_.end() || it->second.kind != SymKind::origin_fn)
          reject("'" + fn_name + "' is not an origin function", n.pos);
        const OriginDecl& origin = model_.origin_fns[it->second.id];
        if (origin.object_type != decl.type)
          reject("origin function '" + fn_name + "' does not apply to type '" +
                     n.type_name + "'",
                 n.pos);
        if (!seen_fns.insert(fn_name).second)
          reject("origin function '" + fn_name + "' bound twice", n.pos);
        if (!seen_vars.insert(var).second)
          reject("duplicate binding variable '" + var + "'", n.pos);
        decl.bindings.push_back({it->second.id, var});
        decl.arg_types.push_back(origin.value_type);
      }
      decl.body = n.body;
      model_.numbers_by_type[decl.type].push_back(
          static_cast<int>(model_.number_stmts.size()));
      model_.number_stmts.push_back(std::move(decl));
    }
  }

  // --- expressions ---------------------------------------------------------

  struct Scope {
    std::vector<ScopeVar> vars;
    int next_slot = 0;
  };

  const ScopeVar* lookup_var(const Scope& scope, const std::string& name) {
    for (auto it = scope.vars.rbegin(); it != scope.vars.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  bool numeric(int type) { return type == kTypeInt || type == kTypeReal; }

  bool assignable(int from, int to) {
    if (from == to) return true;
    if (from == kTypeNull) return true;
    if (from == kTypeInt && to == kTypeReal) return true;
    return false;
  }

  int unify(int a, int b, SourcePos pos) {
    if (a == b) return a;
    if (a == kTypeNull) return b;
    if (b == kTypeNull) return a;
    if (numeric(a) && numeric(b)) return kTypeReal;
    reject("branches have incompatible types", pos);
  }

  int lit_type(const Value& v) {
    switch (v.kind()) {
      case Value::Kind::Bool: return kTypeBool;
      case Value::Kind::Int: return kTypeInt;
      case Value::Kind::Real: return kTypeReal;
      case Value::Kind::Time: return kTypeTimestep;
      default: return kTypeNull;
    }
  }

  // value-position resolution; returns and records the expression type
  int resolve_value(Expr& e, Scope& scope) {
    switch (e.kind) {
      case ExprKind::lit:
        return e.type = lit_type(e.lit);

      case ExprKind::name: {
        if (const ScopeVar* var = lookup_var(scope, e.name)) {
          e.ref = RefKind::bound_var;
          e.ref_id = var->slot;
          return e.type = var->type;
        }
        auto it = symbols_.find(e.name);
        if (it == symbols_.end()) {
          if (builtin_dists().count(e.name))
            reject("distribution '" + e.name + "' used as a value", e.pos);
          reject("unknown identifier '" + e.name + "'", e.pos);
        }
        switch (it->second.kind) {
          case SymKind::distinct_const:
            e.ref = RefKind::distinct_const;
            e.ref_id = it->second.id;
            return e.type = model_.constants[e.ref_id].type;
          case SymKind::random_fn: {
            const RandomDecl& fn = model_.random_fns[it->second.id];
            if (!fn.params.empty())
              reject("function '" + e.name + "' requires arguments", e.pos);
            e.ref = RefKind::random_fn;
            e.ref_id = it->second.id;
            return e.type = fn.ret_type;
          }
          case SymKind::fixed_fn: {
            const FixedDecl& fn = model_.fixed_fns[it->second.id];
            if (!fn.params.empty())
              reject("function '" + e.name + "' requires arguments", e.pos);
            e.ref = RefKind::fixed_fn;
            e.ref_id = it->second.id;
            return e.type = fn.ret_type;
          }
          case SymKind::origin_fn:
            reject("origin function '" + e.name + "' requires an argument",
                   e.pos);
        }
        reject("unknown identifier '" + e.name + "'", e.pos);
      }

      case ExprKind::call: {
        if (e.name == "prev") {
          if (e.args.size() != 1) reject("prev takes one argument", e.pos);
          if (e.args[0].kind == ExprKind::lit && e.args[0].lit.is_time() &&
              e.args[0].lit.as_time().t == 0)
            reject("prev(@0) has no predecessor", e.pos);
          int t = resolve_value(e.args[0], scope);
          if (t != kTypeTimestep)
            reject("prev applies to Timestep values", e.pos);
          e.ref = RefKind::builtin_prev;
          return e.type = kTypeTimestep;
        }
        if (e.name == "dist") {
          if (e.args.size() != 3)
            reject("dist takes (Real, Real, object)", e.pos);
          int tx = resolve_value(e.args[0], scope);
          int ty = resolve_value(e.args[1], scope);
          int tobj = resolve_value(e.args[2], scope);
          if (!numeric(tx) || !numeric(ty) || tobj < kFirstUserType)
            reject("dist takes (Real, Real, object)", e.pos);
          int table_ids[2];
          const char* tables[2] = {"loc_x", "loc_y"};
          for (int i = 0; i < 2; ++i) {
            int fid = model_.find_fixed_fn(tables[i]);
            if (fid < 0 || model_.fixed_fns[fid].def != FixedDef::table ||
                model_.fixed_fns[fid].params[0].type != tobj)
              reject(std::string("dist requires a fixed table '") + tables[i] +
                         "' over the object type",
                     e.pos);
            table_ids[i] = fid;
          }
          e.ref = RefKind::builtin_dist_to;
          e.ref_id = table_ids[0];
          e.aux = table_ids[1];
          return e.type = kTypeReal;
        }
        if (builtin_dists().count(e.name))
          reject("distribution '" + e.name + "' used as a value", e.pos);

        auto it = symbols_.find(e.name);
        if (it == symbols_.end())
          reject("unknown identifier '" + e.name + "'", e.pos);
        switch (it->second.kind) {
          case SymKind::random_fn: {
            const RandomDecl& fn = model_.random_fns[it->second.id];
            check_args(e, fn.params, scope);
            e.ref = RefKind::random_fn;
            e.ref_id = it->second.id;
            return e.type = fn.ret_type;
          }
          case SymKind::fixed_fn: {
            const FixedDecl& fn = model_.fixed_fns[it->second.id];
            check_args(e, fn.params, scope);
            e.ref = RefKind::fixed_fn;
            e.ref_id = it->second.id;
            return e.type = fn.ret_type;
          }
          case SymKind::origin_fn: {
            const OriginDecl& fn = model_.origin_fns[it->second.id];
            if (e.args.size() != 1)
              reject("origin function takes one argument", e.pos);
            int t = resolve_value(e.args[0], scope);
            if (t != fn.object_type && t != kTypeNull)
              reject("origin function '" + e.name + "' applies to " +
                         model_.type_names[fn.object_type],
                     e.pos);
            e.ref = RefKind::origin_fn;
            e.ref_id = it->second.id;
            return e.type = fn.value_type;
          }
          case SymKind::distinct_const:
            reject("'" + e.name + "' is a constant, not a function", e.pos);
        }
        reject("unknown identifier '" + e.name + "'", e.pos);
      }

      case ExprKind::if_else: {
        int tc = resolve_value(e.args[0], scope);
        if (tc != kTypeBool) reject("if condition must be Bool", e.pos);
        int ta = resolve_value(e.args[1], scope);
        int tb = resolve_value(e.args[2], scope);
        return e.type = unify(ta, tb, e.pos);
      }

      case ExprKind::binop: {
        int ta = resolve_value(e.args[0], scope);
        int tb = resolve_value(e.args[1], scope);
        switch (e.op) {
          case BinOp::eq:
          case BinOp::neq: {
            bool ok = ta == tb || (numeric(ta) && numeric(tb)) ||
                      ta == kTypeNull || tb == kTypeNull;
            if (!ok) reject("comparison of incompatible types", e.pos);
            return e.type = kTypeBool;
          }
          case BinOp::lt:
          case BinOp::le:
          case BinOp::gt:
          case BinOp::ge: {
            bool ok = (numeric(ta) && numeric(tb)) ||
                      (ta == kTypeTimestep && tb == kTypeTimestep);
            if (!ok) reject("ordering comparison needs numbers", e.pos);
            return e.type = kTypeBool;
          }
          case BinOp::add:
          case BinOp::sub:
          case BinOp::mul:
            if (!numeric(ta) || !numeric(tb))
              reject("arithmetic needs numbers", e.pos);
            return e.type =
                       (ta == kTypeInt && tb == kTypeInt) ? kTypeInt : kTypeReal;
          case BinOp::div:
            if (!numeric(ta) || !numeric(tb))
              reject("arithmetic needs numbers", e.pos);
            return e.type = kTypeReal;
        }
        reject("unknown operator", e.pos);
      }

      case ExprKind::neg: {
        int t = resolve_value(e.args[0], scope);
        if (!numeric(t)) reject("unary minus needs a number", e.pos);
        return e.type = t;
      }

      case ExprKind::map_lit:
        reject("map literal outside a distribution", e.pos);
      case ExprKind::compr:
        reject("set comprehension outside UniformChoice", e.pos);
    }
    reject("unknown expression", e.pos);
  }

  void check_args(Expr& e, const std::vector<Param>& params, Scope& scope) {
    if (e.args.size() != params.size())
      reject("'" + e.name + "' takes " + std::to_string(params.size()) +
                 " argument(s)",
             e.pos);
    for (std::size_t i = 0; i < params.size(); ++i) {
      int t = resolve_value(e.args[i], scope);
      if (!assignable(t, params[i].type))
        reject("argument " + std::to_string(i + 1) + " of '" + e.name +
                   "' must be " + model_.type_names[params[i].type],
               e.pos);
    }
  }

  void expect_numeric(Expr& e, Scope& scope) {
    int t = resolve_value(e, scope);
    if (!numeric(t)) reject("distribution parameter must be a number", e.pos);
  }

  // kernel-position resolution: if/else over distribution leaves
  void resolve_kernel(Expr& e, Scope& scope, int expected_type) {
    if (e.kind == ExprKind::if_else) {
      int tc = resolve_value(e.args[0], scope);
      if (tc != kTypeBool) reject("if condition must be Bool", e.pos);
      resolve_kernel(e.args[1], scope, expected_type);
      resolve_kernel(e.args[2], scope, expected_type);
      e.type = expected_type;
      return;
    }
    if (e.kind != ExprKind::call || !builtin_dists().count(e.name))
      reject("expected a distribution here", e.pos);

    const BuiltinDist& dist = builtin_dists().at(e.name);
    e.ref = RefKind::builtin_dist;
    e.ref_id = static_cast<int>(dist.id);
    e.type = expected_type;

    switch (dist.id) {
      case DistId::gaussian:
      case DistId::trunc_gauss:
      case DistId::unif: {
        if (static_cast<int>(e.args.size()) != dist.arity)
          reject("'" + e.name + "' takes " + std::to_string(dist.arity) +
                     " parameters",
                 e.pos);
        for (Expr& arg : e.args) expect_numeric(arg, scope);
        if (expected_type != kTypeReal)
          reject("'" + e.name + "' produces Real values", e.pos);
        return;
      }
      case DistId::poisson: {
        if (e.args.size() != 1) reject("Poisson takes one parameter", e.pos);
        expect_numeric(e.args[0], scope);
        if (expected_type != kTypeInt && expected_type != kTypeReal)
          reject("Poisson produces counts", e.pos);
        return;
      }
      case DistId::boolean: {
        if (e.args.size() != 1)
          reject("BooleanDistrib takes one parameter", e.pos);
        expect_numeric(e.args[0], scope);
        if (expected_type != kTypeBool)
          reject("BooleanDistrib produces Bool values", e.pos);
        return;
      }
      case DistId::uniform_choice: {
        if (e.args.size() != 1 || e.args[0].kind != ExprKind::compr)
          reject("UniformChoice takes a set comprehension", e.pos);
        Expr& compr = e.args[0];
        compr.ref_id = require_type(compr.compr_type, compr.pos);
        if (compr.ref_id < kFirstUserType)
          reject("UniformChoice enumerates objects of a declared type",
                 compr.pos);
        compr.aux = scope.next_slot;
        scope.vars.push_back({compr.compr_var, scope.next_slot, compr.ref_id});
        ++scope.next_slot;
        int elem = resolve_value(compr.args[0], scope);
        scope.vars.pop_back();
        --scope.next_slot;
        compr.type = elem;
        if (!assignable(elem, expected_type))
          reject("UniformChoice elements have the wrong type", e.pos);
        return;
      }
      case DistId::categorical: {
        if (e.args.size() != 1 || e.args[0].kind != ExprKind::map_lit)
          reject("Categorical takes { value -> weight, ... }", e.pos);
        Expr& map = e.args[0];
        for (std::size_t i = 0; i + 1 < map.args.size(); i += 2) {
          int t = resolve_value(map.args[i], scope);
          if (!assignable(t, expected_type))
            reject("Categorical value has the wrong type", map.args[i].pos);
          expect_numeric(map.args[i + 1], scope);
        }
        check_const_weights(map, e.pos);
        return;
      }
      case DistId::mix: {
        if (e.args.size() != 1 || e.args[0].kind != ExprKind::map_lit)
          reject("Mix takes { entry -> weight, ... }", e.pos);
        Expr& map = e.args[0];
        for (std::size_t i = 0; i + 1 < map.args.size(); i += 2) {
          Expr& entry = map.args[i];
          if (entry.kind == ExprKind::call && builtin_dists().count(entry.name)) {
            resolve_kernel(entry, scope, expected_type);
            DistId part = static_cast<DistId>(entry.ref_id);
            if (part != DistId::gaussian && part != DistId::trunc_gauss &&
                part != DistId::unif)
              reject("Mix components must be continuous distributions",
                     entry.pos);
          } else {
            int t = resolve_value(entry, scope);
            if (!assignable(t, expected_type))
              reject("Mix atom has the wrong type", entry.pos);
          }
          expect_numeric(map.args[i + 1], scope);
        }
        check_const_weights(map, e.pos);
        return;
      }
    }
  }

  // constant Mix/Categorical weights must sum to 1 within 1e-9
  void check_const_weights(const Expr& map, SourcePos pos) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < map.args.size(); i += 2) {
      double w;
      if (!const_real(map.args[i + 1], w)) return;  // runtime-checked instead
      total += w;
    }
    if (std::fabs(total - 1.0) > kWeightSumTol)
      fail(ErrorCode::weight_sum,
           "mixture weights sum to " + Value(total).str() + ", expected 1",
           pos);
  }

  bool const_real(const Expr& e, double& out) {
    switch (e.kind) {
      case ExprKind::lit:
        if (!e.lit.is_numeric()) return false;
        out = e.lit.to_real();
        return true;
      case ExprKind::neg: {
        double v;
        if (!const_real(e.args[0], v)) return false;
        out = -v;
        return true;
      }
      case ExprKind::binop: {
        double a, b;
        if (!const_real(e.args[0], a) || !const_real(e.args[1], b))
          return false;
        switch (e.op) {
          case BinOp::add: out = a + b; return true;
          case BinOp::sub: out = a - b; return true;
          case BinOp::mul: out = a * b; return true;
          case BinOp::div:
            if (b == 0.0) return false;
            out = a / b;
            return true;
          default: return false;
        }
      }
      default:
        return false;
    }
  }

  Value const_value(const Expr& e, SourcePos pos, int expected_type) {
    if (e.kind == ExprKind::lit) return coerce_value(e.lit, expected_type);
    if (e.kind == ExprKind::neg && e.args[0].kind == ExprKind::lit) {
      const Value& v = e.args[0].lit;
      if (v.is_int()) return coerce_value(Value(-v.as_int()), expected_type);
      if (v.is_real()) return coerce_value(Value(-v.as_real()), expected_type);
    }
    if (e.kind == ExprKind::name) {
      auto it = symbols_.find(e.name);
      if (it != symbols_.end() && it->second.kind == SymKind::distinct_const) {
        const DistinctConst& c = model_.constants[it->second.id];
        if (c.type == expected_type) return Value(c.object);
      }
    }
    fail(ErrorCode::resolve_error, "expected a constant value", pos);
  }

  void resolve_bodies() {
    // fixed scalars first: const-folded in declaration order
    for (std::size_t i = 0; i < ast_.fixed_fns.size(); ++i) {
      const FixedDeclAST& src = ast_.fixed_fns[i];
      FixedDecl& decl = model_.fixed_fns[i];
      if (decl.def == FixedDef::table) {
        for (const auto& [key, value] : src.table) {
          Value k = const_value(key, src.pos, decl.params[0].type);
          Value v = const_value(value, src.pos, decl.ret_type);
          for (const auto& [prev_k, prev_v] : decl.table)
            if (value_eq(prev_k, k))
              reject("duplicate table key " + k.str(), src.pos);
          decl.table.emplace_back(std::move(k), std::move(v));
        }
        // distinct-constant keys get an ordinal-indexed fast path
        decl.dense.assign(
            model_.constants_by_type[decl.params[0].type].size(), Value());
        for (const auto& [k, v] : decl.table)
          if (k.is_object() && k.as_object()->number_stmt < 0)
            decl.dense[k.as_object()->index] = v;
      } else {
        decl.scalar_value = fold_fixed_scalar(src.body, decl.ret_type, src.pos);
      }
    }
    for (std::size_t i = 0; i < ast_.random_fns.size(); ++i) {
      RandomDecl& decl = model_.random_fns[i];
      Scope scope;
      for (const Param& p : decl.params) {
        scope.vars.push_back({p.name, scope.next_slot, p.type});
        ++scope.next_slot;
      }
      resolve_kernel(decl.body, scope, decl.ret_type);
    }
    for (std::size_t i = 0; i < ast_.number_stmts.size(); ++i) {
      NumberDecl& decl = model_.number_stmts[i];
      Scope scope;
      for (std::size_t j = 0; j < decl.bindings.size(); ++j) {
        scope.vars.push_back(
            {decl.bindings[j].var, scope.next_slot, decl.arg_types[j]});
        ++scope.next_slot;
      }
      resolve_kernel(decl.body, scope, kTypeInt);
    }
  }

  Value fold_fixed_scalar(const Expr& e, int expected_type, SourcePos pos) {
    switch (e.kind) {
      case ExprKind::lit:
        return coerce_value(e.lit, expected_type);
      case ExprKind::neg: {
        Value v = fold_fixed_scalar(e.args[0], expected_type, pos);
        if (v.is_int()) return Value(-v.as_int());
        return Value(-v.to_real());
      }
      case ExprKind::name: {
        auto it = symbols_.find(e.name);
        if (it != symbols_.end() && it->second.kind == SymKind::fixed_fn) {
          const FixedDecl& fn = model_.fixed_fns[it->second.id];
          if (fn.def == FixedDef::scalar && !fn.scalar_value.is_null())
            return fn.scalar_value;
        }
        fail(ErrorCode::resolve_error,
             "fixed functions must fold to constants; '" + e.name +
                 "' does not",
             pos);
      }
      case ExprKind::binop: {
        Value a = fold_fixed_scalar(e.args[0], kTypeReal, pos);
        Value b = fold_fixed_scalar(e.args[1], kTypeReal, pos);
        double x = a.to_real(), y = b.to_real();
        switch (e.op) {
          case BinOp::add: return Value(x + y);
          case BinOp::sub: return Value(x - y);
          case BinOp::mul: return Value(x * y);
          case BinOp::div:
            if (y == 0.0)
              fail(ErrorCode::resolve_error, "division by zero", pos);
            return Value(x / y);
          default:
            fail(ErrorCode::resolve_error,
                 "fixed functions must fold to constants", pos);
        }
      }
      default:
        fail(ErrorCode::resolve_error,
             "fixed functions must fold to constants", pos);
    }
  }

  void resolve_evidence() {
    for (const auto& o : ast_.obs_stmts) {
      EvidenceDecl decl;
      Expr lhs = o.lhs;
      if (lhs.kind != ExprKind::call && lhs.kind != ExprKind::name)
        fail(ErrorCode::bad_evidence,
             "evidence must observe a random function application", o.pos);
      auto it = symbols_.find(lhs.name);
      if (it == symbols_.end() || it->second.kind != SymKind::random_fn)
        fail(ErrorCode::bad_evidence,
             "evidence must observe a random function application", o.pos);
      decl.fn = it->second.id;
      const RandomDecl& fn = model_.random_fns[decl.fn];
      if (lhs.args.size() != fn.params.size())
        fail(ErrorCode::bad_evidence,
             "'" + fn.name + "' takes " + std::to_string(fn.params.size()) +
                 " argument(s)",
             o.pos);
      Scope scope;
      for (std::size_t i = 0; i < lhs.args.size(); ++i) {
        int t = resolve_value(lhs.args[i], scope);
        if (!assignable(t, fn.params[i].type))
          fail(ErrorCode::bad_evidence,
               "evidence argument type mismatch for '" + fn.name + "'", o.pos);
        if (lhs.args[i].kind == ExprKind::lit && lhs.args[i].lit.is_time())
          decl.timestep = lhs.args[i].lit.as_time().t;
        decl.args.push_back(lhs.args[i]);
      }
      if (fn.ret_type != kTypeBool && fn.ret_type != kTypeInt &&
          fn.ret_type != kTypeReal)
        fail(ErrorCode::bad_evidence,
             "evidence nodes must be scalar-valued (Bool, Int or Real)",
             o.pos);
      decl.observed = const_value(o.value, o.pos, fn.ret_type);
      if (decl.observed.is_null())
        fail(ErrorCode::bad_evidence, "evidence cannot observe null", o.pos);
      decl.display = print_expr(o.lhs) + " = " + decl.observed.str();
      model_.evidence.push_back(std::move(decl));
    }
  }

  void resolve_queries() {
    for (const auto& q : ast_.query_stmts) {
      QueryDecl decl;
      decl.expr = q.expr;
      Scope scope;
      if (q.has_binder) {
        int t = require_type(q.binder_type, q.pos);
        if (t != kTypeTimestep)
          fail(ErrorCode::bad_query,
               "query binders range over Timestep only", q.pos);
        decl.has_binder = true;
        decl.binder_var = q.binder_var;
        scope.vars.push_back({q.binder_var, 0, kTypeTimestep});
        scope.next_slot = 1;
      }
      decl.value_type = resolve_value(decl.expr, scope);
      if (decl.value_type != kTypeBool && decl.value_type != kTypeInt &&
          decl.value_type != kTypeReal && decl.value_type != kTypeTimestep)
        fail(ErrorCode::bad_query,
             "queries report probabilities of Bool expressions or means of "
             "numeric expressions; got " +
                 (decl.value_type >= 0 ? model_.type_names[decl.value_type]
                                       : std::string("null")),
             q.pos);
      decl.display = print_expr(q.expr);
      model_.queries.push_back(std::move(decl));
    }
  }

  void detect_timestep_indexing() {
    if (model_.random_fns.empty()) return;
    for (const RandomDecl& fn : model_.random_fns)
      if (!fn.has_timestep_param) return;
    for (const EvidenceDecl& e : model_.evidence)
      if (e.timestep < 0) return;
    model_.timestep_indexed = true;
    for (const EvidenceDecl& e : model_.evidence)
      model_.max_evidence_timestep =
          std::max(model_.max_evidence_timestep, e.timestep);
  }

  // --- static dependency skeleton ------------------------------------------

  // declaration node ids: random fns then number statements
  int decl_node(bool is_number, int id) const {
    return is_number ? static_cast<int>(model_.random_fns.size()) + id : id;
  }

  std::string decl_name(int node) const {
    int n_random = static_cast<int>(model_.random_fns.size());
    return node < n_random ? model_.random_fns[node].name
                           : model_.number_stmts[node - n_random].display;
  }

  void type_dep_closure(int type, std::vector<int>& out,
                        std::vector<char>& seen_types) {
    if (seen_types[type]) return;
    seen_types[type] = 1;
    for (int nid : model_.numbers_by_type[type]) {
      out.push_back(decl_node(true, nid));
      for (int arg_type : model_.number_stmts[nid].arg_types)
        type_dep_closure(arg_type, out, seen_types);
    }
  }

  void collect_refs(const Expr& e, std::vector<int>& out) {
    if (e.kind == ExprKind::call || e.kind == ExprKind::name) {
      if (e.ref == RefKind::random_fn) out.push_back(decl_node(false, e.ref_id));
    }
    if (e.kind == ExprKind::compr) {
      std::vector<char> seen(model_.type_names.size(), 0);
      type_dep_closure(e.ref_id, out, seen);
    }
    for (const Expr& arg : e.args) collect_refs(arg, out);
  }

  void collect_static_edges() {
    int n_random = static_cast<int>(model_.random_fns.size());
    int n_total = n_random + static_cast<int>(model_.number_stmts.size());
    adj_.assign(n_total, {});
    auto add_edges = [&](const Expr& body, int to) {
      std::vector<int> refs;
      collect_refs(body, refs);
      for (int from : refs) {
        adj_[from].push_back(to);
        model_.static_edges.emplace_back(decl_name(from), decl_name(to));
      }
    };
    for (int i = 0; i < n_random; ++i) add_edges(model_.random_fns[i].body, i);
    for (std::size_t i = 0; i < model_.number_stmts.size(); ++i)
      add_edges(model_.number_stmts[i].body,
                decl_node(true, static_cast<int>(i)));
  }

  void check_static_cycles() {
    int n_random = static_cast<int>(model_.random_fns.size());
    int n_total = n_random + static_cast<int>(model_.number_stmts.size());
    // timestep-indexed declarations are exempt; data-dependent recursion
    // through prev(t) is resolved by the dynamic pending-set check
    std::vector<char> in_graph(n_total, 1);
    for (int i = 0; i < n_random; ++i)
      if (model_.random_fns[i].has_timestep_param) in_graph[i] = 0;

    std::vector<char> color(n_total, 0);
    std::vector<int> stack;
    auto dfs = [&](auto&& self, int node) -> void {
      color[node] = 1;
      stack.push_back(node);
      for (int next : adj_[node]) {
        if (!in_graph[next]) continue;
        if (color[next] == 1) {
          std::string cycle;
          auto it = std::find(stack.begin(), stack.end(), next);
          for (; it != stack.end(); ++it) cycle += decl_name(*it) + " -> ";
          cycle += decl_name(next);
          fail(ErrorCode::static_cycle,
               "static dependency cycle: " + cycle);
        }
        if (color[next] == 0) self(self, next);
      }
      stack.pop_back();
      color[node] = 2;
    };
    for (int i = 0; i < n_total; ++i)
      if (in_graph[i] && color[i] == 0) dfs(dfs, i);
  }

  const ModelAST& ast_;
  const ResolveOptions& options_;
  Model model_;
  std::unordered_map<std::string, Symbol> symbols_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace

Model resolve(const ModelAST& ast, const ResolveOptions& options) {
  return Resolver(ast, options).run();
}

Model load_model_text(std::string_view text, const ResolveOptions& options) {
  return resolve(parse_model_text(text), options);
}

Model load_model_file(const std::string& path, const ResolveOptions& options) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model_text(ss.str(), options);
}

}  // namespace mixppl
