#include "mixppl/model.hpp"

#include <algorithm>
#include <cmath>

#include "mixppl/numeric.hpp"

namespace mixppl {

int Model::find_type(std::string_view name) const {
  for (std::size_t i = 0; i < type_names.size(); ++i)
    if (type_names[i] == name) return static_cast<int>(i);
  return -1;
}

int Model::find_random_fn(std::string_view name) const {
  for (std::size_t i = 0; i < random_fns.size(); ++i)
    if (random_fns[i].name == name) return static_cast<int>(i);
  return -1;
}

int Model::find_fixed_fn(std::string_view name) const {
  for (std::size_t i = 0; i < fixed_fns.size(); ++i)
    if (fixed_fns[i].name == name) return static_cast<int>(i);
  return -1;
}

int Model::find_constant(std::string_view name) const {
  for (std::size_t i = 0; i < constants.size(); ++i)
    if (constants[i].name == name) return static_cast<int>(i);
  return -1;
}

std::string Model::describe() const {
  std::string out;
  out += "types:";
  for (std::size_t i = kFirstUserType; i < type_names.size(); ++i)
    out += " " + type_names[i];
  out += "\n";
  for (const auto& c : constants)
    out += "distinct " + type_names[c.type] + " " + c.name + "\n";
  for (const auto& o : origin_fns)
    out += "origin " + type_names[o.value_type] + " " + o.name + "(" +
           type_names[o.object_type] + ")\n";
  for (const auto& n : number_stmts) {
    out += n.display + "(";
    for (std::size_t i = 0; i < n.bindings.size(); ++i) {
      if (i) out += ", ";
      out += origin_fns[n.bindings[i].origin_fn].name + " = " +
             n.bindings[i].var;
    }
    out += ") ~ " + print_expr(n.body) + "\n";
  }
  for (const auto& f : fixed_fns) {
    out += "fixed " + type_names[f.ret_type] + " " + f.name;
    if (f.def == FixedDef::scalar) {
      out += " = " + f.scalar_value.str() + "\n";
    } else {
      out += "(" + type_names[f.params[0].type] + ") = {";
      for (std::size_t i = 0; i < f.table.size(); ++i) {
        if (i) out += ", ";
        out += f.table[i].first.str() + " -> " + f.table[i].second.str();
      }
      out += "}\n";
    }
  }
  for (const auto& r : random_fns) {
    out += "random " + type_names[r.ret_type] + " " + r.name;
    if (!r.params.empty()) {
      out += "(";
      for (std::size_t i = 0; i < r.params.size(); ++i) {
        if (i) out += ", ";
        out += type_names[r.params[i].type] + " " + r.params[i].name;
      }
      out += ")";
    }
    out += " ~ " + print_expr(r.body) + "\n";
  }
  for (const auto& e : evidence) out += "obs " + e.display + "\n";
  for (const auto& q : queries) out += "query " + q.display + "\n";
  for (const auto& [from, to] : static_edges)
    out += "edge " + from + " -> " + to + "\n";
  return out;
}

BasicRV rv_number(int stmt, std::vector<Value> args) {
  BasicRV rv;
  rv.kind = BasicRV::Kind::number_var;
  rv.decl = stmt;
  rv.args = std::move(args);
  return rv;
}

BasicRV rv_app(int fn, std::vector<Value> args) {
  BasicRV rv;
  rv.kind = BasicRV::Kind::func_app;
  rv.decl = fn;
  rv.args = std::move(args);
  return rv;
}

std::string rv_str(const Model& m, const BasicRV& rv) {
  std::string out = rv.kind == BasicRV::Kind::number_var
                        ? m.number_stmts[rv.decl].display
                        : m.random_fns[rv.decl].name;
  if (!rv.args.empty() || rv.kind == BasicRV::Kind::number_var) {
    out += "(";
    for (std::size_t i = 0; i < rv.args.size(); ++i) {
      if (i) out += ", ";
      out += rv.args[i].str();
    }
    out += ")";
  }
  return out;
}

std::int32_t RvTable::intern(const BasicRV& rv) {
  std::unique_lock<std::mutex> lock(mu_, std::defer_lock);
  if (concurrent_) lock.lock();
  auto it = ids_.find(rv);
  if (it != ids_.end()) return it->second;
  std::int32_t id = static_cast<std::int32_t>(defs_.size());
  defs_.push_back(rv);
  ids_.emplace(defs_.back(), id);
  return id;
}

std::int32_t RvTable::find(const BasicRV& rv) const {
  std::unique_lock<std::mutex> lock(mu_, std::defer_lock);
  if (concurrent_) lock.lock();
  auto it = ids_.find(rv);
  return it == ids_.end() ? -1 : it->second;
}

const Value* World::find(const BasicRV& rv) const {
  std::int32_t id = table_->find(rv);
  if (id < 0 || static_cast<std::size_t>(id) >= slot_of_.size()) return nullptr;
  std::int32_t slot = slot_of_[id];
  return slot == 0 ? nullptr : &entries_[slot - 1].second;
}

void World::assign(const BasicRV& rv, Value v) {
  assign_id(table_->intern(rv), std::move(v));
}

const Value* World::find_id(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= slot_of_.size()) return nullptr;
  std::int32_t slot = slot_of_[id];
  return slot == 0 ? nullptr : &entries_[slot - 1].second;
}

void World::assign_id(std::int32_t id, Value v) {
  if (static_cast<std::size_t>(id) >= slot_of_.size())
    slot_of_.resize(id + 1, 0);
  if (slot_of_[id] != 0) {
    entries_[slot_of_[id] - 1].second = std::move(v);
    return;
  }
  entries_.emplace_back(id, std::move(v));
  slot_of_[id] = static_cast<std::int32_t>(entries_.size());
}

std::string World::dump(const Model& m) const {
  std::string out;
  for (const auto& [id, value] : entries_) {
    out += rv_str(m, table_->def(id));
    out += " = ";
    out += value.str();
    out += "\n";
  }
  return out;
}

namespace {

// clause 1 of consistency, applied recursively through provenance tuples
bool object_supported(const World& w, const ObjectRef& o) {
  if (!o || o->number_stmt < 0) return true;
  const Value* count = w.find(rv_number(o->number_stmt, o->origin_args));
  if (!count || !count->is_int() || count->as_int() < o->index) return false;
  for (const Value& arg : o->origin_args)
    if (arg.is_object() && !object_supported(w, arg.as_object())) return false;
  return true;
}

bool value_supported(const World& w, const Value& v) {
  return !v.is_object() || object_supported(w, v.as_object());
}

}  // namespace

bool check_consistency(const Model&, const World& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    const BasicRV& rv = w.rv_at(i);
    for (const Value& arg : rv.args)
      if (!value_supported(w, arg)) return false;
    if (!value_supported(w, w.value_at(i))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Value coerce_value(const Value& v, int type) {
  if (v.is_null()) return v;
  switch (type) {
    case kTypeBool:
      if (v.is_bool()) return v;
      break;
    case kTypeInt:
      if (v.is_int()) return v;
      if (v.is_real() && v.as_real() == std::nearbyint(v.as_real()))
        return Value(static_cast<std::int64_t>(v.as_real()));
      break;
    case kTypeReal:
      if (v.is_real()) return v;
      if (v.is_int()) return Value(static_cast<double>(v.as_int()));
      break;
    case kTypeTimestep:
      if (v.is_time()) return v;
      break;
    default:
      if (v.is_object()) return v;
      break;
  }
  fail(ErrorCode::type_error, "value " + v.str() + " has the wrong type");
}

Value WorldContext::demand(const BasicRV& rv) {
  if (const Value* v = world_.find(rv)) return *v;
  return demand_impl(rv);
}

Value WorldContext::demand_impl(const BasicRV& rv) {
  for (const BasicRV& open : pending_)
    if (open == rv)
      fail(ErrorCode::dynamic_cycle,
           "dependency cycle while instantiating " + rv_str(model_, rv));
  pending_.push_back(rv);
  Kernel k = kernel_for(rv);
  Value v = driver_.choose(rv, k);
  pending_.pop_back();

  if (rv.kind == BasicRV::Kind::number_var) {
    if (!v.is_int() || v.as_int() < 0)
      fail(ErrorCode::eval_error,
           "number statement produced a non-count value for " +
               rv_str(model_, rv));
    if (v.as_int() > model_.options.object_cap)
      fail(ErrorCode::object_cap,
           rv_str(model_, rv) + " = " + v.str() +
               " exceeds the object cap of " +
               std::to_string(model_.options.object_cap));
  } else {
    v = coerce_value(v, model_.random_fns[rv.decl].ret_type);
  }
  world_.assign(rv, v);
  return v;
}

void WorldContext::clamp(const BasicRV& rv, Value v) {
  if (world_.has(rv))
    fail(ErrorCode::bad_evidence,
         "evidence node " + rv_str(model_, rv) +
             " was instantiated before it could be observed");
  world_.assign(rv, std::move(v));
}

void WorldContext::clamp_id(std::int32_t id, Value v) {
  if (world_.find_id(id))
    fail(ErrorCode::bad_evidence,
         "evidence node " + rv_str(model_, world_.table()->def(id)) +
             " was instantiated before it could be observed");
  world_.assign_id(id, std::move(v));
}

BasicRV& WorldContext::scratch_rv(std::size_t depth) {
  while (rv_pool_.size() <= depth)
    rv_pool_.push_back(std::make_unique<BasicRV>());
  return *rv_pool_[depth];
}

Env& WorldContext::scratch_env(std::size_t depth) {
  while (env_pool_.size() <= depth) env_pool_.push_back(std::make_unique<Env>());
  return *env_pool_[depth];
}

Kernel WorldContext::kernel_for(const BasicRV& rv) {
  Env& env = scratch_env(env_depth_++);
  env.assign(rv.args.begin(), rv.args.end());
  struct Release {
    std::size_t* depth;
    ~Release() { --*depth; }
  } release{&env_depth_};
  if (rv.kind == BasicRV::Kind::number_var)
    return eval_kernel(model_.number_stmts[rv.decl].body, env, kTypeInt);
  const RandomDecl& decl = model_.random_fns[rv.decl];
  return eval_kernel(decl.body, env, decl.ret_type);
}

LikelihoodTerm WorldContext::likelihood(const BasicRV& rv,
                                        const Value& observed) {
  Kernel k = kernel_for(rv);
  return evaluate_at(k, observed, model_.options.atom_tol);
}

bool WorldContext::resolve_application(const EvidenceDecl& e, BasicRV& out) {
  Env env;
  std::vector<Value> args;
  args.reserve(e.args.size());
  const RandomDecl& decl = model_.random_fns[e.fn];
  for (std::size_t i = 0; i < e.args.size(); ++i) {
    Value v = eval(e.args[i], env);
    if (v.is_null()) return false;
    args.push_back(coerce_value(v, decl.params[i].type));
  }
  out = rv_app(e.fn, std::move(args));
  return true;
}

std::vector<Value> WorldContext::objects_of_type(int type) {
  for (int open : enumerating_types_)
    if (open == type)
      fail(ErrorCode::dynamic_cycle,
           "type " + model_.type_names[type] +
               " is generated from its own objects");
  enumerating_types_.push_back(type);

  std::vector<Value> out;
  for (int cid : model_.constants_by_type[type])
    out.push_back(Value(model_.constants[cid].object));
  for (int nid : model_.numbers_by_type[type]) {
    const NumberDecl& stmt = model_.number_stmts[nid];
    // origin argument tuples, in lexicographic order
    std::vector<std::vector<Value>> pools;
    for (int arg_type : stmt.arg_types)
      pools.push_back(objects_of_type(arg_type));
    std::vector<std::vector<Value>> tuples;
    tuples.emplace_back();
    for (const auto& pool : pools) {
      std::vector<std::vector<Value>> next;
      for (const auto& prefix : tuples)
        for (const Value& v : pool) {
          auto tuple = prefix;
          tuple.push_back(v);
          next.push_back(std::move(tuple));
        }
      tuples = std::move(next);
    }
    for (auto& tuple : tuples) {
      Value count = demand(rv_number(nid, tuple));
      for (std::int64_t i = 1; i <= count.as_int(); ++i) {
        auto cell = std::make_shared<ObjectCell>();
        cell->type = type;
        cell->number_stmt = nid;
        cell->index = static_cast<int>(i);
        cell->origin_args = tuple;
        cell->name = model_.type_names[type];
        out.push_back(Value(ObjectRef(std::move(cell))));
      }
    }
  }
  enumerating_types_.pop_back();
  return out;
}

Value WorldContext::eval(const Expr& e, Env& env) {
  switch (e.kind) {
    case ExprKind::lit:
      return e.lit;

    case ExprKind::name:
    case ExprKind::call: {
      switch (e.ref) {
        case RefKind::bound_var:
          return env[e.ref_id];
        case RefKind::distinct_const:
          return Value(model_.constants[e.ref_id].object);
        case RefKind::random_fn:
          return eval_fn_app(e, env);
        case RefKind::origin_fn: {
          Value obj = eval(e.args[0], env);
          if (obj.is_null()) return Value::null();
          const ObjectRef& cell = obj.as_object();
          if (cell->number_stmt < 0) return Value::null();
          const NumberDecl& stmt = model_.number_stmts[cell->number_stmt];
          for (std::size_t i = 0; i < stmt.bindings.size(); ++i)
            if (stmt.bindings[i].origin_fn == e.ref_id)
              return cell->origin_args[i];
          return Value::null();
        }
        case RefKind::fixed_fn: {
          const FixedDecl& decl = model_.fixed_fns[e.ref_id];
          if (decl.def == FixedDef::scalar) return decl.scalar_value;
          Value key = eval(e.args[0], env);
          if (key.is_null()) return Value::null();
          if (key.is_object() && key.as_object()->number_stmt < 0) {
            int idx = key.as_object()->index;
            if (idx >= 0 && idx < static_cast<int>(decl.dense.size()) &&
                !decl.dense[idx].is_null())
              return decl.dense[idx];
          }
          for (const auto& [k, v] : decl.table)
            if (value_eq(k, key)) return v;
          fail(ErrorCode::eval_error,
               "fixed table " + decl.name + " has no entry for " + key.str());
        }
        case RefKind::builtin_prev: {
          Value t = eval(e.args[0], env);
          if (t.is_null()) return Value::null();
          if (t.as_time().t == 0)
            fail(ErrorCode::eval_error, "prev(@0) has no predecessor");
          return Value(Timestep{t.as_time().t - 1});
        }
        case RefKind::builtin_dist_to: {
          Value x = eval(e.args[0], env);
          Value y = eval(e.args[1], env);
          Value obj = eval(e.args[2], env);
          if (x.is_null() || y.is_null() || obj.is_null())
            return Value::null();
          auto table_at = [&](const FixedDecl& decl) -> double {
            if (obj.as_object()->number_stmt < 0) {
              int idx = obj.as_object()->index;
              if (idx >= 0 && idx < static_cast<int>(decl.dense.size()) &&
                  !decl.dense[idx].is_null())
                return decl.dense[idx].to_real();
            }
            for (const auto& [k, v] : decl.table)
              if (value_eq(k, obj)) return v.to_real();
            fail(ErrorCode::eval_error, "fixed table " + decl.name +
                                            " has no entry for " + obj.str());
          };
          double dx = x.to_real() - table_at(model_.fixed_fns[e.ref_id]);
          double dy = y.to_real() - table_at(model_.fixed_fns[e.aux]);
          return Value(std::sqrt(dx * dx + dy * dy));
        }
        default:
          fail(ErrorCode::eval_error,
               "distribution used as a value: " + print_expr(e));
      }
    }

    case ExprKind::if_else: {
      Value guard = eval(e.args[0], env);
      if (guard.is_null())
        fail(ErrorCode::eval_error, "null condition in if expression");
      return eval(guard.as_bool() ? e.args[1] : e.args[2], env);
    }

    case ExprKind::binop: {
      Value a = eval(e.args[0], env);
      Value b = eval(e.args[1], env);
      switch (e.op) {
        case BinOp::eq:
          return Value(value_eq(a, b));
        case BinOp::neq:
          return Value(!value_eq(a, b));
        case BinOp::lt:
        case BinOp::le:
        case BinOp::gt:
        case BinOp::ge: {
          if (a.is_null() || b.is_null())
            fail(ErrorCode::eval_error, "null in ordering comparison");
          double x = a.is_time() ? a.as_time().t : a.to_real();
          double y = b.is_time() ? b.as_time().t : b.to_real();
          switch (e.op) {
            case BinOp::lt: return Value(x < y);
            case BinOp::le: return Value(x <= y);
            case BinOp::gt: return Value(x > y);
            default: return Value(x >= y);
          }
        }
        case BinOp::add:
        case BinOp::sub:
        case BinOp::mul: {
          if (a.is_null() || b.is_null()) return Value::null();
          if (a.is_int() && b.is_int()) {
            std::int64_t x = a.as_int(), y = b.as_int();
            if (e.op == BinOp::add) return Value(x + y);
            if (e.op == BinOp::sub) return Value(x - y);
            return Value(x * y);
          }
          double x = a.to_real(), y = b.to_real();
          if (e.op == BinOp::add) return Value(x + y);
          if (e.op == BinOp::sub) return Value(x - y);
          return Value(x * y);
        }
        case BinOp::div: {
          if (a.is_null() || b.is_null()) return Value::null();
          double y = b.to_real();
          if (y == 0.0) fail(ErrorCode::eval_error, "division by zero");
          return Value(a.to_real() / y);
        }
      }
      fail(ErrorCode::eval_error, "unknown operator");
    }

    case ExprKind::neg: {
      Value v = eval(e.args[0], env);
      if (v.is_null()) return Value::null();
      if (v.is_int()) return Value(-v.as_int());
      return Value(-v.to_real());
    }

    case ExprKind::map_lit:
    case ExprKind::compr:
      fail(ErrorCode::eval_error,
           "set or map literal used outside a distribution");
  }
  fail(ErrorCode::eval_error, "unknown expression kind");
}

// function application over a reusable key buffer: the common case is a
// memoized hit, which then costs no allocation
Value WorldContext::eval_fn_app(const Expr& e, Env& env) {
  const RandomDecl& decl = model_.random_fns[e.ref_id];
  BasicRV& key = scratch_rv(rv_depth_++);
  struct Release {
    std::size_t* depth;
    ~Release() { --*depth; }
  } release{&rv_depth_};

  key.kind = BasicRV::Kind::func_app;
  key.decl = e.ref_id;
  key.args.clear();
  for (std::size_t i = 0; i < e.args.size(); ++i) {
    Value v = eval(e.args[i], env);
    if (v.is_null()) return Value::null();
    key.args.push_back(coerce_value(v, decl.params[i].type));
  }
  if (const Value* hit = world_.find(key)) return *hit;
  return demand_impl(key);
}

namespace {

double eval_real(WorldContext& ctx, const Expr& e, Env& env) {
  Value v = ctx.eval(e, env);
  if (v.is_null())
    fail(ErrorCode::eval_error, "null distribution parameter");
  return v.to_real();
}

}  // namespace

Kernel WorldContext::eval_kernel(const Expr& e, Env& env, int expected_type) {
  if (e.kind == ExprKind::if_else) {
    Value guard = eval(e.args[0], env);
    if (guard.is_null())
      fail(ErrorCode::eval_error, "null condition in if expression");
    return eval_kernel(guard.as_bool() ? e.args[1] : e.args[2], env,
                       expected_type);
  }
  if (e.kind != ExprKind::call || e.ref != RefKind::builtin_dist)
    fail(ErrorCode::eval_error, "expected a distribution: " + print_expr(e));

  switch (static_cast<DistId>(e.ref_id)) {
    case DistId::gaussian:
      return make_gaussian(eval_real(*this, e.args[0], env),
                           eval_real(*this, e.args[1], env));
    case DistId::trunc_gauss:
      return make_trunc_gauss(
          eval_real(*this, e.args[0], env), eval_real(*this, e.args[1], env),
          eval_real(*this, e.args[2], env), eval_real(*this, e.args[3], env));
    case DistId::poisson:
      return make_poisson(eval_real(*this, e.args[0], env));
    case DistId::boolean:
      return make_boolean(eval_real(*this, e.args[0], env));
    case DistId::unif:
      return make_unif(eval_real(*this, e.args[0], env),
                       eval_real(*this, e.args[1], env));
    case DistId::uniform_choice: {
      const Expr& compr = e.args[0];
      std::vector<Value> pool = objects_of_type(compr.ref_id);
      std::vector<Value> candidates;
      candidates.reserve(pool.size());
      std::size_t slot = static_cast<std::size_t>(compr.aux);
      if (env.size() <= slot) env.resize(slot + 1);
      for (const Value& obj : pool) {
        env[slot] = obj;
        candidates.push_back(eval(compr.args[0], env));
      }
      return make_uniform_choice(std::move(candidates));
    }
    case DistId::categorical: {
      const Expr& map = e.args[0];
      std::vector<std::pair<Value, double>> entries;
      for (std::size_t i = 0; i + 1 < map.args.size(); i += 2) {
        Value v = coerce_value(eval(map.args[i], env), expected_type);
        entries.emplace_back(std::move(v),
                             eval_real(*this, map.args[i + 1], env));
      }
      return make_categorical(std::move(entries));
    }
    case DistId::mix: {
      const Expr& map = e.args[0];
      std::vector<std::pair<Value, double>> atoms;
      std::vector<Kernel> parts;
      std::vector<double> weights;
      for (std::size_t i = 0; i + 1 < map.args.size(); i += 2) {
        const Expr& entry = map.args[i];
        double w = eval_real(*this, map.args[i + 1], env);
        if (entry.kind == ExprKind::call &&
            entry.ref == RefKind::builtin_dist) {
          parts.push_back(eval_kernel(entry, env, expected_type));
          weights.push_back(w);
        } else {
          atoms.emplace_back(coerce_value(eval(entry, env), expected_type), w);
        }
      }
      return make_mixture(std::move(atoms), std::move(parts),
                          std::move(weights));
    }
  }
  fail(ErrorCode::eval_error, "unknown distribution");
}

World sample_world(const Model& m, Rng& rng, std::span<const BasicRV> targets) {
  World world;
  SamplingDriver driver(rng);
  WorldContext ctx(m, world, driver);
  for (const BasicRV& rv : targets) ctx.demand(rv);
  return world;
}

}  // namespace mixppl
