#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mixppl/ast.hpp"
#include "mixppl/dist.hpp"
#include "mixppl/rng.hpp"
#include "mixppl/value.hpp"

namespace mixppl {

// builtin type ids; user types follow
inline constexpr int kTypeBool = 0;
inline constexpr int kTypeInt = 1;
inline constexpr int kTypeReal = 2;
inline constexpr int kTypeTimestep = 3;
inline constexpr int kFirstUserType = 4;
inline constexpr int kTypeNull = -2;

enum class DistId {
  gaussian,
  trunc_gauss,
  poisson,
  boolean,
  unif,
  uniform_choice,
  categorical,
  mix,
};

struct OriginBinding {
  int origin_fn;
  std::string var;
};

struct NumberDecl {
  int type;  // generated type
  std::vector<OriginBinding> bindings;
  std::vector<int> arg_types;  // value type of each bound origin function
  Expr body;
  std::string display;  // "#Applicant"
};

struct OriginDecl {
  std::string name;
  int value_type;   // what the origin function returns
  int object_type;  // the generated type it applies to
};

struct Param {
  int type;
  std::string name;
};

enum class FixedDef { scalar, table };

struct FixedDecl {
  std::string name;
  int ret_type;
  std::vector<Param> params;
  FixedDef def = FixedDef::scalar;
  Value scalar_value;  // const-folded
  std::vector<std::pair<Value, Value>> table;
  std::vector<Value> dense;  // table values by distinct-constant ordinal
};

struct RandomDecl {
  std::string name;
  int ret_type;
  std::vector<Param> params;
  Expr body;
  bool has_timestep_param = false;
};

struct DistinctConst {
  std::string name;
  int type;
  ObjectRef object;
};

struct EvidenceDecl {
  int fn;  // random function id
  std::vector<Expr> args;
  Value observed;
  std::string display;
  int timestep = -1;  // literal timestep among the args, if any
};

struct QueryDecl {
  Expr expr;
  bool has_binder = false;  // `for Timestep t`
  std::string binder_var;
  std::string display;
  int value_type = -1;
};

struct RunOptions {
  long long object_cap = 10000;
  double atom_tol = 0.0;
};

struct Model {
  std::vector<std::string> type_names;
  std::vector<DistinctConst> constants;
  std::vector<std::vector<int>> constants_by_type;
  std::vector<NumberDecl> number_stmts;
  std::vector<std::vector<int>> numbers_by_type;
  std::vector<OriginDecl> origin_fns;
  std::vector<FixedDecl> fixed_fns;
  std::vector<RandomDecl> random_fns;
  std::vector<EvidenceDecl> evidence;
  std::vector<QueryDecl> queries;
  std::vector<std::pair<std::string, std::string>> static_edges;
  RunOptions options;

  bool timestep_indexed = false;
  int max_evidence_timestep = -1;

  int find_type(std::string_view name) const;
  int find_random_fn(std::string_view name) const;
  int find_fixed_fn(std::string_view name) const;
  int find_constant(std::string_view name) const;

  // Canonical serialized form; identical text resolves to identical output.
  std::string describe() const;
};

// ---------------------------------------------------------------------------
// Basic random variables and worlds

struct BasicRV {
  enum class Kind : std::uint8_t { number_var, func_app };
  Kind kind = Kind::func_app;
  int decl = -1;
  std::vector<Value> args;

  friend bool operator==(const BasicRV& a, const BasicRV& b) {
    if (a.kind != b.kind || a.decl != b.decl ||
        a.args.size() != b.args.size())
      return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!(a.args[i] == b.args[i])) return false;
    return true;
  }
};

BasicRV rv_number(int stmt, std::vector<Value> args = {});
BasicRV rv_app(int fn, std::vector<Value> args = {});
std::string rv_str(const Model& m, const BasicRV& rv);

struct RvHash {
  std::size_t operator()(const BasicRV& rv) const {
    std::size_t h = hash_combine(static_cast<std::size_t>(rv.kind) + 1,
                                 std::hash<int>{}(rv.decl));
    for (const Value& v : rv.args) h = hash_combine(h, v.hash());
    return h;
  }
};

// Interns BasicRVs to dense ids. Shared by all worlds of one inference run
// so particle copies are flat vector copies. Locking is only engaged for
// multi-threaded runs.
class RvTable {
 public:
  explicit RvTable(bool concurrent = false) : concurrent_(concurrent) {}

  std::int32_t intern(const BasicRV& rv);
  std::int32_t find(const BasicRV& rv) const;  // -1 if absent
  const BasicRV& def(std::int32_t id) const { return defs_[id]; }

 private:
  bool concurrent_;
  mutable std::mutex mu_;
  std::unordered_map<BasicRV, std::int32_t, RvHash> ids_;
  std::deque<BasicRV> defs_;
};

// One consistent assignment of values to instantiated basic random
// variables, in instantiation order.
class World {
 public:
  World() : table_(std::make_shared<RvTable>()) {}
  explicit World(std::shared_ptr<RvTable> table) : table_(std::move(table)) {}

  const Value* find(const BasicRV& rv) const;
  bool has(const BasicRV& rv) const { return find(rv) != nullptr; }
  void assign(const BasicRV& rv, Value v);

  // id-based access for callers that interned the variable once per run
  const Value* find_id(std::int32_t id) const;
  void assign_id(std::int32_t id, Value v);

  std::size_t size() const { return entries_.size(); }

  const BasicRV& rv_at(std::size_t i) const {
    return table_->def(entries_[i].first);
  }
  const Value& value_at(std::size_t i) const { return entries_[i].second; }

  const std::shared_ptr<RvTable>& table() const { return table_; }

  // One "BasicRV = Value" line per assignment, in instantiation order.
  std::string dump(const Model& m) const;

 private:
  std::shared_ptr<RvTable> table_;
  std::vector<std::pair<std::int32_t, Value>> entries_;
  std::vector<std::int32_t> slot_of_;  // rv id -> entry index + 1
};

// True iff the assignment satisfies the consistency clauses: every generated
// object u mentioned anywhere requires its number variable to be assigned at
// least u's index, recursively through origin argument tuples.
bool check_consistency(const Model& m, const World& w);

// ---------------------------------------------------------------------------
// Lazy instantiation

// How values are chosen at not-yet-assigned variables. Prior sampling draws
// from the kernel; the enumeration oracle in the verify module scripts the
// choices instead.
class ChoiceDriver {
 public:
  virtual ~ChoiceDriver() = default;
  virtual Value choose(const BasicRV& rv, const Kernel& k) = 0;
};

class SamplingDriver : public ChoiceDriver {
 public:
  explicit SamplingDriver(Rng& rng) : rng_(&rng) {}
  Value choose(const BasicRV&, const Kernel& k) override {
    return sample_kernel(k, *rng_);
  }

 private:
  Rng* rng_;
};

using Env = std::vector<Value>;

// Evaluator over one world: recursive-descent demand of basic RVs with
// memoization and cycle detection.
class WorldContext {
 public:
  WorldContext(const Model& m, World& w, ChoiceDriver& driver)
      : model_(m), world_(w), driver_(driver) {}

  // Memoized value of rv; samples ancestors first via lazy descent.
  Value demand(const BasicRV& rv);

  // Pin an evidence node to its observed value.
  void clamp(const BasicRV& rv, Value v);
  void clamp_id(std::int32_t id, Value v);

  Value eval(const Expr& e, Env& env);
  Kernel eval_kernel(const Expr& e, Env& env, int expected_type);

  // Realized kernel of rv given the current world (parents get sampled).
  Kernel kernel_for(const BasicRV& rv);

  LikelihoodTerm likelihood(const BasicRV& rv, const Value& observed);

  // Evidence LHS arguments evaluated to a concrete variable. Returns false
  // if an argument came out null (the node is then deterministically null).
  bool resolve_application(const EvidenceDecl& e, BasicRV& out);

  // All currently-valid objects of a type: distinct constants plus generated
  // objects up to their number-variable counts, in deterministic order.
  std::vector<Value> objects_of_type(int type);

  const Model& model() const { return model_; }
  World& world() { return world_; }

 private:
  Value demand_impl(const BasicRV& rv);
  Value eval_fn_app(const Expr& e, Env& env);

  // reusable key and environment buffers for the recursive descent
  BasicRV& scratch_rv(std::size_t depth);
  Env& scratch_env(std::size_t depth);

  const Model& model_;
  World& world_;
  ChoiceDriver& driver_;
  std::vector<BasicRV> pending_;
  std::vector<int> enumerating_types_;
  std::vector<std::unique_ptr<BasicRV>> rv_pool_;
  std::size_t rv_depth_ = 0;
  std::vector<std::unique_ptr<Env>> env_pool_;
  std::size_t env_depth_ = 0;
};

// Prior world over the targets and their ancestors.
World sample_world(const Model& m, Rng& rng, std::span<const BasicRV> targets);

// Coerce v to the given type id (Int widens to Real). Throws type_error.
Value coerce_value(const Value& v, int type);

}  // namespace mixppl
