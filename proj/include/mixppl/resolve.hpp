#pragma once

#include "mixppl/ast.hpp"
#include "mixppl/model.hpp"

namespace mixppl {

struct ResolveOptions {
  RunOptions run;
  // Tests disable this to exercise the dynamic cycle detector.
  bool static_cycle_check = true;
};

// Binds names, checks types, validates Mix weights and origin signatures,
// rejects static dependency cycles among non-timestep declarations, and
// const-folds fixed scalars. Throws Error on any diagnostic.
Model resolve(const ModelAST& ast, const ResolveOptions& options = {});

// Parse + resolve a model source text.
Model load_model_text(std::string_view text, const ResolveOptions& options = {});

// Parse + resolve a .blog file.
Model load_model_file(const std::string& path,
                      const ResolveOptions& options = {});

}  // namespace mixppl
