#ifndef PTT_ENV_HPP
#define PTT_ENV_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptt/term.hpp"

namespace ptt {

struct CtorDecl {
  std::string name;
  TermPtr type;  // telescope over non-parameter args, in scope of the params,
                 // ending in the inductive applied to params and index exprs
};

struct InductiveDecl {
  std::string name;
  Telescope params;
  Telescope indices;
  Universe universe;
  std::vector<CtorDecl> ctors;
};

enum class DeclKind { Definition, Inductive, Axiom };

// How an inductive was translated, when it was.
enum class TransStyle { None, Deductive, Inductive };

struct Decl {
  DeclKind kind;
  std::string name;
  TermPtr type;   // definitions and axioms
  TermPtr body;   // definitions only
  bool opaque = false;
  InductiveDecl ind;  // inductives only
};

// Companion bookkeeping for the translators.
struct Companion {
  std::string rel;        // <n>_R
  TransStyle style = TransStyle::None;
  std::string indices_eq;  // <n>_indicesEq, deductive indexed inductives only
  std::string iso;         // <n>_iso bundle (inductives) or <n>_Riso (definitions)
};

class Environment {
 public:
  const std::vector<Decl>& decls() const { return decls_; }

  bool has(const std::string& name) const { return index_.count(name) > 0; }
  const Decl* find(const std::string& name) const;
  const Decl& get(const std::string& name) const;
  const InductiveDecl& inductive(const std::string& name) const;
  const CtorDecl& ctor(const std::string& ind, int idx) const;

  // Closed type of a constructor: forall params, ctor telescope.
  TermPtr ctor_type(const std::string& ind, int idx) const;
  // Closed arity of an inductive: forall params indices, universe.
  TermPtr arity(const std::string& ind) const;

  // Appends are unchecked here; the kernel's typed append lives in kernel.hpp.
  void push(Decl d);

  const Companion* companion(const std::string& name) const;
  void set_companion(const std::string& name, Companion c) { companions_[name] = std::move(c); }
  Companion* companion_mut(const std::string& name);

 private:
  std::vector<Decl> decls_;
  std::map<std::string, size_t> index_;
  std::map<std::string, Companion> companions_;
};

}  // namespace ptt

#endif
