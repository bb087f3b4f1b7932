#ifndef PTT_KERNEL_HPP
#define PTT_KERNEL_HPP

#include <exception>
#include <string>

#include "ptt/env.hpp"
#include "ptt/term.hpp"

namespace ptt {

enum class ErrKind {
  IllTyped,
  UniverseViolation,
  UnboundVariable,
  TypeMismatch,
  FuelExhausted,
  PositivityViolation,
  NestedInductive,
  GuardViolation,
  ProofEliminationViolation,
  MissingCompanion,
  AbstractionFailure,
  UnsupportedShape,
  HigherUniverseQuantification,
  HigherUniverseIndex,
  HigherUniverseCtorArg,
  PropSetSubtypingUse,
  NestedOrMutual,
  ParseError,
  Other
};

const char* err_kind_name(ErrKind k);

struct Error : public std::exception {
  ErrKind kind;
  std::string msg;
  Error(ErrKind k, std::string m) : kind(k), msg(std::move(m)) {}
  const char* what() const noexcept override { return msg.c_str(); }
};

constexpr long long kDefaultFuel = 1000000;

struct Fuel {
  long long left = kDefaultFuel;
  void step() {
    if (--left < 0) throw Error(ErrKind::FuelExhausted, "reduction fuel exhausted");
  }
};

// Weak head normal form: head beta, delta on transparent constants, iota on
// constructor-headed matches, fix unfolding when the struct argument is
// constructor headed. Opaque constants never unfold.
TermPtr whnf(const Environment& env, TermPtr t, Fuel& fuel);
TermPtr whnf(const Environment& env, TermPtr t, long long fuel = kDefaultFuel);

// Full normalization (whnf applied congruently under binders).
TermPtr normalize(const Environment& env, TermPtr t, Fuel& fuel);
TermPtr normalize(const Environment& env, TermPtr t, long long fuel = kDefaultFuel);

// Beta-delta-iota-alpha equivalence, and the CoC- subtyping closure
// (Type_i <: Type_j iff 0 < i < j, congruent through Pi codomains; no
// Prop :> Set and no Set :> Type1).
bool conv(const Environment& env, const TermPtr& t1, const TermPtr& t2, Fuel& fuel);
bool conv(const Environment& env, const TermPtr& t1, const TermPtr& t2,
          long long fuel = kDefaultFuel);
bool subtype(const Environment& env, const TermPtr& t1, const TermPtr& t2, Fuel& fuel);
bool subtype(const Environment& env, const TermPtr& t1, const TermPtr& t2,
             long long fuel = kDefaultFuel);

// Principal type, up to conversion.
TermPtr infer_type(const Environment& env, const Telescope& ctx, const TermPtr& t, Fuel& fuel);
TermPtr infer_type(const Environment& env, const Telescope& ctx, const TermPtr& t,
                   long long fuel = kDefaultFuel);

// Succeeds iff infer_type(t) is convertible-or-subtype of ty.
void check_type(const Environment& env, const Telescope& ctx, const TermPtr& t, const TermPtr& ty,
                Fuel& fuel);
void check_type(const Environment& env, const Telescope& ctx, const TermPtr& t, const TermPtr& ty,
                long long fuel = kDefaultFuel);

// Sort of a type expression (infer + whnf to a Sort).
Universe sort_of_type(const Environment& env, const Telescope& ctx, const TermPtr& ty, Fuel& fuel);

// Telescope/ctor helpers.
void split_pi_telescope(TermPtr ty, Telescope& tele, TermPtr& tail);
int ctor_arity(const InductiveDecl& d, int ctor);

// Well-formedness, universes, strict positivity, no nesting.
void check_inductive(const Environment& env, const InductiveDecl& d);

// Syntactic guard condition for fixpoints.
void check_fix(const Environment& env, const Telescope& ctx, const TermPtr& fix);

// Returns t with every Pi/Lam/Match annotated with universe flags.
TermPtr elaborate_flags(const Environment& env, const Telescope& ctx, const TermPtr& t, Fuel& fuel);
TermPtr elaborate_flags(const Environment& env, const Telescope& ctx, const TermPtr& t,
                        long long fuel = kDefaultFuel);

UFlag flag_of_sort(const Universe& u);

// Typechecks the declaration against env and appends it.
void push_checked(Environment& env, Decl d, long long fuel = kDefaultFuel);

// Singleton elimination test for Prop inductives.
bool singleton_eliminable(const Environment& env, const InductiveDecl& d);

}  // namespace ptt

#endif
