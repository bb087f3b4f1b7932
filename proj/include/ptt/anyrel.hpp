#ifndef PTT_ANYREL_HPP
#define PTT_ANYREL_HPP

#include <map>
#include <string>
#include <vector>

#include "ptt/env.hpp"
#include "ptt/kernel.hpp"
#include "ptt/term.hpp"

namespace ptt {

struct TranslationResult {
  std::vector<std::string> generated;  // names appended to the environment
  TermPtr statement;                   // abstraction theorem statement
  TermPtr proof;                       // its proof (the translated term)
  std::vector<std::string> diagnostics;
};

// The term translation engine, shared by the AnyRel and IsoRel passes. The
// caller guarantees BC and flag-elaborated inputs; translated copies of the
// source context are implied by the variable-class scheme.
class Translator {
 public:
  Translator(Environment& env, bool iso, Fuel& fuel) : env_(env), iso_(iso), fuel_(fuel) {}

  // The parametricity relation of t.
  TermPtr tr(const TermPtr& t);
  // Source copy with fix aliases resolved, and its primed twin.
  TermPtr src(const TermPtr& t);
  TermPtr srcp(const TermPtr& t);

  // The type of the relation witness binder for x : A (flag f): in AnyRel
  // mode [[A]] x x2; in IsoRel mode (projTyRel A [[A]]_iso) x x2.
  TermPtr rel_binder_type(const TermPtr& A, UFlag f, const TermPtr& x, const TermPtr& x2);

  // (x:A) becomes (x:A)(x2:A')(x_R: [[A]] x x2); extends the source context.
  Telescope triple_telescope(const Telescope& tele);

  // Per-inductive override for the relation reference while it is generated.
  std::map<std::string, TermPtr> self_override;
  // Fix variables mapped to their closed unprimed references.
  std::map<VarName, TermPtr> alias;

  Telescope src_ctx;
  std::vector<VarName> lam_path;  // lambda binders from the definition root
  std::string root_def;           // name of the definition being translated

  Environment& env() { return env_; }
  Fuel& fuel() { return fuel_; }
  bool iso() const { return iso_; }

 private:
  TermPtr tr_sort(const Universe& u);
  TermPtr tr_pi(const TermPtr& t);
  TermPtr tr_lam(const TermPtr& t);
  TermPtr tr_match(const TermPtr& t);
  TermPtr tr_match_inductive(const TermPtr& t, const InductiveDecl& ind,
                             const std::vector<TermPtr>& dparams,
                             const std::vector<TermPtr>& dindices);
  TermPtr tr_match_deductive(const TermPtr& t, const InductiveDecl& ind,
                             const std::vector<TermPtr>& dparams,
                             const std::vector<TermPtr>& dindices);
  TermPtr tr_fix(const TermPtr& t);
  TermPtr companion_ref(const std::string& name, bool is_ind);
  TermPtr false_elim(UFlag ret_flag, const TermPtr& ret_src, const TermPtr& target,
                     const TermPtr& witness);
  TermPtr unpack_chain(const TermPtr& t, const InductiveDecl& ind, const Branch& bru,
                       const std::string& ieq_name, const Telescope& lamTele, const TermPtr& tail,
                       const TermPtr& trB);

  Environment& env_;
  bool iso_;
  Fuel& fuel_;
};

// hat(s): Prop for Set and Prop, Type_i otherwise.
Universe hat_universe(const Universe& u);

// Deductive-style translation of a Set/Type inductive: the generalized
// index-equality inductive, the T_R fixpoint and constructor companions.
TranslationResult translate_inductive_deductive(Environment& env, const std::string& ind,
                                                Fuel& fuel);

// Inductive-style translation (Prop inductives, or forced).
TranslationResult translate_inductive_inductive(Environment& env, const std::string& ind,
                                                Fuel& fuel);

// Translates a checked closed definition, appends <name>_R, and records the
// abstraction-theorem statement and proof.
TranslationResult translate_definition(Environment& env, const std::string& name, Fuel& fuel);

// Dispatches on the universe of the inductive.
TranslationResult translate_inductive(Environment& env, const std::string& ind, Fuel& fuel);

// Builds the statement [[T]] name name' and verifies the recorded proof.
TranslationResult abstraction_check(Environment& env, const std::string& name, Fuel& fuel);

// [[Gamma]]: each (x:A) becomes (x:A)(x2:A')(x_R:[[A]] x x2).
Telescope translate_context(Environment& env, const Telescope& ctx, Fuel& fuel);

// Prepares a stored declaration component for translation: BC-renames and
// elaborates flags.
TermPtr prep_for_translation(Environment& env, const Telescope& ctx, const TermPtr& t, Fuel& fuel);

}  // namespace ptt

#endif
