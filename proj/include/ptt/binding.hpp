#ifndef PTT_BINDING_HPP
#define PTT_BINDING_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ptt/term.hpp"

namespace ptt {

// Syntactic variable sets; duplicates removed, first-occurrence order.
std::vector<VarName> free_vars(const TermPtr& t);
std::vector<VarName> bound_vars(const TermPtr& t);
std::set<VarName> free_var_set(const TermPtr& t);

bool mentions_var(const TermPtr& t, const VarName& x);
bool mentions_const(const TermPtr& t, const std::string& name);
// Names of all constants, inductives and constructors referenced anywhere.
std::set<std::string> referenced_names(const TermPtr& t);

// Replaces every variable of class C1 by its primed (C2) copy. Throws
// NonC1Variable (std::runtime_error) if a variable of another class occurs.
TermPtr prime(const TermPtr& t);

// Alpha equivalence; universe flags must match.
bool alpha_eq(const TermPtr& t1, const TermPtr& t2);

// The BC<l>(t) condition of the translation: bound vars of t disjoint from l,
// no shadowed bound vars (including the binder-not-in-domain condition on
// Pi/Lam), free vars within l, all vars class C1, and the reserved base name
// `c` absent.
bool bc_check(const std::vector<VarName>& l, const TermPtr& t);

// Alpha-renames t (free vars within l, all C1) to a BC<l> representative.
// Fresh names are the original base with the smallest unused numeric suffix.
TermPtr rename_to_bc(const std::vector<VarName>& l, const TermPtr& t);

// BC-preserving substitution: alpha-renames b so its bound vars avoid every
// variable of t and BC<x::l>(b) holds, then substitutes naively.
TermPtr bc_subst(const std::vector<VarName>& l, const TermPtr& b, const VarName& x,
                 const TermPtr& t);

// General capture-avoiding substitution over any classes (used by reduction).
TermPtr subst(const TermPtr& b, const VarName& x, const TermPtr& t);
TermPtr subst_many(const TermPtr& b, const std::map<VarName, TermPtr>& sub);

// lv l = l ++ map prime l ++ map rel l
std::vector<VarName> lv3(const std::vector<VarName>& l);
// C1..C5 closure of a list of names (bound-variable lemma support).
std::vector<VarName> lv45(const std::vector<VarName>& l);

// Smallest-suffix fresh name of the given class, avoiding `used`.
VarName fresh_name(const std::string& base, VarClass cls, const std::set<VarName>& used);

}  // namespace ptt

#endif
