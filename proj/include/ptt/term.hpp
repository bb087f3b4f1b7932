#ifndef PTT_TERM_HPP
#define PTT_TERM_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ptt {

// Universe of the calculus: Prop, or Type(level) with Set = Type(0).
struct Universe {
  bool is_prop = false;
  int level = 0;  // meaningful only when !is_prop

  static Universe prop() { return Universe{true, 0}; }
  static Universe set() { return Universe{false, 0}; }
  static Universe type(int lvl) { return Universe{false, lvl}; }

  bool is_set() const { return !is_prop && level == 0; }
  bool operator==(const Universe& o) const {
    return is_prop == o.is_prop && (is_prop || level == o.level);
  }
  bool operator!=(const Universe& o) const { return !(*this == o); }
};

// Five disjoint classes of variable names. User input only ever contains C1;
// the translation mints primed (C2), relation (C3), and auxiliary (C4, C5)
// names from C1 bases.
enum class VarClass : uint8_t { C1 = 1, C2, C3, C4, C5 };

struct VarName {
  std::string base;
  VarClass cls = VarClass::C1;

  bool operator==(const VarName& o) const { return cls == o.cls && base == o.base; }
  bool operator!=(const VarName& o) const { return !(*this == o); }
  bool operator<(const VarName& o) const {
    return cls != o.cls ? cls < o.cls : base < o.base;
  }
};

inline VarName v1(std::string base) { return VarName{std::move(base), VarClass::C1}; }

// Class maps of the translation: injective and total on C1 names.
inline VarName prime_name(const VarName& n) { return VarName{n.base, VarClass::C2}; }
inline VarName rel_name(const VarName& n) { return VarName{n.base, VarClass::C3}; }
inline VarName four_name(const VarName& n) { return VarName{n.base, VarClass::C4}; }
inline VarName five_name(const VarName& n) { return VarName{n.base, VarClass::C5}; }

// Elaborated universe flag: Set, Prop, Type_i (i>0), or not yet computed.
enum class UFlag : uint8_t { None = 0, S, P, T };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Branch {
  int ctor = 0;                  // constructor index in the inductive
  std::vector<VarName> args;     // non-parameter constructor arguments
  TermPtr body;
};

enum class Tag : uint8_t { Sort, Var, Pi, Lam, App, IndRef, CtorRef, ConstRef, Match, Fix };

struct Term {
  Tag tag;

  // Sort
  Universe sort;
  // Var / binders (Pi, Lam, Fix name, Match asVar)
  VarName var;
  // Pi: a = domain, b = codomain; Lam: a = domain type, b = body;
  // App: a = fn, b = arg; Fix: a = signature, b = body.
  TermPtr a, b;
  UFlag flag_dom = UFlag::None;
  UFlag flag_cod = UFlag::None;
  // IndRef / ConstRef / CtorRef
  std::string name;
  int ctor_index = 0;
  // Match
  TermPtr discr;            // discriminee
  TermPtr discr_type;       // fully applied inductive type of the discriminee
  std::vector<VarName> in_vars;  // index variables bound in the return type
  TermPtr ret;              // return type (sees in_vars and var=asVar)
  std::vector<Branch> branches;
  // Fix
  int struct_arg = 0;
};

// Constructors -----------------------------------------------------------

TermPtr mk_sort(Universe u);
TermPtr mk_prop();
TermPtr mk_set();
TermPtr mk_type(int lvl);
TermPtr mk_var(VarName n);
TermPtr mk_pi(VarName x, TermPtr dom, TermPtr cod, UFlag fd = UFlag::None, UFlag fc = UFlag::None);
TermPtr mk_lam(VarName x, TermPtr dom, TermPtr body, UFlag fd = UFlag::None);
TermPtr mk_app(TermPtr f, TermPtr a);
TermPtr mk_app(TermPtr f, const std::vector<TermPtr>& args);
TermPtr mk_ind(std::string name);
TermPtr mk_ctor(std::string ind, int index);
TermPtr mk_const(std::string name);
TermPtr mk_match(TermPtr discr, TermPtr discr_type, VarName as_var, std::vector<VarName> in_vars,
                 TermPtr ret, std::vector<Branch> branches, UFlag ret_flag = UFlag::None);
TermPtr mk_fix(VarName f, TermPtr signature, TermPtr body, int struct_arg);

// Non-dependent function type with an unnamed (fresh dummy) binder.
TermPtr mk_arrow(TermPtr dom, TermPtr cod);

// Spine view: strips applications, returns head and pushes args.
TermPtr app_head(TermPtr t, std::vector<TermPtr>& args);
TermPtr app_head(TermPtr t);

// A telescope entry.
struct Binder {
  VarName name;
  TermPtr type;
};
using Telescope = std::vector<Binder>;

TermPtr mk_pi_telescope(const Telescope& tele, TermPtr cod);
TermPtr mk_lam_telescope(const Telescope& tele, TermPtr body);

// Structural equality (names, classes and flags all significant).
bool term_eq(const TermPtr& x, const TermPtr& y);

}  // namespace ptt

#endif
