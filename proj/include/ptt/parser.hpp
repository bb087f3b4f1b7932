#ifndef PTT_PARSER_HPP
#define PTT_PARSER_HPP

#include <memory>
#include <string>
#include <vector>

#include "ptt/env.hpp"
#include "ptt/term.hpp"

namespace ptt {

struct RawTerm;
using RawPtr = std::shared_ptr<RawTerm>;

struct RawBinder {
  std::string name;
  RawPtr type;
};

struct RawBranch {
  std::string ctor;
  std::vector<std::string> args;
  RawPtr body;
};

struct RawTerm {
  enum K { Ident, Sort, Pi, Lam, App, Fix, Match } k = Ident;
  std::string name;
  Universe sort;
  std::vector<RawBinder> binders;  // Pi/Lam groups; Fix: [0] is the fix name
  RawPtr a, b;                     // App: fn/arg; Fix: signature/body
  int fix_struct = 0;
  RawPtr discr, ret;
  std::string as_name;
  std::string in_ind;
  std::vector<std::string> in_vars;  // with leading underscores stripped
  bool has_in = false;
  std::vector<RawBranch> branches;
  int line = 0, col = 0;
};

struct Vernacular {
  enum K {
    Inductive,
    Definition,
    Fixpoint,
    Axiom,
    Translate,
    AssertType,
    AssertConv,
    AssertReduces,
    Prune,
    ExpectError
  } k = Definition;
  std::string name;
  std::vector<RawBinder> params;  // inductive parameters / fixpoint arguments
  RawPtr type, body;
  std::vector<std::pair<std::string, RawPtr>> ctors;
  std::string struct_name;
  std::string mode, target, pattern;
  RawPtr t1, t2;
  std::shared_ptr<Vernacular> wrapped;
  int line = 0, col = 0;
};

// Throws Error(ParseError) with line/column on failure.
std::vector<Vernacular> parse_file(const std::string& text);

// Parses a single term (for tests and golden files).
RawPtr parse_term(const std::string& text);

// Resolves identifiers against env/scope, computes match annotations (the
// stored discriminee type, branch order, defaulted as/return clauses).
TermPtr elaborate_raw(const Environment& env, const Telescope& ctx, const RawPtr& raw,
                      long long fuel = 1000000);

// Constructor-name lookup used during elaboration.
bool resolve_ctor(const Environment& env, const std::string& name, std::string& ind, int& idx);

}  // namespace ptt

#endif
