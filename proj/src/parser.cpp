#include "ptt/parser.hpp"

#include <cctype>
#include <map>

#include "ptt/binding.hpp"
#include "ptt/kernel.hpp"

namespace ptt {

namespace {

struct Token {
  enum K { Ident, Directive, Str, Punct, End } k = End;
  std::string text;
  int line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  Token tok;

  explicit Lexer(const std::string& s) : src(s) { next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrKind::ParseError, "parse error at " + std::to_string(tok.line) + ":" +
                                         std::to_string(tok.col) + ": " + msg);
  }

  void advance(size_t n = 1) {
    for (size_t i = 0; i < n && pos < src.size(); ++i) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void skip_ws() {
    for (;;) {
      while (pos < src.size() && isspace((unsigned char)src[pos])) advance();
      if (pos + 1 < src.size() && src[pos] == '(' && src[pos + 1] == '*') {
        int depth = 1;
        advance(2);
        while (pos < src.size() && depth > 0) {
          if (pos + 1 < src.size() && src[pos] == '(' && src[pos + 1] == '*') {
            depth++;
            advance(2);
          } else if (pos + 1 < src.size() && src[pos] == '*' && src[pos + 1] == ')') {
            depth--;
            advance(2);
          } else {
            advance();
          }
        }
        continue;
      }
      break;
    }
  }

  static bool ident_start(char c) { return isalpha((unsigned char)c) || c == '_'; }
  static bool ident_char(char c) { return isalnum((unsigned char)c) || c == '_' || c == '\''; }

  void next() {
    skip_ws();
    tok.line = line;
    tok.col = col;
    if (pos >= src.size()) {
      tok.k = Token::End;
      tok.text.clear();
      return;
    }
    char c = src[pos];
    if (c == '#') {
      size_t start = pos;
      advance();
      while (pos < src.size() && ident_char(src[pos])) advance();
      tok.k = Token::Directive;
      tok.text = src.substr(start, pos - start);
      return;
    }
    if (c == '"') {
      advance();
      std::string s;
      while (pos < src.size() && src[pos] != '"') {
        s += src[pos];
        advance();
      }
      if (pos >= src.size()) fail("unterminated string literal");
      advance();
      tok.k = Token::Str;
      tok.text = s;
      return;
    }
    if (ident_start(c)) {
      size_t start = pos;
      while (pos < src.size() && ident_char(src[pos])) advance();
      tok.k = Token::Ident;
      tok.text = src.substr(start, pos - start);
      return;
    }
    if (isdigit((unsigned char)c)) {
      size_t start = pos;
      while (pos < src.size() && isdigit((unsigned char)src[pos])) advance();
      tok.k = Token::Ident;  // numbers only appear after fix '/'
      tok.text = src.substr(start, pos - start);
      return;
    }
    // Multi-char puncts.
    static const char* puncts[] = {":=", "=>", "->", "==", "~>", nullptr};
    for (int i = 0; puncts[i]; ++i) {
      size_t n = strlen(puncts[i]);
      if (src.compare(pos, n, puncts[i]) == 0) {
        tok.k = Token::Punct;
        tok.text = puncts[i];
        advance(n);
        return;
      }
    }
    tok.k = Token::Punct;
    tok.text = std::string(1, c);
    advance();
  }

  bool is_punct(const std::string& p) const { return tok.k == Token::Punct && tok.text == p; }
  bool is_ident(const std::string& s) const { return tok.k == Token::Ident && tok.text == s; }

  void expect_punct(const std::string& p) {
    if (!is_punct(p)) fail("expected '" + p + "', found '" + tok.text + "'");
    next();
  }

  std::string expect_ident() {
    if (tok.k != Token::Ident) fail("expected identifier, found '" + tok.text + "'");
    std::string s = tok.text;
    next();
    return s;
  }
};

const char* kKeywords[] = {"forall", "fun",  "fix",   "match",      "as",         "in",
                           "return", "with", "end",   "Inductive",  "Definition", "Fixpoint",
                           "Axiom",  "Prop", "Set",   "struct",     nullptr};

bool is_keyword(const std::string& s) {
  for (int i = 0; kKeywords[i]; ++i)
    if (s == kKeywords[i]) return true;
  if (s.rfind("Type", 0) == 0 && s.size() == 5 && isdigit((unsigned char)s[4])) return true;
  return false;
}

struct Parser {
  Lexer lx;

  explicit Parser(const std::string& s) : lx(s) {}

  RawPtr mk(RawTerm::K k) {
    auto r = std::make_shared<RawTerm>();
    r->k = k;
    r->line = lx.tok.line;
    r->col = lx.tok.col;
    return r;
  }

  bool peek_sort(Universe& u) {
    if (lx.tok.k != Token::Ident) return false;
    const std::string& s = lx.tok.text;
    if (s == "Prop") {
      u = Universe::prop();
      return true;
    }
    if (s == "Set") {
      u = Universe::set();
      return true;
    }
    if (s.rfind("Type", 0) == 0 && s.size() == 5 && isdigit((unsigned char)s[4])) {
      int lvl = s[4] - '0';
      if (lvl < 1 || lvl > 3) lx.fail("universe levels are capped at 3");
      u = Universe::type(lvl);
      return true;
    }
    return false;
  }

  std::vector<RawBinder> binder_groups(const char* stop) {
    std::vector<RawBinder> out;
    while (lx.is_punct("(")) {
      lx.next();
      std::vector<std::string> names;
      while (lx.tok.k == Token::Ident && !lx.is_punct(":")) {
        if (is_keyword(lx.tok.text)) lx.fail("keyword used as binder");
        names.push_back(lx.tok.text);
        lx.next();
      }
      if (names.empty()) lx.fail("expected binder name");
      lx.expect_punct(":");
      RawPtr ty = term();
      lx.expect_punct(")");
      for (const auto& n : names) out.push_back({n, ty});
    }
    if (out.empty()) lx.fail(std::string("expected binder group before '") + stop + "'");
    return out;
  }

  RawPtr term() {
    if (lx.is_ident("forall")) {
      auto r = mk(RawTerm::Pi);
      lx.next();
      r->binders = binder_groups(",");
      lx.expect_punct(",");
      r->b = term();
      return r;
    }
    if (lx.is_ident("fun")) {
      auto r = mk(RawTerm::Lam);
      lx.next();
      r->binders = binder_groups("=>");
      lx.expect_punct("=>");
      r->b = term();
      return r;
    }
    if (lx.is_ident("fix")) {
      auto r = mk(RawTerm::Fix);
      lx.next();
      std::string name = lx.expect_ident();
      r->binders.push_back({name, nullptr});
      lx.expect_punct("/");
      std::string num = lx.expect_ident();
      r->fix_struct = atoi(num.c_str());
      lx.expect_punct(":");
      r->a = term();
      lx.expect_punct(":=");
      r->b = term();
      return r;
    }
    return arrow();
  }

  RawPtr arrow() {
    RawPtr lhs = app();
    if (lx.is_punct("->")) {
      auto r = mk(RawTerm::Pi);
      lx.next();
      r->binders.push_back({"_", lhs});
      r->b = arrow();
      return r;
    }
    return lhs;
  }

  RawPtr app() {
    RawPtr f = atom();
    for (;;) {
      if (lx.tok.k == Token::Ident && !is_keyword(lx.tok.text)) {
        RawPtr a = atom();
        auto r = std::make_shared<RawTerm>();
        r->k = RawTerm::App;
        r->a = f;
        r->b = a;
        f = r;
      } else if (lx.is_punct("(")) {
        RawPtr a = atom();
        auto r = std::make_shared<RawTerm>();
        r->k = RawTerm::App;
        r->a = f;
        r->b = a;
        f = r;
      } else if (lx.tok.k == Token::Ident && peek_sort_only()) {
        RawPtr a = atom();
        auto r = std::make_shared<RawTerm>();
        r->k = RawTerm::App;
        r->a = f;
        r->b = a;
        f = r;
      } else {
        break;
      }
    }
    return f;
  }

  bool peek_sort_only() {
    Universe u;
    return peek_sort(u);
  }

  RawPtr atom() {
    Universe u;
    if (peek_sort(u)) {
      auto r = mk(RawTerm::Sort);
      r->sort = u;
      lx.next();
      return r;
    }
    if (lx.is_ident("match")) return match_term();
    if (lx.is_punct("(")) {
      lx.next();
      RawPtr t = term();
      lx.expect_punct(")");
      return t;
    }
    if (lx.tok.k == Token::Ident && !is_keyword(lx.tok.text)) {
      auto r = mk(RawTerm::Ident);
      r->name = lx.tok.text;
      lx.next();
      return r;
    }
    lx.fail("expected a term, found '" + lx.tok.text + "'");
  }

  RawPtr match_term() {
    auto r = mk(RawTerm::Match);
    lx.next();
    r->discr = term();
    if (lx.is_ident("as")) {
      lx.next();
      r->as_name = lx.expect_ident();
    }
    if (lx.is_ident("in")) {
      lx.next();
      r->has_in = true;
      r->in_ind = lx.expect_ident();
      while (lx.tok.k == Token::Ident && !lx.is_ident("return") && !lx.is_ident("with"))
        r->in_vars.push_back(lx.expect_ident());
    }
    if (lx.is_ident("return")) {
      lx.next();
      r->ret = term();
    }
    if (!lx.is_ident("with")) lx.fail("expected 'with' in match");
    lx.next();
    if (lx.is_punct("|")) lx.next();
    while (!lx.is_ident("end")) {
      RawBranch br;
      br.ctor = lx.expect_ident();
      while (lx.tok.k == Token::Ident && !lx.is_punct("=>")) br.args.push_back(lx.expect_ident());
      lx.expect_punct("=>");
      br.body = term();
      r->branches.push_back(std::move(br));
      if (lx.is_punct("|"))
        lx.next();
      else
        break;
    }
    if (!lx.is_ident("end")) lx.fail("expected 'end' in match");
    lx.next();
    return r;
  }

  Vernacular statement() {
    Vernacular v;
    v.line = lx.tok.line;
    v.col = lx.tok.col;
    if (lx.tok.k == Token::Directive) {
      std::string d = lx.tok.text;
      lx.next();
      if (d == "#translate") {
        v.k = Vernacular::Translate;
        v.mode = lx.expect_ident();
        if (lx.is_punct("-")) {  // isorel-strong
          lx.next();
          v.mode += "-" + lx.expect_ident();
        }
        v.target = lx.expect_ident();
        lx.expect_punct(".");
        return v;
      }
      if (d == "#assert_type") {
        v.k = Vernacular::AssertType;
        v.t1 = term();
        lx.expect_punct(":");
        v.t2 = term();
        lx.expect_punct(".");
        return v;
      }
      if (d == "#assert_conv") {
        v.k = Vernacular::AssertConv;
        v.t1 = term();
        lx.expect_punct("==");
        v.t2 = term();
        lx.expect_punct(".");
        return v;
      }
      if (d == "#assert_reduces") {
        v.k = Vernacular::AssertReduces;
        v.t1 = term();
        lx.expect_punct("~>");
        v.t2 = term();
        lx.expect_punct(".");
        return v;
      }
      if (d == "#prune") {
        v.k = Vernacular::Prune;
        v.target = lx.expect_ident();
        lx.expect_punct(".");
        return v;
      }
      if (d == "#expect_error") {
        v.k = Vernacular::ExpectError;
        if (lx.tok.k != Token::Str) lx.fail("expected pattern string after #expect_error");
        v.pattern = lx.tok.text;
        lx.next();
        v.wrapped = std::make_shared<Vernacular>(statement());
        return v;
      }
      lx.fail("unknown directive " + d);
    }
    if (lx.is_ident("Inductive")) {
      lx.next();
      v.k = Vernacular::Inductive;
      v.name = lx.expect_ident();
      if (lx.is_punct("(")) v.params = binder_groups(":");
      lx.expect_punct(":");
      v.type = term();  // arity: forall indices, sort
      lx.expect_punct(":=");
      if (lx.is_punct("|")) lx.next();
      while (!lx.is_punct(".")) {
        std::string cname = lx.expect_ident();
        lx.expect_punct(":");
        RawPtr cty = term();
        v.ctors.emplace_back(cname, cty);
        if (lx.is_punct("|"))
          lx.next();
        else
          break;
      }
      lx.expect_punct(".");
      return v;
    }
    if (lx.is_ident("Definition")) {
      lx.next();
      v.k = Vernacular::Definition;
      v.name = lx.expect_ident();
      if (lx.is_punct(":")) {
        lx.next();
        v.type = term();
      }
      lx.expect_punct(":=");
      v.body = term();
      lx.expect_punct(".");
      return v;
    }
    if (lx.is_ident("Fixpoint")) {
      lx.next();
      v.k = Vernacular::Fixpoint;
      v.name = lx.expect_ident();
      v.params = binder_groups("{");
      if (lx.is_punct("{")) {
        lx.next();
        if (!lx.is_ident("struct")) lx.fail("expected 'struct'");
        lx.next();
        v.struct_name = lx.expect_ident();
        lx.expect_punct("}");
      }
      lx.expect_punct(":");
      v.type = term();
      lx.expect_punct(":=");
      v.body = term();
      lx.expect_punct(".");
      return v;
    }
    if (lx.is_ident("Axiom")) {
      lx.next();
      v.k = Vernacular::Axiom;
      v.name = lx.expect_ident();
      lx.expect_punct(":");
      v.type = term();
      lx.expect_punct(".");
      return v;
    }
    lx.fail("expected a declaration or directive, found '" + lx.tok.text + "'");
  }
};

}  // namespace

std::vector<Vernacular> parse_file(const std::string& text) {
  Parser p(text);
  std::vector<Vernacular> out;
  while (p.lx.tok.k != Token::End) out.push_back(p.statement());
  return out;
}

RawPtr parse_term(const std::string& text) {
  Parser p(text);
  RawPtr t = p.term();
  if (p.lx.tok.k != Token::End) p.lx.fail("trailing input after term");
  return t;
}

bool resolve_ctor(const Environment& env, const std::string& name, std::string& ind, int& idx) {
  for (const auto& d : env.decls()) {
    if (d.kind != DeclKind::Inductive) continue;
    for (size_t i = 0; i < d.ind.ctors.size(); ++i)
      if (d.ind.ctors[i].name == name) {
        ind = d.ind.name;
        idx = (int)i;
        return true;
      }
  }
  return false;
}

namespace {

struct Elab {
  const Environment& env;
  Fuel& fuel;
  // Innermost-last scope of display names.
  std::vector<std::pair<std::string, VarName>> scope;
  Telescope ctx;

  const VarName* lookup(const std::string& s) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == s) return &it->second;
    return nullptr;
  }

  [[noreturn]] void fail(const RawPtr& r, const std::string& msg) const {
    throw Error(ErrKind::ParseError, "elaboration error at " + std::to_string(r->line) + ":" +
                                         std::to_string(r->col) + ": " + msg);
  }

  TermPtr go(const RawPtr& r) {
    switch (r->k) {
      case RawTerm::Sort:
        return mk_sort(r->sort);
      case RawTerm::Ident: {
        if (const VarName* v = lookup(r->name)) return mk_var(*v);
        const Decl* d = env.find(r->name);
        if (d) {
          if (d->kind == DeclKind::Inductive) return mk_ind(r->name);
          return mk_const(r->name);
        }
        std::string ind;
        int idx;
        if (resolve_ctor(env, r->name, ind, idx)) return mk_ctor(ind, idx);
        return mk_var(v1(r->name));  // free variable; the kernel reports if unbound
      }
      case RawTerm::Pi: {
        size_t n = r->binders.size();
        std::vector<TermPtr> doms;
        size_t sbase = scope.size(), cbase = ctx.size();
        for (const auto& b : r->binders) {
          TermPtr dom = go(b.type);
          doms.push_back(dom);
          VarName v = v1(b.name);
          scope.emplace_back(b.name, v);
          ctx.push_back({v, dom});
        }
        TermPtr body = go(r->b);
        for (size_t i = n; i-- > 0;) body = mk_pi(v1(r->binders[i].name), doms[i], body);
        scope.resize(sbase);
        ctx.resize(cbase);
        return body;
      }
      case RawTerm::Lam: {
        size_t n = r->binders.size();
        std::vector<TermPtr> doms;
        size_t sbase = scope.size(), cbase = ctx.size();
        for (const auto& b : r->binders) {
          TermPtr dom = go(b.type);
          doms.push_back(dom);
          VarName v = v1(b.name);
          scope.emplace_back(b.name, v);
          ctx.push_back({v, dom});
        }
        TermPtr body = go(r->b);
        for (size_t i = n; i-- > 0;) body = mk_lam(v1(r->binders[i].name), doms[i], body);
        scope.resize(sbase);
        ctx.resize(cbase);
        return body;
      }
      case RawTerm::App:
        return mk_app(go(r->a), go(r->b));
      case RawTerm::Fix: {
        TermPtr sig = go(r->a);
        VarName f = v1(r->binders[0].name);
        size_t sbase = scope.size(), cbase = ctx.size();
        scope.emplace_back(r->binders[0].name, f);
        ctx.push_back({f, sig});
        TermPtr body = go(r->b);
        scope.resize(sbase);
        ctx.resize(cbase);
        return mk_fix(f, sig, body, r->fix_struct);
      }
      case RawTerm::Match:
        return go_match(r);
    }
    fail(r, "unhandled raw term");
  }

  TermPtr go_match(const RawPtr& r) {
    TermPtr discr = go(r->discr);
    TermPtr dty = whnf(env, infer_type(env, ctx, discr, fuel), fuel);
    std::vector<TermPtr> iargs;
    TermPtr ih = app_head(dty, iargs);
    if (ih->tag != Tag::IndRef) fail(r, "match discriminee is not of an inductive type");
    const InductiveDecl& ind = env.inductive(ih->name);
    size_t np = ind.params.size(), ni = ind.indices.size();
    if (r->has_in) {
      if (r->in_ind != ih->name) fail(r, "match 'in' names the wrong inductive");
      if (r->in_vars.size() != np + ni) fail(r, "match 'in' pattern arity mismatch");
      for (size_t i = 0; i < np; ++i)
        if (r->in_vars[i] != "_") fail(r, "parameters in a match 'in' pattern must be _");
    } else if (ni != 0 && r->ret) {
      fail(r, "match on an indexed inductive with a return clause needs an 'in' pattern");
    }

    // Bind as-var and index vars.
    std::set<VarName> used;
    for (const auto& [s, v] : scope) used.insert(v);
    std::string as = r->as_name;
    VarName asv = as.empty() ? fresh_name("mtv", VarClass::C1, used) : v1(as);
    used.insert(asv);
    std::vector<VarName> ivs;
    for (size_t i = 0; i < ni; ++i) {
      std::string nm = r->has_in ? r->in_vars[np + i] : "_";
      VarName v = nm == "_" ? fresh_name("miv", VarClass::C1, used) : v1(nm);
      used.insert(v);
      ivs.push_back(v);
    }

    // Branches, reordered by constructor.
    std::vector<Branch> branches(ind.ctors.size());
    std::vector<bool> seen(ind.ctors.size(), false);
    for (const auto& rb : r->branches) {
      int idx = -1;
      for (size_t i = 0; i < ind.ctors.size(); ++i)
        if (ind.ctors[i].name == rb.ctor) idx = (int)i;
      if (idx < 0) fail(r, "unknown constructor " + rb.ctor + " of " + ih->name);
      if (seen[idx]) fail(r, "duplicate branch for " + rb.ctor);
      seen[idx] = true;
      Telescope tele;
      TermPtr tail;
      split_pi_telescope(ind.ctors[idx].type, tele, tail);
      if (rb.args.size() != tele.size())
        fail(r, "branch for " + rb.ctor + " binds " + std::to_string(rb.args.size()) +
                    " arguments, expected " + std::to_string(tele.size()));
      Branch br;
      br.ctor = idx;
      size_t sbase = scope.size(), cbase = ctx.size();
      std::map<VarName, TermPtr> csub;
      for (size_t i = 0; i < np; ++i) csub[ind.params[i].name] = iargs[i];
      std::set<VarName> busy = used;
      for (size_t i = 0; i < tele.size(); ++i) {
        VarName v = rb.args[i] == "_" ? fresh_name("ba", VarClass::C1, busy) : v1(rb.args[i]);
        busy.insert(v);
        br.args.push_back(v);
        TermPtr aty = subst_many(tele[i].type, csub);
        scope.emplace_back(rb.args[i], v);
        ctx.push_back({v, aty});
        csub[tele[i].name] = mk_var(v);
      }
      br.body = go(rb.body);
      scope.resize(sbase);
      ctx.resize(cbase);
      branches[idx] = std::move(br);
    }
    for (size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) fail(r, "missing branch for constructor " + ind.ctors[i].name);

    // Return type.
    TermPtr ret;
    if (r->ret) {
      size_t sbase = scope.size(), cbase = ctx.size();
      std::map<VarName, TermPtr> isub;
      for (size_t i = 0; i < np; ++i) isub[ind.params[i].name] = iargs[i];
      for (size_t i = 0; i < ni; ++i) {
        TermPtr ity = subst_many(ind.indices[i].type, isub);
        std::string nm = r->has_in ? r->in_vars[np + i] : "_";
        scope.emplace_back(nm, ivs[i]);
        ctx.push_back({ivs[i], ity});
        isub[ind.indices[i].name] = mk_var(ivs[i]);
      }
      TermPtr selfTy = mk_ind(ih->name);
      for (size_t i = 0; i < np; ++i) selfTy = mk_app(selfTy, iargs[i]);
      for (const auto& v : ivs) selfTy = mk_app(selfTy, mk_var(v));
      if (!r->as_name.empty()) scope.emplace_back(r->as_name, asv);
      ctx.push_back({asv, selfTy});
      ret = go(r->ret);
      scope.resize(sbase);
      ctx.resize(cbase);
    } else {
      // Non-dependent default: the type of the first branch body.
      if (branches.empty()) fail(r, "match without return clause needs at least one branch");
      Telescope tele;
      TermPtr tail;
      split_pi_telescope(ind.ctors[branches[0].ctor].type, tele, tail);
      size_t cbase = ctx.size();
      std::map<VarName, TermPtr> csub;
      for (size_t i = 0; i < np; ++i) csub[ind.params[i].name] = iargs[i];
      for (size_t i = 0; i < tele.size(); ++i) {
        TermPtr aty = subst_many(tele[i].type, csub);
        ctx.push_back({branches[0].args[i], aty});
        csub[tele[i].name] = mk_var(branches[0].args[i]);
      }
      ret = infer_type(env, ctx, branches[0].body, fuel);
      ctx.resize(cbase);
      for (const auto& v : branches[0].args)
        if (mentions_var(ret, v)) fail(r, "cannot infer a return type; add a return clause");
      for (const auto& v : ivs)
        if (mentions_var(ret, v)) fail(r, "cannot infer a dependent return type");
    }
    return mk_match(discr, dty, asv, ivs, ret, std::move(branches), UFlag::None);
  }
};

}  // namespace

TermPtr elaborate_raw(const Environment& env, const Telescope& ctx, const RawPtr& raw,
                      long long fuel) {
  Fuel f{fuel};
  Elab e{env, f};
  e.ctx = ctx;
  for (const auto& b : ctx) e.scope.emplace_back(show_var(b.name), b.name);
  return e.go(raw);
}

}  // namespace ptt
