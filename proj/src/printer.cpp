#include "ptt/printer.hpp"

#include <map>
#include <set>
#include <sstream>

#include "ptt/binding.hpp"

namespace ptt {

std::string show_var(const VarName& v) {
  switch (v.cls) {
    case VarClass::C1: return v.base;
    case VarClass::C2: return v.base + "2";
    case VarClass::C3: return v.base + "_R";
    case VarClass::C4: return v.base + "4";
    case VarClass::C5: return v.base + "5";
  }
  return v.base;
}

std::string show_universe(const Universe& u) {
  if (u.is_prop) return "Prop";
  if (u.level == 0) return "Set";
  return "Type" + std::to_string(u.level);
}

namespace {

// Precedence levels: 0 top (binders), 1 arrow, 2 application, 3 atom.
struct Printer {
  const Environment* env = nullptr;
  std::map<VarName, std::string> names;  // in-scope display names
  std::set<std::string> used;

  std::string ctor_name(const std::string& ind, int idx) const {
    if (env && env->find(ind) && env->get(ind).kind == DeclKind::Inductive) {
      const auto& d = env->inductive(ind);
      if (idx >= 0 && idx < (int)d.ctors.size()) return d.ctors[idx].name;
    }
    return ind + "#" + std::to_string(idx);
  }

  std::string bind(const VarName& v) {
    std::string s = show_var(v);
    while (used.count(s)) s += "_";
    used.insert(s);
    names[v] = s;
    return s;
  }

  void unbind(const VarName& v, const std::string& s,
              const std::map<VarName, std::string>& savedNames) {
    used.erase(s);
    auto it = savedNames.find(v);
    if (it != savedNames.end())
      names[v] = it->second;
    else
      names.erase(v);
  }

  std::string var(const VarName& v) const {
    auto it = names.find(v);
    return it != names.end() ? it->second : show_var(v);
  }

  std::string go(const TermPtr& t, int prec) {
    switch (t->tag) {
      case Tag::Sort:
        return show_universe(t->sort);
      case Tag::Var:
        return var(t->var);
      case Tag::IndRef:
      case Tag::ConstRef:
        return t->name;
      case Tag::CtorRef:
        return ctor_name(t->name, t->ctor_index);
      case Tag::App: {
        std::string s = go(t->a, 2) + " " + go(t->b, 3);
        return prec > 2 ? "(" + s + ")" : s;
      }
      case Tag::Pi: {
        std::string s;
        if (t->var.base == "_" || !mentions_var(t->b, t->var)) {
          s = go(t->a, 2) + " -> " + go(t->b, 1);
          return prec > 1 ? "(" + s + ")" : s;
        }
        auto saved = names;
        std::string dom = go(t->a, 0);
        std::string n = bind(t->var);
        s = "forall (" + n + " : " + dom + "), " + go(t->b, 0);
        unbind(t->var, n, saved);
        return prec > 0 ? "(" + s + ")" : s;
      }
      case Tag::Lam: {
        auto saved = names;
        std::string dom = go(t->a, 0);
        std::string n = bind(t->var);
        std::string s = "fun (" + n + " : " + dom + ") => " + go(t->b, 0);
        unbind(t->var, n, saved);
        return prec > 0 ? "(" + s + ")" : s;
      }
      case Tag::Fix: {
        auto saved = names;
        std::string sig = go(t->a, 0);
        std::string n = bind(t->var);
        std::string s =
            "fix " + n + "/" + std::to_string(t->struct_arg) + " : " + sig + " := " + go(t->b, 0);
        unbind(t->var, n, saved);
        return "(" + s + ")";
      }
      case Tag::Match: {
        std::ostringstream os;
        std::string indName;
        size_t nparams = 0;
        {
          TermPtr h = app_head(t->discr_type);
          indName = h->tag == Tag::IndRef ? h->name : "_";
          if (env && h->tag == Tag::IndRef && env->find(indName) &&
              env->get(indName).kind == DeclKind::Inductive)
            nparams = env->inductive(indName).params.size();
        }
        os << "match " << go(t->discr, 0);
        auto saved = names;
        std::vector<std::pair<VarName, std::string>> bound;
        std::string as = bind(t->var);
        bound.emplace_back(t->var, as);
        os << " as " << as;
        if (!t->in_vars.empty()) {
          os << " in " << indName;
          for (size_t i = 0; i < nparams; ++i) os << " _";
          for (const auto& iv : t->in_vars) {
            std::string n = bind(iv);
            bound.emplace_back(iv, n);
            os << " " << n;
          }
        }
        os << " return " << go(t->ret, 0);
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
          unbind(it->first, it->second, saved);
        os << " with";
        for (const auto& br : t->branches) {
          auto saved2 = names;
          std::vector<std::pair<VarName, std::string>> bb;
          os << " | " << ctor_name(indName, br.ctor);
          for (const auto& a : br.args) {
            std::string n = bind(a);
            bb.emplace_back(a, n);
            os << " " << n;
          }
          os << " => " << go(br.body, 0);
          for (auto it = bb.rbegin(); it != bb.rend(); ++it) unbind(it->first, it->second, saved2);
        }
        os << " end";
        return "(" + os.str() + ")";
      }
    }
    return "?";
  }
};

}  // namespace

std::string pretty(const TermPtr& t, const Environment* env) {
  Printer p;
  p.env = env;
  for (const auto& v : free_vars(t)) {
    std::string s = show_var(v);
    p.names[v] = s;
    p.used.insert(s);
  }
  return p.go(t, 0);
}

std::string pretty_decl(const Environment& env, const Decl& d) {
  std::ostringstream os;
  switch (d.kind) {
    case DeclKind::Axiom:
      os << "Axiom " << d.name << " : " << pretty(d.type, &env) << ".";
      break;
    case DeclKind::Definition:
      os << "Definition " << d.name << " : " << pretty(d.type, &env) << " := "
         << pretty(d.body, &env) << ".";
      break;
    case DeclKind::Inductive: {
      os << "Inductive " << d.ind.name;
      for (const auto& p : d.ind.params)
        os << " (" << show_var(p.name) << " : " << pretty(p.type, &env) << ")";
      os << " :";
      for (const auto& ix : d.ind.indices)
        os << " forall (" << show_var(ix.name) << " : " << pretty(ix.type, &env) << "),";
      os << " " << show_universe(d.ind.universe) << " :=";
      bool first = true;
      for (const auto& c : d.ind.ctors) {
        os << (first ? " " : " | ") << c.name << " : " << pretty(c.type, &env);
        first = false;
      }
      os << ".";
      break;
    }
  }
  return os.str();
}

namespace {

void json_escape(std::ostream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    if (c == '"' || c == '\\') os << '\\';
    os << c;
  }
  os << '"';
}

const char* flag_name(UFlag f) {
  switch (f) {
    case UFlag::S: return "S";
    case UFlag::P: return "P";
    case UFlag::T: return "T";
    default: return "";
  }
}

void to_json(std::ostream& os, const TermPtr& t) {
  os << "{\"tag\":";
  auto children = [&](std::initializer_list<TermPtr> kids) {
    os << ",\"children\":[";
    bool first = true;
    for (const auto& k : kids) {
      if (!first) os << ",";
      first = false;
      to_json(os, k);
    }
    os << "]";
  };
  switch (t->tag) {
    case Tag::Sort:
      os << "\"sort\",\"name\":";
      json_escape(os, show_universe(t->sort));
      break;
    case Tag::Var:
      os << "\"var\",\"name\":";
      json_escape(os, t->var.base);
      os << ",\"class\":" << (int)t->var.cls;
      break;
    case Tag::IndRef:
      os << "\"ind\",\"name\":";
      json_escape(os, t->name);
      break;
    case Tag::ConstRef:
      os << "\"const\",\"name\":";
      json_escape(os, t->name);
      break;
    case Tag::CtorRef:
      os << "\"ctor\",\"name\":";
      json_escape(os, t->name);
      os << ",\"index\":" << t->ctor_index;
      break;
    case Tag::App:
      os << "\"app\"";
      children({t->a, t->b});
      break;
    case Tag::Pi:
      os << "\"pi\",\"name\":";
      json_escape(os, t->var.base);
      os << ",\"class\":" << (int)t->var.cls << ",\"flag\":\"" << flag_name(t->flag_dom)
         << flag_name(t->flag_cod) << "\"";
      children({t->a, t->b});
      break;
    case Tag::Lam:
      os << "\"lam\",\"name\":";
      json_escape(os, t->var.base);
      os << ",\"class\":" << (int)t->var.cls << ",\"flag\":\"" << flag_name(t->flag_dom) << "\"";
      children({t->a, t->b});
      break;
    case Tag::Fix:
      os << "\"fix\",\"name\":";
      json_escape(os, t->var.base);
      os << ",\"struct\":" << t->struct_arg;
      children({t->a, t->b});
      break;
    case Tag::Match: {
      os << "\"match\",\"flag\":\"" << flag_name(t->flag_cod) << "\",\"children\":[";
      to_json(os, t->discr);
      os << ",";
      to_json(os, t->discr_type);
      os << ",";
      to_json(os, t->ret);
      for (const auto& br : t->branches) {
        os << ",";
        to_json(os, br.body);
      }
      os << "]";
      break;
    }
  }
  os << "}";
}

}  // namespace

std::string term_to_json(const TermPtr& t) {
  std::ostringstream os;
  to_json(os, t);
  return os.str();
}

}  // namespace ptt
