#ifndef PTT_PRINTER_HPP
#define PTT_PRINTER_HPP

#include <string>

#include "ptt/env.hpp"
#include "ptt/term.hpp"

namespace ptt {

// Surface-syntax rendering. parse(pretty(t)) elaborates to a term alpha-equal
// to t; generated name classes print with their suffix scheme (2, _R, 4, 5).
// The environment resolves constructor display names; without it they print
// as <ind>#<k>.
std::string pretty(const TermPtr& t, const Environment* env = nullptr);
std::string pretty_decl(const Environment& env, const Decl& d);

// Node-tagged JSON tree (fields: tag, children, name, class, flag).
std::string term_to_json(const TermPtr& t);

std::string show_var(const VarName& v);
std::string show_universe(const Universe& u);

}  // namespace ptt

#endif
