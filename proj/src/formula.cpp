#include "pbisim/formula.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_map>

#include "pbisim/plts.hpp"

namespace pbisim {

namespace {

FormulaPtr make(Formula f) {
    return std::make_shared<const Formula>(std::move(f));
}

void validate_dist(const DistFormula& d) {
    if (d.groups.empty()) throw ModelError("empty distribution formula");
    for (const auto& group : d.groups) {
        if (group.empty()) throw ModelError("empty probabilistic choice");
        Rat sum(0);
        for (const auto& part : group) {
            if (part.p <= 0) throw ModelError("probabilistic choice weight must be positive");
            sum += part.p;
        }
        if (sum != 1)
            throw ModelError("probabilistic choice weights sum to " + rat_to_string(sum) +
                             ", expected 1");
    }
}

}  // namespace

FormulaPtr f_top() {
    static const FormulaPtr instance = make({FormulaKind::Top, nullptr, nullptr, "", {}});
    return instance;
}

FormulaPtr f_bot() {
    static const FormulaPtr instance = make({FormulaKind::Bot, nullptr, nullptr, "", {}});
    return instance;
}

FormulaPtr f_neg(FormulaPtr f) {
    return make({FormulaKind::Neg, std::move(f), nullptr, "", {}});
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
    return make({FormulaKind::And, std::move(a), std::move(b), "", {}});
}

FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
    return make({FormulaKind::Or, std::move(a), std::move(b), "", {}});
}

FormulaPtr f_var(std::string name) {
    return make({FormulaKind::Var, nullptr, nullptr, std::move(name), {}});
}

FormulaPtr f_mu(std::string var, FormulaPtr body) {
    return make({FormulaKind::Mu, std::move(body), nullptr, std::move(var), {}});
}

FormulaPtr f_nu(std::string var, FormulaPtr body) {
    return make({FormulaKind::Nu, std::move(body), nullptr, std::move(var), {}});
}

FormulaPtr f_diamond(std::string action, DistFormula dist) {
    validate_dist(dist);
    return make({FormulaKind::Diamond, nullptr, nullptr, std::move(action), std::move(dist)});
}

FormulaPtr f_box(std::string action, DistFormula dist) {
    validate_dist(dist);
    return make({FormulaKind::Box, nullptr, nullptr, std::move(action), std::move(dist)});
}

FormulaPtr f_conj(const std::vector<FormulaPtr>& fs) {
    FormulaPtr acc;
    for (const auto& f : fs) {
        if (f->kind == FormulaKind::Top) continue;
        acc = acc ? f_and(acc, f) : f;
    }
    return acc ? acc : f_top();
}

// --- parser -----------------------------------------------------------------

namespace {

enum class Tok { End, Ident, Number, Tilde, Amp, Pipe, Lt, Gt, LBrack, RBrack, LParen, RParen,
                 Dot, Star, Under, Oplus };

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;
    Tok tok = Tok::End;
    std::string value;
    std::size_t tok_col = 1;

    explicit Lexer(const std::string& t) : text(t) { advance(); }

    [[noreturn]] void fail(const std::string& msg) const { throw FormulaParseError(tok_col, msg); }

    void advance() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        tok_col = pos + 1;
        value.clear();
        if (pos >= text.size()) {
            tok = Tok::End;
            return;
        }
        char c = text[pos];
        // '_' directly followed by a digit is the threshold-macro separator,
        // not an identifier start.
        bool under_sep = c == '_' && pos + 1 < text.size() &&
                         std::isdigit(static_cast<unsigned char>(text[pos + 1]));
        if ((std::isalpha(static_cast<unsigned char>(c)) || c == '_') && !under_sep) {
            std::size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                    text[pos] == '\''))
                ++pos;
            value = text.substr(start, pos - start);
            tok = Tok::Ident;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                         text[pos] == '/' || text[pos] == '.'))
                ++pos;
            value = text.substr(start, pos - start);
            tok = Tok::Number;
            return;
        }
        if (text.compare(pos, 3, "(+)") == 0) {
            pos += 3;
            tok = Tok::Oplus;
            return;
        }
        ++pos;
        switch (c) {
            case '~': tok = Tok::Tilde; return;
            case '&': tok = Tok::Amp; return;
            case '|': tok = Tok::Pipe; return;
            case '<': tok = Tok::Lt; return;
            case '>': tok = Tok::Gt; return;
            case '[': tok = Tok::LBrack; return;
            case ']': tok = Tok::RBrack; return;
            case '(': tok = Tok::LParen; return;
            case ')': tok = Tok::RParen; return;
            case '.': tok = Tok::Dot; return;
            case '*': tok = Tok::Star; return;
            case '_': tok = Tok::Under; return;
            default: throw FormulaParseError(tok_col, std::string("unexpected character '") + c + "'");
        }
    }

    void expect(Tok t, const std::string& what) {
        if (tok != t) fail("expected " + what);
        advance();
    }
};

struct Parser {
    Lexer lex;
    LogicMode mode;

    Parser(const std::string& text, LogicMode m) : lex(text), mode(m) {}

    [[noreturn]] void reject(const std::string& connective) {
        lex.fail("'" + connective + "' is not part of the adequate-logic fragment");
    }

    std::string ident(const std::string& what) {
        if (lex.tok != Tok::Ident) lex.fail("expected " + what);
        std::string name = lex.value;
        lex.advance();
        return name;
    }

    Rat probability() {
        if (lex.tok != Tok::Number) lex.fail("expected probability");
        std::size_t col = lex.tok_col;
        Rat p;
        try {
            p = rat_from_string(lex.value);
        } catch (const std::invalid_argument& e) {
            throw FormulaParseError(col, e.what());
        }
        lex.advance();
        return p;
    }

    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (lex.tok == Tok::Pipe) {
            if (mode == LogicMode::Hml) reject("|");
            lex.advance();
            f = f_or(f, parse_and());
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_unary();
        while (lex.tok == Tok::Amp) {
            lex.advance();
            f = f_and(f, parse_unary());
        }
        return f;
    }

    FormulaPtr parse_unary() {
        switch (lex.tok) {
            case Tok::Tilde: {
                if (mode == LogicMode::Mu) reject("~");
                lex.advance();
                return f_neg(parse_unary());
            }
            case Tok::Lt: {
                lex.advance();
                std::string action = ident("action name");
                lex.expect(Tok::Gt, "'>'");
                lex.expect(Tok::LParen, "'('");
                DistFormula d = parse_dist();
                lex.expect(Tok::RParen, "')'");
                return f_diamond(std::move(action), std::move(d));
            }
            case Tok::LBrack: {
                if (mode == LogicMode::Hml) reject("[]");
                lex.advance();
                std::string action = ident("action name");
                lex.expect(Tok::RBrack, "']'");
                lex.expect(Tok::LParen, "'('");
                DistFormula d = parse_dist();
                lex.expect(Tok::RParen, "')'");
                return f_box(std::move(action), std::move(d));
            }
            case Tok::LParen: {
                lex.advance();
                FormulaPtr f = parse_or();
                lex.expect(Tok::RParen, "')'");
                return f;
            }
            case Tok::Ident: {
                if (lex.value == "tt") {
                    lex.advance();
                    return f_top();
                }
                if (lex.value == "ff") {
                    if (mode == LogicMode::Hml) reject("ff");
                    lex.advance();
                    return f_bot();
                }
                if (lex.value == "mu" || lex.value == "nu") {
                    bool is_mu = lex.value == "mu";
                    if (mode == LogicMode::Hml) reject(lex.value);
                    lex.advance();
                    std::string var = ident("variable");
                    lex.expect(Tok::Dot, "'.'");
                    FormulaPtr body = parse_or();
                    return is_mu ? f_mu(std::move(var), std::move(body))
                                 : f_nu(std::move(var), std::move(body));
                }
                if (mode == LogicMode::Hml) reject("variable '" + lex.value + "'");
                return f_var(ident("variable"));
            }
            default:
                lex.fail("expected a formula");
        }
    }

    DistFormula parse_dist() {
        DistFormula d;
        d.groups.push_back(parse_group());
        while (lex.tok == Tok::Pipe) {
            if (mode == LogicMode::Hml) reject("|");
            lex.advance();
            d.groups.push_back(parse_group());
        }
        return d;
    }

    DistFormula::Group parse_group() {
        // "[phi]_p" abbreviates p*phi (+) (1-p)*tt.
        if (lex.tok == Tok::LBrack) {
            std::size_t col = lex.tok_col;
            lex.advance();
            FormulaPtr phi = parse_or();
            lex.expect(Tok::RBrack, "']'");
            lex.expect(Tok::Under, "'_'");
            Rat p = probability();
            if (p < 0 || p > 1) throw FormulaParseError(col, "threshold outside [0,1]");
            DistFormula::Group group;
            if (p == 0) {
                group.push_back({Rat(1), f_top()});
            } else if (p == 1) {
                group.push_back({Rat(1), std::move(phi)});
            } else {
                group.push_back({p, std::move(phi)});
                group.push_back({Rat(1) - p, f_top()});
            }
            return group;
        }
        DistFormula::Group group;
        while (true) {
            std::size_t col = lex.tok_col;
            Rat p = probability();
            lex.expect(Tok::Star, "'*'");
            FormulaPtr item = parse_unary();
            if (p <= 0) throw FormulaParseError(col, "weight must be positive");
            group.push_back({std::move(p), std::move(item)});
            if (lex.tok != Tok::Oplus) break;
            lex.advance();
        }
        return group;
    }
};

// Renames bound variables apart (and apart from every free variable).
class AlphaRenamer {
  public:
    explicit AlphaRenamer(const FormulaPtr& f) {
        for (const auto& v : free_vars(f)) used_.insert(v);
    }

    FormulaPtr run(const FormulaPtr& f) {
        switch (f->kind) {
            case FormulaKind::Top:
            case FormulaKind::Bot:
                return f;
            case FormulaKind::Var: {
                auto it = renames_.find(f->name);
                return it == renames_.end() || it->second == f->name ? f : f_var(it->second);
            }
            case FormulaKind::Neg:
                return f_neg(run(f->lhs));
            case FormulaKind::And:
                return f_and(run(f->lhs), run(f->rhs));
            case FormulaKind::Or:
                return f_or(run(f->lhs), run(f->rhs));
            case FormulaKind::Diamond:
            case FormulaKind::Box: {
                DistFormula d;
                for (const auto& group : f->dist.groups) {
                    DistFormula::Group g;
                    for (const auto& part : group) g.push_back({part.p, run(part.phi)});
                    d.groups.push_back(std::move(g));
                }
                return f->kind == FormulaKind::Diamond ? f_diamond(f->name, std::move(d))
                                                       : f_box(f->name, std::move(d));
            }
            case FormulaKind::Mu:
            case FormulaKind::Nu: {
                std::string fresh = f->name;
                while (used_.count(fresh)) fresh += "'";
                used_.insert(fresh);
                auto saved = renames_.find(f->name) != renames_.end()
                                 ? std::optional<std::string>(renames_[f->name])
                                 : std::nullopt;
                renames_[f->name] = fresh;
                FormulaPtr body = run(f->lhs);
                if (saved)
                    renames_[f->name] = *saved;
                else
                    renames_.erase(f->name);
                return f->kind == FormulaKind::Mu ? f_mu(fresh, std::move(body))
                                                  : f_nu(fresh, std::move(body));
            }
        }
        throw ModelError("corrupt formula node");
    }

  private:
    std::set<std::string> used_;
    std::map<std::string, std::string> renames_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, LogicMode mode) {
    Parser parser(text, mode);
    FormulaPtr f;
    try {
        f = parser.parse_or();
    } catch (const ModelError& e) {
        throw FormulaParseError(parser.lex.tok_col, e.what());
    }
    if (parser.lex.tok != Tok::End) parser.lex.fail("trailing input");
    if (mode == LogicMode::Mu) f = AlphaRenamer(f).run(f);
    return f;
}

// --- printing ---------------------------------------------------------------

namespace {

// Precedence levels: 0 = or, 1 = and, 2 = unary. Binders always get
// parentheses unless they stand alone, since their body extends maximally.
void print(const FormulaPtr& f, int min_prec, std::string& out);

void print_dist(const DistFormula& d, std::string& out) {
    bool first_group = true;
    for (const auto& group : d.groups) {
        if (!first_group) out += " | ";
        first_group = false;
        bool first = true;
        for (const auto& part : group) {
            if (!first) out += " (+) ";
            first = false;
            out += rat_to_string(part.p);
            out += "*";
            print(part.phi, 2, out);
        }
    }
}

void print(const FormulaPtr& f, int min_prec, std::string& out) {
    auto wrap = [&](int prec, auto&& body) {
        bool parens = prec < min_prec;
        if (parens) out += "(";
        body();
        if (parens) out += ")";
    };
    switch (f->kind) {
        case FormulaKind::Top: out += "tt"; return;
        case FormulaKind::Bot: out += "ff"; return;
        case FormulaKind::Var: out += f->name; return;
        case FormulaKind::Neg:
            out += "~";
            print(f->lhs, 2, out);
            return;
        case FormulaKind::And:
            wrap(1, [&] {
                print(f->lhs, 1, out);
                out += " & ";
                print(f->rhs, 2, out);
            });
            return;
        case FormulaKind::Or:
            wrap(0, [&] {
                print(f->lhs, 0, out);
                out += " | ";
                print(f->rhs, 1, out);
            });
            return;
        case FormulaKind::Diamond:
        case FormulaKind::Box:
            out += f->kind == FormulaKind::Diamond ? "<" + f->name + ">(" : "[" + f->name + "](";
            print_dist(f->dist, out);
            out += ")";
            return;
        case FormulaKind::Mu:
        case FormulaKind::Nu:
            wrap(0, [&] {
                out += f->kind == FormulaKind::Mu ? "mu " : "nu ";
                out += f->name;
                out += ".";
                print(f->lhs, 0, out);
            });
            return;
    }
}

}  // namespace

std::string to_string(const FormulaPtr& f) {
    std::string out;
    print(f, 0, out);
    return out;
}

std::string to_string(const DistFormula& d) {
    std::string out;
    print_dist(d, out);
    return out;
}

// --- analyses ---------------------------------------------------------------

namespace {

// Bottom-up, memoised per shared node: shared subterms of large formulas
// are visited once, not once per occurrence.
const std::set<std::string>& fv_memo(const FormulaPtr& f,
                                     std::unordered_map<const Formula*, std::set<std::string>>& memo) {
    auto it = memo.find(f.get());
    if (it != memo.end()) return it->second;
    std::set<std::string> out;
    switch (f->kind) {
        case FormulaKind::Top:
        case FormulaKind::Bot:
            break;
        case FormulaKind::Var:
            out.insert(f->name);
            break;
        case FormulaKind::Neg:
            out = fv_memo(f->lhs, memo);
            break;
        case FormulaKind::And:
        case FormulaKind::Or: {
            out = fv_memo(f->lhs, memo);
            const auto& rhs = fv_memo(f->rhs, memo);
            out.insert(rhs.begin(), rhs.end());
            break;
        }
        case FormulaKind::Diamond:
        case FormulaKind::Box:
            for (const auto& group : f->dist.groups)
                for (const auto& part : group) {
                    const auto& sub = fv_memo(part.phi, memo);
                    out.insert(sub.begin(), sub.end());
                }
            break;
        case FormulaKind::Mu:
        case FormulaKind::Nu:
            out = fv_memo(f->lhs, memo);
            out.erase(f->name);
            break;
    }
    return memo.emplace(f.get(), std::move(out)).first->second;
}

}  // namespace

std::vector<std::string> free_vars(const FormulaPtr& f) {
    std::unordered_map<const Formula*, std::set<std::string>> memo;
    const auto& out = fv_memo(f, memo);
    return {out.begin(), out.end()};
}

namespace {

bool mentions_var(const FormulaPtr& f, const std::string& var,
                  std::unordered_map<const Formula*, bool>& memo) {
    auto it = memo.find(f.get());
    if (it != memo.end()) return it->second;
    bool result = false;
    switch (f->kind) {
        case FormulaKind::Top:
        case FormulaKind::Bot:
            break;
        case FormulaKind::Var:
            result = f->name == var;
            break;
        case FormulaKind::Neg:
            result = mentions_var(f->lhs, var, memo);
            break;
        case FormulaKind::And:
        case FormulaKind::Or:
            result = mentions_var(f->lhs, var, memo) || mentions_var(f->rhs, var, memo);
            break;
        case FormulaKind::Diamond:
        case FormulaKind::Box:
            for (const auto& group : f->dist.groups)
                for (const auto& part : group)
                    if (mentions_var(part.phi, var, memo)) result = true;
            break;
        case FormulaKind::Mu:
        case FormulaKind::Nu:
            result = f->name != var && mentions_var(f->lhs, var, memo);
            break;
    }
    memo.emplace(f.get(), result);
    return result;
}

struct Substituter {
    const std::string& var;
    const FormulaPtr& replacement;
    std::vector<std::string> replacement_fv;
    std::unordered_map<const Formula*, FormulaPtr> memo;
    std::unordered_map<const Formula*, bool> mentions_memo;

    FormulaPtr simplified_and(FormulaPtr a, FormulaPtr b) {
        if (a->kind == FormulaKind::Top) return b;
        if (b->kind == FormulaKind::Top) return a;
        return f_and(std::move(a), std::move(b));
    }

    FormulaPtr simplified_or(FormulaPtr a, FormulaPtr b) {
        if (a->kind == FormulaKind::Bot) return b;
        if (b->kind == FormulaKind::Bot) return a;
        return f_or(std::move(a), std::move(b));
    }

    FormulaPtr simplified_nu(std::string name, FormulaPtr body) {
        std::unordered_map<const Formula*, bool> memo;
        if (!mentions_var(body, name, memo)) return body;
        return f_nu(std::move(name), std::move(body));
    }

    FormulaPtr run(const FormulaPtr& f) {
        if (!mentions_var(f, var, mentions_memo)) return f;
        auto it = memo.find(f.get());
        if (it != memo.end()) return it->second;
        FormulaPtr result;
        switch (f->kind) {
            case FormulaKind::Var:
                result = f->name == var ? replacement : f;
                break;
            case FormulaKind::Neg:
                result = f_neg(run(f->lhs));
                break;
            case FormulaKind::And:
                result = simplified_and(run(f->lhs), run(f->rhs));
                break;
            case FormulaKind::Or:
                result = simplified_or(run(f->lhs), run(f->rhs));
                break;
            case FormulaKind::Diamond:
            case FormulaKind::Box: {
                DistFormula d;
                for (const auto& group : f->dist.groups) {
                    DistFormula::Group g;
                    for (const auto& part : group) g.push_back({part.p, run(part.phi)});
                    d.groups.push_back(std::move(g));
                }
                result = f->kind == FormulaKind::Diamond ? f_diamond(f->name, std::move(d))
                                                         : f_box(f->name, std::move(d));
                break;
            }
            case FormulaKind::Mu:
            case FormulaKind::Nu: {
                // f mentions var free (checked above), so f->name != var.
                FormulaPtr target = f;
                if (std::find(replacement_fv.begin(), replacement_fv.end(), f->name) !=
                    replacement_fv.end()) {
                    // Capture: rename this binder before substituting.
                    auto body_fv = free_vars(f->lhs);
                    auto taken = [&](const std::string& name) {
                        return std::find(replacement_fv.begin(), replacement_fv.end(), name) !=
                                   replacement_fv.end() ||
                               std::find(body_fv.begin(), body_fv.end(), name) != body_fv.end();
                    };
                    std::string fresh = f->name + "'";
                    while (taken(fresh)) fresh += "'";
                    FormulaPtr renamed_body = substitute(f->lhs, f->name, f_var(fresh));
                    target = f->kind == FormulaKind::Mu ? f_mu(fresh, renamed_body)
                                                        : f_nu(fresh, renamed_body);
                }
                FormulaPtr body = run(target->lhs);
                result = target->kind == FormulaKind::Mu ? f_mu(target->name, std::move(body))
                                                         : simplified_nu(target->name, std::move(body));
                break;
            }
            default:
                result = f;
                break;
        }
        memo.emplace(f.get(), result);
        return result;
    }
};

}  // namespace

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const FormulaPtr& replacement) {
    Substituter sub{var, replacement, free_vars(replacement), {}, {}};
    return sub.run(f);
}

unsigned long long node_count(const FormulaPtr& f, unsigned long long cap) {
    std::unordered_map<const Formula*, unsigned long long> memo;
    auto add = [cap](unsigned long long a, unsigned long long b) {
        return a > cap - std::min(cap, b) ? cap : a + b;
    };
    auto walk = [&](auto&& self, const FormulaPtr& node) -> unsigned long long {
        auto it = memo.find(node.get());
        if (it != memo.end()) return it->second;
        unsigned long long total = 1;
        switch (node->kind) {
            case FormulaKind::Neg:
            case FormulaKind::Mu:
            case FormulaKind::Nu:
                total = add(total, self(self, node->lhs));
                break;
            case FormulaKind::And:
            case FormulaKind::Or:
                total = add(total, self(self, node->lhs));
                total = add(total, self(self, node->rhs));
                break;
            case FormulaKind::Diamond:
            case FormulaKind::Box:
                for (const auto& group : node->dist.groups)
                    for (const auto& part : group) total = add(total, add(1, self(self, part.phi)));
                break;
            default:
                break;
        }
        memo.emplace(node.get(), total);
        return total;
    };
    return walk(walk, f);
}

std::set<std::string> collect_actions(const FormulaPtr& f) {
    std::set<std::string> out;
    auto walk = [&](auto&& self, const FormulaPtr& node) -> void {
        switch (node->kind) {
            case FormulaKind::Neg:
            case FormulaKind::Mu:
            case FormulaKind::Nu:
                self(self, node->lhs);
                break;
            case FormulaKind::And:
            case FormulaKind::Or:
                self(self, node->lhs);
                self(self, node->rhs);
                break;
            case FormulaKind::Diamond:
            case FormulaKind::Box:
                out.insert(node->name);
                for (const auto& group : node->dist.groups)
                    for (const auto& part : group) self(self, part.phi);
                break;
            default:
                break;
        }
    };
    walk(walk, f);
    return out;
}

}  // namespace pbisim
