#include <cctype>
#include <sstream>

#include "pbisim/plts.hpp"

namespace pbisim {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool number_char(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '.';
}

// Cursor over a single line; columns are 1-based.
struct LineCursor {
    const std::string& text;
    std::size_t line_no;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
    std::size_t column() const { return pos + 1; }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(line_no, column(), msg); }

    std::string ident() {
        skip_ws();
        if (pos >= text.size() || !ident_start(text[pos])) fail("expected identifier");
        std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        return text.substr(start, pos - start);
    }

    Rat probability() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && number_char(text[pos])) ++pos;
        if (pos == start) fail("expected probability");
        try {
            return rat_from_string(text.substr(start, pos - start));
        } catch (const std::invalid_argument& e) {
            pos = start;
            fail(e.what());
        }
    }

    void expect(const std::string& token) {
        skip_ws();
        if (text.compare(pos, token.size(), token) != 0) fail("expected '" + token + "'");
        pos += token.size();
    }

    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
};

}  // namespace

Plts parse_plts(const std::string& text) {
    Plts model;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        LineCursor cur{raw, line_no};
        if (cur.at_end()) continue;

        // Either "states: a b c" or a transition line.
        std::string first = cur.ident();
        if (first == "states" && cur.consume(':')) {
            while (!cur.at_end()) model.add_state(cur.ident());
            continue;
        }

        StateId source = model.add_state(first);
        std::string act = cur.ident();
        cur.expect("->");
        std::vector<Dist::Entry> entries;
        Rat sum = 0;
        while (true) {
            Rat p = cur.probability();
            StateId target = model.add_state(cur.ident());
            entries.emplace_back(target, p);
            sum += p;
            if (!cur.consume(',')) break;
        }
        if (!cur.at_end()) cur.fail("trailing input after transition");
        if (sum != 1)
            throw ParseError(line_no, 1,
                             "distribution sums to " + rat_to_string(sum) + ", expected 1");
        ActionId action = model.add_action(act);
        try {
            model.add_transition(source, action, Dist::from_entries(std::move(entries)));
        } catch (const ModelError& e) {
            throw ParseError(line_no, 1, e.what());
        }
    }
    return model;
}

std::string print_plts(const Plts& p) {
    std::string out;
    if (p.num_states() > 0) {
        out += "states:";
        for (StateId s = 0; s < p.num_states(); ++s) out += " " + p.state_name(s);
        out += "\n";
    }
    for (StateId s = 0; s < p.num_states(); ++s)
        for (const auto& t : p.transitions(s))
            out += p.state_name(s) + " " + p.action_name(t.action) + " -> " +
                   dist_to_string(p, t.target) + "\n";
    return out;
}

}  // namespace pbisim
