#pragma once

#include <algorithm>
#include <compare>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coplan/common.hpp"

namespace coplan {

enum class TermKind { iri, literal };

/// An RDF term: an IRI or a literal with optional datatype IRI.
struct Term {
    TermKind kind = TermKind::iri;
    std::string value;
    std::optional<std::string> datatype;  // only meaningful for literals

    // Canonical term order: iris before literals; within a kind lexicographic
    // by value, then datatype.
    friend auto operator<=>(const Term&, const Term&) = default;
};

namespace detail {

inline void check_iri_text(const std::string& v) {
    if (v.empty()) throw Error("iri must be non-empty");
    for (unsigned char c : v)
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c < 0x20)
            throw Error("iri contains whitespace or control character: '" + v + "'");
}

}  // namespace detail

inline Term iri(std::string value) {
    detail::check_iri_text(value);
    return {TermKind::iri, std::move(value), std::nullopt};
}

inline Term literal(std::string value, std::optional<std::string> datatype = std::nullopt) {
    if (datatype) detail::check_iri_text(*datatype);
    return {TermKind::literal, std::move(value), std::move(datatype)};
}

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

inline Triple make_triple(Term s, Term p, Term o) {
    if (s.kind != TermKind::iri) throw Error("triple subject must be an iri");
    if (p.kind != TermKind::iri) throw Error("triple predicate must be an iri");
    return {std::move(s), std::move(p), std::move(o)};
}

/// One position of a triple pattern: a constant term or a named variable.
struct Variable {
    std::string name;
};
using PatternSlot = std::variant<Term, Variable>;

struct TriplePattern {
    PatternSlot subject;
    PatternSlot predicate;
    PatternSlot object;
};

inline PatternSlot var(std::string name) {
    if (name.empty()) throw Error("variable name must be non-empty");
    return Variable{std::move(name)};
}

using Binding = std::map<std::string, Term>;

/// Deterministically ordered query result. `variables` lists variable names in
/// order of first appearance in the query; rows are sorted by the bound terms
/// in that order under the canonical term order.
struct QueryResult {
    std::vector<std::string> variables;
    std::vector<Binding> rows;
};

/// URN minting for model elements: `urn:coplan:<kind>:<percent-encoded-name>`.
inline std::string mint_iri(std::string_view kind, std::string_view name) {
    return "urn:coplan:" + std::string(kind) + ":" + percent_encode(name);
}

/// Extracts the percent-decoded name from a minted urn, checking the kind.
inline std::optional<std::string> unmint_iri(std::string_view kind, std::string_view iri_text) {
    std::string prefix = "urn:coplan:" + std::string(kind) + ":";
    if (!starts_with(iri_text, prefix)) return std::nullopt;
    return percent_decode(iri_text.substr(prefix.size()));
}

/// Embedded set-semantics triple store with conjunctive pattern queries and
/// canonical N-Triples serialization. Single writer, multiple readers.
class TripleStore {
  public:
    TripleStore() = default;

    void insert(Triple t) {
        if (t.subject.kind != TermKind::iri) throw Error("triple subject must be an iri");
        if (t.predicate.kind != TermKind::iri) throw Error("triple predicate must be an iri");
        detail::check_iri_text(t.subject.value);
        detail::check_iri_text(t.predicate.value);
        if (t.object.kind == TermKind::iri) detail::check_iri_text(t.object.value);
        triples_.insert(std::move(t));
    }

    void insert(Term s, Term p, Term o) { insert(Triple{std::move(s), std::move(p), std::move(o)}); }

    void insert_all(const TripleStore& other) {
        for (const auto& t : other.triples_) insert(t);
    }

    std::size_t size() const { return triples_.size(); }
    bool contains(const Triple& t) const { return triples_.count(t) > 0; }
    const std::set<Triple>& triples() const { return triples_; }

    friend bool operator==(const TripleStore& a, const TripleStore& b) {
        return a.triples_ == b.triples_;
    }

    QueryResult match(const TriplePattern& pattern) const {
        QueryResult out;
        collect_variables(pattern, out.variables);
        for (const auto& t : triples_) {
            Binding b;
            if (unify(pattern, t, b)) out.rows.push_back(std::move(b));
        }
        sort_rows(out);
        dedupe(out);
        return out;
    }

    /// Natural join of per-pattern matches (naive nested loop; the store
    /// targets desk-scale data). An empty pattern list yields one empty binding.
    QueryResult query(const std::vector<TriplePattern>& patterns) const {
        QueryResult out;
        for (const auto& p : patterns) collect_variables(p, out.variables);
        std::vector<Binding> rows = {Binding{}};
        for (const auto& p : patterns) {
            std::vector<Binding> next;
            for (const auto& row : rows) {
                for (const auto& t : triples_) {
                    Binding extended = row;
                    if (unify(p, t, extended)) next.push_back(std::move(extended));
                }
            }
            rows = std::move(next);
        }
        out.rows = std::move(rows);
        sort_rows(out);
        dedupe(out);
        return out;
    }

    /// One sorted N-Triples line per triple; byte-identical for equal stores.
    std::string serialize() const {
        std::string out;
        for (const auto& t : triples_) {
            out += render_term(t.subject);
            out += ' ';
            out += render_term(t.predicate);
            out += ' ';
            out += render_term(t.object);
            out += " .\n";
        }
        return out;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path);
        out << serialize();
    }

    /// Parses the N-Triples subset: iris and literals with optional datatype;
    /// no blank nodes, no language tags. `#` comments and blank lines allowed.
    static TripleStore parse(std::string_view text) {
        TripleStore store;
        std::size_t lineno = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto nl = text.find('\n', pos);
            std::string_view line =
                text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++lineno;
            auto t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            store.insert(parse_line(t, lineno));
        }
        return store;
    }

    static TripleStore load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

  private:
    static void collect_variables(const TriplePattern& p, std::vector<std::string>& vars) {
        for (const auto* slot : {&p.subject, &p.predicate, &p.object}) {
            if (const auto* v = std::get_if<Variable>(slot)) {
                if (std::find(vars.begin(), vars.end(), v->name) == vars.end())
                    vars.push_back(v->name);
            }
        }
    }

    static bool unify_slot(const PatternSlot& slot, const Term& term, Binding& b) {
        if (const auto* c = std::get_if<Term>(&slot)) return *c == term;
        const auto& v = std::get<Variable>(slot);
        auto [it, inserted] = b.emplace(v.name, term);
        return inserted || it->second == term;
    }

    static bool unify(const TriplePattern& p, const Triple& t, Binding& b) {
        Binding saved = b;
        if (unify_slot(p.subject, t.subject, b) && unify_slot(p.predicate, t.predicate, b) &&
            unify_slot(p.object, t.object, b))
            return true;
        b = std::move(saved);
        return false;
    }

    static void sort_rows(QueryResult& r) {
        std::sort(r.rows.begin(), r.rows.end(), [&](const Binding& a, const Binding& b) {
            for (const auto& name : r.variables) {
                const Term& ta = a.at(name);
                const Term& tb = b.at(name);
                if (ta != tb) return ta < tb;
            }
            return false;
        });
    }

    static void dedupe(QueryResult& r) {
        r.rows.erase(std::unique(r.rows.begin(), r.rows.end()), r.rows.end());
    }

    static std::string escape_literal(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
                case '\\': out += "\\\\"; break;
                case '"': out += "\\\""; break;
                case '\n': out += "\\n"; break;
                case '\r': out += "\\r"; break;
                case '\t': out += "\\t"; break;
                default: out.push_back(c);
            }
        }
        return out;
    }

    static std::string render_term(const Term& t) {
        if (t.kind == TermKind::iri) return "<" + t.value + ">";
        std::string out = "\"" + escape_literal(t.value) + "\"";
        if (t.datatype) out += "^^<" + *t.datatype + ">";
        return out;
    }

    static Term parse_term(std::string_view& s, std::size_t lineno) {
        s = trim(s);
        if (s.empty()) throw ParseError(lineno, "unexpected end of line");
        if (starts_with(s, "_:")) throw ParseError(lineno, "unsupported term: blank node");
        if (s.front() == '<') {
            auto end = s.find('>');
            if (end == std::string_view::npos) throw ParseError(lineno, "unterminated iri");
            std::string value(s.substr(1, end - 1));
            s.remove_prefix(end + 1);
            try {
                return iri(std::move(value));
            } catch (const Error& e) {
                throw ParseError(lineno, e.what());
            }
        }
        if (s.front() == '"') {
            std::string value;
            std::size_t i = 1;
            for (; i < s.size(); ++i) {
                char c = s[i];
                if (c == '\\') {
                    if (i + 1 >= s.size()) throw ParseError(lineno, "dangling escape");
                    char e = s[++i];
                    switch (e) {
                        case '\\': value.push_back('\\'); break;
                        case '"': value.push_back('"'); break;
                        case 'n': value.push_back('\n'); break;
                        case 'r': value.push_back('\r'); break;
                        case 't': value.push_back('\t'); break;
                        default: throw ParseError(lineno, std::string("bad escape \\") + e);
                    }
                } else if (c == '"') {
                    break;
                } else {
                    value.push_back(c);
                }
            }
            if (i >= s.size()) throw ParseError(lineno, "unterminated literal");
            s.remove_prefix(i + 1);
            if (starts_with(s, "@")) throw ParseError(lineno, "unsupported term: language tag");
            std::optional<std::string> datatype;
            if (starts_with(s, "^^")) {
                s.remove_prefix(2);
                if (s.empty() || s.front() != '<')
                    throw ParseError(lineno, "datatype must be an iri");
                auto end = s.find('>');
                if (end == std::string_view::npos) throw ParseError(lineno, "unterminated iri");
                datatype = std::string(s.substr(1, end - 1));
                s.remove_prefix(end + 1);
            }
            try {
                return literal(std::move(value), std::move(datatype));
            } catch (const Error& e) {
                throw ParseError(lineno, e.what());
            }
        }
        throw ParseError(lineno, "expected iri or literal");
    }

    static Triple parse_line(std::string_view line, std::size_t lineno) {
        Term s = parse_term(line, lineno);
        Term p = parse_term(line, lineno);
        Term o = parse_term(line, lineno);
        line = trim(line);
        if (line != ".") throw ParseError(lineno, "expected terminating '.'");
        if (s.kind != TermKind::iri) throw ParseError(lineno, "subject must be an iri");
        if (p.kind != TermKind::iri) throw ParseError(lineno, "predicate must be an iri");
        return {std::move(s), std::move(p), std::move(o)};
    }

    std::set<Triple> triples_;
};

}  // namespace coplan
