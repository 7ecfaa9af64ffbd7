#pragma once

#include <fstream>
#include <map>
#include <set>
#include <string>

#include "coplan/common.hpp"

namespace coplan {

/// Reference to a topic term; resolved against a Taxonomy at load time.
struct TopicRef {
    std::string term;
    bool registered = true;

    friend bool operator==(const TopicRef&, const TopicRef&) = default;
};

/// Open-ended topic taxonomy: terms with optional broader-term edges.
/// File format: one `term [broader-term]` per line, `#` comments allowed.
class Taxonomy {
  public:
    Taxonomy() = default;

    void add(const std::string& term, const std::string& broader = "") {
        terms_.insert(term);
        if (!broader.empty()) {
            terms_.insert(broader);
            broader_[term] = broader;
        }
    }

    static Taxonomy load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open taxonomy: " + path);
        Taxonomy tax;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            auto toks = tokens(t);
            if (toks.size() > 2) throw ParseError(lineno, "expected: term [broader-term]");
            tax.add(toks[0], toks.size() == 2 ? toks[1] : "");
        }
        return tax;
    }

    bool has(const std::string& term) const { return terms_.count(term) > 0; }

    /// Transitive broader-term check: is `ancestor` reachable from `term`?
    bool is_ancestor(const std::string& ancestor, const std::string& term) const {
        std::string cur = term;
        std::set<std::string> seen;  // guard against accidental cycles
        while (seen.insert(cur).second) {
            auto it = broader_.find(cur);
            if (it == broader_.end()) return false;
            if (it->second == ancestor) return true;
            cur = it->second;
        }
        return false;
    }

    bool related(const std::string& a, const std::string& b) const {
        return is_ancestor(a, b) || is_ancestor(b, a);
    }

    TopicRef resolve(const std::string& term) const { return {term, has(term)}; }

  private:
    std::set<std::string> terms_;
    std::map<std::string, std::string> broader_;
};

}  // namespace coplan
