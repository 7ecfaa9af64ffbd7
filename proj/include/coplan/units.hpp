#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "coplan/common.hpp"

namespace coplan {

/// Integer exponents over the base dimensions, in this order:
/// length, mass, time, electric current, temperature, amount of substance,
/// luminous intensity, currency. All-zero means dimensionless.
struct DimensionVector {
    std::array<int, 8> exp{};

    friend bool operator==(const DimensionVector&, const DimensionVector&) = default;
    friend auto operator<=>(const DimensionVector&, const DimensionVector&) = default;

    bool dimensionless() const { return *this == DimensionVector{}; }

    bool pure_temperature() const {
        DimensionVector k;
        k.exp[4] = 1;
        return *this == k;
    }

    DimensionVector& add_scaled(const DimensionVector& other, int factor) {
        for (std::size_t i = 0; i < exp.size(); ++i) exp[i] += other.exp[i] * factor;
        return *this;
    }

    std::string str() const {
        std::string out = "(";
        for (std::size_t i = 0; i < exp.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(exp[i]);
        }
        return out + ")";
    }
};

inline DimensionVector make_dim(int length, int mass, int time, int current = 0,
                                int temperature = 0, int amount = 0, int luminous = 0,
                                int currency = 0) {
    return DimensionVector{{length, mass, time, current, temperature, amount, luminous, currency}};
}

/// A parsed unit expression: value_in_SI = scale * value + offset.
/// offset is only ever nonzero for pure-temperature units (Cel).
struct UnitSpec {
    std::string symbol;
    DimensionVector dimension;
    double scale = 1.0;
    double offset = 0.0;
};

/// Affine conversion y = factor * x + offset.
struct ConversionFn {
    double factor = 1.0;
    double offset = 0.0;

    double operator()(double x) const { return factor * x + offset; }

    ConversionFn inverted() const { return {1.0 / factor, -offset / factor}; }

    /// (g.compose(f))(x) = g(f(x))
    ConversionFn after(const ConversionFn& f) const {
        return {factor * f.factor, factor * f.offset + offset};
    }

    bool is_identity(double rel_tol = 1e-12) const {
        return nearly_equal(factor, 1.0, rel_tol) && std::fabs(offset) <= rel_tol;
    }
};

namespace detail {

struct BaseUnit {
    DimensionVector dim;
    double scale;
    double offset;
};

struct Prefix {
    const char* text;
    double factor;
};

// Longest prefixes first so "da" wins over "d".
inline const std::array<Prefix, 21>& si_prefixes() {
    static const std::array<Prefix, 21> table = {{
        {"da", 1e1}, {"y", 1e-24}, {"z", 1e-21}, {"a", 1e-18}, {"f", 1e-15}, {"p", 1e-12},
        {"n", 1e-9}, {"u", 1e-6},  {"\xc2\xb5", 1e-6}, {"m", 1e-3}, {"c", 1e-2}, {"d", 1e-1},
        {"h", 1e2},  {"k", 1e3},   {"M", 1e6},  {"G", 1e9},  {"T", 1e12}, {"P", 1e15},
        {"E", 1e18}, {"Z", 1e21},  {"Y", 1e24},
    }};
    return table;
}

}  // namespace detail

/// Symbol table mapping base unit symbols to dimension/scale/offset.
/// The built-in table covers the CPES fixtures; supplementary symbols can be
/// loaded from a text file (one `symbol scale dim-vector [offset]` per line).
class UnitTable {
  public:
    static const UnitTable& builtin() {
        static const UnitTable t = make_builtin();
        return t;
    }

    UnitTable() : symbols_(builtin().symbols_) {}

    void define(const std::string& symbol, DimensionVector dim, double scale,
                double offset = 0.0) {
        if (scale <= 0) throw Error("unit scale must be positive: " + symbol);
        symbols_[symbol] = {dim, scale, offset};
    }

    /// Supplementary table file: `symbol scale e0 e1 ... e7 [offset]`.
    void load_extra(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open unit table: " + path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            auto toks = tokens(t);
            if (toks.size() != 10 && toks.size() != 11)
                throw ParseError(lineno, "expected: symbol scale e0..e7 [offset]");
            DimensionVector dim;
            for (int i = 0; i < 8; ++i)
                dim.exp[static_cast<std::size_t>(i)] = static_cast<int>(
                    require_number(toks[static_cast<std::size_t>(i) + 2], lineno, "exponent"));
            double offset = toks.size() == 11 ? require_number(toks[10], lineno, "offset") : 0.0;
            define(toks[0], dim, require_number(toks[1], lineno, "scale"), offset);
        }
    }

    const detail::BaseUnit* find(std::string_view symbol) const {
        auto it = symbols_.find(std::string(symbol));
        return it == symbols_.end() ? nullptr : &it->second;
    }

    /// Resolves a term symbol: exact table match first, then SI prefix + base.
    /// Returns {base, prefix factor}.
    std::pair<const detail::BaseUnit*, double> resolve(std::string_view symbol) const {
        if (const auto* b = find(symbol)) return {b, 1.0};
        for (const auto& p : detail::si_prefixes()) {
            std::string_view pt = p.text;
            if (symbol.size() > pt.size() && starts_with(symbol, pt)) {
                if (const auto* b = find(symbol.substr(pt.size()))) return {b, p.factor};
            }
        }
        return {nullptr, 1.0};
    }

  private:
    static UnitTable make_builtin() {
        UnitTable t(0);
        auto def = [&](const char* sym, DimensionVector dim, double scale, double offset = 0.0) {
            t.symbols_[sym] = {dim, scale, offset};
        };
        def("m", make_dim(1, 0, 0), 1.0);
        def("g", make_dim(0, 1, 0), 1e-3);  // coherent mass unit is kg
        def("s", make_dim(0, 0, 1), 1.0);
        def("A", make_dim(0, 0, 0, 1), 1.0);
        def("K", make_dim(0, 0, 0, 0, 1), 1.0);
        def("Cel", make_dim(0, 0, 0, 0, 1), 1.0, 273.15);
        def("mol", make_dim(0, 0, 0, 0, 0, 1), 1.0);
        def("cd", make_dim(0, 0, 0, 0, 0, 0, 1), 1.0);
        def("W", make_dim(2, 1, -3), 1.0);
        def("var", make_dim(2, 1, -3), 1.0);  // reactive power, same dimension as W
        def("VA", make_dim(2, 1, -3), 1.0);   // apparent power, same dimension as W
        def("J", make_dim(2, 1, -2), 1.0);
        def("Wh", make_dim(2, 1, -2), 3600.0);
        def("V", make_dim(2, 1, -3, -1), 1.0);
        def("Hz", make_dim(0, 0, -1), 1.0);
        def("N", make_dim(1, 1, -2), 1.0);
        def("Pa", make_dim(-1, 1, -2), 1.0);
        def("t", make_dim(0, 1, 0), 1000.0);
        def("h", make_dim(0, 0, 1), 3600.0);
        def("min", make_dim(0, 0, 1), 60.0);
        def("EUR", make_dim(0, 0, 0, 0, 0, 0, 0, 1), 1.0);
        def("percent", {}, 0.01);
        def("one", {}, 1.0);
        return t;
    }

    explicit UnitTable(int) {}  // empty-table constructor for make_builtin

    std::map<std::string, detail::BaseUnit> symbols_;
};

/// Parses `expr := term (('*'|'/') term)*`, `term := [prefix] base ['^' int]`.
/// Evaluation is left to right; '/' binds only its immediate right term.
inline UnitSpec parse_unit(std::string_view expr, const UnitTable& table = UnitTable::builtin()) {
    struct Part {
        std::string symbol;
        int exponent;
        char op;  // '*' or '/'
    };

    std::string normalized;
    for (char c : expr)
        if (c != ' ' && c != '\t') normalized.push_back(c);
    if (normalized.empty()) throw Error("empty unit expression");

    std::vector<Part> parts;
    std::size_t i = 0;
    char pending_op = '*';
    while (i < normalized.size()) {
        std::size_t j = i;
        while (j < normalized.size() && normalized[j] != '*' && normalized[j] != '/') ++j;
        std::string term = normalized.substr(i, j - i);
        int exponent = 1;
        if (auto caret = term.find('^'); caret != std::string::npos) {
            auto e = parse_number(term.substr(caret + 1));
            if (!e || *e != static_cast<int>(*e))
                throw Error("malformed exponent in unit term '" + term + "'");
            exponent = static_cast<int>(*e);
            term = term.substr(0, caret);
        }
        if (term.empty()) throw Error("empty term in unit expression '" + normalized + "'");
        parts.push_back({term, exponent, pending_op});
        if (j < normalized.size()) pending_op = normalized[j];
        i = j + 1;
    }
    if (normalized.back() == '*' || normalized.back() == '/')
        throw Error("dangling operator in unit expression '" + normalized + "'");

    UnitSpec out;
    out.symbol = normalized;
    bool has_offset_part = false;
    for (const auto& part : parts) {
        auto [base, prefix_factor] = table.resolve(part.symbol);
        if (!base) throw Error("unknown unit symbol '" + part.symbol + "'");
        if (base->offset != 0.0) {
            // Affine units are not closed under multiplication.
            if (parts.size() > 1 || part.exponent != 1)
                throw Error("offset unit '" + part.symbol + "' cannot be combined or raised");
            has_offset_part = true;
        }
        int sign = part.op == '/' ? -1 : 1;
        out.dimension.add_scaled(base->dim, sign * part.exponent);
        out.scale *= std::pow(base->scale * prefix_factor, sign * part.exponent);
        if (has_offset_part) out.offset = base->offset;
    }
    return out;
}

inline bool same_dimension(const UnitSpec& a, const UnitSpec& b) {
    return a.dimension == b.dimension;
}

/// Exact unit identity as used by the recommender and validator:
/// same normalized symbol and same scale/offset.
inline bool same_unit(const UnitSpec& a, const UnitSpec& b) {
    return a.symbol == b.symbol && a.scale == b.scale && a.offset == b.offset;
}

/// Conversion from `from`-units to `to`-units. Requires equal dimensions.
inline ConversionFn conversion(const UnitSpec& from, const UnitSpec& to) {
    if (!same_dimension(from, to))
        throw Error("dimension mismatch: " + from.symbol + " " + from.dimension.str() + " vs " +
                    to.symbol + " " + to.dimension.str());
    // SI = scale*x + offset on both sides.
    return {from.scale / to.scale, (from.offset - to.offset) / to.scale};
}

}  // namespace coplan
