#include "vessiot/problem.hpp"

#include "vessiot/diffideal.hpp"
#include "vessiot/geomkit.hpp"
#include "vessiot/invariants.hpp"
#include "vessiot/mechanics.hpp"
#include "vessiot/systems.hpp"

#include <fnmatch.h>

#include <any>
#include <cmath>
#include <cstdio>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace vessiot {

namespace {

std::string pointer_token(const std::string& key) {
    std::string r;
    for (char ch : key) {
        if (ch == '~') r += "~0";
        else if (ch == '/') r += "~1";
        else r += ch;
    }
    return r;
}

// Line and column of every value of a syntactically valid JSON document, keyed by JSON pointer.
class LocationIndex {
public:
    explicit LocationIndex(const std::string& text) : s_(text) {
        ws();
        value("");
    }
    std::pair<int, int> at(const std::string& path) const {
        auto it = at_.find(path);
        return it == at_.end() ? std::pair<int, int>{0, 0} : it->second;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    std::map<std::string, std::pair<int, int>> at_;

    void advance() {
        if (s_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
    }
    std::string string() {
        std::size_t start = pos_;
        advance();
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\') advance();
            advance();
        }
        advance();
        return Json::parse(s_.substr(start, pos_ - start)).get<std::string>();
    }
    void value(const std::string& path) {
        at_[path] = {line_, col_};
        char c = s_[pos_];
        if (c == '{') {
            advance();
            ws();
            while (s_[pos_] != '}') {
                std::string key = string();
                ws();
                advance();
                ws();
                value(path + "/" + pointer_token(key));
                ws();
                if (s_[pos_] == ',') advance();
                ws();
            }
            advance();
        } else if (c == '[') {
            advance();
            ws();
            for (int i = 0; s_[pos_] != ']'; ++i) {
                value(path + "/" + std::to_string(i));
                ws();
                if (s_[pos_] == ',') advance();
                ws();
            }
            advance();
        } else if (c == '"') {
            string();
        } else {
            while (pos_ < s_.size() && std::string(",]} \t\r\n").find(s_[pos_]) == std::string::npos) advance();
        }
    }
};

enum class Kind {
    Expr,
    Exprs,
    Var,
    Vars,
    Int,
    Bool,
    Str,
    Strs,
    Independent,
    Independents,
    Dependents,
    Field,
    Fields,
    FieldPairs,
    Bindings,
    Equations,
    Object
};

struct ArgSpec {
    std::string name;
    Kind kind;
    bool required = true;
    std::string object_type = {};  // for Kind::Object
};

struct CtxEntry {
    std::string name;
    ContextPtr ctx;
    Json definitions = Json::object();
    std::string path;
    mutable std::map<std::string, RationalExpr> memo;
    mutable std::set<std::string> active;
};

struct ObjectEntry {
    std::string name, type, context, path;
    Json body;
    mutable std::any built;
};

}  // namespace

struct ProblemFile::Impl {
    std::string source, name;
    Json doc;
    std::unique_ptr<LocationIndex> index;
    std::map<std::string, CtxEntry> contexts;
    std::map<std::string, ObjectEntry> objects;
    std::vector<std::string> check_contexts;

    Location loc(const std::string& path, std::size_t offset = 0, bool in_string = false) const {
        auto [l, c] = index ? index->at(path) : std::pair<int, int>{0, 0};
        if (l > 0 && in_string) c += 1 + static_cast<int>(offset);
        return {path.empty() ? "/" : path, l, c};
    }
    [[noreturn]] void fail(const std::string& kind, const std::string& msg, const std::string& path) const {
        throw ProblemError(kind, msg, loc(path));
    }

    std::function<std::optional<RationalExpr>(const std::string&)> resolver(const CtxEntry& c) const {
        return [this, &c](const std::string& name) -> std::optional<RationalExpr> {
            if (!c.definitions.contains(name)) return std::nullopt;
            if (auto it = c.memo.find(name); it != c.memo.end()) return it->second;
            std::string path = c.path + "/definitions/" + pointer_token(name);
            if (c.active.count(name)) fail("UnknownReference", "cyclic definition of '" + name + "'", path);
            c.active.insert(name);
            const Json& v = c.definitions[name];
            if (!v.is_string()) fail("SyntaxError", "definition must be an expression string", path);
            RationalExpr e = expr_text(c, v.get<std::string>(), path, 0);
            c.active.erase(name);
            c.memo[name] = e;
            return e;
        };
    }

    RationalExpr expr_text(const CtxEntry& c, const std::string& text, const std::string& path,
                           std::size_t offset) const {
        try {
            return parse(*c.ctx, text, resolver(c));
        } catch (const ProblemError&) {
            throw;
        } catch (const SyntaxError& e) {
            throw ProblemError("SyntaxError", std::string("expression: ") + e.what(), loc(path, offset + e.pos, true));
        } catch (const UnknownVariable& e) {
            throw ProblemError("UnknownReference", e.what(), loc(path, offset, true));
        } catch (const OrderOverflow& e) {
            throw ProblemError("UnknownReference", std::string("jet beyond the context order: ") + e.what(),
                               loc(path, offset, true));
        } catch (const Error& e) {
            throw ProblemError("SyntaxError", e.what(), loc(path, offset, true));
        }
    }

    RationalExpr expr(const CtxEntry& c, const Json& v, const std::string& path) const {
        if (v.is_number_integer()) return RationalExpr(v.get<long>());
        if (!v.is_string()) fail("SyntaxError", "expected an expression string", path);
        return expr_text(c, v.get<std::string>(), path, 0);
    }

    Var var(const CtxEntry& c, const Json& v, const std::string& path) const {
        RationalExpr e = expr(c, v, path);
        const Polynomial& p = e.num();
        if (!e.is_polynomial() || p.size() != 1 || p.lead().c != 1 || p.lead().m.f.size() != 1 ||
            p.lead().m.f[0].second != 1 || e.den().constant_value() != 1)
            fail("SyntaxError", "expected a variable name", path);
        return p.lead().m.f[0].first;
    }

    std::size_t independent(const CtxEntry& c, const Json& v, const std::string& path) const {
        if (!v.is_string()) fail("SyntaxError", "expected an independent variable name", path);
        auto i = c.ctx->independent_index(v.get<std::string>());
        if (!i) fail("UnknownReference", "unknown independent variable '" + v.get<std::string>() + "'", path);
        return static_cast<std::size_t>(*i);
    }

    int dependent(const CtxEntry& c, const Json& v, const std::string& path) const {
        if (!v.is_string()) fail("SyntaxError", "expected a dependent variable name", path);
        auto i = c.ctx->dependent_index(v.get<std::string>());
        if (!i) fail("UnknownReference", "unknown dependent variable '" + v.get<std::string>() + "'", path);
        return *i;
    }

    const Json& array(const Json& v, const std::string& path) const {
        if (!v.is_array()) fail("SyntaxError", "expected an array", path);
        return v;
    }

    const Json& object(const Json& v, const std::string& path) const {
        if (!v.is_object()) fail("SyntaxError", "expected an object", path);
        return v;
    }

    std::vector<RationalExpr> exprs(const CtxEntry& c, const Json& v, const std::string& path) const {
        std::vector<RationalExpr> r;
        for (std::size_t i = 0; i < array(v, path).size(); ++i)
            r.push_back(expr(c, v[i], path + "/" + std::to_string(i)));
        return r;
    }

    VectorField field(const CtxEntry& c, const Json& v, const std::string& path) const {
        VectorField f;
        for (const auto& [k, e] : object(v, path).items()) {
            std::string p = path + "/" + pointer_token(k);
            f.set(var(c, Json(k), p), expr(c, e, p));
        }
        return f;
    }

    Bindings bindings(const CtxEntry& c, const Json& v, const std::string& path) const {
        Bindings b;
        for (const auto& [k, e] : object(v, path).items()) {
            std::string p = path + "/" + pointer_token(k);
            b[var(c, Json(k), p)] = expr(c, e, p);
        }
        return b;
    }

    std::vector<EquationSpec> equations(const CtxEntry& c, const Json& v, const std::string& path,
                                        bool solved_default) const {
        std::vector<EquationSpec> out;
        for (std::size_t i = 0; i < array(v, path).size(); ++i) {
            std::string p = path + "/" + std::to_string(i);
            const Json* text = &v[i];
            bool solved = solved_default;
            std::string label;
            if (v[i].is_object()) {
                for (const auto& [k, x] : v[i].items())
                    if (k != "eq" && k != "solved" && k != "label")
                        fail("SyntaxError", "unknown equation field '" + k + "'", p + "/" + pointer_token(k));
                if (!v[i].contains("eq")) fail("SyntaxError", "equation object needs 'eq'", p);
                text = &v[i]["eq"];
                p += "/eq";
                if (v[i].contains("solved")) solved = v[i]["solved"].get<bool>();
                if (v[i].contains("label")) label = v[i]["label"].get<std::string>();
            }
            if (!text->is_string()) fail("SyntaxError", "equation must be a string 'lhs = rhs'", p);
            std::string s = text->get<std::string>();
            auto k = s.find('=');
            if (k == std::string::npos || s.find('=', k + 1) != std::string::npos)
                fail("SyntaxError", "equation needs exactly one '='", p);
            EquationSpec e;
            e.lhs = expr_text(c, s.substr(0, k), p, 0);
            e.rhs = expr_text(c, s.substr(k + 1), p, k + 1);
            e.solved = solved;
            e.label = label.empty() ? s : label;
            out.push_back(e);
        }
        return out;
    }

    const ObjectEntry& object_ref(const Json& v, const std::string& path, const std::string& type) const {
        if (!v.is_string()) fail("SyntaxError", "expected an object name", path);
        auto it = objects.find(v.get<std::string>());
        if (it == objects.end()) fail("UnknownReference", "unknown object '" + v.get<std::string>() + "'", path);
        if (!type.empty() && it->second.type != type)
            fail("SyntaxError", "object '" + it->first + "' is a " + it->second.type + ", expected " + type, path);
        return it->second;
    }

    // Parses one argument for validation; the value itself is discarded.
    void validate(const CtxEntry& c, const ArgSpec& a, const Json& v, const std::string& path) const {
        switch (a.kind) {
            case Kind::Expr: expr(c, v, path); break;
            case Kind::Exprs: exprs(c, v, path); break;
            case Kind::Var: var(c, v, path); break;
            case Kind::Vars:
                for (std::size_t i = 0; i < array(v, path).size(); ++i) var(c, v[i], path + "/" + std::to_string(i));
                break;
            case Kind::Int:
                if (!v.is_number_integer()) fail("SyntaxError", "expected an integer", path);
                break;
            case Kind::Bool:
                if (!v.is_boolean()) fail("SyntaxError", "expected true or false", path);
                break;
            case Kind::Str:
                if (!v.is_string()) fail("SyntaxError", "expected a string", path);
                break;
            case Kind::Strs:
                for (std::size_t i = 0; i < array(v, path).size(); ++i)
                    if (!v[i].is_string()) fail("SyntaxError", "expected a string", path + "/" + std::to_string(i));
                break;
            case Kind::Independent: independent(c, v, path); break;
            case Kind::Independents:
                for (std::size_t i = 0; i < array(v, path).size(); ++i)
                    independent(c, v[i], path + "/" + std::to_string(i));
                break;
            case Kind::Dependents:
                for (std::size_t i = 0; i < array(v, path).size(); ++i)
                    dependent(c, v[i], path + "/" + std::to_string(i));
                break;
            case Kind::Field: field(c, v, path); break;
            case Kind::Fields:
                for (std::size_t i = 0; i < array(v, path).size(); ++i) field(c, v[i], path + "/" + std::to_string(i));
                break;
            case Kind::FieldPairs:
                for (std::size_t i = 0; i < array(v, path).size(); ++i) {
                    std::string p = path + "/" + std::to_string(i);
                    if (!v[i].is_array() || v[i].size() != 2) fail("SyntaxError", "expected a pair of fields", p);
                    field(c, v[i][0], p + "/0");
                    field(c, v[i][1], p + "/1");
                }
                break;
            case Kind::Bindings: bindings(c, v, path); break;
            case Kind::Equations: equations(c, v, path, false); break;
            case Kind::Object: object_ref(v, path, a.object_type); break;
        }
    }
};

namespace {

using Impl = ProblemFile::Impl;

// Runtime access to the arguments of one check.
class Call {
public:
    Call(const Impl& f, const CtxEntry& c, const Json& body, std::string path)
        : f_(f), c_(c), body_(body), path_(std::move(path)) {}
    const Context& ctx() const { return *c_.ctx; }
    const ContextPtr& ctx_ptr() const { return c_.ctx; }
    bool has(const std::string& k) const { return body_.contains(k); }
    RationalExpr expr(const std::string& k) const { return f_.expr(c_, body_[k], at(k)); }
    RationalExpr expr_or(const std::string& k, const RationalExpr& d) const { return has(k) ? expr(k) : d; }
    std::vector<RationalExpr> exprs(const std::string& k) const { return f_.exprs(c_, body_[k], at(k)); }
    Var var(const std::string& k) const { return f_.var(c_, body_[k], at(k)); }
    std::vector<Var> vars(const std::string& k) const {
        std::vector<Var> r;
        for (std::size_t i = 0; i < body_[k].size(); ++i) r.push_back(f_.var(c_, body_[k][i], at(k) + "/" + std::to_string(i)));
        return r;
    }
    int integer(const std::string& k, int d = 0) const { return has(k) ? body_[k].get<int>() : d; }
    std::string str(const std::string& k, const std::string& d = "") const {
        return has(k) ? body_[k].get<std::string>() : d;
    }
    std::size_t independent(const std::string& k, std::size_t d = 0) const {
        return has(k) ? f_.independent(c_, body_[k], at(k)) : d;
    }
    std::vector<std::size_t> independents(const std::string& k) const {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < body_[k].size(); ++i)
            r.push_back(f_.independent(c_, body_[k][i], at(k) + "/" + std::to_string(i)));
        return r;
    }
    VectorField field(const std::string& k) const { return f_.field(c_, body_[k], at(k)); }
    std::vector<std::pair<VectorField, VectorField>> field_pairs(const std::string& k) const {
        std::vector<std::pair<VectorField, VectorField>> r;
        for (std::size_t i = 0; i < body_[k].size(); ++i) {
            std::string p = at(k) + "/" + std::to_string(i);
            r.emplace_back(f_.field(c_, body_[k][i][0], p + "/0"), f_.field(c_, body_[k][i][1], p + "/1"));
        }
        return r;
    }
    Bindings bindings(const std::string& k) const { return has(k) ? f_.bindings(c_, body_[k], at(k)) : Bindings{}; }
    const ObjectEntry& object(const std::string& k) const { return f_.object_ref(body_[k], at(k), ""); }
    const Impl& file() const { return f_; }

private:
    const Impl& f_;
    const CtxEntry& c_;
    const Json& body_;
    std::string path_;
    std::string at(const std::string& k) const { return path_ + "/" + pointer_token(k); }
};

Call object_call(const Impl& f, const ObjectEntry& o) {
    return Call(f, f.contexts.at(o.context), o.body, o.path);
}

template <class T>
const T& cached(const ObjectEntry& o, const std::function<T()>& build) {
    if (!o.built.has_value()) o.built = build();
    return std::any_cast<const T&>(o.built);
}

const SurfaceData& build_surface(const Impl& f, const ObjectEntry& o) {
    return cached<SurfaceData>(o, [&] {
        Call c = object_call(f, o);
        auto m = c.exprs("map");
        if (m.size() != 3) throw Error("InvalidArgument", "a surface map has three components");
        return surface_invariants(c.ctx(), {m[0], m[1], m[2]});
    });
}

const CurveData& build_curve(const Impl& f, const ObjectEntry& o) {
    return cached<CurveData>(o, [&] {
        Call c = object_call(f, o);
        return curve_invariants(c.ctx(), c.exprs("map"));
    });
}

const JetSection& build_section(const Impl& f, const ObjectEntry& o) {
    return cached<JetSection>(o, [&] {
        Call c = object_call(f, o);
        if (c.has("map")) return holonomic_section(c.ctx(), c.exprs("map"), c.integer("order", 1));
        JetSection s;
        s.order = c.integer("order", 1);
        for (const auto& [v, e] : c.bindings("jets")) {
            const VariableId& id = c.ctx().id(v);
            if (id.kind != VarKind::Jet) throw Error("InvalidArgument", c.ctx().name(v) + " is not a jet");
            s.values[{id.index, id.mu.e}] = e;
        }
        return s;
    });
}

const GeneratorSet& build_generators(const Impl& f, const ObjectEntry& o) {
    return cached<GeneratorSet>(o, [&] {
        Call c = object_call(f, o);
        GeneratorSet g;
        for (std::size_t i = 0; i < o.body["fields"].size(); ++i)
            g.fields.push_back(f.field(f.contexts.at(o.context), o.body["fields"][i], o.path + "/fields/" + std::to_string(i)));
        if (c.has("labels"))
            for (const auto& l : o.body["labels"]) g.labels.push_back(l.get<std::string>());
        g.order = c.integer("order", 0);
        g.prolong = c.has("prolong") && o.body["prolong"].get<bool>();
        if (c.has("deps"))
            for (std::size_t i = 0; i < o.body["deps"].size(); ++i)
                g.deps.push_back(f.dependent(f.contexts.at(o.context), o.body["deps"][i], o.path + "/deps/" + std::to_string(i)));
        return g;
    });
}

const SolvedSystem& build_system(const Impl& f, const ObjectEntry& o) {
    return cached<SolvedSystem>(o, [&] {
        const CtxEntry& ce = f.contexts.at(o.context);
        const Context& ctx = *ce.ctx;
        Call c = object_call(f, o);
        SolvedSystem s;
        if (c.has("extends")) {
            s = build_system(f, c.object("extends"));
        } else {
            std::vector<std::size_t> ordering;
            if (c.has("ordering"))
                for (std::size_t i = 0; i < o.body["ordering"].size(); ++i)
                    ordering.push_back(f.independent(ce, o.body["ordering"][i], o.path + "/ordering/" + std::to_string(i)));
            std::vector<int> unknowns;
            if (c.has("unknowns"))
                for (std::size_t i = 0; i < o.body["unknowns"].size(); ++i)
                    unknowns.push_back(f.dependent(ce, o.body["unknowns"][i], o.path + "/unknowns/" + std::to_string(i)));
            bool solved = c.has("solved") && o.body["solved"].get<bool>();
            auto eqs = c.has("equations") ? f.equations(ce, o.body["equations"], o.path + "/equations", solved)
                                          : std::vector<EquationSpec>{};
            std::vector<RationalExpr> gen = c.has("genericity") ? c.exprs("genericity") : std::vector<RationalExpr>{};
            s = make_system(ctx, c.integer("order", 1), ordering, unknowns, eqs, gen);
        }
        if (c.has("prolong")) s = prolong_system(ctx, s, c.integer("prolong"));
        if (c.has("add")) {
            int next = 0;
            for (const auto& e : s.equations) next = std::max(next, e.source + 1);
            for (const auto& body : f.equations(ce, o.body["add"], o.path + "/add", false)) {
                Equation e;
                e.residual = reduce(ctx, body.lhs - body.rhs);
                e.label = body.label;
                e.source = next++;
                e.nu = MultiIndex(ctx.n());
                s.equations.push_back(e);
            }
        }
        return s;
    });
}

struct OpSpec {
    std::vector<ArgSpec> args;
    std::function<CheckReport(const Call&)> run;
    bool multi_context = false;
};

CheckReport fresh(bool ok = true) {
    CheckReport r;
    r.ok = ok;
    return r;
}

std::string text(const Context& ctx, const RationalExpr& e) { return to_string(ctx, reduce(ctx, e)); }

CheckReport zero_report(const Context& ctx, const RationalExpr& e) {
    RationalExpr r = reduce(ctx, e);
    CheckReport rep = fresh(r.is_zero());
    if (!rep.ok) rep.witness = to_string(ctx, r);
    rep.numbers["residual"] = to_string(ctx, r);
    return rep;
}

Json matrix_json(const Context& ctx, const Matrix& m) {
    Json a = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const auto& e : row) r.push_back(text(ctx, e));
        a.push_back(r);
    }
    return a;
}

Json vector_json(const Context& ctx, const std::vector<RationalExpr>& v) {
    Json a = Json::array();
    for (const auto& e : v) a.push_back(text(ctx, e));
    return a;
}

Json field_json(const Context& ctx, const VectorField& f) {
    Json o = Json::object();
    for (const auto& [v, e] : f.components())
        if (!is_zero(ctx, e)) o[ctx.name(v)] = text(ctx, e);
    return o;
}

CheckReport dimension_report(const Dimension& d) {
    CheckReport r = fresh();
    r.numbers["value"] = d.value;
    r.numbers["exact"] = d.exact;
    return r;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("UnknownReference", "cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ArgSpec obj(const std::string& name, const std::string& type, bool required = true) {
    return {name, Kind::Object, required, type};
}

const std::map<std::string, OpSpec>& ops() {
    static const std::map<std::string, OpSpec> table = [] {
        std::map<std::string, OpSpec> t;

        t["identity"] = {{{"expr", Kind::Expr, false}, {"lhs", Kind::Expr, false}, {"rhs", Kind::Expr, false}},
                         [](const Call& c) {
                             if (c.has("expr")) return zero_report(c.ctx(), c.expr("expr"));
                             if (!c.has("lhs") || !c.has("rhs"))
                                 throw Error("InvalidArgument", "identity needs expr or lhs and rhs");
                             return zero_report(c.ctx(), c.expr("lhs") - c.expr("rhs"));
                         }};
        t["canonical"] = {{{"expr", Kind::Expr}}, [](const Call& c) {
                              CheckReport r = fresh();
                              r.numbers["text"] = text(c.ctx(), c.expr("expr"));
                              return r;
                          }};
        t["substitute"] = {{{"expr", Kind::Expr}, {"at", Kind::Bindings}}, [](const Call& c) {
                               CheckReport r = fresh();
                               r.numbers["value"] = text(c.ctx(), substitute(c.expr("expr"), c.bindings("at")));
                               return r;
                           }};

        t["total_derivative"] = {{{"expr", Kind::Expr}, {"along", Kind::Independents}}, [](const Call& c) {
                                     MultiIndex mu(c.ctx().n());
                                     for (std::size_t i : c.independents("along")) ++mu.e[i];
                                     CheckReport r = fresh();
                                     r.numbers["value"] = text(c.ctx(), total_derivative(c.ctx(), c.expr("expr"), mu));
                                     return r;
                                 }};
        t["spencer"] = {{obj("section", "section")}, [](const Call& c) {
                            const JetSection& s = build_section(c.file(), c.object("section"));
                            CheckReport r = fresh();
                            auto comps = spencer(c.ctx(), s);
                            int nonzero = 0;
                            for (const auto& sc : comps)
                                if (!is_zero(c.ctx(), sc.value)) {
                                    if (r.ok) r.witness = text(c.ctx(), sc.value);
                                    r.ok = false;
                                    ++nonzero;
                                }
                            r.numbers["components"] = comps.size();
                            r.numbers["nonzero"] = nonzero;
                            return r;
                        }};
        t["bracket"] = {{{"a", Kind::Field}, {"b", Kind::Field}, {"expected", Kind::Field, false}}, [](const Call& c) {
                            VectorField br = bracket(c.ctx(), c.field("a"), c.field("b"));
                            CheckReport r = fresh();
                            r.numbers["bracket"] = field_json(c.ctx(), br);
                            if (c.has("expected")) {
                                VectorField diff = br - c.field("expected");
                                for (const auto& [v, e] : diff.components())
                                    if (!is_zero(c.ctx(), e)) {
                                        if (r.ok) r.witness = text(c.ctx(), e);
                                        r.ok = false;
                                    }
                            }
                            return r;
                        }};
        t["prolong_field"] = {{{"field", Kind::Field}, {"order", Kind::Int}, {"deps", Kind::Dependents, false}},
                              [](const Call& c) {
                                  CheckReport r = fresh();
                                  r.numbers["field"] =
                                      field_json(c.ctx(), prolong_field(c.ctx(), c.field("field"), c.integer("order")));
                                  return r;
                              }};

        t["invariant"] = {{obj("generators", "generators"), {"expr", Kind::Expr}}, [](const Call& c) {
                              return is_invariant(c.ctx(), c.expr("expr"), build_generators(c.file(), c.object("generators")));
                          }};
        t["invariant_count"] = {{obj("generators", "generators"), {"order", Kind::Int}}, [](const Call& c) {
                                    auto n = invariant_count(c.ctx(), build_generators(c.file(), c.object("generators")),
                                                             c.integer("order"));
                                    CheckReport r = fresh();
                                    r.numbers["fiber"] = n.fiber;
                                    r.numbers["rank"] = n.rank;
                                    r.numbers["count"] = n.count;
                                    r.numbers["exact"] = n.exact;
                                    return r;
                                }};
        t["rank"] = {{obj("generators", "generators")}, [](const Call& c) {
                         const GeneratorSet& g = build_generators(c.file(), c.object("generators"));
                         auto rr = generic_rank(c.ctx(), g.effective(c.ctx()));
                         CheckReport r = fresh();
                         r.numbers["rank"] = rr.rank;
                         r.numbers["exact"] = rr.exact;
                         return r;
                     }};
        t["structure_constants"] = {{obj("generators", "generators")}, [](const Call& c) {
                                        const GeneratorSet& g = build_generators(c.file(), c.object("generators"));
                                        auto sc = structure_constants(c.ctx(), g);
                                        CheckReport r = fresh(sc.closed);
                                        r.numbers["closed"] = sc.closed;
                                        if (!sc.closed) {
                                            r.witness = sc.offending;
                                            return r;
                                        }
                                        Json table = Json::object();
                                        for (std::size_t a = 0; a < sc.c.size(); ++a)
                                            for (std::size_t b = a + 1; b < sc.c.size(); ++b) {
                                                Json row = Json::object();
                                                for (std::size_t k = 0; k < sc.c.size(); ++k)
                                                    if (sc.c[a][b][k] != 0)
                                                        row[std::to_string(k + 1)] = scalar_string(sc.c[a][b][k]);
                                                if (!row.empty())
                                                    table["[" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "]"] = row;
                                            }
                                        bool jac = jacobi_condition(sc.c);
                                        r.numbers["table"] = table;
                                        r.numbers["jacobi"] = jac;
                                        r.ok = jac;
                                        if (!jac) r.witness = "jacobi condition";
                                        return r;
                                    }};
        t["commutant"] = {{obj("delta", "generators"), obj("theta", "generators")}, [](const Call& c) {
                              return commutant_check(c.ctx(), build_generators(c.file(), c.object("delta")),
                                                     build_generators(c.file(), c.object("theta")));
                          }};
        t["constancy"] = {{{"targets", Kind::Exprs}, {"pairs", Kind::FieldPairs}, {"identify", Kind::Bindings, false}},
                          [](const Call& c) {
                              return constancy_check(c.ctx(), c.exprs("targets"), c.field_pairs("pairs"),
                                                     c.bindings("identify"));
                          }};
        t["noninvariance"] = {{{"gens", Kind::Exprs}, {"field", Kind::Field}}, [](const Call& c) {
                                  auto w = noninvariance_witness(c.ctx(), c.exprs("gens"), c.field("field"));
                                  CheckReport r = fresh();
                                  Json entries = Json::array();
                                  for (const auto& e : w) {
                                      entries.push_back({{"value", text(c.ctx(), e.value)},
                                                         {"membership", to_string(e.membership)}});
                                      if (e.membership != Membership::Stable) {
                                          if (r.ok) r.witness = text(c.ctx(), e.value);
                                          r.ok = false;
                                      }
                                  }
                                  r.numbers["entries"] = entries;
                                  return r;
                              }};
        t["generically_free"] = {{obj("generators", "generators"), {"order", Kind::Int}}, [](const Call& c) {
                                     return fresh(generically_free(
                                         c.ctx(), build_generators(c.file(), c.object("generators")), c.integer("order")));
                                 }};

        auto sys = [](const Call& c) -> const SolvedSystem& { return build_system(c.file(), c.object("system")); };
        t["fiber_dimension"] = {{obj("system", "system")},
                                [sys](const Call& c) { return dimension_report(fiber_dimension(c.ctx(), sys(c))); }};
        t["symbol_dimension"] = {{obj("system", "system")},
                                 [sys](const Call& c) { return dimension_report(symbol_dimension(c.ctx(), sys(c))); }};
        t["integrability_conditions"] = {{obj("system", "system")}, [sys](const Call& c) {
                                             return dimension_report(integrability_conditions(c.ctx(), sys(c)));
                                         }};
        t["compatibility_count"] = {{obj("system", "system")}, [sys](const Call& c) {
                                        return dimension_report(compatibility_count(c.ctx(), sys(c)));
                                    }};
        t["characters"] = {{obj("system", "system")}, [sys](const Call& c) {
                               auto ch = characters(c.ctx(), sys(c));
                               CheckReport r = fresh();
                               r.numbers["alpha"] = ch.alpha;
                               r.numbers["beta"] = ch.beta;
                               r.numbers["exact"] = ch.exact;
                               return r;
                           }};
        t["system_summary"] = {{obj("system", "system")}, [sys](const Call& c) {
                                   const SolvedSystem& s = sys(c);
                                   CheckReport r = fresh();
                                   r.numbers["order"] = s.order;
                                   r.numbers["equations"] = s.equations.size();
                                   r.numbers["conditions"] = s.conditions.size();
                                   r.numbers["fully_solved"] = s.fully_solved();
                                   return r;
                               }};
        t["satisfies"] = {{obj("system", "system"), {"at", Kind::Bindings}}, [sys](const Call& c) {
                              const SolvedSystem& s = sys(c);
                              Bindings at = c.bindings("at");
                              CheckReport r = fresh();
                              int failed = 0;
                              for (const auto& e : s.equations) {
                                  RationalExpr v = reduce(c.ctx(), substitute(e.residual, at));
                                  if (v.is_zero()) continue;
                                  if (r.ok) r.witness = to_string(c.ctx(), v);
                                  r.ok = false;
                                  ++failed;
                                  r.notes.push_back("not satisfied: " + e.label);
                              }
                              r.numbers["equations"] = s.equations.size();
                              r.numbers["unsatisfied"] = failed;
                              return r;
                          }};
        t["cartan"] = {{obj("system", "system")}, [sys](const Call& c) { return cartan_test(c.ctx(), sys(c)); }};
        t["janet_board"] = {{obj("system", "system"), {"golden", Kind::Str, false}}, [sys](const Call& c) {
                                std::string board = janet_board(c.ctx(), sys(c)).render();
                                CheckReport r = fresh();
                                r.numbers["board"] = board;
                                if (c.has("golden")) {
                                    auto dir = std::filesystem::path(c.file().source).parent_path();
                                    std::string want = read_file(dir / c.str("golden"));
                                    if (want != board) {
                                        r.ok = false;
                                        std::istringstream a(board), b(want);
                                        std::string la, lb;
                                        for (int line = 1;; ++line) {
                                            bool ga = static_cast<bool>(std::getline(a, la));
                                            bool gb = static_cast<bool>(std::getline(b, lb));
                                            if (!ga && !gb) break;
                                            if (!ga || !gb || la != lb) {
                                                r.witness = "line " + std::to_string(line) + ": " + (ga ? la : "<end>");
                                                break;
                                            }
                                        }
                                        if (r.witness.empty()) r.witness = "trailing bytes differ";
                                    }
                                    r.notes.push_back("golden " + c.str("golden"));
                                }
                                return r;
                            }};
        OpSpec phs{{obj("system", "system"), obj("groupoid", "system")}, nullptr, true};
        phs.run = [](const Call& c) {
            const auto& so = c.object("system");
            const auto& go = c.object("groupoid");
            return phs_check(*c.file().contexts.at(so.context).ctx, build_system(c.file(), so),
                             *c.file().contexts.at(go.context).ctx, build_system(c.file(), go));
        };
        t["phs"] = phs;
        OpSpec aut = phs;
        aut.run = [](const Call& c) {
            const auto& so = c.object("system");
            const auto& go = c.object("groupoid");
            return automorphic_criterion(*c.file().contexts.at(so.context).ctx, build_system(c.file(), so),
                                         *c.file().contexts.at(go.context).ctx, build_system(c.file(), go));
        };
        t["automorphic"] = aut;

        t["surface_invariants"] = {{obj("surface", "surface"), {"at", Kind::Bindings, false}}, [](const Call& c) {
                                       const SurfaceData& s = build_surface(c.file(), c.object("surface"));
                                       Bindings at = c.bindings("at");
                                       auto put = [&](const RationalExpr& e) {
                                           return text(c.ctx(), at.empty() ? e : substitute(e, at));
                                       };
                                       CheckReport r = fresh();
                                       const char* ij[3] = {"11", "12", "22"};
                                       int idx[3][2] = {{0, 0}, {0, 1}, {1, 1}};
                                       for (int k = 0; k < 3; ++k)
                                           r.numbers[std::string("omega") + ij[k]] =
                                               put(s.omega[idx[k][0]][idx[k][1]]);
                                       for (int k = 0; k < 3; ++k)
                                           r.numbers[std::string("sigma") + ij[k]] =
                                               put(s.sigma[idx[k][0]][idx[k][1]]);
                                       r.numbers["det_omega"] = put(s.det_omega);
                                       r.numbers["det_sigma"] = put(s.det_sigma);
                                       r.numbers["gauss_ratio"] = put(s.gauss_ratio);
                                       r.numbers["curvature"] = put(s.det_sigma / s.det_omega.pow(2));
                                       return r;
                                   }};
        t["gauss_codazzi"] = {{obj("surface", "surface")}, [](const Call& c) {
                                  const SurfaceData& s = build_surface(c.file(), c.object("surface"));
                                  RationalExpr g = reduce(c.ctx(), gauss_residual(c.ctx(), s));
                                  auto [c1, c2] = codazzi_residual(c.ctx(), s);
                                  CheckReport r = fresh();
                                  for (const auto& [k, e] : std::vector<std::pair<std::string, RationalExpr>>{
                                           {"gauss", g}, {"codazzi1", c1}, {"codazzi2", c2}}) {
                                      std::string v = text(c.ctx(), e);
                                      r.numbers[k] = v;
                                      if (v != "0") {
                                          if (r.ok) r.witness = v;
                                          r.ok = false;
                                      }
                                  }
                                  return r;
                              }};
        t["curve_invariants"] = {{obj("curve", "curve")}, [](const Call& c) {
                                     const CurveData& d = build_curve(c.file(), c.object("curve"));
                                     CheckReport r = fresh(d.identities_hold);
                                     r.numbers["m"] = d.m;
                                     r.numbers["omega"] = text(c.ctx(), d.omega);
                                     r.numbers["gamma"] = text(c.ctx(), d.gamma);
                                     r.numbers["sigma"] = text(c.ctx(), d.sigma);
                                     r.numbers["upsilon"] = text(c.ctx(), d.upsilon);
                                     if (d.m == 3) {
                                         r.numbers["phi"] = text(c.ctx(), d.phi);
                                         r.numbers["psi"] = text(c.ctx(), d.psi);
                                         r.numbers["rho"] = text(c.ctx(), d.rho);
                                     }
                                     r.numbers["identities_hold"] = d.identities_hold;
                                     if (!r.ok) r.witness = "curve identities";
                                     return r;
                                 }};
        t["frenet"] = {{obj("curve", "curve")}, [](const Call& c) {
                           auto fs = frenet_squares(c.ctx(), build_curve(c.file(), c.object("curve")));
                           CheckReport r = fresh();
                           r.numbers["kappa2"] = text(c.ctx(), fs.kappa2);
                           if (fs.tau) r.numbers["tau"] = text(c.ctx(), *fs.tau);
                           return r;
                       }};
        auto gauge = [](const Call& c) {
            return gauging(c.ctx(), build_section(c.file(), c.object("section")),
                           build_section(c.file(), c.object("target")), c.integer("m"));
        };
        t["gauging"] = {{obj("section", "section"), obj("target", "section"), {"m", Kind::Int}}, [gauge](const Call& c) {
                            Gauging g = gauge(c);
                            CheckReport r = fresh();
                            r.numbers["A"] = matrix_json(c.ctx(), g.A);
                            r.numbers["B"] = vector_json(c.ctx(), g.B);
                            r.numbers["orthogonal"] = g.orthogonal;
                            r.numbers["unimodular"] = g.unimodular;
                            return r;
                        }};
        t["maurer_cartan"] = {{obj("section", "section"), obj("target", "section"), {"m", Kind::Int},
                               {"along", Kind::Independent, false}},
                              [gauge](const Call& c) {
                                  MaurerCartan mc = maurer_cartan(c.ctx(), gauge(c), c.independent("along"));
                                  CheckReport r = fresh(mc.skew);
                                  r.numbers["P"] = matrix_json(c.ctx(), mc.P);
                                  r.numbers["Q"] = vector_json(c.ctx(), mc.Q);
                                  r.numbers["skew"] = mc.skew;
                                  if (!mc.skew) r.witness = "P is not skew";
                                  return r;
                              }};

        t["prolong_generators"] = {{{"gens", Kind::Exprs}, {"r", Kind::Int}}, [](const Call& c) {
                                       auto p = prolong_gens({c.ctx_ptr(), c.exprs("gens")}, c.integer("r"));
                                       CheckReport r = fresh();
                                       r.numbers["count"] = p.generators.size();
                                       return r;
                                   }};
        t["syzygy"] = {{{"expr", Kind::Expr}}, [](const Call& c) { return syzygy_check(c.ctx(), c.expr("expr")); }};
        t["radical"] = {{{"expr", Kind::Expr}, {"r", Kind::Int}, {"along", Kind::Independent, false}},
                        [](const Call& c) {
                            auto cert = radical_power_membership(c.ctx(), c.expr("expr"), c.independent("along"),
                                                                 c.integer("r"));
                            CheckReport r = cert.report;
                            r.numbers["target"] = text(c.ctx(), cert.target);
                            r.numbers["coefficients"] = vector_json(c.ctx(), cert.coefficients);
                            return r;
                        }};
        t["residue_ring"] = {{{"gens", Kind::Exprs}, {"r", Kind::Int}, {"principal", Kind::Vars}}, [](const Call& c) {
                                 return residue_ring_check({c.ctx_ptr(), c.exprs("gens")}, c.integer("r"),
                                                           c.vars("principal"));
                             }};

        t["lie_factor"] = {{{"xi", Kind::Expr}, {"eta", Kind::Expr}, {"F", Kind::Expr}, {"designated", Kind::Var},
                            {"chi", Kind::Expr, false}},
                           [](const Call& c) {
                               std::optional<RationalExpr> chi;
                               if (c.has("chi")) chi = c.expr("chi");
                               return lie_condition_equivalence(c.ctx(), c.expr("xi"), c.expr("eta"), c.expr("F"),
                                                                c.var("designated"), chi);
                           }};
        t["jacobi_multiplier"] = {{{"phi", Kind::Exprs}},
                                  [](const Call& c) { return jacobi_multiplier_identity(c.ctx(), c.exprs("phi")); }};
        t["divergence"] = {{{"M", Kind::Expr, false}, {"theta", Kind::Exprs}}, [](const Call& c) {
                               return zero_report(c.ctx(), divergence(c.ctx(), c.expr_or("M", 1), c.exprs("theta")));
                           }};
        t["multiplier_transport"] = {{{"M", Kind::Expr, false}, {"theta", Kind::Exprs}, {"phi", Kind::Exprs}},
                                     [](const Call& c) {
                                         return multiplier_transport(c.ctx(), c.expr_or("M", 1), c.exprs("theta"),
                                                                     c.exprs("phi"));
                                     }};
        t["hessian_multiplier"] = {{{"L", Kind::Expr}},
                                   [](const Call& c) { return hessian_multiplier_identity(c.ctx(), c.expr("L")); }};
        t["hj_closure"] = {{{"H", Kind::Expr}, {"X", Kind::Expr}, {"Z", Kind::Expr}, {"P", Kind::Expr},
                            {"rho", Kind::Expr, false}},
                           [](const Call& c) {
                               ContactUnknowns u{c.expr("X"), c.expr("Z"), c.expr("P"), std::nullopt};
                               if (c.has("rho")) u.rho = c.expr("rho");
                               return hj_closure_chain(c.ctx(), c.expr("H"), u);
                           }};
        t["separability"] = {{{"H", Kind::Expr}},
                             [](const Call& c) { return separability_conditions(c.ctx(), c.expr("H")); }};
        return t;
    }();
    return table;
}

}  // namespace

namespace {

const std::set<std::string> kCheckKeys = {"id", "op", "context", "status", "error", "expect", "note"};

const std::map<std::string, std::vector<ArgSpec>>& object_specs() {
    static const std::map<std::string, std::vector<ArgSpec>> t = {
        {"surface", {{"map", Kind::Exprs}}},
        {"curve", {{"map", Kind::Exprs}}},
        {"section", {{"map", Kind::Exprs, false}, {"jets", Kind::Bindings, false}, {"order", Kind::Int, false}}},
        {"generators",
         {{"fields", Kind::Fields},
          {"labels", Kind::Strs, false},
          {"order", Kind::Int, false},
          {"prolong", Kind::Bool, false},
          {"deps", Kind::Dependents, false}}},
        {"system",
         {{"order", Kind::Int, false},
          {"ordering", Kind::Independents, false},
          {"unknowns", Kind::Dependents, false},
          {"equations", Kind::Equations, false},
          {"solved", Kind::Bool, false},
          {"genericity", Kind::Exprs, false},
          {"extends", Kind::Object, false, "system"},
          {"prolong", Kind::Int, false},
          {"add", Kind::Equations, false}}},
    };
    return t;
}

std::vector<std::string> strings(const Impl& f, const Json& v, const std::string& path) {
    std::vector<std::string> r;
    for (std::size_t i = 0; i < f.array(v, path).size(); ++i) {
        if (!v[i].is_string()) f.fail("SyntaxError", "expected a string", path + "/" + std::to_string(i));
        r.push_back(v[i].get<std::string>());
    }
    return r;
}

void check_keys(const Impl& f, const Json& v, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [k, x] : v.items())
        if (!allowed.count(k)) f.fail("SyntaxError", "unknown field '" + k + "'", path + "/" + pointer_token(k));
}

void build_context(Impl& f, const std::string& name, const Json& v, const std::string& path) {
    f.object(v, path);
    check_keys(f, v, path, {"independents", "parameters", "dependents", "specials", "order", "definitions", "note"});
    Context::Builder b;
    std::set<std::string> indep;
    if (v.contains("independents"))
        for (const auto& n : strings(f, v["independents"], path + "/independents")) {
            b.independent(n);
            indep.insert(n);
        }
    if (v.contains("parameters"))
        for (const auto& n : strings(f, v["parameters"], path + "/parameters")) b.parameter(n);
    if (v.contains("dependents")) {
        const Json& d = f.object(v["dependents"], path + "/dependents");
        for (const auto& [n, base] : d.items()) {
            std::string p = path + "/dependents/" + pointer_token(n);
            auto names = strings(f, base, p);
            for (std::size_t i = 0; i < names.size(); ++i)
                if (!indep.count(names[i]))
                    f.fail("UnknownReference", "unknown independent variable '" + names[i] + "'",
                           p + "/" + std::to_string(i));
            b.dependent(n, names);
        }
    }
    if (v.contains("specials")) {
        const Json& sp = f.array(v["specials"], path + "/specials");
        for (std::size_t i = 0; i < sp.size(); ++i) {
            std::string p = path + "/specials/" + std::to_string(i);
            f.object(sp[i], p);
            check_keys(f, sp[i], p, {"kind", "base", "names"});
            if (!sp[i].contains("kind") || !sp[i]["kind"].is_string() || !sp[i].contains("base") ||
                !sp[i]["base"].is_string())
                f.fail("SyntaxError", "a special needs 'kind' and 'base'", p);
            std::string kind = sp[i]["kind"].get<std::string>(), base = sp[i]["base"].get<std::string>();
            if (!indep.count(base)) f.fail("UnknownReference", "unknown independent variable '" + base + "'", p + "/base");
            std::vector<std::string> names;
            if (sp[i].contains("names")) names = strings(f, sp[i]["names"], p + "/names");
            if (!names.empty() && names.size() != 2) f.fail("SyntaxError", "a special pair has two names", p + "/names");
            if (kind == "hyperbolic")
                names.empty() ? b.hyperbolic(base) : b.hyperbolic(base, names[0], names[1]);
            else if (kind == "trigonometric")
                names.empty() ? b.trigonometric(base) : b.trigonometric(base, names[0], names[1]);
            else
                f.fail("SyntaxError", "special kind must be hyperbolic or trigonometric", p + "/kind");
        }
    }
    if (v.contains("order")) {
        if (!v["order"].is_number_integer() || v["order"].get<int>() < 0)
            f.fail("SyntaxError", "order must be a nonnegative integer", path + "/order");
        b.order(v["order"].get<int>());
    }
    CtxEntry e;
    e.name = name;
    e.path = path;
    try {
        e.ctx = b.build();
    } catch (const Error& err) {
        f.fail("SyntaxError", err.what(), path);
    }
    if (v.contains("definitions")) {
        e.definitions = f.object(v["definitions"], path + "/definitions");
        for (const auto& [n, d] : e.definitions.items())
            if (e.ctx->lookup(n))
                f.fail("SyntaxError", "definition '" + n + "' shadows a variable",
                       path + "/definitions/" + pointer_token(n));
    }
    auto [it, inserted] = f.contexts.emplace(name, std::move(e));
    (void)inserted;
    auto resolve = f.resolver(it->second);
    for (const auto& [n, d] : it->second.definitions.items()) resolve(n);
}

const CtxEntry& context_named(const Impl& f, const Json& v, const std::string& path) {
    if (!v.is_string()) f.fail("SyntaxError", "expected a context name", path);
    auto it = f.contexts.find(v.get<std::string>());
    if (it == f.contexts.end()) f.fail("UnknownReference", "unknown context '" + v.get<std::string>() + "'", path);
    return it->second;
}

const CtxEntry& default_context(const Impl& f, const std::string& path) {
    if (f.contexts.size() != 1) f.fail("SyntaxError", "'context' is required when several contexts are declared", path);
    return f.contexts.begin()->second;
}

void validate_args(const Impl& f, const CtxEntry& c, const Json& v, const std::string& path,
                   const std::vector<ArgSpec>& specs) {
    for (const auto& a : specs) {
        if (!v.contains(a.name)) {
            if (a.required) f.fail("SyntaxError", "missing field '" + a.name + "'", path);
            continue;
        }
        f.validate(c, a, v[a.name], path + "/" + pointer_token(a.name));
    }
}

void validate_extends(const Impl& f, const ObjectEntry& o) {
    std::set<std::string> seen{o.name};
    const ObjectEntry* cur = &o;
    while (cur->body.contains("extends")) {
        std::string p = cur->path + "/extends";
        const ObjectEntry& base = f.object_ref(cur->body["extends"], p, "system");
        if (base.context != cur->context)
            f.fail("ContextMismatch", "system '" + cur->name + "' extends '" + base.name + "' from context '" +
                                          base.context + "'",
                   p);
        if (!seen.insert(base.name).second) f.fail("UnknownReference", "cyclic 'extends' chain", p);
        cur = &base;
    }
}

int line_of(const std::string& text, std::size_t byte, int* col) {
    int line = 1;
    *col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            *col = 1;
        } else {
            ++*col;
        }
    }
    return line;
}

bool same_value(const Impl& f, const CtxEntry& c, const Json& want, const Json& got) {
    if (want.is_string() && got.is_string()) {
        if (want == got) return true;
        try {
            auto res = f.resolver(c);
            return is_zero(*c.ctx, parse(*c.ctx, want.get<std::string>(), res) - parse(*c.ctx, got.get<std::string>(), res));
        } catch (const std::exception&) {
            return false;
        }
    }
    if (want.is_array() && got.is_array()) {
        if (want.size() != got.size()) return false;
        for (std::size_t i = 0; i < want.size(); ++i)
            if (!same_value(f, c, want[i], got[i])) return false;
        return true;
    }
    if (want.is_object() && got.is_object()) {
        if (want.size() != got.size()) return false;
        for (const auto& [k, w] : want.items())
            if (!got.contains(k) || !same_value(f, c, w, got[k])) return false;
        return true;
    }
    if (want.is_number() && got.is_number()) {
        if (want.is_number_float() || got.is_number_float()) return want.get<double>() == got.get<double>();
        return want.get<long long>() == got.get<long long>();
    }
    return want == got;
}

std::vector<const CtxEntry*> check_context_set(const Impl& f, const Json& chk, const std::string& own) {
    std::vector<const CtxEntry*> r{&f.contexts.at(own)};
    for (const auto& [k, v] : chk.items())
        if (v.is_string()) {
            auto it = f.objects.find(v.get<std::string>());
            if (it != f.objects.end() && !kCheckKeys.count(k)) r.push_back(&f.contexts.at(it->second.context));
        }
    return r;
}

}  // namespace

std::string ProblemError::describe(const std::string& source) const {
    std::ostringstream os;
    os << source;
    if (where.line > 0) os << ":" << where.line << ":" << where.column;
    os << ": " << kind() << ": " << what();
    if (!where.path.empty()) os << " (at " << where.path << ")";
    return os.str();
}

const std::string& ProblemFile::name() const { return impl_->name; }
const std::string& ProblemFile::source() const { return impl_->source; }
const Json& ProblemFile::document() const { return impl_->doc; }

std::vector<std::string> ProblemFile::check_ids() const {
    std::vector<std::string> r;
    for (const auto& c : impl_->doc["checks"]) r.push_back(c["id"].get<std::string>());
    return r;
}

bool FileReport::all_matched() const {
    for (const auto& c : checks)
        if (!c.matched) return false;
    return true;
}

std::vector<NamedGenerators> generator_sets(const ProblemFile& file) {
    const Impl& f = file.impl();
    std::vector<NamedGenerators> r;
    for (const auto& [name, o] : f.objects) {
        if (o.type != "generators") continue;
        NamedGenerators g{name, f.contexts.at(o.context).ctx, build_generators(f, o), {}};
        const Json& checks = f.doc["checks"];
        for (std::size_t i = 0; i < checks.size(); ++i) {
            const Json& chk = checks[i];
            if (chk["op"] != "invariant" || chk.value("generators", std::string()) != name ||
                chk.value("status", std::string("OK")) != "OK")
                continue;
            const CtxEntry& ce = f.contexts.at(f.check_contexts[i]);
            g.invariants.push_back(f.expr_text(ce, chk["expr"].get<std::string>(), "/checks/" + std::to_string(i) + "/expr", 0));
        }
        r.push_back(std::move(g));
    }
    return r;
}

std::vector<std::string> op_names() {
    std::vector<std::string> r;
    for (const auto& [k, v] : ops()) r.push_back(k);
    return r;
}

ProblemFile parse_problem(const std::string& text, const std::string& source) {
    auto impl = std::make_shared<Impl>();
    Impl& f = *impl;
    f.source = source;
    try {
        f.doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        int col = 0;
        int line = line_of(text, e.byte > 0 ? e.byte - 1 : 0, &col);
        std::string msg = e.what();
        if (auto k = msg.find("syntax error"); k != std::string::npos) msg = msg.substr(k);
        throw ProblemError("SyntaxError", msg, {"", line, col});
    }
    f.index = std::make_unique<LocationIndex>(text);
    f.object(f.doc, "");
    check_keys(f, f.doc, "", {"name", "description", "contexts", "objects", "checks"});
    if (f.doc.contains("name")) {
        if (!f.doc["name"].is_string()) f.fail("SyntaxError", "name must be a string", "/name");
        f.name = f.doc["name"].get<std::string>();
    } else {
        f.name = std::filesystem::path(source).stem().string();
    }
    if (f.doc.contains("description") && !f.doc["description"].is_string())
        f.fail("SyntaxError", "description must be a string", "/description");

    if (!f.doc.contains("contexts")) f.fail("SyntaxError", "missing field 'contexts'", "");
    for (const auto& [n, v] : f.object(f.doc["contexts"], "/contexts").items())
        build_context(f, n, v, "/contexts/" + pointer_token(n));

    if (f.doc.contains("objects")) {
        for (const auto& [n, v] : f.object(f.doc["objects"], "/objects").items()) {
            std::string p = "/objects/" + pointer_token(n);
            f.object(v, p);
            if (!v.contains("type") || !v["type"].is_string()) f.fail("SyntaxError", "object needs a 'type'", p);
            std::string type = v["type"].get<std::string>();
            if (!object_specs().count(type)) f.fail("SyntaxError", "unknown object type '" + type + "'", p + "/type");
            const CtxEntry& c = v.contains("context") ? context_named(f, v["context"], p + "/context")
                                                      : default_context(f, p);
            f.objects[n] = ObjectEntry{n, type, c.name, p, v, {}};
        }
        for (const auto& [n, o] : f.objects) {
            std::set<std::string> allowed{"type", "context", "note"};
            for (const auto& a : object_specs().at(o.type)) allowed.insert(a.name);
            check_keys(f, o.body, o.path, allowed);
            validate_args(f, f.contexts.at(o.context), o.body, o.path, object_specs().at(o.type));
            validate_extends(f, o);
            if (o.type == "section" && o.body.contains("map") == o.body.contains("jets"))
                f.fail("SyntaxError", "a section needs exactly one of 'map' and 'jets'", o.path);
        }
    }

    if (!f.doc.contains("checks")) f.fail("SyntaxError", "missing field 'checks'", "");
    const Json& checks = f.array(f.doc["checks"], "/checks");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        std::string p = "/checks/" + std::to_string(i);
        const Json& chk = f.object(checks[i], p);
        if (!chk.contains("id") || !chk["id"].is_string()) f.fail("SyntaxError", "check needs a string 'id'", p);
        if (!ids.insert(chk["id"].get<std::string>()).second)
            f.fail("SyntaxError", "duplicate check id '" + chk["id"].get<std::string>() + "'", p + "/id");
        if (!chk.contains("op") || !chk["op"].is_string()) f.fail("SyntaxError", "check needs a string 'op'", p);
        auto op = ops().find(chk["op"].get<std::string>());
        if (op == ops().end()) f.fail("SyntaxError", "unknown op '" + chk["op"].get<std::string>() + "'", p + "/op");
        std::set<std::string> allowed = kCheckKeys;
        for (const auto& a : op->second.args) allowed.insert(a.name);
        check_keys(f, chk, p, allowed);
        if (chk.contains("status")) {
            const Json& st = chk["status"];
            if (!st.is_string() || (st != "OK" && st != "FAIL" && st != "ERROR"))
                f.fail("SyntaxError", "status must be OK, FAIL or ERROR", p + "/status");
        }
        if (chk.contains("error") && !chk["error"].is_string()) f.fail("SyntaxError", "error must be a string", p + "/error");
        if (chk.contains("expect")) f.object(chk["expect"], p + "/expect");
        if (chk.contains("note") && !chk["note"].is_string()) f.fail("SyntaxError", "note must be a string", p + "/note");

        const CtxEntry* ctx = chk.contains("context") ? &context_named(f, chk["context"], p + "/context") : nullptr;
        for (const auto& a : op->second.args) {
            if (a.kind != Kind::Object || !chk.contains(a.name)) continue;
            std::string ap = p + "/" + pointer_token(a.name);
            const ObjectEntry& o = f.object_ref(chk[a.name], ap, a.object_type);
            const CtxEntry& oc = f.contexts.at(o.context);
            if (!ctx) {
                ctx = &oc;
            } else if (ctx != &oc && !op->second.multi_context) {
                f.fail("ContextMismatch", "object '" + o.name + "' lives in context '" + o.context + "', not '" +
                                              ctx->name + "'",
                       ap);
            }
        }
        if (!ctx) ctx = &default_context(f, p);
        validate_args(f, *ctx, chk, p, op->second.args);
        f.check_contexts.push_back(ctx->name);
    }
    return ProblemFile(impl);
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProblemError("SyntaxError", "cannot read file", {"", 0, 0});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), path);
}

std::string render(const ProblemFile& f) { return f.document().dump(2) + "\n"; }

FileReport run(const ProblemFile& file, const RunOptions& options) {
    const Impl& f = file.impl();
    FileReport rep;
    rep.source = f.source;
    rep.name = f.name;
    const Json& checks = f.doc["checks"];
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const Json& chk = checks[i];
        CheckOutcome out;
        out.id = chk["id"].get<std::string>();
        if (fnmatch(options.only.c_str(), out.id.c_str(), 0) != 0) continue;
        out.op = chk["op"].get<std::string>();
        out.expected_status = chk.value("status", std::string("OK"));
        out.expected_error = chk.value("error", std::string());
        const CtxEntry& ce = f.contexts.at(f.check_contexts[i]);
        auto t0 = std::chrono::steady_clock::now();
        try {
            if (options.max_order > 0)
                for (const CtxEntry* c : check_context_set(f, chk, ce.name))
                    if (c->ctx->max_order() > options.max_order)
                        throw OrderOverflow("context '" + c->name + "' has order " +
                                            std::to_string(c->ctx->max_order()) + " > " +
                                            std::to_string(options.max_order));
            Call call(f, ce, chk, "/checks/" + std::to_string(i));
            CheckReport r = ops().at(out.op).run(call);
            out.witness = r.witness;
            out.numbers = r.numbers;
            out.notes = r.notes;
            if (chk.contains("expect"))
                for (const auto& [k, want] : chk["expect"].items()) {
                    bool ok;
                    if (k == "witness") ok = same_value(f, ce, want, Json(out.witness));
                    else ok = out.numbers.contains(k) && same_value(f, ce, want, out.numbers[k]);
                    if (!ok) out.mismatches.push_back(k);
                }
            out.status = r.ok && out.mismatches.empty() ? "OK" : "FAIL";
        } catch (const Error& e) {
            out.status = "ERROR";
            out.error_kind = e.kind();
            out.error_message = e.what();
        } catch (const std::exception& e) {
            out.status = "ERROR";
            out.error_kind = "InternalError";
            out.error_message = e.what();
        }
        out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        out.matched = out.status == out.expected_status && out.mismatches.empty() &&
                      (out.expected_error.empty() || out.expected_error == out.error_kind);
        rep.checks.push_back(std::move(out));
    }
    return rep;
}

Json report_json(const std::vector<FileReport>& files, bool timing) {
    Json root = Json::object();
    Json fs = Json::array();
    int total = 0, ok = 0, fail = 0, err = 0, unexpected = 0;
    for (const auto& file : files) {
        Json fj = Json::object();
        fj["source"] = file.source;
        fj["name"] = file.name;
        Json cs = Json::array();
        for (const auto& c : file.checks) {
            Json cj = Json::object();
            cj["id"] = c.id;
            cj["op"] = c.op;
            cj["status"] = c.status;
            cj["expected"] = c.expected_status;
            cj["matched"] = c.matched;
            cj["witness"] = c.witness;
            cj["numbers"] = c.numbers;
            cj["notes"] = c.notes;
            cj["mismatches"] = c.mismatches;
            cj["error"] = c.error_kind.empty() ? Json(nullptr) : Json{{"kind", c.error_kind}, {"message", c.error_message}};
            if (timing) cj["timing_ms"] = std::round(c.millis * 1000) / 1000;
            cs.push_back(cj);
            ++total;
            if (c.status == "OK") ++ok;
            else if (c.status == "FAIL") ++fail;
            else ++err;
            if (!c.matched) ++unexpected;
        }
        fj["checks"] = cs;
        fs.push_back(fj);
    }
    root["files"] = fs;
    root["summary"] = {{"checks", total}, {"ok", ok}, {"fail", fail}, {"error", err}, {"unexpected", unexpected}};
    return root;
}

std::string report_text(const std::vector<FileReport>& files) {
    std::ostringstream os;
    int total = 0, unexpected = 0;
    for (const auto& file : files) {
        os << "== " << file.name << " (" << file.source << ")\n";
        for (const auto& c : file.checks) {
            ++total;
            std::string mark = c.matched ? "" : "  <-- expected " + c.expected_status;
            if (!c.matched) ++unexpected;
            char head[160];
            std::snprintf(head, sizeof head, "%-6s %-40s %-26s %9.1f ms", c.status.c_str(), c.id.c_str(), c.op.c_str(),
                          c.millis);
            os << head << mark << "\n";
            if (!c.error_kind.empty()) os << "       error: " << c.error_kind << ": " << c.error_message << "\n";
            if (!c.witness.empty()) os << "       witness: " << c.witness << "\n";
            if (!c.mismatches.empty()) {
                os << "       mismatched:";
                for (const auto& m : c.mismatches) os << " " << m;
                os << "\n";
            }
            for (const auto& [k, v] : c.numbers.items()) {
                if (k == "board") {
                    os << "       board:\n";
                    std::istringstream b(v.get<std::string>());
                    for (std::string line; std::getline(b, line);) os << "         " << line << "\n";
                    continue;
                }
                std::string shown = v.is_string() ? v.get<std::string>() : v.dump();
                if (shown.size() > 160) shown = shown.substr(0, 150) + " ... (" + std::to_string(shown.size()) + " chars)";
                os << "       " << k << " = " << shown << "\n";
            }
            for (const auto& n : c.notes)
                os << "       note: " << (n.size() > 160 ? n.substr(0, 150) + " ..." : n) << "\n";
        }
    }
    os << "checks: " << total << ", as expected: " << total - unexpected << ", unexpected: " << unexpected << "\n";
    return os.str();
}

}  // namespace vessiot
