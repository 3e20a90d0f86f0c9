#include "camo/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <queue>
#include <sstream>

namespace camo {

namespace {

// Order matches the GateKind enum.
constexpr const char* kKindNames[] = {
    "and",      "nand",     "or",       "nor",       "xor",  "xnor",
    "not",      "buf",      "camomux2", "camomux4",  "camomux8",
    "camomux16",
};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool valid_ident(std::string_view s) {
    if (s.empty()) return false;
    unsigned char c0 = s[0];
    if (!std::isalpha(c0) && c0 != '_') return false;
    for (size_t i = 1; i < s.size(); ++i) {
        unsigned char c = s[i];
        if (!std::isalnum(c) && c != '_' && c != '$') return false;
    }
    return true;
}

bool is_reserved(std::string_view s) {
    std::string l = lower(s);
    if (l == "module" || l == "endmodule" || l == "input" || l == "output" ||
        l == "wire")
        return true;
    return kind_from_name(l).has_value();
}

}  // namespace

const char* kind_name(GateKind k) {
    return kKindNames[static_cast<size_t>(k)];
}

std::optional<GateKind> kind_from_name(std::string_view s) {
    std::string l = lower(s);
    for (size_t i = 0; i < std::size(kKindNames); ++i) {
        if (l == kKindNames[i]) return static_cast<GateKind>(i);
    }
    return std::nullopt;
}

bool is_camomux(GateKind k) {
    return k == GateKind::CamoMux2 || k == GateKind::CamoMux4 ||
           k == GateKind::CamoMux8 || k == GateKind::CamoMux16;
}

int camomux_width(GateKind k) {
    switch (k) {
        case GateKind::CamoMux2: return 2;
        case GateKind::CamoMux4: return 4;
        case GateKind::CamoMux8: return 8;
        case GateKind::CamoMux16: return 16;
        default: return 0;
    }
}

GateKind camomux_kind(int width) {
    switch (width) {
        case 2: return GateKind::CamoMux2;
        case 4: return GateKind::CamoMux4;
        case 8: return GateKind::CamoMux8;
        case 16: return GateKind::CamoMux16;
        default:
            throw Error("unsupported mux width " + std::to_string(width) +
                        " (valid: 2, 4, 8, 16)");
    }
}

bool arity_ok(GateKind k, size_t n_inputs) {
    switch (k) {
        case GateKind::Not:
        case GateKind::Buf:
            return n_inputs == 1;
        case GateKind::CamoMux2:
        case GateKind::CamoMux4:
        case GateKind::CamoMux8:
        case GateKind::CamoMux16:
            return n_inputs == static_cast<size_t>(camomux_width(k));
        default:
            return n_inputs >= 2;
    }
}

std::optional<NetId> Netlist::find_net(std::string_view name) const {
    auto it = net_index_.find(std::string(name));
    if (it == net_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<GateId> Netlist::find_gate(std::string_view instance) const {
    auto it = gate_index_.find(std::string(instance));
    if (it == gate_index_.end()) return std::nullopt;
    return it->second;
}

NetId Netlist::net_id(std::string_view name) const {
    auto id = find_net(name);
    if (!id) throw Error("unknown net '" + std::string(name) + "'");
    return *id;
}

NetlistBuilder::NetlistBuilder(std::string module_name) {
    if (!valid_ident(module_name) || is_reserved(module_name))
        throw ValidationError("invalid module name '" + module_name + "'");
    nl_.name_ = std::move(module_name);
}

NetId NetlistBuilder::declare(const std::string& name, bool pi, bool po) {
    if (finished_) throw Error("builder already finished");
    if (!valid_ident(name) || is_reserved(name))
        throw ValidationError("invalid net name '" + name + "'");
    if (nl_.net_index_.count(name))
        throw ValidationError("duplicate declaration of net '" + name + "'");
    NetId id = static_cast<NetId>(nl_.nets_.size());
    Net n;
    n.name = name;
    n.is_primary_input = pi;
    n.is_primary_output = po;
    nl_.nets_.push_back(std::move(n));
    nl_.net_index_.emplace(name, id);
    if (pi) nl_.inputs_.push_back(id);
    if (po) nl_.outputs_.push_back(id);
    return id;
}

NetId NetlistBuilder::add_primary_input(const std::string& name) {
    return declare(name, true, false);
}

NetId NetlistBuilder::add_wire(const std::string& name) {
    return declare(name, false, false);
}

NetId NetlistBuilder::add_primary_output(const std::string& name) {
    return declare(name, false, true);
}

bool NetlistBuilder::has_net(const std::string& name) const {
    return nl_.net_index_.count(name) > 0;
}

NetId NetlistBuilder::require(const std::string& name) const {
    auto it = nl_.net_index_.find(name);
    if (it == nl_.net_index_.end())
        throw ValidationError("undeclared net '" + name + "'");
    return it->second;
}

GateId NetlistBuilder::add_gate(GateKind kind, const std::string& instance,
                                const std::string& output,
                                const std::vector<std::string>& inputs) {
    if (finished_) throw Error("builder already finished");
    if (!valid_ident(instance) || is_reserved(instance))
        throw ValidationError("invalid instance name '" + instance + "'");
    if (nl_.gate_index_.count(instance))
        throw ValidationError("duplicate gate instance '" + instance + "'");
    if (!arity_ok(kind, inputs.size()))
        throw ValidationError("gate '" + instance + "' of type " +
                              kind_name(kind) + " cannot take " +
                              std::to_string(inputs.size()) + " inputs");
    NetId out = require(output);
    Net& on = nl_.nets_[out];
    if (on.is_primary_input)
        throw ValidationError("net '" + output +
                              "' is a primary input but is driven by gate '" +
                              instance + "'");
    if (on.driver)
        throw ValidationError("net '" + output + "' is multiply driven");

    GateId gid = static_cast<GateId>(nl_.gates_.size());
    Gate g;
    g.kind = kind;
    g.name = instance;
    g.output = out;
    g.inputs.reserve(inputs.size());
    for (size_t pin = 0; pin < inputs.size(); ++pin) {
        NetId in = require(inputs[pin]);
        g.inputs.push_back(in);
        nl_.nets_[in].sinks.push_back({gid, static_cast<uint32_t>(pin)});
    }
    on.driver = gid;
    nl_.gates_.push_back(std::move(g));
    nl_.gate_index_.emplace(instance, gid);
    return gid;
}

Netlist NetlistBuilder::finish() {
    if (finished_) throw Error("builder already finished");
    for (const Net& n : nl_.nets_) {
        if (!n.driver && !n.is_primary_input)
            throw ValidationError("net '" + n.name + "' is never driven");
        if (n.sinks.empty() && !n.is_primary_output)
            throw ValidationError("net '" + n.name + "' is never read");
    }
    topological_order(nl_);  // raises on combinational cycles
    finished_ = true;
    return std::move(nl_);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    enum Type { Ident, LParen, RParen, Comma, Semi, End } type;
    std::string text;
    int line = 0;
    int col = 0;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> toks;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') {
                advance(src[i]);
                ++i;
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(c);
            ++i;
            continue;
        }
        int tl = line, tc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size()) {
                unsigned char d = src[j];
                if (std::isalnum(d) || d == '_' || d == '$')
                    ++j;
                else
                    break;
            }
            toks.push_back(
                {Token::Ident, std::string(src.substr(i, j - i)), tl, tc});
            for (size_t k = i; k < j; ++k) advance(src[k]);
            i = j;
            continue;
        }
        Token::Type t;
        switch (c) {
            case '(': t = Token::LParen; break;
            case ')': t = Token::RParen; break;
            case ',': t = Token::Comma; break;
            case ';': t = Token::Semi; break;
            default:
                throw ParseError(std::string("unexpected character '") + c +
                                     "'",
                                 tl, tc);
        }
        toks.push_back({t, std::string(1, c), tl, tc});
        advance(c);
        ++i;
    }
    toks.push_back({Token::End, "", line, col});
    return toks;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    Netlist parse() {
        expect_keyword("module");
        Token name = expect_ident("module name");
        expect(Token::LParen, "'('");
        parse_name_list(ports_, "port");
        expect(Token::RParen, "')'");
        expect(Token::Semi, "';'");

        // Declarations and instances, in any order that declares nets before
        // their first use.
        while (true) {
            const Token& t = peek();
            if (t.type != Token::Ident)
                throw ParseError(
                    "expected declaration, gate instance, or 'endmodule'",
                    t.line, t.col);
            std::string l = lower(t.text);
            if (l == "endmodule") {
                ++pos_;
                break;
            }
            if (l == "input" || l == "output" || l == "wire") {
                parse_decl(l);
            } else if (kind_from_name(l)) {
                parse_instance(*kind_from_name(l));
            } else {
                throw ParseError("expected declaration, gate instance, or "
                                 "'endmodule', got '" +
                                     t.text + "'",
                                 t.line, t.col);
            }
        }
        const Token& tail = peek();
        if (tail.type != Token::End)
            throw ParseError("unexpected text after 'endmodule'", tail.line,
                             tail.col);

        check_ports();

        NetlistBuilder b(name.text);
        for (const auto& n : input_order_) b.add_primary_input(n);
        for (const auto& n : output_order_) b.add_primary_output(n);
        for (const auto& n : wire_order_) b.add_wire(n);
        for (const auto& inst : instances_)
            b.add_gate(inst.kind, inst.name, inst.output, inst.inputs);
        return b.finish();
    }

private:
    struct RawInstance {
        GateKind kind;
        std::string name;
        std::string output;
        std::vector<std::string> inputs;
    };

    const Token& peek() const { return toks_[pos_]; }

    const Token& expect(Token::Type t, const char* what) {
        const Token& tok = toks_[pos_];
        if (tok.type != t)
            throw ParseError(std::string("expected ") + what, tok.line,
                             tok.col);
        ++pos_;
        return tok;
    }

    Token expect_ident(const char* what) {
        const Token& tok = toks_[pos_];
        if (tok.type != Token::Ident)
            throw ParseError(std::string("expected ") + what, tok.line,
                             tok.col);
        if (is_reserved(tok.text))
            throw ParseError("reserved word '" + tok.text + "' used as " +
                                 what,
                             tok.line, tok.col);
        ++pos_;
        return tok;
    }

    void expect_keyword(const char* kw) {
        const Token& tok = toks_[pos_];
        if (tok.type != Token::Ident || lower(tok.text) != kw)
            throw ParseError(std::string("expected '") + kw + "'", tok.line,
                             tok.col);
        ++pos_;
    }

    void parse_name_list(std::vector<Token>& out, const char* what) {
        out.push_back(expect_ident(what));
        while (peek().type == Token::Comma) {
            ++pos_;
            out.push_back(expect_ident(what));
        }
    }

    void parse_decl(const std::string& dir) {
        ++pos_;  // the direction keyword
        std::vector<Token> names;
        parse_name_list(names, "net name");
        expect(Token::Semi, "';'");
        for (const Token& t : names) {
            auto [it, fresh] = decls_.emplace(t.text, dir);
            if (!fresh)
                throw ParseError("duplicate declaration of net '" + t.text +
                                     "'",
                                 t.line, t.col);
            if (dir == "input")
                input_order_.push_back(t.text);
            else if (dir == "output")
                output_order_.push_back(t.text);
            else
                wire_order_.push_back(t.text);
        }
    }

    void parse_instance(GateKind kind) {
        const Token& kw = toks_[pos_];
        ++pos_;
        Token inst = expect_ident("instance name");
        if (!instances_seen_.emplace(inst.text, 1).second)
            throw ParseError("duplicate gate instance '" + inst.text + "'",
                             inst.line, inst.col);
        expect(Token::LParen, "'('");
        std::vector<Token> conns;
        parse_name_list(conns, "net name");
        expect(Token::RParen, "')'");
        expect(Token::Semi, "';'");
        if (conns.size() < 2)
            throw ParseError("gate '" + inst.text +
                                 "' needs an output and at least one input",
                             kw.line, kw.col);
        if (!arity_ok(kind, conns.size() - 1))
            throw ParseError("gate '" + inst.text + "' of type " +
                                 kind_name(kind) + " cannot take " +
                                 std::to_string(conns.size() - 1) + " inputs",
                             kw.line, kw.col);
        for (const Token& t : conns) {
            auto it = decls_.find(t.text);
            if (it == decls_.end())
                throw ParseError("undeclared net '" + t.text + "'", t.line,
                                 t.col);
        }
        const Token& out = conns[0];
        if (decls_[out.text] == "input")
            throw ParseError("net '" + out.text +
                                 "' is a primary input but is driven by "
                                 "gate '" +
                                 inst.text + "'",
                             out.line, out.col);
        auto [dit, fresh] = drivers_.emplace(out.text, inst.text);
        if (!fresh)
            throw ParseError("net '" + out.text +
                                 "' is multiply driven (gates '" +
                                 dit->second + "' and '" + inst.text + "')",
                             out.line, out.col);
        RawInstance ri;
        ri.kind = kind;
        ri.name = inst.text;
        ri.output = out.text;
        for (size_t i = 1; i < conns.size(); ++i)
            ri.inputs.push_back(conns[i].text);
        instances_.push_back(std::move(ri));
    }

    void check_ports() {
        std::unordered_map<std::string, int> port_count;
        for (const Token& p : ports_) {
            if (++port_count[p.text] > 1)
                throw ParseError("duplicate port '" + p.text + "'", p.line,
                                 p.col);
            auto it = decls_.find(p.text);
            if (it == decls_.end() || it->second == "wire")
                throw ParseError("port '" + p.text +
                                     "' has no input or output declaration",
                                 p.line, p.col);
        }
        for (const auto& n : input_order_)
            if (!port_count.count(n))
                throw ParseError("input '" + n +
                                     "' does not appear in the port list",
                                 1, 1);
        for (const auto& n : output_order_)
            if (!port_count.count(n))
                throw ParseError("output '" + n +
                                     "' does not appear in the port list",
                                 1, 1);
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    std::vector<Token> ports_;
    std::unordered_map<std::string, std::string> decls_;  // name -> direction
    std::vector<std::string> input_order_;
    std::vector<std::string> output_order_;
    std::vector<std::string> wire_order_;
    std::unordered_map<std::string, std::string> drivers_;
    std::vector<RawInstance> instances_;
    std::unordered_map<std::string, char> instances_seen_;
};

}  // namespace

Netlist parse_netlist(std::string_view source) {
    return Parser(source).parse();
}

Netlist read_netlist_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open netlist file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_netlist(ss.str());
}

// ---------------------------------------------------------------------------
// Emission

namespace {

void emit_wrapped(std::ostringstream& out, const std::string& head,
                  const std::vector<std::string>& names,
                  const std::string& tail) {
    out << head;
    size_t col = head.size();
    for (size_t i = 0; i < names.size(); ++i) {
        std::string piece = (i == 0) ? names[i] : ", " + names[i];
        if (i != 0 && col + piece.size() > 96) {
            out << ",\n    ";
            col = 4;
            piece = names[i];
        }
        out << piece;
        col += piece.size();
    }
    out << tail << "\n";
}

}  // namespace

std::string emit_netlist(const Netlist& nl) {
    std::ostringstream out;
    std::vector<std::string> ports;
    for (NetId id : nl.primary_inputs()) ports.push_back(nl.net(id).name);
    for (NetId id : nl.primary_outputs()) ports.push_back(nl.net(id).name);
    emit_wrapped(out, "module " + nl.name() + " (", ports, ");");

    std::vector<std::string> ins, outs, wires;
    for (const Net& n : nl.nets()) {
        if (n.is_primary_input)
            ins.push_back(n.name);
        else if (n.is_primary_output)
            outs.push_back(n.name);
        else
            wires.push_back(n.name);
    }
    if (!ins.empty()) emit_wrapped(out, "input ", ins, ";");
    if (!outs.empty()) emit_wrapped(out, "output ", outs, ";");
    if (!wires.empty()) emit_wrapped(out, "wire ", wires, ";");

    for (GateId gid : topological_order(nl)) {
        const Gate& g = nl.gate(gid);
        std::vector<std::string> conns;
        conns.push_back(nl.net(g.output).name);
        for (NetId in : g.inputs) conns.push_back(nl.net(in).name);
        emit_wrapped(out,
                     std::string(kind_name(g.kind)) + " " + g.name + " (",
                     conns, ");");
    }
    out << "endmodule\n";
    return out.str();
}

void write_netlist_file(const Netlist& nl, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write netlist file '" + path + "'");
    out << emit_netlist(nl);
    if (!out) throw Error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Graph utilities

std::vector<GateId> topological_order(const Netlist& nl) {
    const auto& gates = nl.gates();
    std::vector<uint32_t> indegree(gates.size(), 0);
    for (size_t g = 0; g < gates.size(); ++g) {
        for (NetId in : gates[g].inputs)
            if (nl.net(in).driver) ++indegree[g];
    }
    auto by_name = [&](GateId a, GateId b) {
        return gates[a].name > gates[b].name;  // min-heap by instance name
    };
    std::priority_queue<GateId, std::vector<GateId>, decltype(by_name)> ready(
        by_name);
    for (size_t g = 0; g < gates.size(); ++g)
        if (indegree[g] == 0) ready.push(static_cast<GateId>(g));

    std::vector<GateId> order;
    order.reserve(gates.size());
    while (!ready.empty()) {
        GateId g = ready.top();
        ready.pop();
        order.push_back(g);
        for (const NetSink& s : nl.net(gates[g].output).sinks)
            if (--indegree[s.gate] == 0) ready.push(s.gate);
    }
    if (order.size() == gates.size()) return order;

    // Extract one cycle among the unfinished gates for the error message.
    std::vector<int> color(gates.size(), 0);  // 0 white, 1 on stack, 2 done
    std::vector<GateId> stack;
    std::string desc;
    auto dfs = [&](auto&& self, GateId g) -> bool {
        color[g] = 1;
        stack.push_back(g);
        for (const NetSink& s : nl.net(gates[g].output).sinks) {
            GateId h = s.gate;
            if (color[h] == 1) {
                auto it = std::find(stack.begin(), stack.end(), h);
                for (auto j = it; j != stack.end(); ++j)
                    desc += gates[*j].name + " -> ";
                desc += gates[h].name;
                return true;
            }
            if (color[h] == 0 && self(self, h)) return true;
        }
        color[g] = 2;
        stack.pop_back();
        return false;
    };
    for (size_t g = 0; g < gates.size() && desc.empty(); ++g)
        if (indegree[g] > 0 && color[g] == 0) dfs(dfs, static_cast<GateId>(g));
    throw ValidationError("combinational cycle: " + desc);
}

std::vector<NetId> transitive_fanout(const Netlist& nl, NetId from) {
    std::vector<char> seen(nl.nets().size(), 0);
    std::vector<NetId> queue{from};
    while (!queue.empty()) {
        NetId n = queue.back();
        queue.pop_back();
        for (const NetSink& s : nl.net(n).sinks) {
            NetId out = nl.gate(s.gate).output;
            if (!seen[out]) {
                seen[out] = 1;
                queue.push_back(out);
            }
        }
    }
    std::vector<NetId> result;
    for (NetId id = 0; id < seen.size(); ++id)
        if (seen[id] && id != from) result.push_back(id);
    return result;
}

bool structurally_identical(const Netlist& a, const Netlist& b) {
    auto names = [](const Netlist& nl, const std::vector<NetId>& ids) {
        std::vector<std::string> out;
        for (NetId id : ids) out.push_back(nl.net(id).name);
        return out;
    };
    if (names(a, a.primary_inputs()) != names(b, b.primary_inputs()))
        return false;
    if (names(a, a.primary_outputs()) != names(b, b.primary_outputs()))
        return false;
    if (a.nets().size() != b.nets().size()) return false;
    for (const Net& n : a.nets())
        if (!b.find_net(n.name)) return false;
    if (a.gates().size() != b.gates().size()) return false;
    for (const Gate& ga : a.gates()) {
        auto gid = b.find_gate(ga.name);
        if (!gid) return false;
        const Gate& gb = b.gate(*gid);
        if (ga.kind != gb.kind) return false;
        if (b.net(gb.output).name != a.net(ga.output).name) return false;
        if (ga.inputs.size() != gb.inputs.size()) return false;
        for (size_t i = 0; i < ga.inputs.size(); ++i)
            if (a.net(ga.inputs[i]).name != b.net(gb.inputs[i]).name)
                return false;
    }
    return true;
}

}  // namespace camo
