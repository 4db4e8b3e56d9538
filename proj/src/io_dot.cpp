#include <cctype>
#include <string>
#include <vector>

#include "callrisk/errors.hpp"
#include "callrisk/io.hpp"

namespace callrisk {
namespace {

enum class Tok {
    ident,     // bare id, quoted string, numeral or HTML string
    lbrace,    // {
    rbrace,    // }
    lbracket,  // [
    rbracket,  // ]
    semi,
    comma,
    equals,
    colon,
    arrow,      // ->
    undirected, // --
    end
};

struct Token {
    Tok kind = Tok::end;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_trivia();
        Token t;
        t.line = line_;
        t.col = col_;
        if (eof()) {
            t.kind = Tok::end;
            return t;
        }
        char c = peek();
        switch (c) {
            case '{': advance(); t.kind = Tok::lbrace; return t;
            case '}': advance(); t.kind = Tok::rbrace; return t;
            case '[': advance(); t.kind = Tok::lbracket; return t;
            case ']': advance(); t.kind = Tok::rbracket; return t;
            case ';': advance(); t.kind = Tok::semi; return t;
            case ',': advance(); t.kind = Tok::comma; return t;
            case '=': advance(); t.kind = Tok::equals; return t;
            case ':': advance(); t.kind = Tok::colon; return t;
            default: break;
        }
        if (c == '-') {
            advance();
            if (!eof() && peek() == '>') {
                advance();
                t.kind = Tok::arrow;
                return t;
            }
            if (!eof() && peek() == '-') {
                advance();
                t.kind = Tok::undirected;
                return t;
            }
            if (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
                t.kind = Tok::ident;
                t.text = "-";
                lex_bare(t.text);
                return t;
            }
            throw ParseError("stray '-'", t.line, t.col);
        }
        if (c == '"') {
            t.kind = Tok::ident;
            t.text = lex_quoted();
            return t;
        }
        if (c == '<') {
            t.kind = Tok::ident;
            t.text = lex_html();
            return t;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
            t.kind = Tok::ident;
            lex_bare(t.text);
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.col);
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia() {
        while (!eof()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (!eof() && peek() != '\n') advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                int line = line_, col = col_;
                advance();
                advance();
                while (true) {
                    if (eof()) throw ParseError("unterminated block comment", line, col);
                    if (peek() == '*' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                        advance();
                        advance();
                        break;
                    }
                    advance();
                }
            } else if (c == '#' && col_ == 1) {
                // DOT treats full lines starting with '#' as preprocessor output.
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    void lex_bare(std::string& out) {
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                out.push_back(c);
                advance();
            } else {
                break;
            }
        }
    }

    std::string lex_quoted() {
        int line = line_, col = col_;
        advance();  // opening quote
        std::string out;
        while (true) {
            if (eof()) throw ParseError("unterminated quoted string", line, col);
            char c = peek();
            if (c == '"') {
                advance();
                return out;
            }
            if (c == '\\') {
                advance();
                if (eof()) throw ParseError("unterminated escape", line, col);
                char esc = peek();
                if (esc == '\n') {
                    advance();  // line continuation
                    continue;
                }
                if (esc == '"' || esc == '\\') {
                    out.push_back(esc);
                } else {
                    // Graphviz keeps unknown escapes verbatim.
                    out.push_back('\\');
                    out.push_back(esc);
                }
                advance();
                continue;
            }
            out.push_back(c);
            advance();
        }
    }

    std::string lex_html() {
        int line = line_, col = col_;
        std::string out;
        int depth = 0;
        do {
            if (eof()) throw ParseError("unterminated HTML string", line, col);
            char c = peek();
            if (c == '<') ++depth;
            if (c == '>') --depth;
            out.push_back(c);
            advance();
        } while (depth > 0);
        return out;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool iequals(const std::string& a, const char* b) {
    std::size_t i = 0;
    for (; i < a.size() && b[i]; ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) != b[i]) return false;
    return i == a.size() && b[i] == '\0';
}

class DotParser {
public:
    explicit DotParser(const std::string& text) : lexer_(text) { shift(); }

    CallGraph parse() {
        expect_ident();
        if (iequals(cur_.text, "strict")) shift();
        if (cur_.kind != Tok::ident) fail("expected 'digraph'");
        if (iequals(cur_.text, "graph"))
            throw UnsupportedFormatError(
                "undirected 'graph' input is not supported; expected a digraph");
        if (!iequals(cur_.text, "digraph")) fail("expected 'digraph'");
        shift();
        if (cur_.kind == Tok::ident) shift();  // optional graph name
        expect(Tok::lbrace, "expected '{'");
        parse_stmt_list();
        expect(Tok::end, "trailing content after closing '}'");
        return builder_.build();
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, cur_.line, cur_.col); }

    void shift() { cur_ = lexer_.next(); }

    void expect(Tok kind, const char* msg) {
        if (cur_.kind != kind) fail(msg);
        shift();
    }

    void expect_ident() {
        if (cur_.kind != Tok::ident) fail("expected an identifier");
    }

    // Consumes statements until the matching '}'.
    void parse_stmt_list() {
        while (true) {
            if (cur_.kind == Tok::rbrace) {
                shift();
                return;
            }
            if (cur_.kind == Tok::end) fail("unexpected end of input; missing '}'");
            parse_stmt();
            while (cur_.kind == Tok::semi) shift();
        }
    }

    void parse_stmt() {
        if (cur_.kind == Tok::lbrace) {  // anonymous subgraph
            shift();
            parse_stmt_list();
            return;
        }
        expect_ident();
        if (iequals(cur_.text, "subgraph")) {
            shift();
            if (cur_.kind == Tok::ident) shift();  // optional subgraph name
            expect(Tok::lbrace, "expected '{' after subgraph");
            parse_stmt_list();
            return;
        }
        if (iequals(cur_.text, "graph") || iequals(cur_.text, "node") ||
            iequals(cur_.text, "edge")) {
            // Default-attribute statement; tolerated and discarded.
            shift();
            parse_attr_lists(nullptr);
            return;
        }

        std::string first = cur_.text;
        shift();

        if (cur_.kind == Tok::equals) {  // bare graph attribute: key = value
            shift();
            expect_ident();
            shift();
            return;
        }

        skip_port();

        if (cur_.kind == Tok::undirected)
            fail("undirected edge '--' is not valid in a digraph");

        if (cur_.kind == Tok::arrow) {
            std::string prev = first;
            while (cur_.kind == Tok::arrow) {
                shift();
                expect_ident();
                if (iequals(cur_.text, "subgraph"))
                    fail("subgraph edge endpoints are not supported");
                std::string next = cur_.text;
                shift();
                skip_port();
                builder_.add_edge(prev, next, 1);
                prev = next;
            }
            parse_attr_lists(nullptr);  // edge attributes discarded
            return;
        }

        // Node statement; keep only the label attribute.
        std::string label;
        parse_attr_lists(&label);
        builder_.add_node(first, label);
    }

    // node_id ':' port (':' compass)? -- tolerated and ignored.
    void skip_port() {
        while (cur_.kind == Tok::colon) {
            shift();
            expect_ident();
            shift();
        }
    }

    void parse_attr_lists(std::string* label_out) {
        while (cur_.kind == Tok::lbracket) {
            shift();
            while (cur_.kind != Tok::rbracket) {
                expect_ident();
                std::string key = cur_.text;
                shift();
                std::string value;
                if (cur_.kind == Tok::equals) {
                    shift();
                    expect_ident();
                    value = cur_.text;
                    shift();
                }
                if (label_out && iequals(key, "label")) *label_out = value;
                if (cur_.kind == Tok::comma || cur_.kind == Tok::semi) shift();
            }
            shift();  // ]
        }
    }

    Lexer lexer_;
    Token cur_;
    CallGraph::Builder builder_;
};

}  // namespace

CallGraph parse_dot(const std::string& text) { return DotParser(text).parse(); }

}  // namespace callrisk
