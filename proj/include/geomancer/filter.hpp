#pragma once

// Tag filters: boolean expressions over string-valued geometry attributes.
//
//   expr := term (("and" | "or") term)*      "and" binds tighter than "or"
//   term := "not"? atom
//   atom := key "=" value | "*" | "(" expr ")" | word
//
// Keys and values are bare words or double-quoted strings. A lone word W is
// shorthand for fclass=W, the POI class column of OSM extracts.

#include "geomancer/error.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geomancer {

using Tags = std::map<std::string, std::string, std::less<>>;

inline constexpr std::string_view kShorthandKey = "fclass";

class TagFilter {
  public:
    enum class Op { any, eq, negate, both, either };

    TagFilter() : node_(std::make_shared<const Node>(Node{Op::any, {}, {}, {}, {}})) {}

    static TagFilter any() { return TagFilter(); }

    static TagFilter eq(std::string key, std::string value)
    {
        if (key.empty())
            throw Error(ErrorKind::validation, "tag filter key must be non-empty");
        return TagFilter(Node{Op::eq, std::move(key), std::move(value), {}, {}});
    }

    static TagFilter negate(TagFilter operand) { return TagFilter(Node{Op::negate, {}, {}, std::move(operand.node_), {}}); }

    static TagFilter both(TagFilter lhs, TagFilter rhs)
    {
        return TagFilter(Node{Op::both, {}, {}, std::move(lhs.node_), std::move(rhs.node_)});
    }

    static TagFilter either(TagFilter lhs, TagFilter rhs)
    {
        return TagFilter(Node{Op::either, {}, {}, std::move(lhs.node_), std::move(rhs.node_)});
    }

    Op op() const { return node_->op; }
    const std::string& key() const { return node_->key; }
    const std::string& value() const { return node_->value; }
    /// Operand of `negate`, left side of `both`/`either`.
    TagFilter lhs() const { return TagFilter(node_->lhs); }
    TagFilter rhs() const { return TagFilter(node_->rhs); }

    bool matches(const Tags& tags) const { return eval(*node_, tags); }

    /// Canonical text form; parse_filter(to_string()) reproduces this tree.
    std::string to_string() const
    {
        std::string out;
        print(*node_, out);
        return out;
    }

    /// Tag value for single-comparison filters, used to derive feature names.
    std::optional<std::string> single_tag() const
    {
        if (op() == Op::eq)
            return value();
        return std::nullopt;
    }

    friend bool operator==(const TagFilter& a, const TagFilter& b) { return equal(*a.node_, *b.node_); }

  private:
    struct Node {
        Op op;
        std::string key;
        std::string value;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    explicit TagFilter(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}
    explicit TagFilter(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static bool eval(const Node& n, const Tags& tags)
    {
        switch (n.op) {
        case Op::any: return true;
        case Op::eq: {
            auto it = tags.find(n.key);
            return it != tags.end() && it->second == n.value;
        }
        case Op::negate: return !eval(*n.lhs, tags);
        case Op::both: return eval(*n.lhs, tags) && eval(*n.rhs, tags);
        case Op::either: return eval(*n.lhs, tags) || eval(*n.rhs, tags);
        }
        return false;
    }

    static bool equal(const Node& a, const Node& b)
    {
        if (a.op != b.op)
            return false;
        switch (a.op) {
        case Op::any: return true;
        case Op::eq: return a.key == b.key && a.value == b.value;
        case Op::negate: return equal(*a.lhs, *b.lhs);
        case Op::both:
        case Op::either: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
        }
        return false;
    }

    static int precedence(Op op)
    {
        switch (op) {
        case Op::either: return 1;
        case Op::both: return 2;
        default: return 3;
        }
    }

    static void print(const Node& n, std::string& out)
    {
        switch (n.op) {
        case Op::any: out += '*'; return;
        case Op::eq:
            out += quote_if_needed(n.key);
            out += '=';
            out += quote_if_needed(n.value);
            return;
        case Op::negate:
            out += "not ";
            print_wrapped(*n.lhs, precedence(n.lhs->op) < 3 || n.lhs->op == Op::negate, out);
            return;
        case Op::both:
        case Op::either: {
            const int prec = precedence(n.op);
            // Left-associative: equal precedence on the right needs parentheses.
            print_wrapped(*n.lhs, precedence(n.lhs->op) < prec, out);
            out += n.op == Op::both ? " and " : " or ";
            print_wrapped(*n.rhs, precedence(n.rhs->op) <= prec, out);
            return;
        }
        }
    }

    static void print_wrapped(const Node& n, bool parens, std::string& out)
    {
        if (parens)
            out += '(';
        print(n, out);
        if (parens)
            out += ')';
    }

  public:
    static bool is_keyword(std::string_view w) { return w == "and" || w == "or" || w == "not"; }

    static bool is_bare_char(char c)
    {
        return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != '=' &&
               c != '"' && c != '*' && c != '\\';
    }

    static std::string quote_if_needed(std::string_view s)
    {
        bool bare = !s.empty() && !is_keyword(s);
        for (char c : s)
            bare = bare && is_bare_char(c);
        if (bare)
            return std::string(s);
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\')
                q += '\\';
            q += c;
        }
        q += '"';
        return q;
    }

  private:
    std::shared_ptr<const Node> node_;
};

inline bool eval_filter(const TagFilter& filter, const Tags& tags) { return filter.matches(tags); }

namespace detail {

class FilterParser {
  public:
    explicit FilterParser(std::string_view text) : text_(text) {}

    TagFilter parse()
    {
        skip_space();
        if (pos_ == text_.size())
            throw Error(ErrorKind::parse, "empty filter expression");
        TagFilter result = parse_or();
        skip_space();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return result;
    }

  private:
    struct Token {
        enum class Kind { end, lparen, rparen, equals, star, word, string } kind;
        std::string text;
        std::size_t pos;
    };

    [[noreturn]] void fail(const std::string& what, std::optional<std::size_t> at = std::nullopt) const
    {
        throw Error(ErrorKind::parse,
                    "filter syntax error at position " + std::to_string(at.value_or(pos_)) + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    Token peek()
    {
        const std::size_t saved = pos_;
        Token t = next();
        pos_ = saved;
        return t;
    }

    Token next()
    {
        skip_space();
        const std::size_t start = pos_;
        if (pos_ == text_.size())
            return {Token::Kind::end, {}, start};
        const char c = text_[pos_];
        switch (c) {
        case '(': ++pos_; return {Token::Kind::lparen, "(", start};
        case ')': ++pos_; return {Token::Kind::rparen, ")", start};
        case '=': ++pos_; return {Token::Kind::equals, "=", start};
        case '*': ++pos_; return {Token::Kind::star, "*", start};
        case '"': return {Token::Kind::string, read_quoted(), start};
        default: break;
        }
        while (pos_ < text_.size() && TagFilter::is_bare_char(text_[pos_]))
            ++pos_;
        if (pos_ == start)
            fail(std::string("unexpected character '") + c + "'");
        return {Token::Kind::word, std::string(text_.substr(start, pos_ - start)), start};
    }

    std::string read_quoted()
    {
        const std::size_t open = pos_++;
        std::string out;
        while (pos_ < text_.size()) {
            const char c = text_[pos_++];
            if (c == '"')
                return out;
            if (c == '\\') {
                if (pos_ == text_.size())
                    break;
                out += text_[pos_++];
                continue;
            }
            out += c;
        }
        fail("unterminated string", open);
    }

    bool at_keyword(std::string_view kw)
    {
        Token t = peek();
        return t.kind == Token::Kind::word && t.text == kw;
    }

    TagFilter parse_or()
    {
        TagFilter left = parse_and();
        while (at_keyword("or")) {
            next();
            left = TagFilter::either(std::move(left), parse_and());
        }
        return left;
    }

    TagFilter parse_and()
    {
        TagFilter left = parse_term();
        while (at_keyword("and")) {
            next();
            left = TagFilter::both(std::move(left), parse_term());
        }
        return left;
    }

    TagFilter parse_term()
    {
        if (at_keyword("not")) {
            next();
            return TagFilter::negate(parse_atom());
        }
        return parse_atom();
    }

    TagFilter parse_atom()
    {
        Token t = next();
        switch (t.kind) {
        case Token::Kind::lparen: {
            TagFilter inner = parse_or();
            Token close = next();
            if (close.kind != Token::Kind::rparen)
                fail("expected ')'", close.pos);
            return inner;
        }
        case Token::Kind::star: return TagFilter::any();
        case Token::Kind::word:
            if (TagFilter::is_keyword(t.text))
                fail("unexpected keyword '" + t.text + "'", t.pos);
            [[fallthrough]];
        case Token::Kind::string: {
            if (peek().kind != Token::Kind::equals)
                return TagFilter::eq(std::string(kShorthandKey), t.text);
            next();
            Token value = next();
            if (value.kind != Token::Kind::word && value.kind != Token::Kind::string)
                fail("expected a value after '='", value.pos);
            if (value.kind == Token::Kind::word && TagFilter::is_keyword(value.text))
                fail("keyword '" + value.text + "' must be quoted to be used as a value", value.pos);
            if (t.text.empty())
                fail("empty key", t.pos);
            return TagFilter::eq(t.text, value.text);
        }
        case Token::Kind::end: fail("unexpected end of expression", t.pos);
        default: fail("unexpected '" + t.text + "'", t.pos);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline TagFilter parse_filter(std::string_view expr) { return detail::FilterParser(expr).parse(); }

} // namespace geomancer
