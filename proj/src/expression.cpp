#include "spectral/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace spectral {

struct Expression::Node {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Tanh, Sqrt, Abs };
    Op op = Op::Const;
    double value = 0.0;
    int var = 0; // 0=x 1=y 2=z
    std::shared_ptr<const Node> a, b;

    double eval(double x, double y, double z) const
    {
        switch (op) {
        case Op::Const: return value;
        case Op::Var: return var == 0 ? x : (var == 1 ? y : z);
        case Op::Add: return a->eval(x, y, z) + b->eval(x, y, z);
        case Op::Sub: return a->eval(x, y, z) - b->eval(x, y, z);
        case Op::Mul: return a->eval(x, y, z) * b->eval(x, y, z);
        case Op::Div: return a->eval(x, y, z) / b->eval(x, y, z);
        case Op::Pow: return std::pow(a->eval(x, y, z), b->eval(x, y, z));
        case Op::Neg: return -a->eval(x, y, z);
        case Op::Tanh: return std::tanh(a->eval(x, y, z));
        case Op::Sqrt: return std::sqrt(a->eval(x, y, z));
        case Op::Abs: return std::abs(a->eval(x, y, z));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse()
    {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw expression_error("expression: trailing input at '" + s_.substr(pos_) + "'");
        return e;
    }

private:
    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c)
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek()
    {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr()
    {
        NodePtr e = term();
        while (true) {
            if (eat('+'))
                e = make(Node::Op::Add, e, term());
            else if (eat('-'))
                e = make(Node::Op::Sub, e, term());
            else
                return e;
        }
    }

    NodePtr term()
    {
        NodePtr e = factor();
        while (true) {
            if (eat('*'))
                e = make(Node::Op::Mul, e, factor());
            else if (eat('/'))
                e = make(Node::Op::Div, e, factor());
            else
                return e;
        }
    }

    NodePtr factor()
    {
        NodePtr base = unary();
        if (eat('^')) return make(Node::Op::Pow, base, factor()); // right assoc
        return base;
    }

    NodePtr unary()
    {
        if (eat('-')) return make(Node::Op::Neg, unary());
        return primary();
    }

    NodePtr primary()
    {
        skip_ws();
        if (pos_ >= s_.size()) throw expression_error("expression: unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        if (eat('(')) {
            NodePtr e = expr();
            if (!eat(')')) throw expression_error("expression: missing ')'");
            return e;
        }
        throw expression_error(std::string("expression: unexpected character '") + c + "'");
    }

    NodePtr number()
    {
        const char* start = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        if (end == start) throw expression_error("expression: bad number");
        pos_ += static_cast<std::size_t>(end - start);
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Const;
        n->value = v;
        return n;
    }

    NodePtr ident()
    {
        std::size_t start = pos_;
        while (pos_ < s_.size()
               && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "x" || name == "y" || name == "z") {
            auto n = std::make_shared<Node>();
            n->op = Node::Op::Var;
            n->var = name == "x" ? 0 : (name == "y" ? 1 : 2);
            return n;
        }
        Node::Op op;
        if (name == "tanh")
            op = Node::Op::Tanh;
        else if (name == "sqrt")
            op = Node::Op::Sqrt;
        else if (name == "abs")
            op = Node::Op::Abs;
        else
            throw expression_error("expression: unknown identifier '" + name + "'");
        if (!eat('(')) throw expression_error("expression: '" + name + "' needs '('");
        NodePtr arg = expr();
        if (!eat(')')) throw expression_error("expression: missing ')' after " + name);
        return make(op, arg);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

} // namespace

Expression Expression::parse(const std::string& src)
{
    Expression e;
    e.root_ = Parser(src).parse();
    e.source_ = src;
    return e;
}

double Expression::eval(double x, double y, double z) const
{
    return root_->eval(x, y, z);
}

} // namespace spectral
