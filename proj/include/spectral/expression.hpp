#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace spectral {

class expression_error : public std::invalid_argument {
public:
    explicit expression_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Small arithmetic expression over variables x, y, z with +, -, *, /, ^,
/// tanh, sqrt, abs and numeric constants; parsed by recursive descent.
/// Covers every kernel and drift used by the experiment configs.
class Expression {
public:
    static Expression parse(const std::string& src);

    double eval(double x, double y = 0.0, double z = 0.0) const;
    const std::string& source() const { return source_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

} // namespace spectral
