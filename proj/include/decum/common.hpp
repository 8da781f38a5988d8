#pragma once

#include <stdexcept>
#include <string>

namespace decum {

// Invalid argument or violated precondition on user-supplied values.
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The whole-life annuity EPV does not exist for the requested weight/hazard.
class ill_defined_epv : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A gamma-law moment of order n requires shape alpha > n.
class undefined_moment : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed tabular input; row is 1-based and counts the header line.
class csv_error : public std::runtime_error {
public:
    csv_error(const std::string& msg, std::size_t row_)
        : std::runtime_error(msg + " (row " + std::to_string(row_) + ")"), row(row_) {}
    std::size_t row;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw input_error(msg);
}

} // namespace decum
