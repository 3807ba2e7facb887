#pragma once

#include <stdexcept>
#include <string>

namespace ordres {

// Infeasibility-type failures map to CLI exit code 2; everything else is 1.
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

class degenerate_row_error : public infeasible_error {
public:
    degenerate_row_error(const std::string& what, int row)
        : infeasible_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    int row() const { return row_; }

private:
    int row_;
};

class inconsistent_bounds_error : public infeasible_error {
public:
    using infeasible_error::infeasible_error;
};

class infeasible_row_error : public infeasible_error {
public:
    infeasible_row_error(const std::string& what, int row)
        : infeasible_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    int row() const { return row_; }

private:
    int row_;
};

class not_in_feasible_set_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ordres
