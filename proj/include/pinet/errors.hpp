#pragma once

#include <stdexcept>
#include <string>

namespace pinet {

/// Shape or dimension mismatch between operands. The message names the
/// offending extents so callers can print it verbatim.
class shape_error : public std::invalid_argument {
public:
    explicit shape_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A symbolic expansion would exceed its coefficient-storage budget.
/// Carries the budget so front ends can report "skipped", not "failed".
class budget_error : public std::runtime_error {
public:
    budget_error(const std::string& what, std::size_t budget)
        : std::runtime_error(what), budget_(budget) {}
    std::size_t budget() const { return budget_; }

private:
    std::size_t budget_;
};

/// Corrupt or inconsistent on-disk state (bad magic, checksum mismatch,
/// truncated file, shape disagreeing with the embedded spec).
class integrity_error : public std::runtime_error {
public:
    explicit integrity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Training produced a non-finite loss or gradient.
class divergence_error : public std::runtime_error {
public:
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pinet
