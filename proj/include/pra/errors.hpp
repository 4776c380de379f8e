#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pra {

/// Precondition violated by a caller (bad arity, out-of-range value).
class argument_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid simulation or CLI configuration. Carries itemized diagnostics.
class config_error : public std::runtime_error
{
public:
    explicit config_error(const std::string& what,
                          std::vector<std::string> items = {})
      : std::runtime_error(what), m_items(std::move(items))
    {}

    const std::vector<std::string>& items() const { return m_items; }

private:
    std::vector<std::string> m_items;
};

/// Non-convergence, norm drift and similar numerical failures.
class numerical_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The requested projector leaves the central bin unreachable.
class degenerate_projector_error : public numerical_error
{
public:
    using numerical_error::numerical_error;
};

/// Measured amplitude-to-transfer map is unusable (non-monotone, out of range).
class calibration_error : public numerical_error
{
public:
    using numerical_error::numerical_error;
};

class io_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace pra
